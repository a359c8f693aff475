#include "ddibp/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "ddibp/parallel.hpp"
#include "ddibp/stats.hpp"

namespace ddibp {

Eigen::MatrixXd SharingStats::fraction_zero_diagonal() const {
  Eigen::MatrixXd out = fraction;
  out.diagonal().setZero();
  return out;
}

SharingStats sharing_stats(const FeatureMatrix& z) {
  const int n = z.n();
  SharingStats s;
  s.r_pair = z.z * z.z.transpose();
  s.r = s.r_pair.diagonal();
  s.fraction.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s.fraction(i, j) = s.r(i) > 0 ? static_cast<double>(s.r_pair(i, j)) / s.r(i) : 0.0;
    }
  }
  return s;
}

namespace {

// Reach sets for one connection configuration: for each owner n, which
// customers reach n (bitmask). The owner's own edge is ignored per dish.
void reach_masks(int n, const int* edges, std::uint32_t* mask_by_owner) {
  for (int owner = 0; owner < n; ++owner) {
    std::uint32_t reached = 1u << owner;
    // Iterate to fixpoint; out-degree one keeps this cheap for small n.
    bool grew = true;
    while (grew) {
      grew = false;
      for (int i = 0; i < n; ++i) {
        if (i == owner || (reached >> i) & 1u) continue;
        if ((reached >> edges[i]) & 1u) {
          reached |= 1u << i;
          grew = true;
        }
      }
    }
    mask_by_owner[owner] = reached;
  }
}

}  // namespace

ReachProbs reach_probs_exact(const ProximityMatrix& a) {
  const int n = a.n();
  if (n > 7) {
    throw std::domain_error("reach_probs_exact: N > 7 enumeration refused; use reach_probs_mc");
  }
  ReachProbs probs;
  probs.p_single = Eigen::MatrixXd::Zero(n, n);
  probs.p_pair.assign(n, Eigen::MatrixXd::Zero(n, n));

  std::vector<int> config(n, 0);
  std::vector<std::uint32_t> masks(n);
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= n;

  for (long long it = 0; it < total; ++it) {
    long long c = it;
    double weight = 1.0;
    for (int i = 0; i < n; ++i) {
      config[i] = static_cast<int>(c % n);
      c /= n;
      weight *= a(i, config[i]);
    }
    if (weight == 0.0) continue;
    reach_masks(n, config.data(), masks.data());
    for (int owner = 0; owner < n; ++owner) {
      const std::uint32_t m = masks[owner];
      for (int i = 0; i < n; ++i) {
        if (!((m >> i) & 1u)) continue;
        probs.p_single(i, owner) += weight;
        for (int j = 0; j < n; ++j) {
          if ((m >> j) & 1u) probs.p_pair[owner](i, j) += weight;
        }
      }
    }
  }
  return probs;
}

ReachProbs reach_probs_mc(const ProximityMatrix& a, long long draws, std::uint64_t seed,
                          int threads) {
  const int n = a.n();
  if (n > 31) throw std::domain_error("reach_probs_mc: N too large for mask representation");
  // Per-draw masks into preallocated slots, reduced sequentially afterwards:
  // identical result for any thread count.
  std::vector<std::uint32_t> masks_all(static_cast<std::size_t>(draws) * n);
  parallel_for(
      draws,
      [&](long long d) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(d));
        std::vector<int> config(n);
        for (int i = 0; i < n; ++i) config[i] = rng.categorical_row(a.matrix(), i);
        reach_masks(n, config.data(), &masks_all[static_cast<std::size_t>(d) * n]);
      },
      threads);

  ReachProbs probs;
  probs.p_single = Eigen::MatrixXd::Zero(n, n);
  probs.p_pair.assign(n, Eigen::MatrixXd::Zero(n, n));
  std::vector<long long> single(n * n, 0);
  std::vector<long long> pair(static_cast<std::size_t>(n) * n * n, 0);
  for (long long d = 0; d < draws; ++d) {
    const std::uint32_t* masks = &masks_all[static_cast<std::size_t>(d) * n];
    for (int owner = 0; owner < n; ++owner) {
      const std::uint32_t m = masks[owner];
      for (int i = 0; i < n; ++i) {
        if (!((m >> i) & 1u)) continue;
        ++single[i * n + owner];
        for (int j = 0; j < n; ++j) {
          if ((m >> j) & 1u) ++pair[(static_cast<std::size_t>(owner) * n + i) * n + j];
        }
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int owner = 0; owner < n; ++owner)
      probs.p_single(i, owner) = static_cast<double>(single[i * n + owner]) / draws;
  for (int owner = 0; owner < n; ++owner)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        probs.p_pair[owner](i, j) =
            static_cast<double>(pair[(static_cast<std::size_t>(owner) * n + i) * n + j]) / draws;
  return probs;
}

SharingRates ddibp_sharing_rates(const ProximityMatrix& a, double alpha,
                                 const ReachProbs& probs) {
  const int n = a.n();
  SharingRates rates;
  rates.rate_single = Eigen::VectorXd::Zero(n);
  rates.rate_pair = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int owner = 0; owner < n; ++owner) {
      rates.rate_single(i) += alpha / a.h(owner) * probs.p_single(i, owner);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int owner = 0; owner < n; ++owner) {
        rates.rate_pair(i, j) += alpha / a.h(owner) * probs.p_pair[owner](i, j);
      }
    }
  }
  return rates;
}

Eigen::MatrixXd ddibp_limit_fractions(const ProximityMatrix& a, const ReachProbs& probs) {
  const SharingRates rates = ddibp_sharing_rates(a, 1.0, probs);
  const int n = a.n();
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = rates.rate_pair(i, j) / rates.rate_single(i);
  return out;
}

DhbpDraw sample_dhbp(const DhbpParams& params, const ProximityMatrix& a, Rng& rng) {
  if (params.k_trunc < 1) throw std::invalid_argument("sample_dhbp: k_trunc must be >= 1");
  if (!(params.gamma > 0.0) || !(params.c0 > 0.0) || !(params.c1 > 0.0)) {
    throw std::invalid_argument("sample_dhbp: parameters must be positive");
  }
  if (params.gamma >= params.k_trunc) {
    throw std::invalid_argument("sample_dhbp: k_trunc must exceed gamma");
  }
  const int n = a.n();
  const int kt = params.k_trunc;
  const double q = params.gamma / kt;

  DhbpDraw draw;
  draw.groups.resize(n);
  for (int i = 0; i < n; ++i) draw.groups[i] = rng.categorical_row(a.matrix(), i);

  // Only groups actually selected need their atom weights realized.
  std::vector<int> group_slot(n, -1);
  std::vector<int> used;
  for (int g : draw.groups) {
    if (group_slot[g] < 0) {
      group_slot[g] = static_cast<int>(used.size());
      used.push_back(g);
    }
  }

  Eigen::MatrixXi z(n, kt);
  std::vector<double> p_star(used.size());
  for (int k = 0; k < kt; ++k) {
    const double p = rng.beta(params.c0 * q, params.c0 * (1.0 - q));
    for (std::size_t s = 0; s < used.size(); ++s) {
      p_star[s] = rng.beta(params.c1 * p, params.c1 * (1.0 - p));
    }
    for (int i = 0; i < n; ++i) {
      z(i, k) = rng.bernoulli(p_star[group_slot[draw.groups[i]]]) ? 1 : 0;
    }
  }
  draw.z = FeatureMatrix::from_z(std::move(z));
  return draw;
}

DhbpLimits dhbp_limit_fractions(double c0, double c1) {
  if (!(c0 > 0.0) || !(c1 > 0.0)) throw std::domain_error("dhbp_limit_fractions: c0, c1 > 0");
  return {(c0 + c1 + 1.0) / ((c0 + 1.0) * (c1 + 1.0)), 1.0 / (c0 + 1.0)};
}

FeatureMatrix ibp_baseline_sample(double alpha, int n, Rng& rng) {
  if (!(alpha > 0.0)) throw std::domain_error("ibp_baseline_sample: alpha must be positive");
  std::vector<std::vector<int>> columns;  // per dish, the customers holding it
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      // m_k / i with 1-based customer index i+1.
      const int m = static_cast<int>(columns[k].size());
      if (rng.bernoulli(static_cast<double>(m) / (i + 1))) columns[k].push_back(i);
    }
    const int fresh = rng.poisson(alpha / (i + 1));
    for (int f = 0; f < fresh; ++f) columns.push_back({i});
  }
  Eigen::MatrixXi z = Eigen::MatrixXi::Zero(n, static_cast<int>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k)
    for (int i : columns[k]) z(i, static_cast<int>(k)) = 1;
  return FeatureMatrix::from_z(std::move(z));
}

std::vector<PmfSweepRow> sharing_pmf_sweep(SharingModel model,
                                           const std::vector<double>& a12_grid, double mass,
                                           int max_r, const DhbpParams& dhbp_params,
                                           long long draws, std::uint64_t seed) {
  std::vector<PmfSweepRow> rows;
  rows.reserve(a12_grid.size());
  std::uint64_t stream = 0;
  for (double a12 : a12_grid) {
    if (a12 < 0.0 || a12 > 1.0) throw std::domain_error("sharing_pmf_sweep: a12 in [0,1]");
    Eigen::MatrixXd raw(2, 2);
    raw << 1.0, a12, a12, 1.0;
    const ProximityMatrix prox = ProximityMatrix::from_raw(raw);
    PmfSweepRow row;
    row.a12 = a12;
    row.pmf.assign(max_r + 1, 0.0);
    if (model == SharingModel::kDdibp) {
      const ReachProbs probs = reach_probs_exact(prox);
      const SharingRates rates = ddibp_sharing_rates(prox, mass, probs);
      const double rate = rates.rate_pair(0, 1);
      for (int r = 0; r <= max_r; ++r) row.pmf[r] = poisson_pmf(r, rate);
      row.expected_r_single = rates.rate_single(0);
    } else {
      DhbpParams p = dhbp_params;
      p.gamma = mass;
      std::vector<long long> counts(max_r + 1, 0);
      long long r_total = 0;
      for (long long d = 0; d < draws; ++d) {
        Rng rng = Rng::derive(seed, stream++);
        const DhbpDraw draw = sample_dhbp(p, prox, rng);
        const SharingStats stats = sharing_stats(draw.z);
        const int r12 = stats.r_pair(0, 1);
        if (r12 <= max_r) ++counts[r12];
        r_total += stats.r(0);
      }
      for (int r = 0; r <= max_r; ++r)
        row.pmf[r] = static_cast<double>(counts[r]) / static_cast<double>(draws);
      row.expected_r_single = static_cast<double>(r_total) / static_cast<double>(draws);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ddibp
