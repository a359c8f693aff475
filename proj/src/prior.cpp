#include "ddibp/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ddibp/stats.hpp"

namespace ddibp {

FeatureMatrix FeatureMatrix::from_z(Eigen::MatrixXi z) {
  FeatureMatrix out;
  out.z = std::move(z);
  for (int k = 0; k < out.z.cols(); ++k) {
    if (out.z.col(k).sum() > 0) out.active_columns.push_back(k);
  }
  return out;
}

PriorState::PriorState(int n, std::vector<int> owner, Eigen::MatrixXi connections)
    : n_(n), owner_(std::move(owner)), connections_(std::move(connections)) {
  if (connections_.rows() != n_ || connections_.cols() != static_cast<int>(owner_.size())) {
    throw std::invalid_argument("PriorState: connection matrix shape mismatch");
  }
  for (std::size_t k = 1; k < owner_.size(); ++k) {
    if (owner_[k] < owner_[k - 1]) {
      throw std::invalid_argument("PriorState: owner vector must be grouped (use canonicalize)");
    }
  }
  rebuild_offsets();
}

void PriorState::rebuild_offsets() {
  lambda_.assign(n_, 0);
  for (int o : owner_) {
    if (o < 0 || o >= n_) throw std::invalid_argument("PriorState: owner out of range");
    ++lambda_[o];
  }
  offsets_.assign(n_, 0);
  for (int i = 1; i < n_; ++i) offsets_[i] = offsets_[i - 1] + lambda_[i - 1];
}

std::vector<int> PriorState::owned_set(int customer) const {
  std::vector<int> out(lambda_[customer]);
  std::iota(out.begin(), out.end(), offsets_[customer]);
  return out;
}

PriorState PriorState::canonicalize(int n, const std::vector<int>& owner,
                                    const Eigen::MatrixXi& connections) {
  const int k = static_cast<int>(owner.size());
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return owner[a] < owner[b]; });
  std::vector<int> sorted_owner(k);
  Eigen::MatrixXi sorted_conn(n, k);
  for (int c = 0; c < k; ++c) {
    sorted_owner[c] = owner[order[c]];
    sorted_conn.col(c) = connections.col(order[c]);
  }
  return PriorState(n, std::move(sorted_owner), std::move(sorted_conn));
}

void PriorState::insert_dishes(int customer, const Eigen::MatrixXi& new_columns) {
  const int add = static_cast<int>(new_columns.cols());
  if (add == 0) return;
  const int k_old = k();
  const int pos = offsets_[customer] + lambda_[customer];  // end of the block
  Eigen::MatrixXi conn(n_, k_old + add);
  conn.leftCols(pos) = connections_.leftCols(pos);
  conn.middleCols(pos, add) = new_columns;
  conn.rightCols(k_old - pos) = connections_.rightCols(k_old - pos);
  owner_.insert(owner_.begin() + pos, add, customer);
  connections_ = std::move(conn);
  rebuild_offsets();
}

void PriorState::remove_dishes(std::vector<int> dishes) {
  if (dishes.empty()) return;
  std::sort(dishes.begin(), dishes.end());
  std::vector<char> drop(k(), 0);
  for (int d : dishes) drop[d] = 1;
  const int k_new = k() - static_cast<int>(dishes.size());
  std::vector<int> owner;
  owner.reserve(k_new);
  Eigen::MatrixXi conn(n_, k_new);
  int c = 0;
  for (int d = 0; d < k(); ++d) {
    if (drop[d]) continue;
    owner.push_back(owner_[d]);
    conn.col(c++) = connections_.col(d);
  }
  owner_ = std::move(owner);
  connections_ = std::move(conn);
  rebuild_offsets();
}

bool PriorState::check_invariants() const {
  int total = 0;
  for (int i = 0; i < n_; ++i) total += lambda_[i];
  if (total != k()) return false;
  for (int i = 0; i < n_; ++i) {
    for (int d = offsets_[i]; d < offsets_[i] + lambda_[i]; ++d) {
      if (owner_[d] != i) return false;
    }
  }
  for (int d = 0; d < k(); ++d)
    for (int i = 0; i < n_; ++i)
      if (connections_(i, d) < 0 || connections_(i, d) >= n_) return false;
  return true;
}

PriorState sample_prior(const ProximityMatrix& a, double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw std::domain_error("sample_prior: alpha must be positive");
  const int n = a.n();
  std::vector<int> lambda(n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    lambda[i] = rng.poisson(alpha / a.h(i));
    k += lambda[i];
  }
  std::vector<int> owner;
  owner.reserve(k);
  for (int i = 0; i < n; ++i) owner.insert(owner.end(), lambda[i], i);

  Eigen::MatrixXi conn(n, k);
  for (int d = 0; d < k; ++d) {
    for (int i = 0; i < n; ++i) conn(i, d) = rng.categorical_row(a.matrix(), i);
  }
  return PriorState(n, std::move(owner), std::move(conn));
}

void dish_reach_column(int n, int owner, const int* edges, int stride,
                       Eigen::MatrixXi& z, int column) {
  // Reverse BFS from the owner. Each customer has out-degree one, so we
  // bucket customers by their target and walk the reverse lists.
  thread_local std::vector<int> head, next, stack;
  head.assign(n, -1);
  next.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (i == owner) continue;  // the owner's edge is ignored
    const int j = edges[static_cast<std::ptrdiff_t>(i) * stride];
    next[i] = head[j];
    head[j] = i;
  }
  for (int i = 0; i < n; ++i) z(i, column) = 0;
  z(owner, column) = 1;
  stack.clear();
  stack.push_back(owner);
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    for (int i = head[j]; i != -1; i = next[i]) {
      if (z(i, column) == 0) {
        z(i, column) = 1;
        stack.push_back(i);
      }
    }
  }
}

FeatureMatrix compute_feature_matrix(const PriorState& state) {
  const int n = state.n();
  const int k = state.k();
  Eigen::MatrixXi z(n, k);
  const Eigen::MatrixXi& conn = state.connections();
  for (int d = 0; d < k; ++d) {
    dish_reach_column(n, state.owner_of(d), conn.col(d).data(), 1, z, d);
  }
  return FeatureMatrix::from_z(std::move(z));
}

double log_prior_lambda(const PriorState& state, const ProximityMatrix& a, double alpha) {
  double lp = 0.0;
  for (int i = 0; i < state.n(); ++i) {
    lp += log_poisson_pmf(state.lambda(i), alpha / a.h(i));
  }
  return lp;
}

double log_prior_connections(const PriorState& state, const ProximityMatrix& a) {
  double lp = 0.0;
  for (int d = 0; d < state.k(); ++d) {
    for (int i = 0; i < state.n(); ++i) {
      const double la = a.log_a(i, state.connection(i, d));
      if (std::isinf(la)) return -std::numeric_limits<double>::infinity();
      lp += la;
    }
  }
  return lp;
}

double log_prior(const PriorState& state, const ProximityMatrix& a, double alpha) {
  if (state.n() != a.n()) throw std::invalid_argument("log_prior: dimension mismatch");
  if (!(alpha > 0.0)) throw std::domain_error("log_prior: alpha must be positive");
  return log_prior_lambda(state, a, alpha) + log_prior_connections(state, a);
}

std::pair<PriorState, FeatureMatrix> permute_state(const PriorState& state,
                                                   const FeatureMatrix& z,
                                                   const std::vector<int>& perm) {
  const int n = state.n();
  if (static_cast<int>(perm.size()) != n) throw std::domain_error("permute_state: size mismatch");
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) throw std::domain_error("permute_state: not a bijection");
    seen[p] = 1;
  }
  const int k = state.k();
  std::vector<int> owner(k);
  Eigen::MatrixXi conn(n, k);
  Eigen::MatrixXi pz(n, k);
  for (int d = 0; d < k; ++d) {
    owner[d] = perm[state.owner_of(d)];
    for (int i = 0; i < n; ++i) {
      conn(perm[i], d) = perm[state.connection(i, d)];
      pz(perm[i], d) = z.z(i, d);
    }
  }
  // Re-canonicalize columns; apply the same column order to Z.
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return owner[x] < owner[y]; });
  std::vector<int> owner2(k);
  Eigen::MatrixXi conn2(n, k), z2(n, k);
  for (int c = 0; c < k; ++c) {
    owner2[c] = owner[order[c]];
    conn2.col(c) = conn.col(order[c]);
    z2.col(c) = pz.col(order[c]);
  }
  return {PriorState(n, std::move(owner2), std::move(conn2)), FeatureMatrix::from_z(std::move(z2))};
}

}  // namespace ddibp
