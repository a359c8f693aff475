#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "ddibp/decay.hpp"
#include "ddibp/distance.hpp"
#include "ddibp/prior.hpp"
#include "ddibp/proximity.hpp"
#include "ddibp/rng.hpp"
#include "ddibp/stats.hpp"

using namespace ddibp;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent reachability oracle: boolean transitive closure by repeated
// matrix squaring over the dish graph (owner's edge dropped).
Eigen::VectorXi closure_column(const PriorState& state, int dish) {
  const int n = state.n();
  const int owner = state.owner_of(dish);
  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (i != owner) adj(i, state.connection(i, dish)) = 1;
  }
  Eigen::MatrixXi reach = adj;
  for (int step = 0; step < n; ++step) {
    Eigen::MatrixXi next = reach;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (reach(i, k) && adj(k, j)) next(i, j) = 1;
    reach = next;
  }
  Eigen::VectorXi col(n);
  for (int i = 0; i < n; ++i) col(i) = (i == owner || reach(i, owner)) ? 1 : 0;
  return col;
}

}  // namespace

TEST_CASE("distance matrix invariants") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0, 1, 1, 0.5;
  CHECK_THROWS_AS(DistanceMatrix{bad}, std::invalid_argument);  // nonzero diagonal
  bad << 0, -1, 1, 0;
  CHECK_THROWS_AS(DistanceMatrix{bad}, std::invalid_argument);  // negative

  const DistanceMatrix seq = DistanceMatrix::sequential(4);
  CHECK(seq.is_sequential());
  CHECK(seq(2, 0) == 2.0);
  CHECK(seq(0, 2) == kInf);

  Eigen::VectorXd t(3);
  t << 1.0, 4.0, 6.0;
  const DistanceMatrix abs = DistanceMatrix::absolute_difference(t);
  CHECK(!abs.is_sequential());
  CHECK(abs(0, 2) == 5.0);
  CHECK(DistanceMatrix::sequential_absolute_difference(t).is_sequential());
}

TEST_CASE("decay functions hit the required endpoints") {
  CHECK(DecayFunction::exponential(1.0)(0.0) == 1.0);
  CHECK(DecayFunction::window(2.0)(3.0) == 0.0);
  CHECK(DecayFunction::window(2.0)(1.0) == 1.0);
  CHECK(DecayFunction::logistic(1.0, 0.0)(kInf) == 0.0);
  CHECK(DecayFunction::constant()(kInf) == 0.0);
  CHECK_THROWS_AS(DecayFunction::exponential(1.0)(-0.5), std::domain_error);

  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const double beta = 0.1 + 3.0 * rng.uniform();
    const double nu = 4.0 * rng.uniform() - 1.0;
    for (const auto& f :
         {DecayFunction::constant(), DecayFunction::exponential(beta),
          DecayFunction::logistic(beta, nu), DecayFunction::window(0.1 + 2.0 * rng.uniform())}) {
      CHECK(f(0.0) == 1.0);
      CHECK(f(kInf) == 0.0);
      double prev = 1.0 + 1e-15;
      for (double d = 0.0; d < 8.0; d += 0.37) {
        const double v = f(d);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v <= prev + 1e-12);
        prev = v;
      }
    }
  }
}

TEST_CASE("proximity normalizers and rows") {
  const ProximityMatrix seq =
      build_proximity(DistanceMatrix::sequential(3), DecayFunction::constant());
  CHECK(seq.h(0) == doctest::Approx(1.0));
  CHECK(seq.h(1) == doctest::Approx(2.0));
  CHECK(seq.h(2) == doctest::Approx(3.0));

  Eigen::MatrixXd d2(2, 2);
  d2 << 0, 1, 1, 0;
  const ProximityMatrix p2 =
      build_proximity(DistanceMatrix(d2), DecayFunction::exponential(std::log(2.0)));
  CHECK(p2(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p2(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p2(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  Eigen::MatrixXd iso(3, 3);
  iso.setConstant(kInf);
  iso.diagonal().setZero();
  const ProximityMatrix pi = build_proximity(DistanceMatrix(iso), DecayFunction::exponential(1.0));
  CHECK(pi.matrix().isApprox(Eigen::MatrixXd::Identity(3, 3)));

  Rng rng(11);
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::VectorXd t(5);
    for (int i = 0; i < 5; ++i) t(i) = 3.0 * rng.uniform();
    const ProximityMatrix a = build_proximity(DistanceMatrix::absolute_difference(t),
                                              DecayFunction::exponential(0.2 + rng.uniform()));
    for (int i = 0; i < 5; ++i) CHECK(std::fabs(a.matrix().row(i).sum() - 1.0) <= 1e-12);
    for (int i = 0; i < 5; ++i) CHECK(a.h(i) >= 1.0);
  }
}

TEST_CASE("sample_prior rates") {
  const ProximityMatrix a =
      build_proximity(DistanceMatrix::sequential(3), DecayFunction::constant());
  Rng bad(1);
  CHECK_THROWS_AS(sample_prior(a, 0.0, bad), std::domain_error);

  // E[K] = alpha (1 + 1/2 + 1/3) under sequential constant decay.
  const double alpha = 1.4;
  Rng rng(123);
  const int draws = 20000;
  long long k_sum = 0;
  long long lambda1_sum = 0;
  for (int t = 0; t < draws; ++t) {
    const PriorState st = sample_prior(a, alpha, rng);
    k_sum += st.k();
    lambda1_sum += st.lambda(1);
  }
  const double expect_k = alpha * (1.0 + 0.5 + 1.0 / 3.0);
  const double se_k = std::sqrt(expect_k / draws);
  CHECK(std::fabs(static_cast<double>(k_sum) / draws - expect_k) <= 3.0 * se_k);

  // lambda_2 (h = 2) at alpha = 2 has mean 1; 1e5 draws.
  Rng rng2(321);
  long long l2 = 0;
  const int draws2 = 100000;
  for (int t = 0; t < draws2; ++t) l2 += sample_prior(a, 2.0, rng2).lambda(1);
  CHECK(std::fabs(static_cast<double>(l2) / draws2 - 1.0) <= 3.0 * std::sqrt(1.0 / draws2));
  (void)lambda1_sum;
}

TEST_CASE("feature matrix reachability") {
  // Chain 4 -> 3 -> 2 -> 1 with dish 1 owned by customer 1 activates everyone;
  // dish 2 owned by 2 reaches only customer 1; dish 3 owned by 2 is solo.
  std::vector<int> owner = {0, 1, 1};
  Eigen::MatrixXi conn(4, 3);
  // dish 0: chain to the owner
  conn(0, 0) = 0; conn(1, 0) = 0; conn(2, 0) = 1; conn(3, 0) = 2;
  // dish 1: customer 0 -> 1, rest self
  conn(0, 1) = 1; conn(1, 1) = 1; conn(2, 1) = 2; conn(3, 1) = 3;
  // dish 2: all self
  conn(0, 2) = 0; conn(1, 2) = 1; conn(2, 2) = 2; conn(3, 2) = 3;
  const PriorState state(4, owner, conn);
  const FeatureMatrix z = compute_feature_matrix(state);
  Eigen::MatrixXi expect(4, 3);
  expect << 1, 1, 0,
            1, 1, 1,
            1, 0, 0,
            1, 0, 0;
  CHECK(z.z == expect);

  // A non-owner self-loop grants nothing: dish owned by 2 (0-based), others loop.
  Eigen::MatrixXi solo(4, 1);
  solo << 0, 1, 2, 3;
  const PriorState solo_state(4, {2}, solo);
  const FeatureMatrix sz = compute_feature_matrix(solo_state);
  CHECK(sz.z.col(0).sum() == 1);
  CHECK(sz.z(2, 0) == 1);
}

TEST_CASE("reachability equals the transitive-closure oracle") {
  Rng rng(2024);
  for (int n : {3, 4, 5, 6}) {
    for (int rep = 0; rep < 60; ++rep) {
      const int k = 3;
      std::vector<int> owner(k);
      for (int d = 0; d < k; ++d) owner[d] = rng.uniform_int(n);
      std::sort(owner.begin(), owner.end());
      Eigen::MatrixXi conn(n, k);
      for (int d = 0; d < k; ++d)
        for (int i = 0; i < n; ++i) conn(i, d) = rng.uniform_int(n);
      const PriorState state(n, owner, conn);
      const FeatureMatrix z = compute_feature_matrix(state);
      for (int d = 0; d < k; ++d) {
        CHECK(z.z.col(d) == closure_column(state, d));
      }
    }
  }
}

TEST_CASE("log_prior values and impossibility") {
  const ProximityMatrix a =
      build_proximity(DistanceMatrix::sequential(3), DecayFunction::constant());
  const PriorState empty(3, {}, Eigen::MatrixXi(3, 0));
  const double alpha = 0.9;
  const double expect = -alpha * (1.0 + 0.5 + 1.0 / 3.0);
  CHECK(log_prior(empty, a, alpha) == doctest::Approx(expect).epsilon(1e-12));

  // Identity proximity: any cross connection has zero probability.
  Eigen::MatrixXd iso(2, 2);
  iso << 0, kInf, kInf, 0;
  const ProximityMatrix ai = build_proximity(DistanceMatrix(iso), DecayFunction::constant());
  Eigen::MatrixXi conn(2, 1);
  conn << 1, 1;  // customer 0 connects across
  const PriorState st(2, {0}, conn);
  CHECK(log_prior(st, ai, 1.0) == -kInf);
}

TEST_CASE("prior state surgery keeps the canonical layout") {
  Eigen::MatrixXi conn(3, 4);
  conn.setZero();
  std::vector<int> owner = {0, 0, 1, 2};
  PriorState st(3, owner, conn);
  CHECK(st.check_invariants());
  CHECK(st.owned_set(0) == std::vector<int>{0, 1});

  Eigen::MatrixXi cols(3, 2);
  cols.setConstant(2);
  st.insert_dishes(1, cols);
  CHECK(st.k() == 6);
  CHECK(st.lambda(1) == 3);
  CHECK(st.owner() == std::vector<int>{0, 0, 1, 1, 1, 2});
  CHECK(st.connection(0, 3) == 2);  // inserted at the end of owner 1's block
  CHECK(st.check_invariants());

  st.remove_dishes({0, 3});
  CHECK(st.k() == 4);
  CHECK(st.owner() == std::vector<int>{0, 1, 1, 2});
  CHECK(st.check_invariants());

  // Non-grouped input must go through canonicalize.
  CHECK_THROWS_AS(PriorState(2, {1, 0}, Eigen::MatrixXi::Zero(2, 2)), std::invalid_argument);
  const PriorState fixed = PriorState::canonicalize(2, {1, 0}, Eigen::MatrixXi::Zero(2, 2));
  CHECK(fixed.owner() == std::vector<int>{0, 1});
}

TEST_CASE("permute_state is the identity for the identity permutation") {
  Rng rng(5);
  const ProximityMatrix a =
      build_proximity(DistanceMatrix::sequential(3), DecayFunction::constant());
  const PriorState st = sample_prior(a, 2.0, rng);
  const FeatureMatrix z = compute_feature_matrix(st);
  const auto [pst, pz] = permute_state(st, z, {0, 1, 2});
  CHECK(pst.owner() == st.owner());
  CHECK(pst.connections() == st.connections());
  CHECK(pz.z == z.z);

  CHECK_THROWS_AS(permute_state(st, z, {0, 0, 2}), std::domain_error);
  CHECK_THROWS_AS(permute_state(st, z, {0, 1}), std::domain_error);
}

TEST_CASE("permutation symmetry of the prior density") {
  Rng rng(77);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 4;
    Eigen::MatrixXd dm = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) dm(i, j) = dm(j, i) = 2.5 * rng.uniform();
    const DistanceMatrix d(dm);
    const DecayFunction f = DecayFunction::exponential(0.5 + rng.uniform());
    const ProximityMatrix a = build_proximity(d, f);
    const double alpha = 0.5 + rng.uniform();
    const PriorState st = sample_prior(a, alpha, rng);
    const FeatureMatrix z = compute_feature_matrix(st);
    std::vector<int> perm = {0, 1, 2, 3};
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
    const auto [pst, pz] = permute_state(st, z, perm);
    const ProximityMatrix pa = build_proximity(d.permuted(perm), f);
    CHECK(log_prior(st, a, alpha) ==
          doctest::Approx(log_prior(pst, pa, alpha)).epsilon(1e-12));
    // The permuted feature matrix is the row-permuted original.
    const FeatureMatrix direct = compute_feature_matrix(pst);
    CHECK(direct.z == pz.z);
  }
}

TEST_CASE("two-customer swap matches pointwise enumeration") {
  // Sequential distances become reverse-sequential under the swap; every
  // configuration's probability must match its relabeled counterpart.
  const DistanceMatrix d = DistanceMatrix::sequential(2);
  const DecayFunction f = DecayFunction::constant();
  const ProximityMatrix a = build_proximity(d, f);
  const ProximityMatrix ap = build_proximity(d.permuted({1, 0}), f);
  const double alpha = 0.8;
  for (int l0 = 0; l0 <= 2; ++l0) {
    for (int l1 = 0; l1 + l0 <= 2; ++l1) {
      const int k = l0 + l1;
      std::vector<int> owner;
      owner.insert(owner.end(), l0, 0);
      owner.insert(owner.end(), l1, 1);
      long long combos = 1;
      for (int c = 0; c < 2 * k; ++c) combos *= 2;
      for (long long it = 0; it < combos; ++it) {
        long long v = it;
        Eigen::MatrixXi conn(2, k);
        for (int c = 0; c < 2 * k; ++c) {
          conn(c % 2, c / 2) = static_cast<int>(v % 2);
          v /= 2;
        }
        const PriorState st(2, owner, conn);
        const FeatureMatrix z = compute_feature_matrix(st);
        const auto [pst, pz] = permute_state(st, z, {1, 0});
        const double lp = log_prior(st, a, alpha);
        const double lpp = log_prior(pst, ap, alpha);
        if (std::isinf(lp)) {
          CHECK(std::isinf(lpp));
        } else {
          CHECK(lp == doctest::Approx(lpp).epsilon(1e-12));
        }
      }
    }
  }
}
