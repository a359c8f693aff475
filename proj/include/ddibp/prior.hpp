#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ddibp/proximity.hpp"
#include "ddibp/rng.hpp"

namespace ddibp {

// Binary feature matrix. Rows are customers, columns are dishes.
struct FeatureMatrix {
  Eigen::MatrixXi z;                 // n x K, entries in {0, 1}
  std::vector<int> active_columns;   // columns with positive sum

  int n() const { return static_cast<int>(z.rows()); }
  int k() const { return static_cast<int>(z.cols()); }

  static FeatureMatrix from_z(Eigen::MatrixXi z);
};

// Ownership vector c* plus connectivity matrix C. Dishes are kept grouped by
// owner in customer order, then by creation order within an owner, so the
// owner vector is nondecreasing and each owned set K_i is a contiguous range.
class PriorState {
 public:
  PriorState() : PriorState(1, {}, Eigen::MatrixXi(1, 0)) {}
  PriorState(int n, std::vector<int> owner, Eigen::MatrixXi connections);

  int n() const { return n_; }
  int k() const { return static_cast<int>(owner_.size()); }

  const std::vector<int>& owner() const { return owner_; }
  int owner_of(int dish) const { return owner_[dish]; }
  int lambda(int customer) const { return lambda_[customer]; }
  const std::vector<int>& lambdas() const { return lambda_; }
  // Dish indices owned by a customer: the contiguous range [first, first+lambda).
  int owned_first(int customer) const { return offsets_[customer]; }
  std::vector<int> owned_set(int customer) const;

  int connection(int i, int dish) const { return connections_(i, dish); }
  const Eigen::MatrixXi& connections() const { return connections_; }

  void set_connection(int i, int dish, int j) { connections_(i, dish) = j; }

  // Rebuilds the grouped-by-owner layout from arbitrary (owner, connections)
  // input; the relative order of a customer's dishes is preserved.
  static PriorState canonicalize(int n, const std::vector<int>& owner,
                                 const Eigen::MatrixXi& connections);

  // Insert `count` fresh dishes owned by `customer` at the end of its block;
  // connection columns are supplied by the caller (n x count).
  void insert_dishes(int customer, const Eigen::MatrixXi& new_columns);
  // Remove the given dish indices (must all be owned by one customer).
  void remove_dishes(std::vector<int> dishes);

  bool check_invariants() const;

 private:
  void rebuild_offsets();

  int n_ = 0;
  std::vector<int> owner_;        // size K, nondecreasing
  std::vector<int> lambda_;       // size n
  std::vector<int> offsets_;      // size n, block starts
  Eigen::MatrixXi connections_;   // n x K
};

// Draw lambda_i ~ Poisson(alpha / h_i) and every connection c_{ik} ~ a_i.
PriorState sample_prior(const ProximityMatrix& a, double alpha, Rng& rng);

// z(i, k) = 1 iff i owns k or the owner of k is reachable from i along
// i -> c_{ik} edges; the owner's own edge is ignored.
FeatureMatrix compute_feature_matrix(const PriorState& state);

// Reachability of one dish column: out(i) = 1 iff owner reachable from i (or
// i == owner). `edges` holds one target per customer; the owner's entry is
// ignored.
void dish_reach_column(int n, int owner, const int* edges, int stride,
                       Eigen::MatrixXi& z, int column);

// log P(c*, C | A, alpha) = sum_i log Poisson(lambda_i; alpha / h_i)
//                         + sum_{i,k} log a(i, c_{ik}).
double log_prior(const PriorState& state, const ProximityMatrix& a, double alpha);

// The two pieces of log_prior, maintained separately by the sampler.
double log_prior_lambda(const PriorState& state, const ProximityMatrix& a, double alpha);
double log_prior_connections(const PriorState& state, const ProximityMatrix& a);

// Relabel customers by perm (customer i becomes perm[i]); columns are then
// re-canonicalized. Returns the permuted state and feature matrix.
std::pair<PriorState, FeatureMatrix> permute_state(const PriorState& state,
                                                   const FeatureMatrix& z,
                                                   const std::vector<int>& perm);

}  // namespace ddibp
