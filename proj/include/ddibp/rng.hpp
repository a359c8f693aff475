#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace ddibp {

// xoshiro256++ with splitmix64 seeding. All samplers below are written out
// explicitly so that a (seed, stream) pair gives the same draw sequence on
// every platform; <random> distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent substream derived from (seed, stream). Draw loops index
  // streams by draw counter, so results do not depend on scheduling.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  double uniform();               // [0, 1)
  int uniform_int(int n);         // {0, ..., n-1}, n >= 1
  double normal();                // N(0, 1)
  double exponential();           // rate 1
  bool bernoulli(double p);
  double gamma(double shape, double rate);
  double beta(double a, double b);
  // Inversion below mean 30, Hörmann's PTRS transformed rejection above.
  int poisson(double mean);
  // Index drawn proportional to weights (need not be normalized).
  int categorical(const Eigen::VectorXd& weights);
  // As above for one row of a row-stochastic matrix, without a temporary.
  int categorical_row(const Eigen::MatrixXd& m, int row);

 private:
  std::array<std::uint64_t, 4> s_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ddibp
