#pragma once

// Deterministic, splittable pseudo-randomness. Every random draw in the
// library and the CLI derives from one 64-bit seed so that reports are
// reproducible bit for bit.

#include <cstdint>
#include <vector>

#include "qmerge/channels.hpp"
#include "qmerge/linalg.hpp"

namespace qmerge {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next(); }
  std::uint64_t next();

  // Independent child stream; the parent state is not advanced.
  SplitMix64 split(std::uint64_t index) const;

  double uniform();                         // [0, 1)
  double normal();                          // standard normal
  std::size_t below(std::size_t n);         // uniform in [0, n)
  std::uint64_t seed_value() const { return seed_; }

 private:
  std::uint64_t state_;
  std::uint64_t seed_ = state_;
};

// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
Matrix random_unitary(std::size_t d, SplitMix64& rng);
// Random isometry from C^d_in into C^d_out (d_out >= d_in).
Matrix random_isometry(std::size_t d_out, std::size_t d_in, SplitMix64& rng);
Matrix random_hermitian(std::size_t d, SplitMix64& rng);
PureState random_pure_state(const Layout& layout, SplitMix64& rng);
// Random density matrix of the given rank (0 = full rank), induced measure.
State random_state(const Layout& layout, SplitMix64& rng, std::size_t rank = 0);
std::vector<double> random_simplex_point(std::size_t n, SplitMix64& rng);
// Uniformly random permutation of [0, n).
std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng);

// Random channel C^d_in -> C^d_out with `kraus` Kraus operators (rows of a
// random isometry into C^{kraus * d_out}).
CpMap random_channel(std::size_t d_in, std::size_t d_out, std::size_t kraus, SplitMix64& rng);
// Random instrument with `outcomes` outcomes of `kraus` Kraus operators each.
Instrument random_instrument(std::size_t d_in, std::size_t d_out, std::size_t outcomes, SplitMix64& rng,
                             std::size_t kraus = 1);

}  // namespace qmerge
