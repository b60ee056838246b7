#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmerge {

// Numerical tolerances and resource caps shared by every module.
// Values are plain data; callers pass a config down explicitly.
struct NumericConfig {
  double herm_tol = 1e-9;    // max |h - h^dagger| entry
  double psd_tol = 1e-9;     // min eigenvalue >= -psd_tol
  double trace_tol = 1e-9;   // |tr - 1| for states, unit norm for pure states
  double eig_tol = 1e-10;    // eigendecomposition reconstruction residual
  double close_tol = 1e-8;   // two states considered equal
  double rank_tol = 1e-10;   // Schmidt coefficient / eigenvalue counted as nonzero
  double prob_tol = 1e-12;   // outcome probabilities dropped below this
  double tp_tol = 1e-9;      // trace-preservation of Kraus families
  double clip = 1e-12;       // eigenvalues below this are clipped to 0 before sqrt/log
  std::size_t dim_cap = 4096;

  // Overrides the validation tolerances (hermiticity, positivity, trace,
  // closeness, trace preservation) with one value.
  NumericConfig with_validation_tol(double tol) const {
    NumericConfig c = *this;
    c.herm_tol = c.psd_tol = c.trace_tol = c.tp_tol = tol;
    c.close_tol = tol;
    return c;
  }
};

inline const NumericConfig& default_config() {
  static const NumericConfig cfg{};
  return cfg;
}

// Raised when a construction would exceed the configured dimension or
// enumeration cap. Carries the offending size.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(const std::string& what, std::size_t requested, std::size_t cap)
      : std::runtime_error(what + ": requested " + std::to_string(requested) +
                           " exceeds cap " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

inline void check_cap(const std::string& what, std::size_t requested, std::size_t cap) {
  if (requested > cap) throw CapExceeded(what, requested, cap);
}

}  // namespace qmerge
