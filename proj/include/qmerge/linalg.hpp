#pragma once

// Dense complex linear algebra on multipartite Hilbert spaces.
//
// A Layout records the tensor-factor structure of a space: one dimension
// and one party label per factor, in tensor order (first factor is the most
// significant index digit). States and pure states carry a Layout so that
// marginals, channels and relabelings can address factors by party.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qmerge/config.hpp"

namespace qmerge {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using FactorSet = std::vector<std::size_t>;

// KA / KB are the A and B halves of shared entanglement-resource registers.
// BPrime is the B-held copy of A's system produced by merging.
enum class Party { A, B, BPrime, E, KA, KB };

std::string_view party_name(Party p);
Party parse_party(std::string_view name);  // throws std::invalid_argument

inline bool held_by_a(Party p) { return p == Party::A || p == Party::KA; }
inline bool held_by_b(Party p) {
  return p == Party::B || p == Party::BPrime || p == Party::KB;
}

struct Layout {
  std::vector<std::size_t> dims;
  std::vector<Party> parties;

  Layout() = default;
  Layout(std::vector<std::size_t> d, std::vector<Party> p);

  std::size_t size() const { return dims.size(); }
  // Product of factor dimensions; throws CapExceeded past `cap`.
  std::size_t total_dim(std::size_t cap = static_cast<std::size_t>(-1)) const;

  FactorSet factors_of(Party p) const;
  FactorSet factors_held_by_a() const;
  FactorSet factors_held_by_b() const;
  FactorSet factors_not_in(const FactorSet& s) const;
  std::size_t dim_of(const FactorSet& s) const;

  Layout subset(const FactorSet& s) const;
  Layout relabeled(Party from, Party to) const;
  Layout repeated(std::size_t copies) const;
  Layout permuted(const FactorSet& perm) const;  // perm[new] = old

  friend Layout concat(const Layout& a, const Layout& b);
  friend bool operator==(const Layout&, const Layout&) = default;
};

Layout concat(const Layout& a, const Layout& b);
std::string describe(const Layout& l);

// Validated density matrix. Construction checks hermiticity, positivity and
// unit trace against the supplied tolerances.
class State {
 public:
  State(Matrix rho, Layout layout, const NumericConfig& cfg = default_config());

  // Skips validation; for results of operations that preserve validity.
  static State trusted(Matrix rho, Layout layout);

  const Matrix& matrix() const { return rho_; }
  const Layout& layout() const { return layout_; }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }

 private:
  struct TrustedTag {};
  State(TrustedTag, Matrix rho, Layout layout);

  Matrix rho_;
  Layout layout_;
};

class PureState {
 public:
  PureState(Vector psi, Layout layout, const NumericConfig& cfg = default_config());
  static PureState trusted(Vector psi, Layout layout);

  const Vector& amplitudes() const { return psi_; }
  const Layout& layout() const { return layout_; }
  std::size_t dim() const { return static_cast<std::size_t>(psi_.size()); }

  State density() const;
  PureState relabeled(Party from, Party to) const;

 private:
  struct TrustedTag {};
  PureState(TrustedTag, Vector psi, Layout layout);

  Vector psi_;
  Layout layout_;
};

// Basic constructors.
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);
State maximally_mixed(const Layout& layout);
State basis_state(const Layout& layout, std::size_t index);
// (1/sqrt(d)) sum_i |i>|i> on factors [d, d] labelled (pa, pb).
PureState maximally_entangled(std::size_t d, Party pa = Party::A, Party pb = Party::B);

State tensor_product(const State& a, const State& b, const NumericConfig& cfg = default_config());
PureState tensor_product(const PureState& a, const PureState& b,
                         const NumericConfig& cfg = default_config());
// rho^{\otimes copies}; layout is repeated.
State tensor_power(const State& s, std::size_t copies, const NumericConfig& cfg = default_config());

// Trace out every factor not listed in `kept`; kept factors stay in their
// original relative order.
Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims, const FactorSet& kept);
State partial_trace(const State& s, const FactorSet& kept);
State marginal(const State& s, std::initializer_list<Party> parties);

// Basis reordering for a factor permutation perm (perm[new] = old).
// Entry n of the result is the old basis index of new basis index n.
std::vector<std::size_t> factor_permutation_map(std::span<const std::size_t> dims,
                                                const FactorSet& perm);
Matrix permute_factors(const Matrix& m, std::span<const std::size_t> dims, const FactorSet& perm);
Vector permute_factors(const Vector& v, std::span<const std::size_t> dims, const FactorSet& perm);
// Permutation unitary U with U|x_old> = |x_new>.
Matrix permutation_unitary(std::span<const std::size_t> dims, const FactorSet& perm);
State permute_factors(const State& s, const FactorSet& perm);
PureState permute_factors(const PureState& s, const FactorSet& perm);

struct Eigensystem {
  RealVector values;  // descending
  Matrix vectors;     // columns are orthonormal eigenvectors
};

// Hermitian eigendecomposition; throws std::invalid_argument on non-Hermitian input.
Eigensystem eigensystem(const Matrix& h, const NumericConfig& cfg = default_config());
RealVector spectrum(const Matrix& h);  // descending, no hermiticity check
Matrix sqrt_psd(const Matrix& a, const NumericConfig& cfg = default_config());
bool is_hermitian(const Matrix& m, double tol);

// Canonical purification sum_i sqrt(lambda_i) |e_i> (x) |i>_E with an
// appended E factor of dimension rank(s).
PureState purify(const State& s, const NumericConfig& cfg = default_config());

double trace_norm(const Matrix& m);
// F(a, b) = || sqrt(a) sqrt(b) ||_1^2 for PSD a, b (not necessarily normalized).
double fidelity(const Matrix& a, const Matrix& b, const NumericConfig& cfg = default_config());
double fidelity(const State& a, const State& b, const NumericConfig& cfg = default_config());
// <phi| a |phi>: equals F(a, |phi><phi|) for a unit vector phi.
double fidelity_with_pure(const Matrix& a, const Vector& phi);

struct SchmidtDecomposition {
  RealVector coefficients;  // nonincreasing, length min(dL, dR)
  Matrix left;              // columns: left Schmidt vectors (dL x dL)
  Matrix right;             // columns: right Schmidt vectors (dR x dR)
  std::size_t rank = 0;     // coefficients above rank_tol
  FactorSet left_factors;
  FactorSet right_factors;
};

// psi = sum_i c_i |left_i> (x) |right_i> after grouping `left_factors`
// (in layout order) against the rest.
SchmidtDecomposition schmidt_decomposition(const PureState& p, const FactorSet& left_factors,
                                           const NumericConfig& cfg = default_config());
std::size_t schmidt_rank(const PureState& p, const FactorSet& left_factors,
                         const NumericConfig& cfg = default_config());

}  // namespace qmerge
