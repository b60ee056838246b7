#include "qmerge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qmerge {

namespace {

std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

std::size_t checked_product(std::span<const std::size_t> dims, std::size_t cap) {
  constexpr std::size_t kMax = static_cast<std::size_t>(-1);
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("factor dimension must be positive");
    total = total > kMax / d ? kMax : total * d;  // saturate
  }
  check_cap("dimension", total, cap);
  return total;
}

// Offsets (into the full index) of every multi-index over `factors`,
// enumerated row-major in the order given.
std::vector<std::size_t> offsets_over(std::span<const std::size_t> dims,
                                      std::span<const std::size_t> strides,
                                      const FactorSet& factors) {
  std::vector<std::size_t> out{0};
  for (std::size_t f : factors) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * dims[f]);
    for (std::size_t base : out)
      for (std::size_t d = 0; d < dims[f]; ++d) next.push_back(base + d * strides[f]);
    out = std::move(next);
  }
  return out;
}

void validate_factor_set(const FactorSet& s, std::size_t n, bool allow_empty) {
  if (s.empty() && !allow_empty) throw std::invalid_argument("empty factor set");
  std::vector<bool> seen(n, false);
  for (std::size_t f : s) {
    if (f >= n) throw std::invalid_argument("factor index out of range");
    if (seen[f]) throw std::invalid_argument("duplicate factor index");
    seen[f] = true;
  }
}

}  // namespace

std::string_view party_name(Party p) {
  switch (p) {
    case Party::A: return "A";
    case Party::B: return "B";
    case Party::BPrime: return "B'";
    case Party::E: return "E";
    case Party::KA: return "KA";
    case Party::KB: return "KB";
  }
  return "?";
}

Party parse_party(std::string_view name) {
  if (name == "A") return Party::A;
  if (name == "B") return Party::B;
  if (name == "B'" || name == "Bp" || name == "BPrime") return Party::BPrime;
  if (name == "E") return Party::E;
  if (name == "KA") return Party::KA;
  if (name == "KB") return Party::KB;
  throw std::invalid_argument("unknown party label '" + std::string(name) + "'");
}

Layout::Layout(std::vector<std::size_t> d, std::vector<Party> p)
    : dims(std::move(d)), parties(std::move(p)) {
  if (dims.size() != parties.size())
    throw std::invalid_argument("layout: dims and parties differ in length");
  for (std::size_t x : dims)
    if (x == 0) throw std::invalid_argument("layout: factor dimension must be positive");
}

std::size_t Layout::total_dim(std::size_t cap) const { return checked_product(dims, cap); }

FactorSet Layout::factors_of(Party p) const {
  FactorSet out;
  for (std::size_t k = 0; k < parties.size(); ++k)
    if (parties[k] == p) out.push_back(k);
  return out;
}

FactorSet Layout::factors_held_by_a() const {
  FactorSet out;
  for (std::size_t k = 0; k < parties.size(); ++k)
    if (held_by_a(parties[k])) out.push_back(k);
  return out;
}

FactorSet Layout::factors_held_by_b() const {
  FactorSet out;
  for (std::size_t k = 0; k < parties.size(); ++k)
    if (held_by_b(parties[k])) out.push_back(k);
  return out;
}

FactorSet Layout::factors_not_in(const FactorSet& s) const {
  FactorSet out;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (std::find(s.begin(), s.end(), k) == s.end()) out.push_back(k);
  return out;
}

std::size_t Layout::dim_of(const FactorSet& s) const {
  std::size_t d = 1;
  for (std::size_t f : s) d *= dims.at(f);
  return d;
}

Layout Layout::subset(const FactorSet& s) const {
  Layout out;
  for (std::size_t f : s) {
    out.dims.push_back(dims.at(f));
    out.parties.push_back(parties.at(f));
  }
  return out;
}

Layout Layout::relabeled(Party from, Party to) const {
  Layout out = *this;
  for (auto& p : out.parties)
    if (p == from) p = to;
  return out;
}

Layout Layout::repeated(std::size_t copies) const {
  Layout out;
  for (std::size_t c = 0; c < copies; ++c) out = concat(out, *this);
  return out;
}

Layout Layout::permuted(const FactorSet& perm) const {
  validate_factor_set(perm, size(), size() == 0);
  if (perm.size() != size()) throw std::invalid_argument("permutation length mismatch");
  return subset(perm);
}

Layout concat(const Layout& a, const Layout& b) {
  Layout out = a;
  out.dims.insert(out.dims.end(), b.dims.begin(), b.dims.end());
  out.parties.insert(out.parties.end(), b.parties.begin(), b.parties.end());
  return out;
}

std::string describe(const Layout& l) {
  std::string s = "[";
  for (std::size_t k = 0; k < l.size(); ++k) {
    if (k) s += ", ";
    s += std::string(party_name(l.parties[k])) + ":" + std::to_string(l.dims[k]);
  }
  return s + "]";
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

State::State(Matrix rho, Layout layout, const NumericConfig& cfg)
    : rho_(std::move(rho)), layout_(std::move(layout)) {
  if (rho_.rows() != rho_.cols()) throw std::invalid_argument("state: matrix is not square");
  const std::size_t n = layout_.total_dim(cfg.dim_cap);
  if (n != static_cast<std::size_t>(rho_.rows()))
    throw std::invalid_argument("state: product of dims (" + std::to_string(n) +
                                ") does not match matrix dimension (" +
                                std::to_string(rho_.rows()) + ")");
  if (!is_hermitian(rho_, cfg.herm_tol)) throw std::invalid_argument("state: not Hermitian");
  const double tr = rho_.trace().real();
  if (std::abs(tr - 1.0) > cfg.trace_tol)
    throw std::invalid_argument("state: trace " + std::to_string(tr) + " is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -cfg.psd_tol)
    throw std::invalid_argument("state: not positive semidefinite");
}

State::State(TrustedTag, Matrix rho, Layout layout)
    : rho_(std::move(rho)), layout_(std::move(layout)) {}

State State::trusted(Matrix rho, Layout layout) {
  return State(TrustedTag{}, std::move(rho), std::move(layout));
}

PureState::PureState(Vector psi, Layout layout, const NumericConfig& cfg)
    : psi_(std::move(psi)), layout_(std::move(layout)) {
  const std::size_t n = layout_.total_dim(cfg.dim_cap);
  if (n != static_cast<std::size_t>(psi_.size()))
    throw std::invalid_argument("pure state: product of dims does not match vector length");
  if (std::abs(psi_.norm() - 1.0) > cfg.trace_tol)
    throw std::invalid_argument("pure state: not unit norm");
}

PureState::PureState(TrustedTag, Vector psi, Layout layout)
    : psi_(std::move(psi)), layout_(std::move(layout)) {}

PureState PureState::trusted(Vector psi, Layout layout) {
  return PureState(TrustedTag{}, std::move(psi), std::move(layout));
}

State PureState::density() const { return State::trusted(psi_ * psi_.adjoint(), layout_); }

PureState PureState::relabeled(Party from, Party to) const {
  return PureState::trusted(psi_, layout_.relabeled(from, to));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

State maximally_mixed(const Layout& layout) {
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  return State::trusted(Matrix::Identity(n, n) / static_cast<double>(n), layout);
}

State basis_state(const Layout& layout, std::size_t index) {
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  if (static_cast<Eigen::Index>(index) >= n) throw std::invalid_argument("basis index out of range");
  Matrix m = Matrix::Zero(n, n);
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return State::trusted(std::move(m), layout);
}

PureState maximally_entangled(std::size_t d, Party pa, Party pb) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i * d + i)) = 1.0 / std::sqrt(double(d));
  return PureState::trusted(std::move(v), Layout({d, d}, {pa, pb}));
}

State tensor_product(const State& a, const State& b, const NumericConfig& cfg) {
  Layout l = concat(a.layout(), b.layout());
  l.total_dim(cfg.dim_cap);
  return State::trusted(kron(a.matrix(), b.matrix()), std::move(l));
}

PureState tensor_product(const PureState& a, const PureState& b, const NumericConfig& cfg) {
  Layout l = concat(a.layout(), b.layout());
  l.total_dim(cfg.dim_cap);
  return PureState::trusted(kron(a.amplitudes(), b.amplitudes()), std::move(l));
}

State tensor_power(const State& s, std::size_t copies, const NumericConfig& cfg) {
  if (copies == 0) throw std::invalid_argument("tensor_power: copies must be positive");
  s.layout().repeated(copies).total_dim(cfg.dim_cap);
  State out = s;
  for (std::size_t c = 1; c < copies; ++c) out = tensor_product(out, s, cfg);
  return out;
}

Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims, const FactorSet& kept_in) {
  validate_factor_set(kept_in, dims.size(), false);
  FactorSet kept = kept_in;
  std::sort(kept.begin(), kept.end());
  const auto strides = strides_of(dims);
  FactorSet traced;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (std::find(kept.begin(), kept.end(), k) == kept.end()) traced.push_back(k);
  const auto off_k = offsets_over(dims, strides, kept);
  const auto off_t = offsets_over(dims, strides, traced);
  const auto nk = static_cast<Eigen::Index>(off_k.size());
  Matrix out = Matrix::Zero(nk, nk);
  for (Eigen::Index a = 0; a < nk; ++a)
    for (Eigen::Index b = 0; b < nk; ++b) {
      cplx acc = 0.0;
      for (std::size_t t : off_t)
        acc += m(static_cast<Eigen::Index>(off_k[a] + t), static_cast<Eigen::Index>(off_k[b] + t));
      out(a, b) = acc;
    }
  return out;
}

State partial_trace(const State& s, const FactorSet& kept) {
  Matrix m = partial_trace(s.matrix(), s.layout().dims, kept);
  FactorSet sorted = kept;
  std::sort(sorted.begin(), sorted.end());
  return State::trusted(std::move(m), s.layout().subset(sorted));
}

State marginal(const State& s, std::initializer_list<Party> parties) {
  FactorSet kept;
  for (std::size_t k = 0; k < s.layout().size(); ++k)
    if (std::find(parties.begin(), parties.end(), s.layout().parties[k]) != parties.end())
      kept.push_back(k);
  if (kept.empty()) throw std::invalid_argument("marginal: no factor belongs to the requested parties");
  return partial_trace(s, kept);
}

std::vector<std::size_t> factor_permutation_map(std::span<const std::size_t> dims,
                                                const FactorSet& perm) {
  if (perm.size() != dims.size()) throw std::invalid_argument("permutation length mismatch");
  validate_factor_set(perm, dims.size(), dims.empty());
  const auto strides = strides_of(dims);
  return offsets_over(dims, strides, perm);
}

Matrix permute_factors(const Matrix& m, std::span<const std::size_t> dims, const FactorSet& perm) {
  const auto map = factor_permutation_map(dims, perm);
  const auto n = static_cast<Eigen::Index>(map.size());
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      out(i, j) = m(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j]));
  return out;
}

Vector permute_factors(const Vector& v, std::span<const std::size_t> dims, const FactorSet& perm) {
  const auto map = factor_permutation_map(dims, perm);
  Vector out(v.size());
  for (std::size_t i = 0; i < map.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(map[i]));
  return out;
}

Matrix permutation_unitary(std::span<const std::size_t> dims, const FactorSet& perm) {
  const auto map = factor_permutation_map(dims, perm);
  const auto n = static_cast<Eigen::Index>(map.size());
  Matrix u = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) u(i, static_cast<Eigen::Index>(map[i])) = 1.0;
  return u;
}

State permute_factors(const State& s, const FactorSet& perm) {
  return State::trusted(permute_factors(s.matrix(), s.layout().dims, perm), s.layout().permuted(perm));
}

PureState permute_factors(const PureState& s, const FactorSet& perm) {
  return PureState::trusted(permute_factors(s.amplitudes(), s.layout().dims, perm),
                            s.layout().permuted(perm));
}

Eigensystem eigensystem(const Matrix& h, const NumericConfig& cfg) {
  if (!is_hermitian(h, cfg.herm_tol)) throw std::invalid_argument("eigensystem: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto n = h.rows();
  Eigensystem out{RealVector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

RealVector spectrum(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

Matrix sqrt_psd(const Matrix& a, const NumericConfig& cfg) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.eigenvalues().size() > 0 && es.eigenvalues().minCoeff() < -cfg.psd_tol)
    throw std::invalid_argument("sqrt_psd: matrix is not positive semidefinite");
  RealVector root = es.eigenvalues().unaryExpr([&](double x) { return x < cfg.clip ? 0.0 : std::sqrt(x); });
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

PureState purify(const State& s, const NumericConfig& cfg) {
  const Eigensystem es = eigensystem(s.matrix(), cfg);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values(i) > cfg.rank_tol) ++rank;
  rank = std::max<std::size_t>(rank, 1);
  const auto n = static_cast<Eigen::Index>(s.dim());
  const auto r = static_cast<Eigen::Index>(rank);
  Vector psi = Vector::Zero(n * r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const double w = std::sqrt(std::max(es.values(i), 0.0));
    for (Eigen::Index x = 0; x < n; ++x) psi(x * r + i) = w * es.vectors(x, i);
  }
  psi /= psi.norm();
  return PureState::trusted(std::move(psi), concat(s.layout(), Layout({rank}, {Party::E})));
}

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double fidelity(const Matrix& a, const Matrix& b, const NumericConfig& cfg) {
  if (a.rows() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols())
    throw std::invalid_argument("fidelity: dimension mismatch");
  const double r = trace_norm(sqrt_psd(a, cfg) * sqrt_psd(b, cfg));
  return r * r;
}

double fidelity(const State& a, const State& b, const NumericConfig& cfg) {
  return fidelity(a.matrix(), b.matrix(), cfg);
}

double fidelity_with_pure(const Matrix& a, const Vector& phi) {
  return std::max(0.0, phi.dot(a * phi).real());
}

SchmidtDecomposition schmidt_decomposition(const PureState& p, const FactorSet& left_factors,
                                           const NumericConfig& cfg) {
  const Layout& l = p.layout();
  validate_factor_set(left_factors, l.size(), false);
  FactorSet left = left_factors;
  std::sort(left.begin(), left.end());
  FactorSet right = l.factors_not_in(left);
  if (right.empty()) throw std::invalid_argument("schmidt_decomposition: bipartition has an empty side");
  FactorSet perm = left;
  perm.insert(perm.end(), right.begin(), right.end());
  const Vector v = permute_factors(p.amplitudes(), l.dims, perm);
  const auto dl = static_cast<Eigen::Index>(l.dim_of(left));
  const auto dr = static_cast<Eigen::Index>(l.dim_of(right));
  Matrix m(dl, dr);
  for (Eigen::Index i = 0; i < dl; ++i)
    for (Eigen::Index j = 0; j < dr; ++j) m(i, j) = v(i * dr + j);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.left = svd.matrixU();
  out.right = svd.matrixV().conjugate();
  out.rank = 0;
  for (Eigen::Index i = 0; i < out.coefficients.size(); ++i)
    if (out.coefficients(i) > cfg.rank_tol) ++out.rank;
  out.left_factors = std::move(left);
  out.right_factors = std::move(right);
  return out;
}

std::size_t schmidt_rank(const PureState& p, const FactorSet& left_factors, const NumericConfig& cfg) {
  return schmidt_decomposition(p, left_factors, cfg).rank;
}

}  // namespace qmerge
