#include "qmerge/merging_example.hpp"

#include <cmath>
#include <stdexcept>

#include "qmerge/entropy.hpp"

namespace qmerge {

namespace {

void require_two_factor(const Layout& l, const char* what) {
  if (l.size() != 2 || l.parties[0] != Party::A || l.parties[1] != Party::B)
    throw std::invalid_argument(std::string(what) + ": base state must have layout [A, B], got " + describe(l));
}

Matrix kron_all(const std::vector<Matrix>& ms) {
  Matrix out = Matrix::Identity(1, 1);
  for (const Matrix& m : ms) out = kron(out, m);
  return out;
}

double overlap(const Matrix& a, const Matrix& b) { return trace_norm(a * b); }

}  // namespace

ExampleFamily build_example_family(const State& rho1, std::size_t n, const NumericConfig& cfg) {
  require_two_factor(rho1.layout(), "example family");
  if (n == 0) throw std::invalid_argument("example family: N must be positive");
  const double ce = conditional_entropy(rho1, Party::A, Party::B, cfg).value;
  if (!(ce < -1e-9))
    throw std::invalid_argument("example family: S(A|B) = " + std::to_string(ce) + " is not negative");
  const std::size_t da = rho1.layout().dims[0], db = rho1.layout().dims[1];

  const Eigensystem ea = eigensystem(partial_trace(rho1, {0}).matrix(), cfg);
  std::size_t r = 0;
  while (r < da && ea.values(static_cast<Eigen::Index>(r)) > cfg.rank_tol) ++r;
  check_cap("example enlarged A dimension N r", n * r, cfg.dim_cap);
  check_cap("example member dimension", n * r * db, cfg.dim_cap);

  // Full-rank marginals keep the original basis so that U_1 = I on H_A.
  const Matrix support = r == da ? Matrix::Identity(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(da))
                                 : Matrix(ea.vectors.leftCols(static_cast<Eigen::Index>(r)));
  ExampleFamily fam{rho1, rho1, support, n, r, {}, {}, {}, StateSet({rho1})};
  const Matrix q = kron(fam.support, Matrix::Identity(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db)));
  const Layout small({r, db}, {Party::A, Party::B});
  fam.compressed = State(q.adjoint() * rho1.matrix() * q, small, cfg);

  const auto nr = static_cast<Eigen::Index>(n * r), ri = static_cast<Eigen::Index>(r);
  const Layout big({n * r, db}, {Party::A, Party::B});
  std::vector<State> members;
  for (std::size_t s = 0; s < n; ++s) {
    Matrix u = Matrix::Zero(nr, nr);
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t i = 0; i < r; ++i)
        u(static_cast<Eigen::Index>(((b + s) % n) * r + i), static_cast<Eigen::Index>(b * r + i)) = 1.0;
    Matrix pi = Matrix::Zero(nr, nr);
    pi.block(static_cast<Eigen::Index>(s) * ri, static_cast<Eigen::Index>(s) * ri, ri, ri).setIdentity();
    fam.embeddings.push_back(u.leftCols(ri));
    fam.unitaries.push_back(std::move(u));
    fam.projectors.push_back(std::move(pi));
    const Matrix w = kron(fam.embeddings.back(), Matrix::Identity(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db)));
    members.emplace_back(w * fam.compressed.matrix() * w.adjoint(), big, cfg);
  }
  fam.members = StateSet(std::move(members), {}, cfg);
  const FamilyCheck c = check_family(fam);
  if (!c.ok())
    throw std::logic_error("example family: invariants violated (marginal overlap " +
                           std::to_string(c.max_marginal_overlap) + ", joint overlap " +
                           std::to_string(c.max_joint_overlap) + ", B gap " + std::to_string(c.max_b_marginal_gap) + ")");
  return fam;
}

FamilyCheck check_family(const ExampleFamily& fam) {
  FamilyCheck c;
  const auto& m = fam.members.members();
  const Matrix b0 = partial_trace(m[0], {1}).matrix();
  for (std::size_t s = 0; s < m.size(); ++s) {
    const Matrix as = partial_trace(m[s], {0}).matrix();
    c.max_b_marginal_gap = std::max(c.max_b_marginal_gap, trace_norm(partial_trace(m[s], {1}).matrix() - b0));
    for (std::size_t t = s + 1; t < m.size(); ++t) {
      c.max_marginal_overlap = std::max(c.max_marginal_overlap, overlap(as, partial_trace(m[t], {0}).matrix()));
      c.max_joint_overlap = std::max(c.max_joint_overlap, overlap(m[s].matrix(), m[t].matrix()));
    }
  }
  return c;
}

Instrument discriminating_instrument(const ExampleFamily& fam, const NumericConfig& cfg) {
  std::vector<CpMap> maps;
  for (const Matrix& w : fam.embeddings) maps.emplace_back(std::vector<Matrix>{w.adjoint()}, cfg);
  return Instrument(std::move(maps), cfg);
}

double discrimination_error(const ExampleFamily& fam, const Instrument& v, const NumericConfig& cfg) {
  double worst = 0.0;
  for (std::size_t s = 0; s < fam.n; ++s)
    for (std::size_t t = 0; t < v.size(); ++t) {
      const CpMapResult out = apply_cp_map(v.outcomes()[t], fam.members[s], {0}, cfg);
      const Matrix expected = s == t ? fam.compressed.matrix() : Matrix::Zero(out.output.rows(), out.output.cols());
      worst = std::max(worst, trace_norm(out.output - expected));
    }
  return worst;
}

MergingProtocol known_pure_state_merging(const State& rho1, std::size_t l, const NumericConfig& cfg) {
  require_two_factor(rho1.layout(), "known pure state merging");
  if (l == 0) throw std::invalid_argument("known pure state merging: l must be positive");
  const Eigensystem es = eigensystem(rho1.matrix(), cfg);
  if (es.values(0) < 1.0 - cfg.trace_tol)
    throw std::invalid_argument("known pure state merging: base state is mixed (largest eigenvalue " +
                                std::to_string(es.values(0)) + ")");
  const std::size_t da = rho1.layout().dims[0], db = rho1.layout().dims[1];
  const auto dai = static_cast<Eigen::Index>(da), dbi = static_cast<Eigen::Index>(db);
  const Vector psi = es.vectors.col(0);
  Matrix coeffs(dai, dbi);
  for (Eigen::Index a = 0; a < dai; ++a)
    for (Eigen::Index b = 0; b < dbi; ++b) coeffs(a, b) = psi(a * dbi + b);
  Eigen::JacobiSVD<Matrix> svd(coeffs, Eigen::ComputeFullU | Eigen::ComputeFullV);
  std::size_t r = 0;
  while (r < std::min(da, db) && svd.singularValues()(static_cast<Eigen::Index>(r)) > std::sqrt(cfg.rank_tol)) ++r;
  const auto ri = static_cast<Eigen::Index>(r);
  // psi = sum_i sigma_i |u_i> |conj(v_i)>.
  const Matrix& u = svd.matrixU();
  const Matrix vb = svd.matrixV().conjugate();

  std::size_t rl = 1;
  for (std::size_t j = 0; j < l; ++j) rl *= r;
  const Layout copy = rho1.layout();
  check_cap("known pure state merging output", rl * copy.repeated(l).total_dim(cfg.dim_cap), cfg.dim_cap);

  std::vector<Matrix> ka;
  {
    Matrix k = Matrix::Zero(ri, dai);
    for (Eigen::Index i = 0; i < ri; ++i) k.row(i) = u.col(i).adjoint();
    ka.push_back(k);
    for (Eigen::Index i = ri; i < dai; ++i) {
      Matrix c = Matrix::Zero(ri, dai);
      c.row(0) = u.col(i).adjoint();
      ka.push_back(c);
    }
  }
  std::vector<Matrix> kb;
  {
    Matrix k = Matrix::Zero(ri * dai * dbi, dbi);
    for (Eigen::Index i = 0; i < ri; ++i) {
      Vector kb_i = Vector::Zero(ri);
      kb_i(i) = 1.0;
      k += kron(kb_i, psi) * vb.col(i).adjoint();
    }
    kb.push_back(k);
    Vector zero = Vector::Zero(ri);
    zero(0) = 1.0;
    for (Eigen::Index i = ri; i < dbi; ++i) kb.push_back(kron(zero, psi) * vb.col(i).adjoint());
  }
  CpMap a_map(ka, cfg), b_map(kb, cfg);
  CpMap a_all = a_map, b_all = b_map;
  for (std::size_t j = 1; j < l; ++j) {
    a_all = tensor(a_all, a_map, cfg);
    b_all = tensor(b_all, b_map, cfg);
  }
  // Per-copy B output is (KB_j, B'_j, B_j); gather the KB factors first.
  std::vector<std::size_t> dims;
  FactorSet perm;
  for (std::size_t j = 0; j < l; ++j) {
    dims.insert(dims.end(), {r, da, db});
    perm.push_back(3 * j);
  }
  for (std::size_t j = 0; j < l; ++j) perm.insert(perm.end(), {3 * j + 1, 3 * j + 2});
  b_all = compose(CpMap::unitary(permutation_unitary(dims, perm)), b_all, cfg);

  OneWayLoccChannel locc(merging_input_layout(copy, l, 1), merging_output_layout(copy, l, rl),
                         Instrument({a_all}, cfg), {b_all}, cfg);
  return MergingProtocol(std::move(locc), resource_state(1), resource_state(rl), copy, l, cfg);
}

MergingProtocol example_merging_protocol(const ExampleFamily& fam, const MergingProtocol& sub, std::size_t l,
                                         std::size_t word_cap, const NumericConfig& cfg) {
  if (sub.blocklength() != l)
    throw std::invalid_argument("example protocol: sub-protocol blocklength " + std::to_string(sub.blocklength()) +
                                " differs from l = " + std::to_string(l));
  if (!(sub.copy_layout() == fam.compressed.layout()))
    throw std::invalid_argument("example protocol: sub-protocol copies " + describe(sub.copy_layout()) +
                                " do not match the base state " + describe(fam.compressed.layout()));
  std::size_t words = 1;
  for (std::size_t j = 0; j < l; ++j) {
    check_cap("example protocol words N^l", words * fam.n, word_cap);
    words *= fam.n;
  }
  check_cap("example protocol messages", words * sub.messages(), cfg.dim_cap * cfg.dim_cap);
  const std::size_t rin = sub.k().input_rank, rout = sub.k().output_rank;
  const Layout copy = fam.copy_layout();
  const Layout in = merging_input_layout(copy, l, rin), out = merging_output_layout(copy, l, rout);
  const std::size_t db = copy.dims[1];
  const Matrix id_b = Matrix::Identity(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db));

  std::vector<CpMap> a_maps, b_maps;
  Word w(l, 0);
  for (std::size_t i = 0; i < words; ++i) {
    std::vector<Matrix> down{Matrix::Identity(static_cast<Eigen::Index>(rin), static_cast<Eigen::Index>(rin))};
    std::vector<Matrix> up{Matrix::Identity(static_cast<Eigen::Index>(rout), static_cast<Eigen::Index>(rout))};
    for (std::size_t s : w) {
      down.push_back(fam.embeddings[s].adjoint());
      up.push_back(kron(fam.embeddings[s], id_b));
    }
    const Matrix v = kron_all(down), u = kron_all(up);
    for (std::size_t k = 0; k < sub.messages(); ++k) {
      std::vector<Matrix> ka, kb;
      for (const Matrix& x : sub.locc().a_instrument().outcomes()[k].kraus()) ka.push_back(x * v);
      for (const Matrix& y : sub.locc().b_channels()[k].kraus()) kb.push_back(u * y);
      a_maps.emplace_back(std::move(ka), cfg);
      b_maps.emplace_back(std::move(kb), cfg);
    }
    for (std::size_t j = l; j-- > 0;) {
      if (++w[j] < fam.n) break;
      w[j] = 0;
    }
  }
  OneWayLoccChannel locc(in, out, Instrument(std::move(a_maps), cfg), std::move(b_maps), cfg);
  return MergingProtocol(std::move(locc), sub.phi_in(), sub.phi_out(), copy, l, cfg);
}

RateGapReport rate_gap_report(const ExampleFamily& fam, std::size_t l, const std::optional<MergingProtocol>& sub,
                              const SimplexOptions& opts, const NumericConfig& cfg) {
  RateGapReport r;
  r.n = fam.n;
  r.blocklength = l;
  r.log_n = std::log2(double(fam.n));
  r.base_conditional_entropy = conditional_entropy(fam.base, Party::A, Party::B, cfg).value;
  r.base_mutual_info_env = mutual_info_env(fam.base, Party::A, Party::B, cfg).value;
  r.hull_merging_closed = r.base_conditional_entropy + r.log_n;
  r.hull_classical_closed = r.base_mutual_info_env + 2 * r.log_n;
  r.hull_merging_numeric = compound_merging_cost(fam.members, SetScope::Hull, opts, cfg);
  r.hull_classical_numeric = compound_classical_cost(fam.members, SetScope::Hull, opts, cfg);
  r.closed_forms_agree = std::abs(r.hull_merging_numeric.value - r.hull_merging_closed) <= 1e-6 &&
                         std::abs(r.hull_classical_numeric.value - r.hull_classical_closed) <= 1e-6;

  const MergingProtocol base_sub = sub ? *sub : known_pure_state_merging(fam.compressed, l, cfg);
  const MergingProtocol protocol = example_merging_protocol(fam, base_sub, l, 1u << 12, cfg);
  r.messages = protocol.messages();
  r.sub_messages = base_sub.messages();
  r.protocol_entanglement_rate = protocol.k().log2() / double(l);
  r.protocol_classical_rate = std::log2(double(r.messages)) / double(l);
  r.protocol_fidelity = worst_case_protocol_fidelity(protocol, fam.members, l, {}, cfg);
  r.sub_fidelity = merging_fidelity(base_sub, tensor_power(fam.compressed, l, cfg), cfg);
  r.merging_gap = r.hull_merging_numeric.value - r.protocol_entanglement_rate;
  r.classical_gap = r.hull_classical_numeric.value - r.protocol_classical_rate;
  r.gaps_ok = r.merging_gap >= r.log_n - 1e-6 && r.classical_gap >= r.log_n - 1e-6;
  return r;
}

}  // namespace qmerge
