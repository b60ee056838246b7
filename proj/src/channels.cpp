#include "qmerge/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmerge {

namespace {

// Applies sum_K (I_lead (x) K) rho (I_lead (x) K)^dagger for rho ordered
// with the acted-on factors last.
Matrix apply_trailing(const Matrix& rho, std::size_t lead, const std::vector<Matrix>& kraus) {
  const auto din = kraus.front().cols();
  const auto dout = kraus.front().rows();
  const auto nl = static_cast<Eigen::Index>(lead);
  Matrix out = Matrix::Zero(nl * dout, nl * dout);
  for (Eigen::Index a = 0; a < nl; ++a)
    for (Eigen::Index b = 0; b < nl; ++b) {
      const Matrix block = rho.block(a * din, b * din, din, din);
      for (const Matrix& k : kraus) out.block(a * dout, b * dout, dout, dout).noalias() += k * block * k.adjoint();
    }
  return out;
}

std::size_t position_in(const FactorSet& s, std::size_t f) {
  return static_cast<std::size_t>(std::find(s.begin(), s.end(), f) - s.begin());
}

// Ordering [E..., A-held..., B-held...] of a layout made of `core` followed
// by pass-through E factors.
struct GroupedOrder {
  FactorSet perm;
  std::size_t e_dim = 1;
  std::size_t a_dim = 1;
  std::size_t b_dim = 1;
  Layout e_layout;
};

GroupedOrder grouped_order(const Layout& core, const Layout& full) {
  if (full.size() < core.size())
    throw std::invalid_argument("channel input layout " + describe(full) + " does not start with " + describe(core));
  for (std::size_t k = 0; k < core.size(); ++k)
    if (full.dims[k] != core.dims[k] || full.parties[k] != core.parties[k])
      throw std::invalid_argument("channel input layout " + describe(full) + " does not start with " +
                                  describe(core));
  GroupedOrder g;
  for (std::size_t k = core.size(); k < full.size(); ++k) {
    if (full.parties[k] != Party::E)
      throw std::invalid_argument("only E factors may follow a channel's input layout");
    g.perm.push_back(k);
    g.e_dim *= full.dims[k];
    g.e_layout.dims.push_back(full.dims[k]);
    g.e_layout.parties.push_back(Party::E);
  }
  const FactorSet a = core.factors_held_by_a();
  const FactorSet b = core.factors_held_by_b();
  g.perm.insert(g.perm.end(), a.begin(), a.end());
  g.perm.insert(g.perm.end(), b.begin(), b.end());
  g.a_dim = core.dim_of(a);
  g.b_dim = core.dim_of(b);
  return g;
}

// Permutation taking [E..., A-out..., B-out...] to out_layout followed by E.
FactorSet ungroup_permutation(const Layout& out, std::size_t n_e) {
  const FactorSet a = out.factors_held_by_a();
  const FactorSet b = out.factors_held_by_b();
  FactorSet perm;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (held_by_a(out.parties[j]))
      perm.push_back(n_e + position_in(a, j));
    else
      perm.push_back(n_e + a.size() + position_in(b, j));
  }
  for (std::size_t e = 0; e < n_e; ++e) perm.push_back(e);
  return perm;
}

void require_no_environment(const Layout& l, const char* which) {
  for (Party p : l.parties)
    if (!held_by_a(p) && !held_by_b(p))
      throw std::invalid_argument(std::string(which) + " layout may only hold A- or B-side factors");
}

bool is_maximally_entangled_register(const PureState& phi, std::size_t& rank, const NumericConfig& cfg) {
  const Layout& l = phi.layout();
  if (l.size() != 2 || l.parties[0] != Party::KA || l.parties[1] != Party::KB || l.dims[0] != l.dims[1])
    return false;
  rank = l.dims[0];
  if (rank == 1) return true;
  const auto sd = schmidt_decomposition(phi, {0}, cfg);
  if (sd.rank != rank) return false;
  const double c = 1.0 / std::sqrt(double(rank));
  for (Eigen::Index i = 0; i < sd.coefficients.size(); ++i)
    if (std::abs(sd.coefficients(i) - c) > cfg.close_tol) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------- CpMap

CpMap::CpMap(std::vector<Matrix> kraus, const NumericConfig& cfg) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw std::invalid_argument("cp map needs at least one Kraus operator");
  in_dim_ = static_cast<std::size_t>(kraus_.front().cols());
  out_dim_ = static_cast<std::size_t>(kraus_.front().rows());
  if (in_dim_ == 0 || out_dim_ == 0) throw std::invalid_argument("cp map: empty Kraus operator");
  for (const Matrix& k : kraus_)
    if (static_cast<std::size_t>(k.cols()) != in_dim_ || static_cast<std::size_t>(k.rows()) != out_dim_)
      throw std::invalid_argument("cp map: Kraus operators differ in shape");
  const RealVector ev = spectrum(gram());
  if (ev(0) > 1.0 + cfg.tp_tol) throw std::invalid_argument("cp map is not trace-nonincreasing");
}

CpMap CpMap::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return CpMap({Matrix::Identity(n, n)});
}

CpMap CpMap::unitary(const Matrix& u) { return CpMap({u}); }

Matrix CpMap::gram() const {
  const auto n = static_cast<Eigen::Index>(in_dim_);
  Matrix g = Matrix::Zero(n, n);
  for (const Matrix& k : kraus_) g.noalias() += k.adjoint() * k;
  return g;
}

bool CpMap::is_trace_preserving(double tol) const {
  const auto n = static_cast<Eigen::Index>(in_dim_);
  return (gram() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= tol;
}

Matrix CpMap::apply(const Matrix& rho) const {
  if (static_cast<std::size_t>(rho.rows()) != in_dim_)
    throw std::invalid_argument("cp map: input dimension mismatch");
  return apply_trailing(rho, 1, kraus_);
}

CpMap compose(const CpMap& second, const CpMap& first, const NumericConfig& cfg) {
  if (second.in_dim() != first.out_dim()) throw std::invalid_argument("compose: dimension mismatch");
  std::vector<Matrix> k;
  k.reserve(second.kraus().size() * first.kraus().size());
  for (const Matrix& s : second.kraus())
    for (const Matrix& f : first.kraus()) k.push_back(s * f);
  return CpMap(std::move(k), cfg);
}

CpMap tensor(const CpMap& a, const CpMap& b, const NumericConfig& cfg) {
  std::vector<Matrix> k;
  k.reserve(a.kraus().size() * b.kraus().size());
  for (const Matrix& x : a.kraus())
    for (const Matrix& y : b.kraus()) k.push_back(kron(x, y));
  return CpMap(std::move(k), cfg);
}

// ----------------------------------------------------------- Instrument

Instrument::Instrument(std::vector<CpMap> outcomes, const NumericConfig& cfg) : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw std::invalid_argument("instrument needs at least one outcome");
  const std::size_t din = outcomes_.front().in_dim();
  const std::size_t dout = outcomes_.front().out_dim();
  const auto n = static_cast<Eigen::Index>(din);
  Matrix total = Matrix::Zero(n, n);
  for (const CpMap& m : outcomes_) {
    if (m.in_dim() != din || m.out_dim() != dout)
      throw std::invalid_argument("instrument outcomes differ in dimensions");
    total += m.gram();
  }
  if ((total - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > cfg.tp_tol)
    throw std::invalid_argument("instrument outcomes do not sum to a trace-preserving map");
}

Instrument Instrument::trivial(std::size_t d) { return Instrument({CpMap::identity(d)}); }

Instrument Instrument::projective(const std::vector<Matrix>& projectors, const NumericConfig& cfg) {
  std::vector<CpMap> out;
  out.reserve(projectors.size());
  for (const Matrix& p : projectors) out.emplace_back(std::vector<Matrix>{p}, cfg);
  return Instrument(std::move(out), cfg);
}

Instrument extend_identity_front(const Instrument& e, std::size_t d, const NumericConfig& cfg) {
  if (d == 1) return e;
  const auto n = static_cast<Eigen::Index>(d);
  const Matrix id = Matrix::Identity(n, n);
  std::vector<CpMap> out;
  for (const CpMap& m : e.outcomes()) {
    std::vector<Matrix> k;
    for (const Matrix& x : m.kraus()) k.push_back(kron(id, x));
    out.emplace_back(std::move(k), cfg);
  }
  return Instrument(std::move(out), cfg);
}

// ----------------------------------------------------- map application

CpMapResult apply_cp_map(const CpMap& m, const State& s, const FactorSet& targets, const NumericConfig& cfg) {
  const Layout& l = s.layout();
  if (targets.empty()) throw std::invalid_argument("apply_cp_map: empty target set");
  for (std::size_t t : targets)
    if (t >= l.size()) throw std::invalid_argument("apply_cp_map: target factor out of range");
  if (l.dim_of(targets) != m.in_dim())
    throw std::invalid_argument("apply_cp_map: target dimension " + std::to_string(l.dim_of(targets)) +
                                " does not match map input " + std::to_string(m.in_dim()));
  const FactorSet rest = l.factors_not_in(targets);
  FactorSet perm = rest;
  perm.insert(perm.end(), targets.begin(), targets.end());
  const Matrix rho = permute_factors(s.matrix(), l.dims, perm);
  const std::size_t lead = l.dim_of(rest);
  check_cap("cp map output dimension", lead * m.out_dim(), cfg.dim_cap);
  Matrix out = apply_trailing(rho, lead, m.kraus());

  CpMapResult r;
  if (m.out_dim() == m.in_dim()) {
    const Layout lp = l.permuted(perm);
    FactorSet back(l.size());
    for (std::size_t f = 0; f < l.size(); ++f) back[f] = position_in(perm, f);
    r.output = permute_factors(out, lp.dims, back);
    r.layout = l;
  } else {
    const std::size_t first = *std::min_element(targets.begin(), targets.end());
    Layout cur = l.subset(rest);
    cur.dims.push_back(m.out_dim());
    cur.parties.push_back(l.parties[targets.front()]);
    std::size_t q = 0;
    while (q < rest.size() && rest[q] < first) ++q;
    FactorSet back;
    for (std::size_t j = 0; j <= rest.size(); ++j)
      back.push_back(j < q ? j : (j == q ? rest.size() : j - 1));
    r.output = permute_factors(out, cur.dims, back);
    r.layout = cur.permuted(back);
  }
  r.weight = r.output.trace().real();
  return r;
}

InstrumentStatistics instrument_statistics(const Instrument& e, const State& s, const FactorSet& targets,
                                           const NumericConfig& cfg) {
  InstrumentStatistics stats;
  for (std::size_t k = 0; k < e.size(); ++k) {
    CpMapResult r = apply_cp_map(e.outcomes()[k], s, targets, cfg);
    if (r.weight <= cfg.prob_tol) {
      stats.dropped.push_back(k);
      continue;
    }
    Matrix rho = r.output / r.weight;
    rho = (rho + rho.adjoint()) / 2.0;
    stats.kept.push_back({k, r.weight, State::trusted(std::move(rho), std::move(r.layout))});
  }
  return stats;
}

// ---------------------------------------------------------- one-way LOCC

OneWayLoccChannel::OneWayLoccChannel(Layout in_layout, Layout out_layout, Instrument a_instrument,
                                     std::vector<CpMap> b_channels, const NumericConfig& cfg)
    : in_layout_(std::move(in_layout)),
      out_layout_(std::move(out_layout)),
      a_instrument_(std::move(a_instrument)),
      b_channels_(std::move(b_channels)) {
  require_no_environment(in_layout_, "LOCC input");
  require_no_environment(out_layout_, "LOCC output");
  if (a_instrument_.in_dim() != in_layout_.dim_of(in_layout_.factors_held_by_a()) ||
      a_instrument_.out_dim() != out_layout_.dim_of(out_layout_.factors_held_by_a()))
    throw std::invalid_argument("LOCC: instrument dimensions do not match the A-side factors");
  if (b_channels_.size() != a_instrument_.size())
    throw std::invalid_argument("LOCC: one B channel is required per instrument outcome");
  const std::size_t bin = in_layout_.dim_of(in_layout_.factors_held_by_b());
  const std::size_t bout = out_layout_.dim_of(out_layout_.factors_held_by_b());
  for (const CpMap& r : b_channels_) {
    if (r.in_dim() != bin || r.out_dim() != bout)
      throw std::invalid_argument("LOCC: B channel dimensions do not match the B-side factors");
    if (!r.is_trace_preserving(cfg.tp_tol)) throw std::invalid_argument("LOCC: B channel is not trace-preserving");
  }
}

OneWayLoccChannel OneWayLoccChannel::identity(const Layout& layout) {
  return OneWayLoccChannel(layout, layout, Instrument::trivial(layout.dim_of(layout.factors_held_by_a())),
                           {CpMap::identity(layout.dim_of(layout.factors_held_by_b()))});
}

Matrix apply_one_way_locc(const OneWayLoccChannel& n, const Matrix& rho, const Layout& layout,
                          const NumericConfig& cfg) {
  const GroupedOrder g = grouped_order(n.in_layout(), layout);
  const Matrix grouped = permute_factors(rho, layout.dims, g.perm);
  const Layout& out = n.out_layout();
  const std::size_t aout = out.dim_of(out.factors_held_by_a());
  const std::size_t bout = out.dim_of(out.factors_held_by_b());
  check_cap("LOCC output dimension", g.e_dim * aout * bout, cfg.dim_cap);

  const auto ne = static_cast<Eigen::Index>(g.e_dim);
  const auto d_out = static_cast<Eigen::Index>(aout * bout);
  Matrix acc = Matrix::Zero(ne * d_out, ne * d_out);
  for (std::size_t k = 0; k < n.messages(); ++k) {
    std::vector<Matrix> pairs;
    for (const Matrix& ka : n.a_instrument().outcomes()[k].kraus())
      for (const Matrix& kb : n.b_channels()[k].kraus()) pairs.push_back(kron(ka, kb));
    acc += apply_trailing(grouped, g.e_dim, pairs);
  }
  Layout cur = g.e_layout;
  cur = concat(cur, out.subset(out.factors_held_by_a()));
  cur = concat(cur, out.subset(out.factors_held_by_b()));
  return permute_factors(acc, cur.dims, ungroup_permutation(out, g.e_layout.size()));
}

State apply_one_way_locc(const OneWayLoccChannel& n, const State& s, const NumericConfig& cfg) {
  Matrix out = apply_one_way_locc(n, s.matrix(), s.layout(), cfg);
  Layout l = n.out_layout();
  for (std::size_t k = n.in_layout().size(); k < s.layout().size(); ++k) {
    l.dims.push_back(s.layout().dims[k]);
    l.parties.push_back(Party::E);
  }
  out = (out + out.adjoint()) / 2.0;
  return State::trusted(std::move(out), std::move(l));
}

double pure_transfer_fidelity(const OneWayLoccChannel& n, const PureState& input, const PureState& target,
                              const NumericConfig& cfg) {
  const GroupedOrder gi = grouped_order(n.in_layout(), input.layout());
  const GroupedOrder go = grouped_order(n.out_layout(), target.layout());
  if (!(gi.e_layout == go.e_layout))
    throw std::invalid_argument("input and target carry different environment factors");
  check_cap("LOCC output dimension", go.e_dim * go.a_dim * go.b_dim, cfg.dim_cap);
  const Vector v = permute_factors(input.amplitudes(), input.layout().dims, gi.perm);
  const Vector t = permute_factors(target.amplitudes(), target.layout().dims, go.perm);
  const auto ne = static_cast<Eigen::Index>(gi.e_dim);
  const auto da = static_cast<Eigen::Index>(gi.a_dim);
  const auto db = static_cast<Eigen::Index>(gi.b_dim);
  const auto ta = static_cast<Eigen::Index>(go.a_dim);
  const auto tb = static_cast<Eigen::Index>(go.b_dim);

  // Row-major slices V_e (da x db) and T_e (ta x tb).
  auto slice = [](const Vector& x, Eigen::Index e, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = x(e * rows * cols + i * cols + j);
    return m;
  };
  std::vector<Matrix> vs, ts;
  for (Eigen::Index e = 0; e < ne; ++e) {
    vs.push_back(slice(v, e, da, db));
    ts.push_back(slice(t, e, ta, tb));
  }

  // <t|(K (x) L (x) I)|v> = tr(K G) with G = sum_e V_e L^T T_e^dagger.
  double total = 0.0;
  for (std::size_t k = 0; k < n.messages(); ++k) {
    for (const Matrix& l : n.b_channels()[k].kraus()) {
      Matrix g = Matrix::Zero(da, ta);
      for (Eigen::Index e = 0; e < ne; ++e) g.noalias() += vs[e] * l.transpose() * ts[e].adjoint();
      for (const Matrix& ka : n.a_instrument().outcomes()[k].kraus())
        total += std::norm(ka.transpose().cwiseProduct(g).sum());
    }
  }
  return total;
}

// --------------------------------------------------------------- merging

double SchmidtRatio::log2() const { return std::log2(double(input_rank)) - std::log2(double(output_rank)); }

PureState resource_state(std::size_t schmidt_rank) {
  return maximally_entangled(schmidt_rank, Party::KA, Party::KB);
}

Layout merging_input_layout(const Layout& copy_layout, std::size_t l, std::size_t input_rank) {
  return concat(Layout({input_rank, input_rank}, {Party::KA, Party::KB}), copy_layout.repeated(l));
}

Layout merging_output_layout(const Layout& copy_layout, std::size_t l, std::size_t output_rank) {
  return concat(Layout({output_rank, output_rank}, {Party::KA, Party::KB}),
                copy_layout.relabeled(Party::A, Party::BPrime).repeated(l));
}

MergingProtocol::MergingProtocol(OneWayLoccChannel locc, PureState phi_in, PureState phi_out, Layout copy_layout,
                                 std::size_t blocklength, const NumericConfig& cfg)
    : locc_(std::move(locc)),
      phi_in_(std::move(phi_in)),
      phi_out_(std::move(phi_out)),
      copy_layout_(std::move(copy_layout)),
      blocklength_(blocklength) {
  if (blocklength_ == 0) throw std::invalid_argument("merging protocol: blocklength must be positive");
  for (Party p : copy_layout_.parties)
    if (p != Party::A && p != Party::B)
      throw std::invalid_argument("merging protocol: copy layout may only contain A and B factors");
  if (!is_maximally_entangled_register(phi_in_, ratio_.input_rank, cfg))
    throw std::invalid_argument("merging protocol: phi_in is not a full-rank maximally entangled KA:KB register");
  if (!is_maximally_entangled_register(phi_out_, ratio_.output_rank, cfg))
    throw std::invalid_argument("merging protocol: phi_out is not a full-rank maximally entangled KA:KB register");
  if (!(locc_.in_layout() == merging_input_layout(copy_layout_, blocklength_, ratio_.input_rank)))
    throw std::invalid_argument("merging protocol: LOCC input layout " + describe(locc_.in_layout()) +
                                " does not match resource + copies");
  if (!(locc_.out_layout() == merging_output_layout(copy_layout_, blocklength_, ratio_.output_rank)))
    throw std::invalid_argument("merging protocol: LOCC output layout " + describe(locc_.out_layout()) +
                                " does not match resource + relabelled copies");
}

double merging_fidelity(const MergingProtocol& p, const PureState& purification, const NumericConfig& cfg) {
  const Layout copies = p.copy_layout().repeated(p.blocklength());
  const Layout& l = purification.layout();
  if (l.size() < copies.size()) throw std::invalid_argument("merging fidelity: purification layout too short");
  for (std::size_t k = 0; k < copies.size(); ++k)
    if (l.dims[k] != copies.dims[k] || l.parties[k] != copies.parties[k])
      throw std::invalid_argument("merging fidelity: purification layout " + describe(l) +
                                  " does not start with the protocol's copies " + describe(copies));
  std::size_t e_dim = 1;
  for (std::size_t k = copies.size(); k < l.size(); ++k) {
    if (l.parties[k] != Party::E) throw std::invalid_argument("merging fidelity: purifying factors must be E");
    e_dim *= l.dims[k];
  }
  check_cap("merging fidelity output", p.locc().out_layout().total_dim(cfg.dim_cap) * e_dim, cfg.dim_cap);
  check_cap("merging fidelity input", p.locc().in_layout().total_dim(cfg.dim_cap) * e_dim, cfg.dim_cap);
  const PureState input = tensor_product(p.phi_in(), purification, cfg);
  const PureState target = tensor_product(p.phi_out(), purification.relabeled(Party::A, Party::BPrime), cfg);
  return std::clamp(pure_transfer_fidelity(p.locc(), input, target, cfg), 0.0, 1.0);
}

double merging_fidelity(const MergingProtocol& p, const State& rho, const NumericConfig& cfg) {
  const Layout copies = p.copy_layout().repeated(p.blocklength());
  if (!(rho.layout() == copies))
    throw std::invalid_argument("merging fidelity: state layout " + describe(rho.layout()) +
                                " does not match protocol copies " + describe(copies));
  return merging_fidelity(p, purify(rho, cfg), cfg);
}

CpMap permutation_channel(const FactorSet& sigma, const Layout& copy_layout) {
  const std::size_t l = sigma.size();
  const std::size_t nc = copy_layout.size();
  FactorSet check = sigma;
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < l; ++i)
    if (check[i] != i) throw std::invalid_argument("permutation_channel: not a permutation");
  FactorSet perm;
  for (std::size_t j = 0; j < l; ++j)
    for (std::size_t f = 0; f < nc; ++f) perm.push_back(sigma[j] * nc + f);
  const Layout full = copy_layout.repeated(l);
  return CpMap::unitary(permutation_unitary(full.dims, perm));
}

namespace {

OneWayLoccChannel compose_channels(const Instrument& e, const Layout& in_layout,
                                   const std::vector<const OneWayLoccChannel*>& subs, const NumericConfig& cfg) {
  if (subs.empty() || subs.size() != e.size())
    throw std::invalid_argument("compose: one subprotocol is required per instrument outcome");
  const Layout& sub_in = subs.front()->in_layout();
  const Layout& sub_out = subs.front()->out_layout();
  for (const auto* s : subs)
    if (!(s->in_layout() == sub_in) || !(s->out_layout() == sub_out))
      throw std::invalid_argument("compose: subprotocols act on different spaces");
  if (e.in_dim() != in_layout.dim_of(in_layout.factors_held_by_a()))
    throw std::invalid_argument("compose: instrument input does not match the A-side factors");
  if (e.out_dim() != sub_in.dim_of(sub_in.factors_held_by_a()))
    throw std::invalid_argument("compose: instrument output does not match the subprotocol A-side input");
  if (in_layout.dim_of(in_layout.factors_held_by_b()) != sub_in.dim_of(sub_in.factors_held_by_b()))
    throw std::invalid_argument("compose: B-side input spaces differ");
  std::vector<CpMap> a_maps;
  std::vector<CpMap> b_maps;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const OneWayLoccChannel& s = *subs[i];
    for (std::size_t k = 0; k < s.messages(); ++k) {
      a_maps.push_back(compose(s.a_instrument().outcomes()[k], e.outcomes()[i], cfg));
      b_maps.push_back(s.b_channels()[k]);
    }
  }
  return OneWayLoccChannel(in_layout, sub_out, Instrument(std::move(a_maps), cfg), std::move(b_maps), cfg);
}

}  // namespace

MergingProtocol compose_instrument_with_protocols(const Instrument& e, const std::vector<MergingProtocol>& subprotocols,
                                                  const std::optional<Layout>& copy_layout, const NumericConfig& cfg) {
  if (subprotocols.empty()) throw std::invalid_argument("compose: no subprotocols");
  const MergingProtocol& first = subprotocols.front();
  std::vector<const OneWayLoccChannel*> channels;
  for (const MergingProtocol& s : subprotocols) {
    if (s.blocklength() != first.blocklength() || !(s.phi_in().layout() == first.phi_in().layout()) ||
        !(s.phi_out().layout() == first.phi_out().layout()) ||
        (s.phi_in().amplitudes() - first.phi_in().amplitudes()).norm() > cfg.close_tol ||
        (s.phi_out().amplitudes() - first.phi_out().amplitudes()).norm() > cfg.close_tol)
      throw std::invalid_argument("compose: subprotocols must share blocklength and resource states");
    channels.push_back(&s.locc());
  }
  const Layout copy = copy_layout.value_or(first.copy_layout());
  const Layout in = merging_input_layout(copy, first.blocklength(), first.k().input_rank);
  OneWayLoccChannel composed = compose_channels(e, in, channels, cfg);
  return MergingProtocol(std::move(composed), first.phi_in(), first.phi_out(), copy, first.blocklength(), cfg);
}

OneWayLoccChannel compose_instrument_with_channels(const Instrument& e, const Layout& in_layout,
                                                   const std::vector<OneWayLoccChannel>& subs,
                                                   const NumericConfig& cfg) {
  std::vector<const OneWayLoccChannel*> ptrs;
  for (const auto& s : subs) ptrs.push_back(&s);
  return compose_channels(e, in_layout, ptrs, cfg);
}

OneWayLoccChannel keep_copy_channel(const Layout& copy_layout, std::size_t l, std::size_t index,
                                    const NumericConfig& cfg) {
  if (index >= l) throw std::invalid_argument("keep_copy_channel: copy index out of range");
  const std::size_t da = copy_layout.dim_of(copy_layout.factors_held_by_a());
  const std::size_t db = copy_layout.dim_of(copy_layout.factors_held_by_b());
  // Kraus operators <j|_rest on the grouped side: one per basis state of the discarded copies.
  auto side_kraus = [&](std::size_t d) {
    std::size_t rest = 1;
    for (std::size_t c = 1; c < l; ++c) rest *= d;
    check_cap("keep_copy_channel Kraus count", rest, cfg.dim_cap);
    std::size_t stride = 1;
    for (std::size_t c = index + 1; c < l; ++c) stride *= d;
    std::vector<Matrix> ks;
    const auto nd = static_cast<Eigen::Index>(d);
    for (std::size_t j = 0; j < rest; ++j) {
      // Split j into the digits before and after `index`.
      const std::size_t hi = j / stride, lo = j % stride;
      Matrix k = Matrix::Zero(nd, static_cast<Eigen::Index>(rest * d));
      for (std::size_t x = 0; x < d; ++x)
        k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>((hi * d + x) * stride + lo)) = 1.0;
      ks.push_back(std::move(k));
    }
    return CpMap(std::move(ks), cfg);
  };
  return OneWayLoccChannel(copy_layout.repeated(l), Layout({da, db}, {Party::KA, Party::KB}),
                           Instrument({side_kraus(da)}, cfg), {side_kraus(db)}, cfg);
}

}  // namespace qmerge
