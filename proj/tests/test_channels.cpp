#include "doctest.h"
#include "oracles.hpp"
#include "qmerge/channels.hpp"
#include "qmerge/random.hpp"

using namespace qmerge;

namespace {

const Layout qubit_ab({2, 2}, {Party::A, Party::B});

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Matrix id(std::size_t d) { return Matrix::Identity(Eigen::Index(d), Eigen::Index(d)); }

// Full-space Kraus sum of an operator family acting as I (x) K (x) I.
Matrix explicit_sum(const std::vector<Matrix>& full_kraus, const Matrix& rho) {
  Matrix out = Matrix::Zero(full_kraus.front().rows(), full_kraus.front().rows());
  for (const Matrix& k : full_kraus) out += k * rho * k.adjoint();
  return out;
}

// Product-state merging on copy layout [A:2, B:2], l = 1, trivial resources:
// A discards its system, B prepares `prep` on B'.
MergingProtocol discard_and_prepare(const Vector& prep) {
  const Layout copy({2, 2}, {Party::A, Party::B});
  std::vector<Matrix> a_kraus;
  for (int i = 0; i < 2; ++i) {
    Matrix k = Matrix::Zero(1, 2);
    k(0, i) = 1.0;
    a_kraus.push_back(k);
  }
  const Matrix b_kraus = kron(Matrix(prep), id(2));  // [KB:1][B'][B] from [KB:1][B]
  OneWayLoccChannel locc(merging_input_layout(copy, 1, 1), merging_output_layout(copy, 1, 1),
                         Instrument({CpMap(a_kraus)}), {CpMap({b_kraus})});
  return MergingProtocol(std::move(locc), resource_state(1), resource_state(1), copy, 1);
}

// Random merging protocol with rank-2 input resource and trivial output.
MergingProtocol random_protocol(const Layout& copy, std::size_t l, SplitMix64& rng, std::size_t outcomes) {
  const Layout in = merging_input_layout(copy, l, 2);
  const Layout out = merging_output_layout(copy, l, 1);
  const std::size_t ain = in.dim_of(in.factors_held_by_a()), aout = out.dim_of(out.factors_held_by_a());
  const std::size_t bin = in.dim_of(in.factors_held_by_b()), bout = out.dim_of(out.factors_held_by_b());
  std::vector<CpMap> b;
  for (std::size_t k = 0; k < outcomes; ++k) b.push_back(random_channel(bin, bout, 2, rng));
  OneWayLoccChannel locc(in, out, random_instrument(ain, aout, outcomes, rng, ain), std::move(b));
  return MergingProtocol(std::move(locc), resource_state(2), resource_state(1), copy, l);
}

// F_m by building the whole output state and calling the general fidelity.
double merging_fidelity_oracle(const MergingProtocol& p, const PureState& psi) {
  const State input = tensor_product(p.phi_in(), psi).density();
  const State output = apply_one_way_locc(p.locc(), input);
  const State target = tensor_product(p.phi_out(), psi.relabeled(Party::A, Party::BPrime)).density();
  return fidelity(output.matrix(), target.matrix());
}

}  // namespace

TEST_CASE("apply_cp_map: identity and depolarizing") {
  SplitMix64 rng(1);
  const State rho = random_state(qubit_ab, rng);
  const CpMapResult r = apply_cp_map(CpMap::identity(2), rho, {1});
  CHECK(max_abs(r.output - rho.matrix()) < 1e-15);
  CHECK(r.weight == doctest::Approx(1.0));

  Matrix x = Matrix::Zero(2, 2), y = Matrix::Zero(2, 2), z = Matrix::Zero(2, 2);
  x << 0, 1, 1, 0;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  const CpMap depol({id(2) / 2.0, x / 2.0, y / 2.0, z / 2.0});
  CHECK(depol.is_trace_preserving());
  const State pure = basis_state(Layout({2}, {Party::A}), 0);
  CHECK(max_abs(apply_cp_map(depol, pure, {0}).output - id(2) / 2.0) < 1e-15);
}

TEST_CASE("apply_cp_map agrees with the explicit Kraus sum") {
  SplitMix64 rng(2);
  const Layout l({2, 3, 2}, {Party::A, Party::B, Party::E});
  const State rho = random_state(l, rng);
  const CpMap m = random_channel(3, 3, 3, rng);
  std::vector<Matrix> full;
  for (const Matrix& k : m.kraus()) full.push_back(kron(kron(id(2), k), id(2)));
  const CpMapResult r = apply_cp_map(m, rho, {1});
  CHECK(max_abs(r.output - explicit_sum(full, rho.matrix())) < 1e-12);
  CHECK(r.layout == l);

  // Dimension-changing map on two targets listed out of order.
  const CpMap shrink = random_channel(4, 3, 2, rng);
  const CpMapResult s = apply_cp_map(shrink, rho, {2, 0});
  // Oracle: move targets to the back in listed order, then apply I_3 (x) K.
  const Matrix moved = oracle::permute(rho.matrix(), l.dims, {1, 2, 0});
  std::vector<Matrix> full2;
  for (const Matrix& k : shrink.kraus()) full2.push_back(kron(id(3), k));
  const Matrix expected = oracle::permute(explicit_sum(full2, moved), {3, 3}, {1, 0});
  CHECK(max_abs(s.output - expected) < 1e-12);
  CHECK(s.layout.dims == std::vector<std::size_t>{3, 3});
  CHECK(s.layout.parties[0] == Party::E);
  CHECK(s.weight == doctest::Approx(1.0));
}

TEST_CASE("apply_cp_map rejects mismatched targets") {
  const State s = maximally_mixed(qubit_ab);
  CHECK_THROWS_AS(apply_cp_map(CpMap::identity(3), s, {0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_cp_map(CpMap::identity(2), s, {5}), std::invalid_argument);
}

TEST_CASE("cp map and instrument validation") {
  CHECK_THROWS_AS(CpMap({id(2) * 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(CpMap({id(2), Matrix::Identity(3, 2)}), std::invalid_argument);
  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1;
  CHECK_THROWS_AS(Instrument({CpMap({p0})}), std::invalid_argument);
}

TEST_CASE("instrument_statistics") {
  SplitMix64 rng(3);
  const State rho = random_state(qubit_ab, rng);
  const auto triv = instrument_statistics(Instrument::trivial(2), rho, {0});
  REQUIRE(triv.kept.size() == 1);
  CHECK(triv.kept[0].probability == doctest::Approx(1.0));
  CHECK(max_abs(triv.kept[0].state.matrix() - rho.matrix()) < 1e-12);

  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  const auto proj = instrument_statistics(Instrument::projective({p0, p1}), maximally_mixed(Layout({2}, {Party::A})), {0});
  REQUIRE(proj.kept.size() == 2);
  CHECK(proj.kept[0].probability == doctest::Approx(0.5));
  CHECK(max_abs(proj.kept[0].state.matrix() - p0) < 1e-15);
  CHECK(max_abs(proj.kept[1].state.matrix() - p1) < 1e-15);

  // Zero-probability outcomes are dropped and reported.
  const auto flagged = instrument_statistics(Instrument::projective({p0, p1}), basis_state(Layout({2}, {Party::A}), 0), {0});
  CHECK(flagged.kept.size() == 1);
  CHECK(flagged.dropped == std::vector<std::size_t>{1});
}

TEST_CASE("invariant: instrument probabilities sum to one") {
  SplitMix64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const State rho = random_state(Layout({3, 2}, {Party::A, Party::B}), rng);
    const Instrument e = random_instrument(3, 2 + t % 3, 2 + t % 3, rng, 1 + t % 2);
    double total = 0;
    for (const auto& o : instrument_statistics(e, rho, {0}).kept) {
      total += o.probability;
      CHECK(std::abs(o.state.matrix().trace().real() - 1.0) < 1e-9);
      CHECK(spectrum(o.state.matrix()).minCoeff() > -1e-9);
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("apply_one_way_locc: projective A with identity B dephases") {
  SplitMix64 rng(5);
  const State rho = random_state(qubit_ab, rng);
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  const OneWayLoccChannel n(qubit_ab, qubit_ab, Instrument::projective({p0, p1}), {CpMap::identity(2), CpMap::identity(2)});
  const Matrix expected = explicit_sum({kron(p0, id(2)), kron(p1, id(2))}, rho.matrix());
  CHECK(max_abs(apply_one_way_locc(n, rho).matrix() - expected) < 1e-14);
  CHECK(max_abs(apply_one_way_locc(OneWayLoccChannel::identity(qubit_ab), rho).matrix() - rho.matrix()) < 1e-15);
}

TEST_CASE("apply_one_way_locc with interleaved parties and trailing E matches the full Kraus sum") {
  SplitMix64 rng(6);
  const Layout in({2, 2, 3}, {Party::B, Party::A, Party::B});
  const Layout out({3, 2}, {Party::A, Party::BPrime});
  const Instrument e = random_instrument(2, 3, 2, rng, 2);
  const std::vector<CpMap> b{random_channel(6, 2, 3, rng), random_channel(6, 2, 4, rng)};
  const OneWayLoccChannel n(in, out, e, b);
  const Layout full = concat(in, Layout({2}, {Party::E}));
  const State rho = random_state(full, rng);
  // Oracle: regroup as [A][B B][E], apply sum K (x) L (x) I, output is [A][B'][E].
  const Matrix grouped = oracle::permute(rho.matrix(), full.dims, {1, 0, 2, 3});
  std::vector<Matrix> kraus;
  for (std::size_t k = 0; k < 2; ++k)
    for (const Matrix& ka : e.outcomes()[k].kraus())
      for (const Matrix& kb : b[k].kraus()) kraus.push_back(kron(kron(ka, kb), id(2)));
  const State result = apply_one_way_locc(n, rho);
  CHECK(max_abs(result.matrix() - explicit_sum(kraus, grouped)) < 1e-12);
  CHECK(result.layout() == concat(out, Layout({2}, {Party::E})));
}

TEST_CASE("invariants: one-way LOCC is trace-preserving and linear") {
  SplitMix64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const Instrument e = random_instrument(2, 2, 1 + t % 3, rng, 2);
    std::vector<CpMap> b;
    for (std::size_t k = 0; k < e.size(); ++k) b.push_back(random_channel(2, 3, 2, rng));
    const OneWayLoccChannel n(qubit_ab, Layout({2, 3}, {Party::A, Party::B}), e, b);
    const State r1 = random_state(qubit_ab, rng), r2 = random_state(qubit_ab, rng);
    const double p = rng.uniform();
    const State mix(p * r1.matrix() + (1 - p) * r2.matrix(), qubit_ab);
    const Matrix lhs = apply_one_way_locc(n, mix).matrix();
    const Matrix rhs = p * apply_one_way_locc(n, r1).matrix() + (1 - p) * apply_one_way_locc(n, r2).matrix();
    CHECK(max_abs(lhs - rhs) < 1e-9);
    CHECK(std::abs(lhs.trace().real() - 1.0) < 1e-9);
  }
}

TEST_CASE("one-way LOCC validation") {
  CHECK_THROWS_AS(OneWayLoccChannel(qubit_ab, qubit_ab, Instrument::trivial(2), {}), std::invalid_argument);
  Matrix half = id(2) / std::sqrt(2.0);
  CHECK_THROWS_AS(OneWayLoccChannel(qubit_ab, qubit_ab, Instrument::trivial(2), {CpMap({half})}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OneWayLoccChannel(Layout({2, 2}, {Party::A, Party::E}), qubit_ab, Instrument::trivial(2),
                                    {CpMap::identity(2)}),
                  std::invalid_argument);
}

TEST_CASE("merging fidelity: preparing the right pure A state on a product input gives 1") {
  SplitMix64 rng(8);
  const PureState a = random_pure_state(Layout({2}, {Party::A}), rng);
  const State rho_b = random_state(Layout({2}, {Party::B}), rng);
  const State rho = tensor_product(a.density(), rho_b);
  CHECK(merging_fidelity(discard_and_prepare(a.amplitudes()), rho) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("merging fidelity: discarding a correlated A system is lossy") {
  const MergingProtocol junk = discard_and_prepare(Vector::Unit(2, 0));
  const State bell = maximally_entangled(2).density();
  const double f = merging_fidelity(junk, bell);
  CHECK(f < 1.0 - 1e-3);
  CHECK(f == doctest::Approx(merging_fidelity_oracle(junk, purify(bell))).epsilon(1e-12));
  CHECK(f == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("merging fidelity agrees with explicit output construction") {
  SplitMix64 rng(9);
  const Layout copy({2, 2}, {Party::A, Party::B});
  for (int t = 0; t < 10; ++t) {
    const MergingProtocol p = random_protocol(copy, 1, rng, 1 + t % 3);
    const State rho = random_state(copy, rng);
    const double f = merging_fidelity(p, rho);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(std::abs(f - merging_fidelity_oracle(p, purify(rho))) < 1e-10);
  }
}

TEST_CASE("invariant: merging fidelity is independent of the purification") {
  SplitMix64 rng(10);
  const Layout copy({2, 2}, {Party::A, Party::B});
  for (int t = 0; t < 20; ++t) {
    const MergingProtocol p = random_protocol(copy, 1, rng, 2);
    const State rho = random_state(copy, rng, 1 + t % 4);
    const PureState canon = purify(rho);
    const std::size_t r = canon.layout().dims.back();
    // Rotate the environment by a random isometry into a larger E.
    const Matrix v = random_isometry(r + 1, r, rng);
    const Vector rotated = kron(id(4), v) * canon.amplitudes();
    const PureState other(rotated, Layout({2, 2, r + 1}, {Party::A, Party::B, Party::E}));
    CHECK(std::abs(merging_fidelity(p, canon) - merging_fidelity(p, other)) < 1e-9);
  }
}

TEST_CASE("merging fidelity enforces the dimension cap") {
  SplitMix64 rng(11);
  const Layout copy({2, 2}, {Party::A, Party::B});
  const MergingProtocol p = random_protocol(copy, 1, rng, 1);
  NumericConfig cfg;
  cfg.dim_cap = 16;
  CHECK_THROWS_AS(merging_fidelity(p, random_state(copy, rng), cfg), CapExceeded);
}

TEST_CASE("merging protocol validation") {
  const Layout copy({2, 2}, {Party::A, Party::B});
  const OneWayLoccChannel wrong = OneWayLoccChannel::identity(copy);
  CHECK_THROWS_AS(MergingProtocol(wrong, resource_state(1), resource_state(1), copy, 1), std::invalid_argument);
  const PureState not_max(Vector::Unit(4, 0), Layout({2, 2}, {Party::KA, Party::KB}));
  const MergingProtocol ok = discard_and_prepare(Vector::Unit(2, 0));
  CHECK_THROWS_AS(MergingProtocol(ok.locc(), not_max, resource_state(1), copy, 1), std::invalid_argument);
  CHECK(ok.k().log2() == 0.0);
}

TEST_CASE("permutation_channel") {
  SplitMix64 rng(12);
  const Layout copy({2}, {Party::A});
  const State r0 = random_state(copy, rng), r1 = random_state(copy, rng), r2 = random_state(copy, rng);
  const State two = tensor_product(r0, r1);
  CHECK(max_abs(permutation_channel({0, 1}, copy).apply(two.matrix()) - two.matrix()) < 1e-15);
  CHECK(max_abs(permutation_channel({1, 0}, copy).apply(two.matrix()) - tensor_product(r1, r0).matrix()) < 1e-15);
  const State three = tensor_product(tensor_product(r0, r1), r2);
  const std::vector<State> rs{r0, r1, r2};
  const FactorSet sigma{2, 0, 1};
  const State expected = tensor_product(tensor_product(rs[sigma[0]], rs[sigma[1]]), rs[sigma[2]]);
  CHECK(max_abs(permutation_channel(sigma, copy).apply(three.matrix()) - expected.matrix()) < 1e-14);
  CHECK_THROWS_AS(permutation_channel({0, 0}, copy), std::invalid_argument);
}

TEST_CASE("permutation_channel moves whole copies of a bipartite layout") {
  SplitMix64 rng(13);
  const Layout copy({2, 3}, {Party::A, Party::B});
  const State r0 = random_state(copy, rng), r1 = random_state(copy, rng);
  const Matrix out = permutation_channel({1, 0}, copy).apply(tensor_product(r0, r1).matrix());
  CHECK(max_abs(out - tensor_product(r1, r0).matrix()) < 1e-14);
}

TEST_CASE("compose_instrument_with_protocols") {
  SplitMix64 rng(14);
  const Layout copy({2, 2}, {Party::A, Party::B});
  const MergingProtocol sub = random_protocol(copy, 1, rng, 3);
  const std::size_t a_dim = sub.locc().in_layout().dim_of(sub.locc().in_layout().factors_held_by_a());

  const MergingProtocol same = compose_instrument_with_protocols(Instrument::trivial(a_dim), {sub});
  CHECK(same.messages() == sub.messages());
  const State rho = random_state(copy, rng);
  CHECK(std::abs(merging_fidelity(same, rho) - merging_fidelity(sub, rho)) < 1e-12);

  // Two outcomes sqrt(p) I and sqrt(1-p) I with identical subprotocols: F_m unchanged.
  const double p = 0.3;
  const Instrument split({CpMap({std::sqrt(p) * id(a_dim)}), CpMap({std::sqrt(1 - p) * id(a_dim)})});
  const MergingProtocol doubled = compose_instrument_with_protocols(split, {sub, sub});
  CHECK(doubled.messages() == 2 * sub.messages());
  for (int t = 0; t < 5; ++t) {
    const State s = random_state(copy, rng);
    CHECK(std::abs(merging_fidelity(doubled, s) - merging_fidelity(sub, s)) < 1e-12);
  }

  const Instrument two = random_instrument(a_dim, a_dim, 2, rng);
  const MergingProtocol other = random_protocol(copy, 1, rng, 2);
  const MergingProtocol mixed = compose_instrument_with_protocols(two, {sub, other});
  CHECK(mixed.messages() == sub.messages() + other.messages());
  CHECK_THROWS_AS(compose_instrument_with_protocols(two, {sub}), std::invalid_argument);
}

TEST_CASE("keep_copy_channel keeps the chosen copy") {
  SplitMix64 rng(15);
  const Layout copy({2, 2}, {Party::A, Party::B});
  const State r0 = random_state(copy, rng), r1 = random_state(copy, rng), r2 = random_state(copy, rng);
  const State all = tensor_product(tensor_product(r0, r1), r2);
  const std::vector<State> rs{r0, r1, r2};
  for (std::size_t i = 0; i < 3; ++i) {
    const State kept = apply_one_way_locc(keep_copy_channel(copy, 3, i), all);
    CHECK(max_abs(kept.matrix() - rs[i].matrix()) < 1e-12);
    CHECK(kept.layout() == Layout({2, 2}, {Party::KA, Party::KB}));
  }
}
