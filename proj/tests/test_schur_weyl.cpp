#include "doctest.h"
#include "oracles.hpp"
#include "qmerge/entropy.hpp"
#include "qmerge/random.hpp"
#include "qmerge/schur_weyl.hpp"

using namespace qmerge;

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Matrix id(std::size_t d) { return Matrix::Identity(Eigen::Index(d), Eigen::Index(d)); }

std::vector<std::vector<std::size_t>> parts_of(const std::vector<YoungFrame>& fs) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& f : fs) out.push_back(f.parts);
  return out;
}

State diag_qubit(double p) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = p;
  m(1, 1) = 1 - p;
  return State(m, Layout({2}, {Party::A}));
}

}  // namespace

TEST_CASE("young_frames") {
  using V = std::vector<std::vector<std::size_t>>;
  CHECK(parts_of(young_frames(2, 2)) == V{{2}, {1, 1}});
  CHECK(parts_of(young_frames(4, 2)) == V{{4}, {3, 1}, {2, 2}});
  CHECK(parts_of(young_frames(3, 3)) == V{{3}, {2, 1}, {1, 1, 1}});
  for (std::size_t l = 1; l <= 8; ++l)
    for (std::size_t d = 1; d <= 4; ++d) CHECK(parts_of(young_frames(l, d)) == oracle::partitions(l, d));
}

TEST_CASE("frame_entropy") {
  CHECK(frame_entropy({{5}}) == 0.0);
  CHECK(frame_entropy({{1, 1, 1, 1}}) == doctest::Approx(2.0));
  CHECK(frame_entropy({{3, 1}}) == doctest::Approx(oracle::binary_entropy_bits({0.75, 0.25})));
  CHECK(std::abs(frame_entropy({{3, 1}}) - 0.8113) < 1e-4);
}

TEST_CASE("Murnaghan-Nakayama characters match the Frobenius formula") {
  for (std::size_t l = 1; l <= 6; ++l)
    for (const auto& lambda : oracle::partitions(l, l))
      for (const auto& mu : oracle::partitions(l, l))
        CHECK(double(sn_character({lambda}, mu)) == oracle::frobenius_character(lambda, mu));
}

TEST_CASE("irrep dimensions") {
  for (std::size_t l = 1; l <= 9; ++l)
    for (const auto& lambda : oracle::partitions(l, l)) {
      CHECK(double(sn_dimension({lambda})) == doctest::Approx(oracle::hook_dimension(lambda)));
      CHECK(double(sn_dimension({lambda})) == double(sn_character({lambda}, std::vector<std::size_t>(l, 1))));
      for (std::size_t d = 1; d <= 4; ++d)
        CHECK(double(weyl_dimension({lambda}, d)) ==
              doctest::Approx(lambda.size() > d ? 0.0 : oracle::weyl_dimension(lambda, d)));
    }
}

TEST_CASE("two-copy projectors are the symmetric and antisymmetric projectors") {
  for (std::size_t d : {2u, 3u}) {
    const Matrix swap = permutation_unitary(std::vector<std::size_t>{d, d}, {1, 0});
    CHECK(max_abs(isotypic_projector({{2}}, 2, d) - (id(d * d) + swap) / 2.0) < 1e-12);
    CHECK(max_abs(isotypic_projector({{1, 1}}, 2, d) - (id(d * d) - swap) / 2.0) < 1e-12);
  }
}

TEST_CASE("tr P_(2,2) for d = 2, l = 4 is dim S_4 irrep x dim U(2) irrep") {
  // (2,2): hook dimension 2, Weyl dimension 1 (the determinant squared).
  const Matrix p = isotypic_projector({{2, 2}}, 4, 2);
  CHECK(oracle::hook_dimension({2, 2}) == doctest::Approx(2.0));
  CHECK(oracle::weyl_dimension({2, 2}, 2) == doctest::Approx(1.0));
  CHECK(p.trace().real() == doctest::Approx(2.0));
  CHECK(max_abs(isotypic_projector({{2, 1, 1}}, 4, 2)) == 0.0);
}

TEST_CASE("projectors agree with the full character-sum projector") {
  for (auto [l, d] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 2}, {4, 2}, {5, 2}, {6, 2}, {3, 3}, {4, 3}}) {
    const IsotypicDecomposition dec(l, d);
    for (const YoungFrame& f : dec.frames()) {
      const Matrix p = dec.projector(f);
      CHECK(max_abs(p - oracle::character_sum_projector(f.parts, l, d)) < 1e-10);
      CHECK(double(dec.rank(f)) == doctest::Approx(oracle::hook_dimension(f.parts) * oracle::weyl_dimension(f.parts, d)));
    }
  }
}

TEST_CASE("invariants: completeness, orthogonality, covariance") {
  SplitMix64 rng(1);
  for (auto [l, d] : std::vector<std::pair<std::size_t, std::size_t>>{
           {1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}, {6, 2}, {2, 3}, {3, 3}, {4, 3}}) {
    const IsotypicDecomposition dec(l, d);
    const std::size_t n = dec.total_dim();
    std::vector<Matrix> ps;
    for (const auto& f : dec.frames()) ps.push_back(dec.projector(f));
    Matrix sum = Matrix::Zero(Eigen::Index(n), Eigen::Index(n));
    for (const auto& p : ps) sum += p;
    CHECK(trace_norm(sum - id(n)) <= 1e-8);
    for (std::size_t a = 0; a < ps.size(); ++a) {
      CHECK(trace_norm(ps[a] * ps[a] - ps[a]) <= 1e-8);
      CHECK(max_abs(ps[a] - ps[a].adjoint()) <= 1e-12);
      for (std::size_t b = a + 1; b < ps.size(); ++b) CHECK(trace_norm(ps[a] * ps[b]) <= 1e-8);
    }
    const std::vector<std::size_t> dims(l, d);
    const Matrix u = random_unitary(d, rng);
    Matrix ul = u;
    for (std::size_t c = 1; c < l; ++c) ul = kron(ul, u);
    for (int s = 0; s < 3; ++s) {
      const Matrix us = permutation_unitary(dims, random_permutation(l, rng));
      for (const auto& p : ps) CHECK(trace_norm(p * us - us * p) <= 1e-8);
    }
    for (const auto& p : ps) CHECK(trace_norm(p * ul - ul * p) <= 1e-8);
  }
}

TEST_CASE("binning") {
  const EntropyBinning b = make_binning(4, 2, 0.25);
  CHECK(b.bins() == 4);
  CHECK(b.bin_of(0.0) == 1);
  CHECK(b.bin_of(0.25) == 1);
  CHECK(b.bin_of(0.2500001) == 2);
  CHECK(b.bin_of(1.0) == 4);
  CHECK(make_binning(4, 2, 1.0).bins() == 1);
  CHECK(make_binning(4, 2, 5.0).bins() == 1);
  const EntropyBinning b3 = make_binning(4, 3, 0.5);
  CHECK(b3.bins() == 4);
  CHECK(b3.upper(4) == doctest::Approx(std::log2(3.0)));
  CHECK(b3.lower(4) == doctest::Approx(1.5));
  CHECK_THROWS_AS(make_binning(4, 2, 0.0), std::invalid_argument);
}

TEST_CASE("entropy instrument: d = 2, l = 2, eta = 1") {
  const EntropyInstrument inst = build_entropy_instrument(2, 2, 1.0);
  // H = 0 and H = 1 both fall in the single bin [0, 1].
  REQUIRE(inst.bins.size() == 1);
  CHECK(max_abs(inst.projectors[0] - id(4)) < 1e-12);
  const EntropyInstrument fine = build_entropy_instrument(2, 2, 0.5);
  REQUIRE(fine.bins.size() == 2);
  CHECK(fine.bins[0].index == 1);
  CHECK(fine.bins[1].index == 2);
  CHECK(max_abs(fine.projectors[0] + fine.projectors[1] - id(4)) < 1e-12);
  CHECK(fine.bins[0].rank == 3);
  CHECK(fine.bins[1].rank == 1);
}

TEST_CASE("entropy instrument: ranks sum to d^l and empty bins are omitted") {
  const EntropyInstrument inst = build_entropy_instrument(6, 2, 0.25);
  std::size_t total = 0;
  Matrix sum = Matrix::Zero(64, 64);
  for (std::size_t k = 0; k < inst.bins.size(); ++k) {
    total += inst.bins[k].rank;
    sum += inst.projectors[k];
    CHECK(std::abs(inst.projectors[k].trace().real() - double(inst.bins[k].rank)) < 1e-9);
  }
  CHECK(total == 64);
  CHECK(trace_norm(sum - id(64)) <= 1e-8);
  // Frame entropies at l = 6: 0, 0.65, 0.918, 1 -> bins 1, 3, 4, 4; bin 2 empty.
  std::vector<std::size_t> idx;
  for (const auto& b : inst.bins) idx.push_back(b.index);
  CHECK(idx == std::vector<std::size_t>{1, 3, 4});
  CHECK(inst.position_of(2) == inst.bins.size());
  const Instrument e = inst.instrument();
  CHECK(e.size() == 3);
}

TEST_CASE("bin probabilities agree with instrument statistics on rho^l") {
  SplitMix64 rng(2);
  const State rho = random_state(Layout({2, 2}, {Party::A, Party::B}), rng);
  const EntropyInstrument inst = build_entropy_instrument(3, 2, 0.5);
  const State rl = tensor_power(rho, 3);
  const auto stats = instrument_statistics(inst.instrument(), rl, rl.layout().factors_of(Party::A));
  const auto q = bin_probabilities(inst, rho);
  REQUIRE(stats.kept.size() == q.size());
  double total = 0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    CHECK(std::abs(stats.kept[k].probability - q[k]) < 1e-10);
    total += q[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("frame weights equal dim_lambda times the Schur polynomial of the spectrum") {
  SplitMix64 rng(3);
  for (auto [l, d] : std::vector<std::pair<std::size_t, std::size_t>>{{4, 2}, {6, 2}, {8, 2}, {10, 2}, {4, 3}, {5, 3}}) {
    const IsotypicDecomposition dec(l, d);
    const State r = random_state(Layout({d}, {Party::A}), rng);
    Matrix power = r.matrix();
    for (std::size_t c = 1; c < l; ++c) power = kron(power, r.matrix());
    const RealVector ev = spectrum(r.matrix());
    const std::vector<double> x(ev.data(), ev.data() + ev.size());
    for (const auto& f : dec.frames())
      CHECK(std::abs(dec.trace_with(f, power) - oracle::hook_dimension(f.parts) * oracle::schur_polynomial(f.parts, x)) <
            1e-10);
  }
}

TEST_CASE("misbin probability") {
  const EntropyInstrument inst4 = build_entropy_instrument(4, 2, 0.25);
  const EntropyInstrument inst10 = build_entropy_instrument(10, 2, 0.25);
  const State rho = diag_qubit(0.9);
  const std::size_t bin = inst4.binning.bin_of(oracle::binary_entropy_bits({0.9, 0.1}));
  CHECK(bin == 2);

  // Oracle: mass of frames whose bin lies outside {1, 2, 3}.
  auto oracle_misbin = [&](std::size_t l) {
    double m = 0;
    for (const auto& lambda : oracle::partitions(l, 2)) {
      const double h = frame_entropy({lambda});
      if (h > 0.75 + 1e-12) m += oracle::hook_dimension(lambda) * oracle::schur_polynomial(lambda, {0.9, 0.1});
    }
    return m;
  };
  const double m4 = misbin_probability(inst4, rho), m10 = misbin_probability(inst10, rho);
  CHECK(std::abs(m4 - oracle_misbin(4)) < 1e-9);
  CHECK(std::abs(m10 - oracle_misbin(10)) < 1e-9);
  CHECK(m10 < m4);

  // Character-sum projector oracle at l = 4.
  const Matrix p4 = Matrix(oracle::character_sum_projector({3, 1}, 4, 2)) + oracle::character_sum_projector({2, 2}, 4, 2);
  const Matrix r4 = kron(kron(rho.matrix(), rho.matrix()), kron(rho.matrix(), rho.matrix()));
  CHECK(std::abs((p4 * r4).trace().real() - m4) < 1e-9);

  // Pure state: all mass in the symmetric subspace (bin 1).
  const State pure = diag_qubit(1.0);
  CHECK(misbin_probability(inst4, pure) < 1e-12);
  const auto q = bin_probabilities(inst4, pure);
  CHECK(q[0] == doctest::Approx(1.0));

  // Maximally mixed qubit: the top bin carries more than the bottom one.
  const auto qm = bin_probabilities(inst10, diag_qubit(0.5));
  CHECK(qm.back() > qm.front());
  CHECK(misbin_probability(inst10, diag_qubit(0.5)) < 0.5);

  // Single bin: nothing can be misbinned.
  CHECK(misbin_probability(build_entropy_instrument(4, 2, 1.0), rho) == 0.0);
}

TEST_CASE("schur-weyl caps") {
  NumericConfig cfg;
  cfg.dim_cap = 64;
  CHECK_THROWS_AS(IsotypicDecomposition(7, 2, cfg), CapExceeded);
  CHECK_NOTHROW(IsotypicDecomposition(6, 2, cfg));
}
