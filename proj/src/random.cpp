#include "qmerge/random.hpp"

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <numeric>

namespace qmerge {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

SplitMix64 SplitMix64::split(std::uint64_t index) const {
  return SplitMix64(mix64(seed_ ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t SplitMix64::below(std::size_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return static_cast<std::size_t>(x % bound);
}

namespace {

Matrix ginibre(std::size_t rows, std::size_t cols, SplitMix64& rng) {
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = cplx(rng.normal(), rng.normal());
  return g;
}

}  // namespace

Matrix random_unitary(std::size_t d, SplitMix64& rng) {
  const Matrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const cplx diag = r(i, i);
    const double a = std::abs(diag);
    if (a > 0) q.col(i) *= diag / a;
  }
  return q;
}

Matrix random_isometry(std::size_t d_out, std::size_t d_in, SplitMix64& rng) {
  return random_unitary(d_out, rng).leftCols(static_cast<Eigen::Index>(d_in));
}

Matrix random_hermitian(std::size_t d, SplitMix64& rng) {
  const Matrix g = ginibre(d, d, rng);
  return (g + g.adjoint()) / 2.0;
}

PureState random_pure_state(const Layout& layout, SplitMix64& rng) {
  Vector v = ginibre(layout.total_dim(), 1, rng).col(0);
  v /= v.norm();
  return PureState::trusted(std::move(v), layout);
}

State random_state(const Layout& layout, SplitMix64& rng, std::size_t rank) {
  const std::size_t n = layout.total_dim();
  const Matrix g = ginibre(n, rank == 0 ? n : rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) / 2.0;
  return State::trusted(std::move(rho), layout);
}

std::vector<double> random_simplex_point(std::size_t n, SplitMix64& rng) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

namespace {

std::vector<Matrix> isometry_blocks(std::size_t d_in, std::size_t d_out, std::size_t blocks, SplitMix64& rng) {
  if (d_out * blocks < d_in)
    throw std::invalid_argument("random channel: need at least d_in / d_out Kraus operators in total");
  const Matrix v = random_isometry(d_out * blocks, d_in, rng);
  std::vector<Matrix> out;
  const auto n = static_cast<Eigen::Index>(d_out);
  for (std::size_t b = 0; b < blocks; ++b) out.push_back(v.middleRows(static_cast<Eigen::Index>(b) * n, n));
  return out;
}

}  // namespace

CpMap random_channel(std::size_t d_in, std::size_t d_out, std::size_t kraus, SplitMix64& rng) {
  return CpMap(isometry_blocks(d_in, d_out, kraus, rng));
}

Instrument random_instrument(std::size_t d_in, std::size_t d_out, std::size_t outcomes, SplitMix64& rng,
                             std::size_t kraus) {
  std::vector<Matrix> all = isometry_blocks(d_in, d_out, outcomes * kraus, rng);
  std::vector<CpMap> maps;
  for (std::size_t o = 0; o < outcomes; ++o)
    maps.emplace_back(std::vector<Matrix>(all.begin() + static_cast<long>(o * kraus),
                                          all.begin() + static_cast<long>((o + 1) * kraus)));
  return Instrument(std::move(maps));
}

}  // namespace qmerge
