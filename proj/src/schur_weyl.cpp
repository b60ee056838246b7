#include "qmerge/schur_weyl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qmerge/entropy.hpp"

namespace qmerge {

namespace {

void frames_rec(std::size_t n, std::size_t max_part, std::size_t rows_left, std::vector<std::size_t>& cur,
                std::vector<YoungFrame>& out) {
  if (n == 0) {
    out.push_back({cur});
    return;
  }
  if (rows_left == 0) return;
  for (std::size_t p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    frames_rec(n - p, p, rows_left - 1, cur, out);
    cur.pop_back();
  }
}

std::vector<long> beta_set(const std::vector<std::size_t>& parts) {
  const std::size_t m = parts.size();
  std::vector<long> b(m);
  for (std::size_t i = 0; i < m; ++i) b[i] = static_cast<long>(parts[i] + (m - 1 - i));
  return b;
}

std::vector<std::size_t> from_beta(std::vector<long> b) {
  std::sort(b.rbegin(), b.rend());
  const std::size_t m = b.size();
  std::vector<std::size_t> parts;
  for (std::size_t i = 0; i < m; ++i) {
    const long p = b[i] - static_cast<long>(m - 1 - i);
    if (p > 0) parts.push_back(static_cast<std::size_t>(p));
  }
  return parts;
}

using CharKey = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

long long mn_rec(const std::vector<std::size_t>& lambda, const std::vector<std::size_t>& mu, std::size_t pos,
                 std::map<CharKey, long long>& memo) {
  if (pos == mu.size()) return lambda.empty() ? 1 : 0;
  CharKey key{lambda, std::vector<std::size_t>(mu.begin() + static_cast<long>(pos), mu.end())};
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const long r = static_cast<long>(mu[pos]);
  const std::vector<long> beta = beta_set(lambda);
  long long total = 0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const long target = beta[i] - r;
    if (target < 0 || std::find(beta.begin(), beta.end(), target) != beta.end()) continue;
    int between = 0;
    for (long b : beta)
      if (b > target && b < beta[i]) ++between;
    std::vector<long> next = beta;
    next[i] = target;
    const long long sub = mn_rec(from_beta(next), mu, pos + 1, memo);
    total += (between % 2 ? -sub : sub);
  }
  memo.emplace(std::move(key), total);
  return total;
}

std::size_t dim_rec(const std::vector<std::size_t>& lambda, std::map<std::vector<std::size_t>, std::size_t>& memo) {
  if (lambda.empty()) return 1;
  if (auto it = memo.find(lambda); it != memo.end()) return it->second;
  std::size_t total = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    // Corner box at the end of row i.
    if (i + 1 < lambda.size() && lambda[i + 1] == lambda[i]) continue;
    std::vector<std::size_t> next = lambda;
    if (--next[i] == 0) next.pop_back();
    total += dim_rec(next, memo);
  }
  memo.emplace(lambda, total);
  return total;
}

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= double(i);
  return f;
}

double class_size(const std::vector<std::size_t>& mu) {
  std::map<std::size_t, std::size_t> mult;
  std::size_t n = 0;
  for (std::size_t p : mu) {
    ++mult[p];
    n += p;
  }
  double denom = 1.0;
  for (const auto& [k, m] : mult) denom *= std::pow(double(k), double(m)) * factorial(m);
  return factorial(n) / denom;
}

std::vector<std::size_t> cycle_type_of(const std::vector<std::size_t>& p) {
  std::vector<bool> seen(p.size(), false);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = true;
      ++len;
    }
    out.push_back(len);
  }
  std::sort(out.rbegin(), out.rend());
  return out;
}

// Every permutation of [l] with cycle type mu.
std::vector<std::vector<std::size_t>> class_members(std::size_t l, const std::vector<std::size_t>& mu) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> p(l);
  std::iota(p.begin(), p.end(), 0);
  if (mu.size() == l - 1 && mu.front() == 2) {
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t j = i + 1; j < l; ++j) {
        std::swap(p[i], p[j]);
        out.push_back(p);
        std::swap(p[i], p[j]);
      }
    return out;
  }
  check_cap("permutations enumerated for a class sum", static_cast<std::size_t>(factorial(l)), 3628800);
  do {
    if (cycle_type_of(p) == mu) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

std::size_t YoungFrame::boxes() const { return std::accumulate(parts.begin(), parts.end(), std::size_t{0}); }

std::vector<YoungFrame> young_frames(std::size_t l, std::size_t d) {
  if (l == 0 || d == 0) throw std::invalid_argument("young_frames: l and d must be positive");
  std::vector<YoungFrame> out;
  std::vector<std::size_t> cur;
  frames_rec(l, l, d, cur, out);
  return out;
}

double frame_entropy(const YoungFrame& f) {
  const double l = double(f.boxes());
  double h = 0.0;
  for (std::size_t p : f.parts) {
    const double q = double(p) / l;
    h -= q * std::log2(q);
  }
  return h;
}

long long sn_character(const YoungFrame& lambda, const std::vector<std::size_t>& cycle_type) {
  std::size_t total = std::accumulate(cycle_type.begin(), cycle_type.end(), std::size_t{0});
  if (total != lambda.boxes()) throw std::invalid_argument("sn_character: cycle type and frame sizes differ");
  std::vector<std::size_t> mu = cycle_type;
  std::sort(mu.rbegin(), mu.rend());
  std::map<CharKey, long long> memo;
  return mn_rec(lambda.parts, mu, 0, memo);
}

std::size_t sn_dimension(const YoungFrame& lambda) {
  std::map<std::vector<std::size_t>, std::size_t> memo;
  return dim_rec(lambda.parts, memo);
}

std::size_t weyl_dimension(const YoungFrame& lambda, std::size_t d) {
  if (lambda.rows() > d) return 0;
  std::vector<long double> l(d, 0.0L);
  for (std::size_t i = 0; i < lambda.rows(); ++i) l[i] = static_cast<long double>(lambda.parts[i]);
  long double v = 1.0L;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) v *= (l[i] - l[j] + (long double)(j - i)) / (long double)(j - i);
  return static_cast<std::size_t>(std::llround(v));
}

// -------------------------------------------------- isotypic decomposition

IsotypicDecomposition::IsotypicDecomposition(std::size_t l, std::size_t d, const NumericConfig& cfg)
    : l_(l), d_(d), frames_(young_frames(l, d)) {
  if (d < 1 || l < 1) throw std::invalid_argument("isotypic decomposition: l and d must be positive");
  n_ = Layout(std::vector<std::size_t>(l, d), std::vector<Party>(l, Party::A)).total_dim(cfg.dim_cap);

  // Central characters omega_lambda(C) = |C| chi_lambda(C) / dim_lambda on
  // enough classes to separate the frames.
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::vector<double>> omega(frames_.size());
  std::vector<YoungFrame> all = young_frames(l, l);
  std::stable_sort(all.begin(), all.end(), [](const YoungFrame& a, const YoungFrame& b) { return a.rows() > b.rows(); });
  auto separated = [&] {
    for (std::size_t a = 0; a < frames_.size(); ++a)
      for (std::size_t b = a + 1; b < frames_.size(); ++b)
        if (omega[a] == omega[b]) return false;
    return true;
  };
  for (const YoungFrame& mu : all) {
    if (frames_.size() == 1 || separated()) break;
    if (mu.rows() == l) continue;  // identity class
    classes.push_back(mu.parts);
    const double size = class_size(mu.parts);
    for (std::size_t a = 0; a < frames_.size(); ++a)
      omega[a].push_back(std::round(size * double(sn_character(frames_[a], mu.parts)) /
                                    double(sn_dimension(frames_[a]))));
  }
  if (!separated()) throw std::logic_error("isotypic decomposition: central characters do not separate frames");

  // Generic combination of the chosen class sums; its eigenvalue on the
  // lambda-isotypic component is sum_k c_k omega_lambda(C_k).
  std::vector<double> coeff;
  const double primes[] = {1.0, 2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0};
  for (std::size_t k = 0; k < classes.size(); ++k) coeff.push_back(std::sqrt(primes[k % 8]) + double(k / 8));
  std::vector<double> predicted(frames_.size(), 0.0);
  for (std::size_t a = 0; a < frames_.size(); ++a)
    for (std::size_t k = 0; k < classes.size(); ++k) predicted[a] += coeff[k] * omega[a][k];
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < frames_.size(); ++a)
    for (std::size_t b = a + 1; b < frames_.size(); ++b) gap = std::min(gap, std::abs(predicted[a] - predicted[b]));

  std::vector<std::vector<std::vector<std::size_t>>> members;
  for (const auto& mu : classes) members.push_back(class_members(l, mu));

  // Type blocks of the computational basis.
  std::map<std::vector<std::size_t>, std::size_t> block_of_type;
  std::vector<std::size_t> pos(n_);
  std::vector<std::vector<std::size_t>> digits(n_, std::vector<std::size_t>(l));
  for (std::size_t x = 0; x < n_; ++x) {
    std::size_t r = x;
    std::vector<std::size_t> counts(d, 0);
    for (std::size_t j = l; j-- > 0;) {
      digits[x][j] = r % d;
      r /= d;
      ++counts[digits[x][j]];
    }
    auto [it, inserted] = block_of_type.emplace(counts, blocks_.size());
    if (inserted) blocks_.emplace_back();
    Block& b = blocks_[it->second];
    pos[x] = b.basis.size();
    b.basis.push_back(x);
  }

  for (Block& b : blocks_) {
    const auto m = static_cast<Eigen::Index>(b.basis.size());
    if (frames_.size() == 1) {
      b.vectors[frames_.front()] = Eigen::MatrixXd::Identity(m, m);
      continue;
    }
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t k = 0; k < classes.size(); ++k)
      for (const auto& sigma : members[k])
        for (Eigen::Index c = 0; c < m; ++c) {
          const auto& dx = digits[b.basis[static_cast<std::size_t>(c)]];
          std::size_t y = 0;
          for (std::size_t j = 0; j < l; ++j) y = y * d + dx[sigma[j]];
          x(static_cast<Eigen::Index>(pos[y]), c) += coeff[k];
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    std::vector<std::vector<Eigen::Index>> cols(frames_.size());
    for (Eigen::Index i = 0; i < m; ++i) {
      const double ev = es.eigenvalues()(i);
      std::size_t best = 0;
      for (std::size_t a = 1; a < frames_.size(); ++a)
        if (std::abs(ev - predicted[a]) < std::abs(ev - predicted[best])) best = a;
      if (std::abs(ev - predicted[best]) > 1e-3 * gap)
        throw std::logic_error("isotypic decomposition: eigenvalue does not match any central character");
      cols[best].push_back(i);
    }
    for (std::size_t a = 0; a < frames_.size(); ++a) {
      if (cols[a].empty()) continue;
      Eigen::MatrixXd v(m, static_cast<Eigen::Index>(cols[a].size()));
      for (std::size_t c = 0; c < cols[a].size(); ++c)
        v.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(cols[a][c]);
      b.vectors[frames_[a]] = std::move(v);
    }
  }
}

std::size_t IsotypicDecomposition::index_of(const YoungFrame& f) const {
  if (f.boxes() != l_) throw std::invalid_argument("frame does not have l boxes");
  return static_cast<std::size_t>(std::find(frames_.begin(), frames_.end(), f) - frames_.begin());
}

Matrix IsotypicDecomposition::projector(const YoungFrame& f) const {
  index_of(f);
  const auto n = static_cast<Eigen::Index>(n_);
  Matrix p = Matrix::Zero(n, n);
  for (const Block& b : blocks_) {
    auto it = b.vectors.find(f);
    if (it == b.vectors.end()) continue;
    const Eigen::MatrixXd pb = it->second * it->second.transpose();
    for (std::size_t i = 0; i < b.basis.size(); ++i)
      for (std::size_t j = 0; j < b.basis.size(); ++j)
        p(static_cast<Eigen::Index>(b.basis[i]), static_cast<Eigen::Index>(b.basis[j])) =
            pb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return p;
}

std::size_t IsotypicDecomposition::rank(const YoungFrame& f) const {
  index_of(f);
  std::size_t r = 0;
  for (const Block& b : blocks_)
    if (auto it = b.vectors.find(f); it != b.vectors.end()) r += static_cast<std::size_t>(it->second.cols());
  return r;
}

double IsotypicDecomposition::trace_with(const YoungFrame& f, const Matrix& m) const {
  index_of(f);
  if (static_cast<std::size_t>(m.rows()) != n_ || m.rows() != m.cols())
    throw std::invalid_argument("trace_with: matrix dimension mismatch");
  double total = 0.0;
  for (const Block& b : blocks_) {
    auto it = b.vectors.find(f);
    if (it == b.vectors.end()) continue;
    const auto k = static_cast<Eigen::Index>(b.basis.size());
    Matrix sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        sub(i, j) = m(static_cast<Eigen::Index>(b.basis[static_cast<std::size_t>(i)]),
                      static_cast<Eigen::Index>(b.basis[static_cast<std::size_t>(j)]));
    const Matrix v = it->second.cast<cplx>();
    total += (v.adjoint() * sub * v).trace().real();
  }
  return total;
}

Matrix isotypic_projector(const YoungFrame& f, std::size_t l, std::size_t d, const NumericConfig& cfg) {
  if (f.boxes() != l) throw std::invalid_argument("isotypic_projector: frame does not have l boxes");
  IsotypicDecomposition dec(l, d, cfg);
  if (f.rows() > d) return Matrix::Zero(static_cast<Eigen::Index>(dec.total_dim()), static_cast<Eigen::Index>(dec.total_dim()));
  return dec.projector(f);
}

// ------------------------------------------------------------- binning

std::size_t EntropyBinning::bin_of(double entropy) const {
  constexpr double tol = 1e-12;
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (entropy <= boundaries[i] + tol) return i;
  return bins();
}

EntropyBinning make_binning(std::size_t l, std::size_t d, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("binning: eta must be positive");
  if (d < 2) throw std::invalid_argument("binning: d must be at least 2");
  EntropyBinning b;
  b.l = l;
  b.d = d;
  b.eta = eta;
  const double top = std::log2(double(d));
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(top / eta - 1e-12)));
  for (std::size_t i = 0; i < n; ++i) b.boundaries.push_back(double(i) * eta);
  b.boundaries.push_back(top);
  return b;
}

Instrument EntropyInstrument::instrument(const NumericConfig& cfg) const {
  return Instrument::projective(projectors, cfg);
}

std::size_t EntropyInstrument::position_of(std::size_t bin_index) const {
  for (std::size_t k = 0; k < bins.size(); ++k)
    if (bins[k].index == bin_index) return k;
  return bins.size();
}

EntropyInstrument build_entropy_instrument(std::size_t l, std::size_t d, double eta, const NumericConfig& cfg) {
  EntropyInstrument inst;
  inst.binning = make_binning(l, d, eta);
  const IsotypicDecomposition dec(l, d, cfg);
  std::map<std::size_t, EntropyBin> by_bin;
  for (const YoungFrame& f : dec.frames()) {
    const std::size_t i = inst.binning.bin_of(frame_entropy(f));
    EntropyBin& b = by_bin[i];
    b.index = i;
    b.lo = inst.binning.lower(i);
    b.hi = inst.binning.upper(i);
    b.frames.push_back(f);
    b.rank += dec.rank(f);
  }
  const auto n = static_cast<Eigen::Index>(dec.total_dim());
  for (auto& [i, b] : by_bin) {
    Matrix p = Matrix::Zero(n, n);
    for (const YoungFrame& f : b.frames) p += dec.projector(f);
    inst.projectors.push_back(std::move(p));
    inst.bins.push_back(std::move(b));
  }
  return inst;
}

namespace {

Matrix a_marginal_power(const EntropyInstrument& inst, const State& rho, const NumericConfig& cfg) {
  const FactorSet fa = rho.layout().factors_of(Party::A);
  if (fa.empty()) throw std::invalid_argument("entropy instrument: state has no A factor");
  if (rho.layout().dim_of(fa) != inst.binning.d)
    throw std::invalid_argument("entropy instrument: A dimension does not match the instrument");
  const Matrix ra = fa.size() == rho.layout().size() ? rho.matrix() : partial_trace(rho.matrix(), rho.layout().dims, fa);
  check_cap("entropy instrument input", static_cast<std::size_t>(inst.projectors.front().rows()), cfg.dim_cap);
  Matrix power = ra;
  for (std::size_t c = 1; c < inst.binning.l; ++c) power = kron(power, ra);
  return power;
}

}  // namespace

std::vector<double> bin_probabilities(const EntropyInstrument& inst, const State& rho, const NumericConfig& cfg) {
  const Matrix power = a_marginal_power(inst, rho, cfg);
  std::vector<double> out;
  for (const Matrix& p : inst.projectors) out.push_back(p.cwiseProduct(power.transpose()).sum().real());
  return out;
}

double misbin_probability(const EntropyInstrument& inst, const State& rho, std::size_t true_bin,
                          const NumericConfig& cfg) {
  if (true_bin < 1 || true_bin > inst.binning.bins()) throw std::invalid_argument("misbin: bin index out of range");
  const std::vector<double> q = bin_probabilities(inst, rho, cfg);
  double total = 0.0;
  for (std::size_t k = 0; k < inst.bins.size(); ++k) {
    const std::size_t j = inst.bins[k].index;
    if ((j > true_bin ? j - true_bin : true_bin - j) > 1) total += q[k];
  }
  return std::clamp(total, 0.0, 1.0);
}

double misbin_probability(const EntropyInstrument& inst, const State& rho, const NumericConfig& cfg) {
  const FactorSet fa = rho.layout().factors_of(Party::A);
  const Matrix ra = fa.size() == rho.layout().size() ? rho.matrix() : partial_trace(rho.matrix(), rho.layout().dims, fa);
  return misbin_probability(inst, rho, inst.binning.bin_of(matrix_entropy(ra, cfg)), cfg);
}

}  // namespace qmerge
