#include "qmerge/robustification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qmerge {

namespace {

void compositions(std::size_t left, std::size_t slot, std::vector<std::size_t>& cur,
                  std::vector<TypeDistribution>& out) {
  if (slot + 1 == cur.size()) {
    cur[slot] = left;
    out.push_back({cur});
    return;
  }
  for (std::size_t c = left + 1; c-- > 0;) {
    cur[slot] = c;
    compositions(left - c, slot + 1, cur, out);
  }
}

double log_factorial(std::size_t n) { return std::lgamma(double(n) + 1.0); }

// Sum of f over the rearrangements of w, and their number.
std::pair<double, std::size_t> class_sum(const WordFunction& f, Word w) {
  std::sort(w.begin(), w.end());
  double total = 0.0;
  std::size_t count = 0;
  do {
    total += f(w);
    ++count;
  } while (std::next_permutation(w.begin(), w.end()));
  return {total, count};
}

Word representative(const TypeDistribution& q) {
  Word w;
  for (std::size_t s = 0; s < q.counts.size(); ++s) w.insert(w.end(), q.counts[s], s);
  return w;
}

}  // namespace

std::size_t TypeDistribution::length() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

std::vector<double> TypeDistribution::probabilities() const {
  const double l = double(length());
  std::vector<double> p;
  for (std::size_t c : counts) p.push_back(double(c) / l);
  return p;
}

std::vector<TypeDistribution> enumerate_types(std::size_t alphabet, std::size_t l) {
  if (alphabet == 0 || l == 0) throw std::invalid_argument("enumerate_types: alphabet and l must be positive");
  std::vector<TypeDistribution> out;
  std::vector<std::size_t> cur(alphabet, 0);
  compositions(l, 0, cur, out);
  return out;
}

TypeDistribution type_of(const Word& w, std::size_t alphabet) {
  TypeDistribution q{std::vector<std::size_t>(alphabet, 0)};
  for (std::size_t s : w) {
    if (s >= alphabet) throw std::invalid_argument("type_of: symbol out of range");
    ++q.counts[s];
  }
  return q;
}

double type_class_size(const TypeDistribution& q) {
  double lg = log_factorial(q.length());
  for (std::size_t c : q.counts) lg -= log_factorial(c);
  return std::round(std::exp(lg));
}

// -------------------------------------------------------- WordFunction

WordFunction::WordFunction(std::size_t alphabet, std::size_t l, std::vector<double> values)
    : alphabet_(alphabet), l_(l), values_(std::move(values)) {
  if (alphabet_ == 0 || l_ == 0) throw std::invalid_argument("word function: alphabet and l must be positive");
  std::size_t n = 1;
  for (std::size_t i = 0; i < l_; ++i) n *= alphabet_;
  if (values_.size() != n)
    throw std::invalid_argument("word function: expected " + std::to_string(n) + " values, got " +
                                std::to_string(values_.size()));
}

WordFunction WordFunction::tabulate(std::size_t alphabet, std::size_t l, const std::function<double(const Word&)>& f,
                                    std::size_t cap) {
  const std::size_t n = Layout(std::vector<std::size_t>(l, alphabet), std::vector<Party>(l, Party::A)).total_dim(cap);
  std::vector<double> v(n);
  WordFunction shape(alphabet, l, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i] = f(shape.word_at(i));
  return WordFunction(alphabet, l, std::move(v));
}

std::size_t WordFunction::index_of(const Word& w) const {
  if (w.size() != l_) throw std::invalid_argument("word function: word length mismatch");
  std::size_t i = 0;
  for (std::size_t s : w) {
    if (s >= alphabet_) throw std::invalid_argument("word function: symbol out of range");
    i = i * alphabet_ + s;
  }
  return i;
}

Word WordFunction::word_at(std::size_t index) const {
  Word w(l_);
  for (std::size_t j = l_; j-- > 0;) {
    w[j] = index % alphabet_;
    index /= alphabet_;
  }
  return w;
}

// ------------------------------------------------------------ averages

double iid_average(const WordFunction& f, const std::vector<double>& q) {
  if (q.size() != f.alphabet()) throw std::invalid_argument("iid_average: distribution length mismatch");
  // Group words by type: sum_T (prod q^n) * sum_{w in T} f(w).
  double total = 0.0;
  for (const TypeDistribution& t : enumerate_types(f.alphabet(), f.length())) {
    double weight = 1.0;
    for (std::size_t s = 0; s < q.size(); ++s) weight *= std::pow(q[s], double(t.counts[s]));
    if (weight == 0.0) continue;
    total += weight * class_sum(f, representative(t)).first;
  }
  return total;
}

double iid_type_average(const WordFunction& f, const TypeDistribution& q) {
  if (q.length() != f.length()) throw std::invalid_argument("iid_type_average: type length differs from l");
  return iid_average(f, q.probabilities());
}

double permutation_average(const WordFunction& f, const Word& w) {
  const auto [total, count] = class_sum(f, w);
  return total / double(count);
}

RobustificationReport check_robustification(const WordFunction& f, std::optional<double> gamma, double tol) {
  RobustificationReport r;
  r.alphabet = f.alphabet();
  r.blocklength = f.length();
  const auto types = enumerate_types(f.alphabet(), f.length());
  double min_avg = std::numeric_limits<double>::infinity();
  for (const TypeDistribution& q : types) {
    const double avg = iid_type_average(f, q);
    min_avg = std::min(min_avg, avg);
    r.types.push_back({q, avg, 0.0});
  }
  r.gamma_supplied = gamma.has_value();
  r.gamma = gamma.value_or(std::max(0.0, 1.0 - min_avg));
  r.polynomial_factor = std::pow(double(f.length() + 1), double(f.alphabet()));
  r.bound = 1.0 - r.polynomial_factor * r.gamma;
  for (TypeMargin& t : r.types) {
    t.margin = t.iid_average - (1.0 - r.gamma);
    if (t.margin < -tol) r.hypothesis_holds = false;
  }

  // Permutation averages depend only on the type; compute once per type.
  std::vector<double> per_type(types.size());
  for (std::size_t k = 0; k < types.size(); ++k) per_type[k] = permutation_average(f, representative(types[k]));
  r.min_word_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Word w = f.word_at(i);
    const TypeDistribution q = type_of(w, f.alphabet());
    const std::size_t k = static_cast<std::size_t>(std::find(types.begin(), types.end(), q) - types.begin());
    const double margin = per_type[k] - r.bound;
    if (margin < r.min_word_margin) {
      r.min_word_margin = margin;
      r.worst_word = r.words.size();
    }
    r.words.push_back({w, per_type[k], margin});
  }
  r.pass = r.min_word_margin >= -tol;
  return r;
}

// ------------------------------------------------------- symmetrization

std::vector<Word> symmetrizing_permutations(std::size_t l, const SymmetrizeMode& mode, std::size_t exact_max_l) {
  std::vector<Word> out;
  if (mode.kind == SymmetrizeMode::Kind::Exact) {
    check_cap("exact symmetrization blocklength", l, exact_max_l);
    Word p(l);
    std::iota(p.begin(), p.end(), 0);
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
  }
  if (mode.samples == 0) throw std::invalid_argument("sampled symmetrization needs at least one sample");
  SplitMix64 rng(mode.seed);
  for (std::size_t i = 0; i < mode.samples; ++i) out.push_back(random_permutation(l, rng));
  return out;
}

OneWayLoccChannel symmetrize_channel(const OneWayLoccChannel& d, const Layout& copy_layout, std::size_t l,
                                     const SymmetrizeMode& mode, const NumericConfig& cfg) {
  const Layout& in = d.in_layout();
  const Layout copies = copy_layout.repeated(l);
  if (in.size() < copies.size()) throw std::invalid_argument("symmetrize: channel input is shorter than l copies");
  const std::size_t lead = in.size() - copies.size();
  for (std::size_t k = 0; k < copies.size(); ++k)
    if (in.dims[lead + k] != copies.dims[k] || in.parties[lead + k] != copies.parties[k])
      throw std::invalid_argument("symmetrize: channel input " + describe(in) + " does not end with " +
                                  describe(copies));
  const std::vector<Word> perms = symmetrizing_permutations(l, mode);
  const FactorSet fa = in.factors_held_by_a(), fb = in.factors_held_by_b();
  const std::size_t nc = copy_layout.size();
  auto local_perm = [&](const FactorSet& side, const FactorSet& full) {
    FactorSet p;
    for (std::size_t f : side)
      p.push_back(static_cast<std::size_t>(std::find(side.begin(), side.end(), full[f]) - side.begin()));
    return p;
  };
  std::vector<std::size_t> da, db;
  for (std::size_t f : fa) da.push_back(in.dims[f]);
  for (std::size_t f : fb) db.push_back(in.dims[f]);
  check_cap("symmetrized message count", perms.size() * d.messages(), cfg.dim_cap * cfg.dim_cap);

  const double w = 1.0 / std::sqrt(double(perms.size()));
  std::vector<CpMap> a_maps, b_maps;
  for (const Word& sigma : perms) {
    FactorSet full(in.size());
    std::iota(full.begin(), full.begin() + static_cast<long>(lead), 0);
    for (std::size_t j = 0; j < l; ++j)
      for (std::size_t f = 0; f < nc; ++f) full[lead + j * nc + f] = lead + sigma[j] * nc + f;
    const Matrix ua = fa.empty() ? Matrix::Identity(1, 1) : permutation_unitary(da, local_perm(fa, full));
    const Matrix ub = fb.empty() ? Matrix::Identity(1, 1) : permutation_unitary(db, local_perm(fb, full));
    for (std::size_t k = 0; k < d.messages(); ++k) {
      std::vector<Matrix> ka, kb;
      for (const Matrix& x : d.a_instrument().outcomes()[k].kraus()) ka.push_back(w * x * ua);
      for (const Matrix& x : d.b_channels()[k].kraus()) kb.push_back(x * ub);
      a_maps.emplace_back(std::move(ka), cfg);
      b_maps.emplace_back(std::move(kb), cfg);
    }
  }
  return OneWayLoccChannel(in, d.out_layout(), Instrument(std::move(a_maps), cfg), std::move(b_maps), cfg);
}

}  // namespace qmerge
