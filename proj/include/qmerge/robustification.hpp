#pragma once

// Method of types over S^l, permutation averages, the robustification
// bound 1 - (l+1)^{|S|} gamma, and permutation-symmetrized LOCC channels.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qmerge/channels.hpp"
#include "qmerge/random.hpp"

namespace qmerge {

using Word = std::vector<std::size_t>;

struct TypeDistribution {
  std::vector<std::size_t> counts;  // one per symbol, summing to l

  std::size_t length() const;
  std::vector<double> probabilities() const;
  friend bool operator==(const TypeDistribution&, const TypeDistribution&) = default;
};

// All compositions of l into `alphabet` parts, in reverse lexicographic
// order ((l,0,...) first).
std::vector<TypeDistribution> enumerate_types(std::size_t alphabet, std::size_t l);
TypeDistribution type_of(const Word& w, std::size_t alphabet);
// |T_q| = l! / prod counts!.
double type_class_size(const TypeDistribution& q);

// A function f : S^l -> R stored as a table over all |S|^l words; word
// index is base-|S| with the first symbol most significant.
class WordFunction {
 public:
  WordFunction(std::size_t alphabet, std::size_t l, std::vector<double> values);
  static WordFunction tabulate(std::size_t alphabet, std::size_t l, const std::function<double(const Word&)>& f,
                               std::size_t cap = 1u << 20);

  std::size_t alphabet() const { return alphabet_; }
  std::size_t length() const { return l_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

  double operator()(const Word& w) const { return values_[index_of(w)]; }
  std::size_t index_of(const Word& w) const;
  Word word_at(std::size_t index) const;

 private:
  std::size_t alphabet_;
  std::size_t l_;
  std::vector<double> values_;
};

// sum_{s^l} f(s^l) q(s_1)...q(s_l), with q = counts / l.
double iid_type_average(const WordFunction& f, const TypeDistribution& q);
// Same with an arbitrary product distribution q on S.
double iid_average(const WordFunction& f, const std::vector<double>& q);
// (1/l!) sum_sigma f(sigma(w)), evaluated over the distinct rearrangements of w.
double permutation_average(const WordFunction& f, const Word& w);

struct TypeMargin {
  TypeDistribution type;
  double iid_average = 0.0;
  double margin = 0.0;  // iid_average - (1 - gamma)
};

struct WordMargin {
  Word word;
  double permutation_average = 0.0;
  double margin = 0.0;  // permutation_average - bound
};

struct RobustificationReport {
  std::size_t alphabet = 0;
  std::size_t blocklength = 0;
  double gamma = 0.0;
  bool gamma_supplied = false;
  double polynomial_factor = 0.0;  // (l+1)^{|S|}
  double bound = 0.0;              // 1 - factor * gamma
  bool hypothesis_holds = true;    // every type average >= 1 - gamma
  std::vector<TypeMargin> types;
  std::vector<WordMargin> words;
  std::size_t worst_word = 0;      // index into `words`
  double min_word_margin = 0.0;
  bool pass = true;                // every word margin >= -tol
};

// gamma defaults to max(0, 1 - min_q iid_type_average(f, q)).
RobustificationReport check_robustification(const WordFunction& f, std::optional<double> gamma = std::nullopt,
                                            double tol = 1e-12);

struct SymmetrizeMode {
  enum class Kind { Exact, Sampled } kind = Kind::Exact;
  std::uint64_t seed = 0;
  std::size_t samples = 0;

  static SymmetrizeMode exact() { return {}; }
  static SymmetrizeMode sampled(std::uint64_t seed, std::size_t samples) { return {Kind::Sampled, seed, samples}; }
};

// The permutations used by a mode (all of S_l in lexicographic order, or
// `samples` uniform draws from the seeded generator).
std::vector<Word> symmetrizing_permutations(std::size_t l, const SymmetrizeMode& mode, std::size_t exact_max_l = 6);

// (1/m) sum_sigma D o U_sigma, where D's input layout ends with l copies of
// `copy_layout` (leading register factors are untouched). Outcomes are
// (sigma, k) pairs ordered sigma-major.
OneWayLoccChannel symmetrize_channel(const OneWayLoccChannel& d, const Layout& copy_layout, std::size_t l,
                                     const SymmetrizeMode& mode, const NumericConfig& cfg = default_config());

}  // namespace qmerge
