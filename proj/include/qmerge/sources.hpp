#pragma once

// Compound and arbitrarily varying source models: finite state sets, their
// convex hulls, Hausdorff distances, and the merging / distillation rate
// functionals evaluated over members or over the hull.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmerge/channels.hpp"
#include "qmerge/optimize.hpp"
#include "qmerge/robustification.hpp"

namespace qmerge {

class StateSet {
 public:
  // Members must share one layout. Labels default to "0", "1", ...
  explicit StateSet(std::vector<State> members, std::vector<std::string> labels = {},
                    const NumericConfig& cfg = default_config());

  const std::vector<State>& members() const { return members_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const Layout& layout() const { return members_.front().layout(); }
  std::size_t size() const { return members_.size(); }
  const State& operator[](std::size_t i) const { return members_[i]; }
  // Pairs of members closer than close_tol in max-entry distance.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<State> members_;
  std::vector<std::string> labels_;
  std::vector<std::string> warnings_;
};

// sum_s p(s) rho_s.
State convex_mixture(const StateSet& xs, const std::vector<double>& p, const NumericConfig& cfg = default_config());

enum class HausdorffMode { Pointset, Hull };

// Trace-norm distance from sigma to conv(ys).
SimplexResult distance_to_hull(const Matrix& sigma, const StateSet& ys, const SubgradientOptions& opts = {});
double hausdorff_distance(const StateSet& xs, const StateSet& ys, HausdorffMode mode,
                          const SubgradientOptions& opts = {});

// Which set a functional ranges over: the listed members, or their hull.
enum class SetScope { Members, Hull };

struct OptimizerInfo {
  std::string method;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
};

struct RateReport {
  std::string quantity;
  double value = 0.0;  // bits (per copy)
  SetScope scope = SetScope::Members;
  std::optional<std::size_t> member;  // attaining member, members scope
  std::vector<double> weights;        // attaining mixture (point mass for members)
  OptimizerInfo optimizer;
  double baseline = 0.0;              // distillation: trivial-instrument value
  std::optional<Instrument> instrument;
  std::string note;
};

// sup S(A|B, rho) over the members or the hull.
RateReport compound_merging_cost(const StateSet& xs, SetScope scope = SetScope::Members,
                                 const SimplexOptions& opts = {}, const NumericConfig& cfg = default_config());
// sup I(A;E, rho) over the members or the hull.
RateReport compound_classical_cost(const StateSet& xs, SetScope scope = SetScope::Members,
                                   const SimplexOptions& opts = {}, const NumericConfig& cfg = default_config());

struct DistillationOptions {
  std::size_t k = 1;         // 1 or 2 letters; the value is divided by k
  std::size_t outcomes = 2;  // J
  std::size_t restarts = 8;  // restart 0 starts from the trivial instrument
  std::uint64_t seed = 0;
  CompassOptions compass{0.5, 1e-3, 300};
  SimplexOptions inner{500, 1e-6, 0, false, 0, 1e-7};
};

// Instrument-independent part: inf over the scope of D1(tau^k, T)/k for one
// fixed instrument T on the k-fold A space.
SimplexResult distillation_infimum(const StateSet& xs, const Instrument& t, std::size_t k, SetScope scope,
                                   const SimplexOptions& inner = DistillationOptions{}.inner,
                                   const NumericConfig& cfg = default_config());
// max_T inf_tau D1(tau^k, T)/k over instruments with `outcomes` outcomes;
// never below the trivial-instrument value.
RateReport distillation_rate_lower_bound(const StateSet& xs, SetScope scope = SetScope::Members,
                                         const DistillationOptions& opts = {},
                                         const NumericConfig& cfg = default_config());
// The arbitrarily varying capacity equals the compound value on conv(X);
// evaluated as distillation_rate_lower_bound(xs, Hull).
RateReport avqs_distillation_capacity(const StateSet& xs, const DistillationOptions& opts = {},
                                      const NumericConfig& cfg = default_config());

// rho_{s_1} (x) ... (x) rho_{s_l}.
State word_state(const StateSet& xs, const Word& w, const NumericConfig& cfg = default_config());
// Product of per-member canonical purifications, E factors moved last.
PureState word_purification(const std::vector<PureState>& purifications, const Word& w,
                            const NumericConfig& cfg = default_config());

struct WorstCaseOptions {
  std::size_t cap = 1u << 16;  // max |S|^l for exhaustive enumeration
  std::optional<std::size_t> samples;  // sampled mode: this many seeded random words
  std::uint64_t seed = 0;
};

struct WorstCase {
  double value = 1.0;
  Word word;  // first minimizing word in lexicographic order
  std::size_t evaluated = 0;
  bool sampled = false;
};

// min over words of F_m(rho_{s^l}, p).
WorstCase worst_case_protocol_fidelity(const MergingProtocol& p, const StateSet& xs, std::size_t l,
                                       const WorstCaseOptions& opts = {},
                                       const NumericConfig& cfg = default_config());
// min over words of <phi| D(rho_{s^l}) |phi>.
WorstCase worst_case_channel_fidelity(const OneWayLoccChannel& d, const PureState& target, const StateSet& xs,
                                      std::size_t l, const WorstCaseOptions& opts = {},
                                      const NumericConfig& cfg = default_config());

}  // namespace qmerge
