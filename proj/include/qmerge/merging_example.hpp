#pragma once

// The orthogonal-support arbitrarily varying source: N copies of a base
// state with negative conditional entropy, rotated on A into mutually
// orthogonal blocks. A measures the block, merges with a fixed protocol for
// the base state, and B rotates the merged copy back.

#include <optional>
#include <vector>

#include "qmerge/channels.hpp"
#include "qmerge/sources.hpp"

namespace qmerge {

struct ExampleFamily {
  State base;                 // rho_1 as given
  State compressed;           // rho_1 with A restricted to supp(rho_{A,1}) (dimension r)
  Matrix support;             // dA x r isometry onto supp(rho_{A,1})
  std::size_t n = 1;          // N
  std::size_t rank = 1;       // r = rank(rho_{A,1})
  std::vector<Matrix> unitaries;    // U_s on C^{N r}: block shift by s blocks (U_0 = I)
  std::vector<Matrix> projectors;   // Pi_s onto block s
  std::vector<Matrix> embeddings;   // W_s = U_s restricted to block 0, (N r) x r
  StateSet members;           // rho_s = (W_s (x) 1) rho~_1 (W_s^dagger (x) 1)

  std::size_t enlarged_dim() const { return n * rank; }
  Layout copy_layout() const { return members.layout(); }
};

// Throws unless S(A|B, rho1) < -1e-9. Checks every family invariant.
ExampleFamily build_example_family(const State& rho1, std::size_t n, const NumericConfig& cfg = default_config());

struct FamilyCheck {
  double max_marginal_overlap = 0.0;  // max_{s != s'} |rho_{A,s} rho_{A,s'}|_1
  double max_joint_overlap = 0.0;     // max_{s != s'} |rho_s rho_s'|_1
  double max_b_marginal_gap = 0.0;    // max_s |rho_{B,s} - rho_{B,1}|_1
  bool ok(double tol = 1e-10) const {
    return max_marginal_overlap <= tol && max_joint_overlap <= tol && max_b_marginal_gap <= tol;
  }
};
FamilyCheck check_family(const ExampleFamily& fam);

// N outcomes with Kraus W_s^dagger: C^{N r} -> C^r.
Instrument discriminating_instrument(const ExampleFamily& fam, const NumericConfig& cfg = default_config());
// max over (s, s') of the deviation of outcome s' on rho_s from delta_{s s'} rho~_1.
double discrimination_error(const ExampleFamily& fam, const Instrument& v, const NumericConfig& cfg = default_config());

// Merging of l copies of a pure state with Schmidt rank r: A hands its
// Schmidt index to KA, B moves its Schmidt index to KB and prepares the
// state locally on B'B. No input resource, output resource of rank r^l,
// one message. Merging fidelity is 1 exactly when the Schmidt coefficients
// are uniform.
MergingProtocol known_pure_state_merging(const State& rho1, std::size_t l, const NumericConfig& cfg = default_config());

// sum over words s^l of U_{s^l} o sub o V_{s^l}; messages N^l times those of sub.
MergingProtocol example_merging_protocol(const ExampleFamily& fam, const MergingProtocol& sub, std::size_t l,
                                         std::size_t word_cap = 1u << 12,
                                         const NumericConfig& cfg = default_config());

struct RateGapReport {
  std::size_t n = 1;
  std::size_t blocklength = 1;
  double log_n = 0.0;
  double base_conditional_entropy = 0.0;  // S(A|B, rho_1)
  double base_mutual_info_env = 0.0;      // I(A;E, rho_1)
  double hull_merging_closed = 0.0;       // S(A|B, rho_1) + log N
  RateReport hull_merging_numeric;
  double hull_classical_closed = 0.0;     // I(A;E, rho_1) + 2 log N
  RateReport hull_classical_numeric;
  double protocol_entanglement_rate = 0.0;  // log2(k_l) / l
  double protocol_classical_rate = 0.0;     // log2(D_l) / l
  std::size_t messages = 0;                 // D_l
  std::size_t sub_messages = 0;             // D~_l
  WorstCase protocol_fidelity;              // min over words of F_m
  double sub_fidelity = 0.0;                // F_m(rho_1^l, sub)
  double merging_gap = 0.0;                 // numeric hull merging cost - protocol entanglement rate
  double classical_gap = 0.0;               // numeric hull classical cost - protocol classical rate
  bool gaps_ok = false;                     // both gaps >= log N - 1e-6
  bool closed_forms_agree = false;          // numeric vs closed form within 1e-6
};

// When `sub` is omitted the base state must be pure and known_pure_state_merging is used.
RateGapReport rate_gap_report(const ExampleFamily& fam, std::size_t l = 1,
                              const std::optional<MergingProtocol>& sub = std::nullopt,
                              const SimplexOptions& opts = {}, const NumericConfig& cfg = default_config());

}  // namespace qmerge
