#pragma once

// Completely positive maps in Kraus form, instruments, A->B one-way LOCC
// channels and merging protocols.
//
// Factor conventions:
//   * A one-way LOCC channel maps states on `in_layout` to `out_layout`.
//     Its instrument acts on all A-held factors (A, KA) grouped in layout
//     order; its B channels act on all B-held factors (B, B', KB).
//   * Factors labelled E may follow the channel's input layout; they pass
//     through untouched and are appended after the output layout.
//   * A merging protocol's input is [phi_in registers] + l copies of the
//     base layout; its output is [phi_out registers] + l copies of the base
//     layout with A relabelled to B' in place.

#include <cstddef>
#include <optional>
#include <vector>

#include "qmerge/linalg.hpp"

namespace qmerge {

class CpMap {
 public:
  // Validates equal shapes and sum K^dagger K <= I (+tp_tol).
  explicit CpMap(std::vector<Matrix> kraus, const NumericConfig& cfg = default_config());

  static CpMap identity(std::size_t d);
  static CpMap unitary(const Matrix& u);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }

  Matrix gram() const;  // sum K^dagger K
  bool is_trace_preserving(double tol = default_config().tp_tol) const;
  Matrix apply(const Matrix& rho) const;  // sum K rho K^dagger on the full input space

 private:
  std::vector<Matrix> kraus_;
  std::size_t in_dim_ = 0;
  std::size_t out_dim_ = 0;
};

// Composition second ∘ first.
CpMap compose(const CpMap& second, const CpMap& first, const NumericConfig& cfg = default_config());
CpMap tensor(const CpMap& a, const CpMap& b, const NumericConfig& cfg = default_config());

class Instrument {
 public:
  // Outcomes are ordered; message indices are positions in this list.
  explicit Instrument(std::vector<CpMap> outcomes, const NumericConfig& cfg = default_config());

  static Instrument trivial(std::size_t d);
  // One outcome per projector; projectors must sum to the identity.
  static Instrument projective(const std::vector<Matrix>& projectors,
                               const NumericConfig& cfg = default_config());

  const std::vector<CpMap>& outcomes() const { return outcomes_; }
  std::size_t size() const { return outcomes_.size(); }
  std::size_t in_dim() const { return outcomes_.front().in_dim(); }
  std::size_t out_dim() const { return outcomes_.front().out_dim(); }

 private:
  std::vector<CpMap> outcomes_;
};

// I_d (x) T_k for every outcome.
Instrument extend_identity_front(const Instrument& e, std::size_t d,
                                 const NumericConfig& cfg = default_config());

struct CpMapResult {
  Matrix output;  // unnormalized
  Layout layout;
  double weight = 0.0;  // trace of output
};

// Applies m to the listed factors (grouped in the given order) and the
// identity elsewhere. When the map changes dimension the target factors are
// replaced by one factor at the position of the first target.
CpMapResult apply_cp_map(const CpMap& m, const State& s, const FactorSet& targets,
                         const NumericConfig& cfg = default_config());

struct OutcomeStatistic {
  std::size_t outcome = 0;
  double probability = 0.0;
  State state;  // normalized post-measurement state
};

struct InstrumentStatistics {
  std::vector<OutcomeStatistic> kept;
  std::vector<std::size_t> dropped;  // outcomes with probability <= prob_tol
};

InstrumentStatistics instrument_statistics(const Instrument& e, const State& s, const FactorSet& targets,
                                           const NumericConfig& cfg = default_config());

class OneWayLoccChannel {
 public:
  OneWayLoccChannel(Layout in_layout, Layout out_layout, Instrument a_instrument,
                    std::vector<CpMap> b_channels, const NumericConfig& cfg = default_config());

  static OneWayLoccChannel identity(const Layout& layout);

  const Layout& in_layout() const { return in_layout_; }
  const Layout& out_layout() const { return out_layout_; }
  const Instrument& a_instrument() const { return a_instrument_; }
  const std::vector<CpMap>& b_channels() const { return b_channels_; }
  std::size_t messages() const { return b_channels_.size(); }

 private:
  Layout in_layout_;
  Layout out_layout_;
  Instrument a_instrument_;
  std::vector<CpMap> b_channels_;
};

// sum_k (T_k (x) R_k)(s); s is on in_layout followed by optional E factors.
Matrix apply_one_way_locc(const OneWayLoccChannel& n, const Matrix& rho, const Layout& layout,
                          const NumericConfig& cfg = default_config());
State apply_one_way_locc(const OneWayLoccChannel& n, const State& s,
                         const NumericConfig& cfg = default_config());

// Output fidelity <target| N(|input><input|) |target> of a channel on pure
// input and target vectors, both carrying the same trailing E factors.
double pure_transfer_fidelity(const OneWayLoccChannel& n, const PureState& input, const PureState& target,
                              const NumericConfig& cfg = default_config());

struct SchmidtRatio {
  std::size_t input_rank = 1;   // sr(phi_in)
  std::size_t output_rank = 1;  // sr(phi_out)
  double log2() const;          // log2(k) = log2(input_rank / output_rank)
};

class MergingProtocol {
 public:
  MergingProtocol(OneWayLoccChannel locc, PureState phi_in, PureState phi_out, Layout copy_layout,
                  std::size_t blocklength, const NumericConfig& cfg = default_config());

  const OneWayLoccChannel& locc() const { return locc_; }
  const PureState& phi_in() const { return phi_in_; }
  const PureState& phi_out() const { return phi_out_; }
  const Layout& copy_layout() const { return copy_layout_; }
  std::size_t blocklength() const { return blocklength_; }
  std::size_t messages() const { return locc_.messages(); }
  SchmidtRatio k() const { return ratio_; }

 private:
  OneWayLoccChannel locc_;
  PureState phi_in_;
  PureState phi_out_;
  Layout copy_layout_;
  std::size_t blocklength_;
  SchmidtRatio ratio_;
};

// Register layouts [KA:r, KB:r] used by merging protocols.
PureState resource_state(std::size_t schmidt_rank);
Layout merging_input_layout(const Layout& copy_layout, std::size_t l, std::size_t input_rank);
Layout merging_output_layout(const Layout& copy_layout, std::size_t l, std::size_t output_rank);

// F_m with the canonical purification of rho.
double merging_fidelity(const MergingProtocol& p, const State& rho, const NumericConfig& cfg = default_config());
// F_m with a caller-supplied purification (rho's layout followed by E factors).
double merging_fidelity(const MergingProtocol& p, const PureState& purification,
                        const NumericConfig& cfg = default_config());

// Unitary channel on l copies of `copy_layout` moving input copy sigma[j]
// to output copy j, so that U(rho_{s_1} (x) ... ) = rho_{s_sigma(1)} (x) ...
CpMap permutation_channel(const FactorSet& sigma, const Layout& copy_layout);

// sum_i M^(i) ∘ (P^(i) (x) id). The instrument acts on the A-held factors
// of the composed input (resource half first); its output must match the
// sub-protocols' A-side input. Message count is the sum over subprotocols.
MergingProtocol compose_instrument_with_protocols(const Instrument& e,
                                                  const std::vector<MergingProtocol>& subprotocols,
                                                  const std::optional<Layout>& copy_layout = std::nullopt,
                                                  const NumericConfig& cfg = default_config());

// Channel-level form of the composition above: the composed channel maps
// `in_layout` to the common output layout of `subs`.
OneWayLoccChannel compose_instrument_with_channels(const Instrument& e, const Layout& in_layout,
                                                   const std::vector<OneWayLoccChannel>& subs,
                                                   const NumericConfig& cfg = default_config());

// Distillation-style channel keeping copy `index` of l copies: its A
// factors go to a KA register and its B factors to a KB register.
OneWayLoccChannel keep_copy_channel(const Layout& copy_layout, std::size_t l, std::size_t index,
                                    const NumericConfig& cfg = default_config());

}  // namespace qmerge
