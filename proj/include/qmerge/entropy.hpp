#pragma once

// Entropic quantities (base-2 logarithms) and the instrument-dependent
// one-way distillation functional.

#include <string_view>

#include "qmerge/channels.hpp"
#include "qmerge/linalg.hpp"

namespace qmerge {

enum class QuantityKind { Entropy, ConditionalEntropy, MutualInfoEnv, CoherentInfo, D1Rate };

std::string_view quantity_name(QuantityKind k);

struct RateValue {
  double value = 0.0;  // bits
  QuantityKind kind = QuantityKind::Entropy;
};

// -sum lambda log2 lambda over the clipped spectrum of a PSD matrix.
double entropy_of_spectrum(const RealVector& eigenvalues, double clip = default_config().clip);
double matrix_entropy(const Matrix& rho, const NumericConfig& cfg = default_config());
double shannon_entropy(std::span<const double> p);

RateValue von_neumann_entropy(const State& s, const NumericConfig& cfg = default_config());

// S(AB) - S(B) where "A" and "B" select factors by party label.
RateValue conditional_entropy(const State& s, Party a = Party::A, Party b = Party::B,
                              const NumericConfig& cfg = default_config());

// I(A;E) of a purification, from the AB marginals: S(A) + S(AB) - S(B).
RateValue mutual_info_env(const State& s, Party a = Party::A, Party b = Party::B,
                          const NumericConfig& cfg = default_config());

// I_c(X>Y) = S(Y) - S(XY).
RateValue coherent_information(const State& s, Party x = Party::A, Party y = Party::B,
                               const NumericConfig& cfg = default_config());

// sum_j lambda_j I_c(X>Y, sigma_j) over outcomes of an instrument acting on
// every X factor (grouped in layout order).
RateValue d1_rate(const State& s, const Instrument& e, Party x = Party::A, Party y = Party::B,
                  const NumericConfig& cfg = default_config());

}  // namespace qmerge
