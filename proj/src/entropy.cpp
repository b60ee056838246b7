#include "qmerge/entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace qmerge {

namespace {

FactorSet factors_for(const Layout& l, std::initializer_list<Party> ps) {
  FactorSet out;
  for (std::size_t k = 0; k < l.size(); ++k)
    for (Party p : ps)
      if (l.parties[k] == p) out.push_back(k);
  return out;
}

double entropy_on(const State& s, const FactorSet& kept, const NumericConfig& cfg) {
  if (kept.size() == s.layout().size()) return matrix_entropy(s.matrix(), cfg);
  return matrix_entropy(partial_trace(s.matrix(), s.layout().dims, kept), cfg);
}

void require_party(const FactorSet& f, Party p) {
  if (f.empty())
    throw std::invalid_argument("state has no factor assigned to party " + std::string(party_name(p)));
}

}  // namespace

std::string_view quantity_name(QuantityKind k) {
  switch (k) {
    case QuantityKind::Entropy: return "entropy";
    case QuantityKind::ConditionalEntropy: return "conditional-entropy";
    case QuantityKind::MutualInfoEnv: return "mutual-info-env";
    case QuantityKind::CoherentInfo: return "coherent-info";
    case QuantityKind::D1Rate: return "d1-rate";
  }
  return "?";
}

double entropy_of_spectrum(const RealVector& eigenvalues, double clip) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double x = eigenvalues(i);
    if (x > clip) h -= x * std::log2(x);
  }
  return h;
}

double matrix_entropy(const Matrix& rho, const NumericConfig& cfg) {
  return entropy_of_spectrum(spectrum(rho), cfg.clip);
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

RateValue von_neumann_entropy(const State& s, const NumericConfig& cfg) {
  return {matrix_entropy(s.matrix(), cfg), QuantityKind::Entropy};
}

RateValue conditional_entropy(const State& s, Party a, Party b, const NumericConfig& cfg) {
  const FactorSet fa = factors_for(s.layout(), {a});
  const FactorSet fb = factors_for(s.layout(), {b});
  require_party(fa, a);
  require_party(fb, b);
  const FactorSet fab = factors_for(s.layout(), {a, b});
  return {entropy_on(s, fab, cfg) - entropy_on(s, fb, cfg), QuantityKind::ConditionalEntropy};
}

RateValue mutual_info_env(const State& s, Party a, Party b, const NumericConfig& cfg) {
  const FactorSet fa = factors_for(s.layout(), {a});
  const FactorSet fb = factors_for(s.layout(), {b});
  require_party(fa, a);
  require_party(fb, b);
  const FactorSet fab = factors_for(s.layout(), {a, b});
  const double v = entropy_on(s, fa, cfg) + entropy_on(s, fab, cfg) - entropy_on(s, fb, cfg);
  return {v, QuantityKind::MutualInfoEnv};
}

RateValue coherent_information(const State& s, Party x, Party y, const NumericConfig& cfg) {
  const FactorSet fx = factors_for(s.layout(), {x});
  const FactorSet fy = factors_for(s.layout(), {y});
  require_party(fx, x);
  require_party(fy, y);
  const FactorSet fxy = factors_for(s.layout(), {x, y});
  return {entropy_on(s, fy, cfg) - entropy_on(s, fxy, cfg), QuantityKind::CoherentInfo};
}

RateValue d1_rate(const State& s, const Instrument& e, Party x, Party y, const NumericConfig& cfg) {
  const FactorSet fx = factors_for(s.layout(), {x});
  require_party(fx, x);
  require_party(factors_for(s.layout(), {y}), y);
  double total = 0.0;
  for (const auto& outcome : instrument_statistics(e, s, fx, cfg).kept)
    total += outcome.probability * coherent_information(outcome.state, x, y, cfg).value;
  return {total, QuantityKind::D1Rate};
}

}  // namespace qmerge
