#include "qmerge/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qmerge/entropy.hpp"
#include "qmerge/random.hpp"

namespace qmerge {

StateSet::StateSet(std::vector<State> members, std::vector<std::string> labels, const NumericConfig& cfg)
    : members_(std::move(members)), labels_(std::move(labels)) {
  if (members_.empty()) throw std::invalid_argument("state set: no members");
  for (std::size_t i = 1; i < members_.size(); ++i)
    if (!(members_[i].layout() == members_[0].layout()))
      throw std::invalid_argument("state set: member " + std::to_string(i) + " has layout " +
                                  describe(members_[i].layout()) + ", expected " + describe(members_[0].layout()));
  if (labels_.empty())
    for (std::size_t i = 0; i < members_.size(); ++i) labels_.push_back(std::to_string(i));
  if (labels_.size() != members_.size()) throw std::invalid_argument("state set: label count differs from members");
  for (std::size_t i = 0; i < members_.size(); ++i)
    for (std::size_t j = i + 1; j < members_.size(); ++j)
      if ((members_[i].matrix() - members_[j].matrix()).cwiseAbs().maxCoeff() < cfg.close_tol)
        warnings_.push_back("members " + labels_[i] + " and " + labels_[j] + " coincide within tolerance");
}

State convex_mixture(const StateSet& xs, const std::vector<double>& p, const NumericConfig& cfg) {
  if (p.size() != xs.size())
    throw std::invalid_argument("convex_mixture: " + std::to_string(p.size()) + " weights for " +
                                std::to_string(xs.size()) + " members");
  if (!on_simplex(p, 1e-9)) throw std::invalid_argument("convex_mixture: weights are not a probability vector");
  Matrix m = Matrix::Zero(xs[0].matrix().rows(), xs[0].matrix().cols());
  for (std::size_t s = 0; s < p.size(); ++s)
    if (p[s] != 0.0) m += std::max(p[s], 0.0) * xs[s].matrix();
  return State(std::move(m), xs.layout(), cfg);
}

// ------------------------------------------------------------- geometry

namespace {

void require_same_layout(const StateSet& xs, const StateSet& ys) {
  if (!(xs.layout() == ys.layout()))
    throw std::invalid_argument("hausdorff: layouts differ (" + describe(xs.layout()) + " vs " +
                                describe(ys.layout()) + ")");
}

Matrix sign_of(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector s = es.eigenvalues().unaryExpr([](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
  return es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

SimplexResult distance_to_hull(const Matrix& sigma, const StateSet& ys, const SubgradientOptions& opts) {
  const std::size_t n = ys.size();
  auto f = [&](const SimplexPoint& p) {
    Matrix diff = sigma;
    for (std::size_t s = 0; s < n; ++s) diff -= p[s] * ys[s].matrix();
    diff = 0.5 * (diff + diff.adjoint()).eval();
    ValueAndSubgradient r;
    const Matrix sg = sign_of(diff);
    r.value = trace_norm(diff);
    for (std::size_t s = 0; s < n; ++s) r.subgradient.push_back(-(sg * ys[s].matrix()).trace().real());
    return r;
  };
  return minimize_convex_on_simplex(f, n, opts);
}

double hausdorff_distance(const StateSet& xs, const StateSet& ys, HausdorffMode mode, const SubgradientOptions& opts) {
  require_same_layout(xs, ys);
  auto directed = [&](const StateSet& a, const StateSet& b) {
    double worst = 0.0;
    for (const State& x : a.members()) {
      double d;
      if (mode == HausdorffMode::Pointset) {
        d = std::numeric_limits<double>::infinity();
        for (const State& y : b.members()) d = std::min(d, trace_norm(x.matrix() - y.matrix()));
      } else {
        d = distance_to_hull(x.matrix(), b, opts).value;
      }
      worst = std::max(worst, d);
    }
    return worst;
  };
  return std::max(directed(xs, ys), directed(ys, xs));
}

// ------------------------------------------------------- compound costs

namespace {

RateReport maximize_quantity(const StateSet& xs, SetScope scope, const SimplexOptions& opts, const std::string& tag,
                             const std::function<double(const State&)>& q, const NumericConfig& cfg) {
  RateReport r;
  r.quantity = tag;
  r.scope = scope;
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const double v = q(xs[s]);
    if (v > best_value) {
      best_value = v;
      best = s;
    }
  }
  r.value = best_value;
  r.member = best;
  r.weights.assign(xs.size(), 0.0);
  r.weights[best] = 1.0;
  r.optimizer = {"vertex enumeration", 0, xs.size(), 0, opts.seed};
  if (scope == SetScope::Hull && xs.size() > 1) {
    const SimplexResult sr = maximize_on_simplex([&](const SimplexPoint& p) { return q(convex_mixture(xs, p, cfg)); },
                                                 xs.size(), opts);
    r.optimizer = {"projected gradient, multi-start", sr.iterations, sr.evaluations + xs.size(), sr.starts, opts.seed};
    if (sr.value > r.value) {
      r.value = sr.value;
      r.weights = sr.p;
      r.member.reset();
    }
  }
  return r;
}

}  // namespace

RateReport compound_merging_cost(const StateSet& xs, SetScope scope, const SimplexOptions& opts,
                                 const NumericConfig& cfg) {
  return maximize_quantity(
      xs, scope, opts, "merging_cost", [&](const State& s) { return conditional_entropy(s, Party::A, Party::B, cfg).value; },
      cfg);
}

RateReport compound_classical_cost(const StateSet& xs, SetScope scope, const SimplexOptions& opts,
                                   const NumericConfig& cfg) {
  return maximize_quantity(
      xs, scope, opts, "classical_cost", [&](const State& s) { return mutual_info_env(s, Party::A, Party::B, cfg).value; },
      cfg);
}

// --------------------------------------------------------- distillation

SimplexResult distillation_infimum(const StateSet& xs, const Instrument& t, std::size_t k, SetScope scope,
                                   const SimplexOptions& inner, const NumericConfig& cfg) {
  if (k == 0) throw std::invalid_argument("distillation: k must be positive");
  auto value = [&](const State& tau) {
    return d1_rate(k == 1 ? tau : tensor_power(tau, k, cfg), t, Party::A, Party::B, cfg).value / double(k);
  };
  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const double v = value(xs[s]);
    ++best.evaluations;
    if (v < best.value) {
      best.value = v;
      best.p.assign(xs.size(), 0.0);
      best.p[s] = 1.0;
    }
  }
  if (scope == SetScope::Hull && xs.size() > 1) {
    SimplexResult r = minimize_on_simplex([&](const SimplexPoint& p) { return value(convex_mixture(xs, p, cfg)); },
                                          xs.size(), inner);
    best.iterations += r.iterations;
    best.evaluations += r.evaluations;
    best.starts = r.starts;
    if (r.value < best.value) {
      best.value = r.value;
      best.p = std::move(r.p);
    }
  }
  return best;
}

RateReport distillation_rate_lower_bound(const StateSet& xs, SetScope scope, const DistillationOptions& opts,
                                         const NumericConfig& cfg) {
  if (opts.k != 1 && opts.k != 2) throw std::invalid_argument("distillation: k must be 1 or 2");
  if (opts.outcomes == 0) throw std::invalid_argument("distillation: at least one outcome");
  const std::size_t da = xs.layout().dim_of(xs.layout().factors_held_by_a());
  std::size_t dx = 1;
  for (std::size_t i = 0; i < opts.k; ++i) dx *= da;
  check_cap("distillation instrument dimension", dx * opts.outcomes, cfg.dim_cap);
  check_cap("distillation state dimension", Layout(xs.layout()).repeated(opts.k).total_dim(cfg.dim_cap), cfg.dim_cap);

  RateReport r;
  r.quantity = opts.k == 1 ? "distillation_rate_k1" : "distillation_rate_k2";
  r.scope = scope;
  const Instrument trivial = Instrument::trivial(dx);
  const SimplexResult base = distillation_infimum(xs, trivial, opts.k, scope, opts.inner, cfg);
  r.baseline = base.value;
  r.value = base.value;
  r.weights = base.p;
  r.instrument = trivial;
  r.optimizer = {"compass search over exp(iH) instruments", 0, base.evaluations, opts.restarts, opts.seed};

  const std::size_t np = instrument_param_count(dx, opts.outcomes);
  SplitMix64 root(opts.seed);
  for (std::size_t restart = 0; restart < opts.restarts && opts.outcomes > 1; ++restart) {
    std::vector<double> x0(np, 0.0);
    if (restart > 0) {
      SplitMix64 rng = root.split(restart);
      for (double& v : x0) v = rng.normal();
    }
    std::size_t inner_evals = 0;
    auto objective = [&](const std::vector<double>& x) {
      const SimplexResult s = distillation_infimum(xs, instrument_from_params(x, dx, opts.outcomes, cfg), opts.k, scope,
                                                   opts.inner, cfg);
      inner_evals += s.evaluations;
      return s.value;
    };
    const CompassResult c = compass_maximize(objective, x0, opts.compass);
    r.optimizer.iterations += c.sweeps;
    r.optimizer.evaluations += inner_evals;
    if (c.value > r.value) {
      // Re-evaluate the returned instrument so the reported value is its own infimum.
      const Instrument t = instrument_from_params(c.x, dx, opts.outcomes, cfg);
      const SimplexResult check = distillation_infimum(xs, t, opts.k, scope, opts.inner, cfg);
      if (check.value > r.value) {
        r.value = check.value;
        r.weights = check.p;
        r.instrument = t;
      }
    }
  }
  r.note = scope == SetScope::Hull ? "infimum over the convex hull of the members (heuristic simplex search)"
                                   : "infimum over the listed members";
  return r;
}

RateReport avqs_distillation_capacity(const StateSet& xs, const DistillationOptions& opts, const NumericConfig& cfg) {
  RateReport r = distillation_rate_lower_bound(xs, SetScope::Hull, opts, cfg);
  r.quantity = "avqs_" + r.quantity;
  r.note = "arbitrarily varying value = compound value on the convex hull; " + r.note;
  return r;
}

// ------------------------------------------------------------ worst case

State word_state(const StateSet& xs, const Word& w, const NumericConfig& cfg) {
  if (w.empty()) throw std::invalid_argument("word_state: empty word");
  for (std::size_t s : w)
    if (s >= xs.size()) throw std::invalid_argument("word_state: symbol out of range");
  State out = xs[w[0]];
  for (std::size_t j = 1; j < w.size(); ++j) out = tensor_product(out, xs[w[j]], cfg);
  return out;
}

PureState word_purification(const std::vector<PureState>& purifications, const Word& w, const NumericConfig& cfg) {
  if (w.empty()) throw std::invalid_argument("word_purification: empty word");
  PureState out = purifications.at(w[0]);
  for (std::size_t j = 1; j < w.size(); ++j) out = tensor_product(out, purifications.at(w[j]), cfg);
  FactorSet front, back;
  for (std::size_t f = 0; f < out.layout().size(); ++f)
    (out.layout().parties[f] == Party::E ? back : front).push_back(f);
  front.insert(front.end(), back.begin(), back.end());
  return permute_factors(out, front);
}

namespace {

WorstCase minimize_over_words(std::size_t alphabet, std::size_t l, const WorstCaseOptions& opts,
                              const std::function<double(const Word&)>& f) {
  WorstCase r;
  r.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const Word& w) {
    const double v = f(w);
    ++r.evaluated;
    if (v < r.value || (v == r.value && w < r.word)) {
      r.value = v;
      r.word = w;
    }
  };
  if (opts.samples) {
    r.sampled = true;
    SplitMix64 rng(opts.seed);
    for (std::size_t i = 0; i < *opts.samples; ++i) {
      Word w(l);
      for (auto& s : w) s = rng.below(alphabet);
      consider(w);
    }
    return r;
  }
  std::size_t n = 1;
  for (std::size_t j = 0; j < l; ++j) {
    check_cap("word enumeration |S|^l", n * alphabet, opts.cap);
    n *= alphabet;
  }
  Word w(l, 0);
  for (std::size_t i = 0; i < n; ++i) {
    consider(w);
    for (std::size_t j = l; j-- > 0;) {
      if (++w[j] < alphabet) break;
      w[j] = 0;
    }
  }
  return r;
}

}  // namespace

WorstCase worst_case_protocol_fidelity(const MergingProtocol& p, const StateSet& xs, std::size_t l,
                                       const WorstCaseOptions& opts, const NumericConfig& cfg) {
  if (l != p.blocklength())
    throw std::invalid_argument("worst case: blocklength " + std::to_string(l) + " differs from the protocol's " +
                                std::to_string(p.blocklength()));
  if (!(xs.layout() == p.copy_layout())) throw std::invalid_argument("worst case: set layout differs from protocol copies");
  std::vector<PureState> purifications;
  for (const State& s : xs.members()) purifications.push_back(purify(s, cfg));
  return minimize_over_words(xs.size(), l, opts, [&](const Word& w) {
    return merging_fidelity(p, word_purification(purifications, w, cfg), cfg);
  });
}

WorstCase worst_case_channel_fidelity(const OneWayLoccChannel& d, const PureState& target, const StateSet& xs,
                                      std::size_t l, const WorstCaseOptions& opts, const NumericConfig& cfg) {
  if (!(d.in_layout() == xs.layout().repeated(l)))
    throw std::invalid_argument("worst case: channel input " + describe(d.in_layout()) + " is not " +
                                std::to_string(l) + " copies of " + describe(xs.layout()));
  if (!(d.out_layout() == target.layout())) throw std::invalid_argument("worst case: target layout differs from channel output");
  return minimize_over_words(xs.size(), l, opts, [&](const Word& w) {
    return std::clamp(fidelity_with_pure(apply_one_way_locc(d, word_state(xs, w, cfg), cfg).matrix(), target.amplitudes()),
                      0.0, 1.0);
  });
}

}  // namespace qmerge
