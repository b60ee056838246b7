#include "qmerge/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qmerge/entropy.hpp"
#include "qmerge/io.hpp"
#include "qmerge/merging_example.hpp"
#include "qmerge/random.hpp"
#include "qmerge/robustification.hpp"
#include "qmerge/schur_weyl.hpp"
#include "qmerge/sources.hpp"

namespace qmerge::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Outcome {
  Json report;
  bool verified = true;
  std::string csv;  // preformatted CSV, overrides flattening
};

NumericConfig numeric_config(const RunConfig& rc) {
  NumericConfig c = default_config();
  if (rc.tol) {
    if (!(*rc.tol > 0.0)) throw UsageError("--tol must be positive");
    c = c.with_validation_tol(*rc.tol);
  }
  if (rc.dim_cap) {
    if (*rc.dim_cap == 0) throw UsageError("--dim-cap must be positive");
    c.dim_cap = *rc.dim_cap;
  }
  return c;
}

void need(const std::string& value, const char* flag, const std::string& cmd) {
  if (value.empty()) throw UsageError(cmd + " requires " + flag);
}

StateSet load_set(const RunConfig& rc, const NumericConfig& cfg) {
  need(rc.set_path, "--set", rc.subcommand);
  StateSet xs = state_set_from_json(read_json_file(rc.set_path), cfg);
  check_cap("state dimension", xs.layout().total_dim(), cfg.dim_cap);
  return xs;
}

State load_state(const std::string& path, const NumericConfig& cfg) {
  State s = state_from_json(read_json_file(path), cfg);
  check_cap("state dimension", s.dim(), cfg.dim_cap);
  return s;
}

Json set_summary(const StateSet& xs, const NumericConfig& cfg) {
  Json members = Json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    members.push_back(Json{{"name", xs.labels()[i]},
                           {"conditional_entropy", conditional_entropy(xs[i], Party::A, Party::B, cfg).value},
                           {"mutual_info_env", mutual_info_env(xs[i], Party::A, Party::B, cfg).value},
                           {"coherent_information", coherent_information(xs[i], Party::A, Party::B, cfg).value}});
  }
  return Json{{"layout", layout_to_json(xs.layout())}, {"members", members}, {"warnings", xs.warnings()}};
}

Outcome cmd_rates(const RunConfig& rc, const NumericConfig& cfg) {
  const StateSet xs = load_set(rc, cfg);
  const SetScope scope = rc.hull ? SetScope::Hull : SetScope::Members;
  SimplexOptions opts;
  opts.seed = rc.seed;
  Json j;
  j["set"] = set_summary(xs, cfg);
  j["merging_cost"] = to_json(compound_merging_cost(xs, scope, opts, cfg));
  j["classical_cost"] = to_json(compound_classical_cost(xs, scope, opts, cfg));
  return {j, true, {}};
}

Outcome cmd_distill(const RunConfig& rc, const NumericConfig& cfg) {
  const StateSet xs = load_set(rc, cfg);
  if (rc.k != 1 && rc.k != 2) throw UsageError("--k must be 1 or 2");
  if (rc.outcomes == 0) throw UsageError("--outcomes must be positive");
  DistillationOptions opts;
  opts.k = rc.k;
  opts.outcomes = rc.outcomes;
  opts.restarts = std::max<std::size_t>(rc.restarts, 1);
  opts.seed = rc.seed;
  const std::size_t da = xs.layout().dim_of(xs.layout().factors_held_by_a());
  check_cap("distillation instrument dimension", static_cast<std::size_t>(std::pow(double(da), double(rc.k))) * rc.outcomes,
            cfg.dim_cap);
  const RateReport r = rc.avqs ? avqs_distillation_capacity(xs, opts, cfg)
                               : distillation_rate_lower_bound(xs, rc.hull ? SetScope::Hull : SetScope::Members, opts, cfg);
  Json j;
  j["set"] = set_summary(xs, cfg);
  j["distillation"] = to_json(r);
  return {j, true, {}};
}

WorstCaseOptions worst_options(const RunConfig& rc) {
  WorstCaseOptions o;
  o.cap = rc.word_cap;
  o.seed = rc.seed;
  if (rc.trials > 0) o.samples = rc.trials;
  return o;
}

Outcome cmd_worst_case(const RunConfig& rc, const NumericConfig& cfg) {
  need(rc.protocol_path, "--protocol", rc.subcommand);
  const StateSet xs = load_set(rc, cfg);
  const ProtocolFile pf = protocol_from_json(read_json_file(rc.protocol_path), cfg);
  Json j;
  if (pf.merging) {
    const std::size_t l = rc.blocklength ? rc.blocklength : pf.merging->blocklength();
    if (l != pf.merging->blocklength())
      throw UsageError("--blocklength " + std::to_string(l) + " differs from the protocol blocklength " +
                       std::to_string(pf.merging->blocklength()));
    if (pf.merging->copy_layout() != xs.layout()) throw UsageError("protocol copy layout differs from the set layout");
    const WorstCase w = worst_case_protocol_fidelity(*pf.merging, xs, l, worst_options(rc), cfg);
    j["blocklength"] = l;
    j["entanglement_rate"] = pf.merging->k().log2() / double(l);
    j["classical_rate"] = std::log2(double(pf.merging->messages())) / double(l);
    j["worst_case"] = to_json(w);
  } else {
    const std::size_t copy = xs.layout().size();
    const std::size_t in = pf.channel->in_layout().size();
    if (copy == 0 || in % copy != 0) throw UsageError("channel input layout is not a power of the set layout");
    const std::size_t l = in / copy;
    if (rc.blocklength && rc.blocklength != l) throw UsageError("--blocklength differs from the channel input");
    j["blocklength"] = l;
    j["worst_case"] = to_json(worst_case_channel_fidelity(*pf.channel, *pf.target, xs, l, worst_options(rc), cfg));
  }
  return {j, true, {}};
}

Outcome cmd_merge_fidelity(const RunConfig& rc, const NumericConfig& cfg) {
  need(rc.protocol_path, "--protocol", rc.subcommand);
  need(rc.state_path, "--state", rc.subcommand);
  const State s = load_state(rc.state_path, cfg);
  const ProtocolFile pf = protocol_from_json(read_json_file(rc.protocol_path), cfg);
  const StateSet single({s}, {"state"}, cfg);
  WorstCaseOptions o;
  o.cap = rc.word_cap;
  Json j;
  if (pf.merging) {
    if (pf.merging->copy_layout() != s.layout()) throw UsageError("protocol copy layout differs from the state layout");
    const std::size_t l = pf.merging->blocklength();
    j["blocklength"] = l;
    j["merging_fidelity"] = worst_case_protocol_fidelity(*pf.merging, single, l, o, cfg).value;
    j["entanglement_rate"] = pf.merging->k().log2() / double(l);
    j["classical_rate"] = std::log2(double(pf.merging->messages())) / double(l);
  } else {
    const std::size_t in = pf.channel->in_layout().size();
    if (in % s.layout().size() != 0) throw UsageError("channel input layout is not a power of the state layout");
    const std::size_t l = in / s.layout().size();
    j["blocklength"] = l;
    j["fidelity"] = worst_case_channel_fidelity(*pf.channel, *pf.target, single, l, o, cfg).value;
  }
  return {j, true, {}};
}

State spectrum_state(const std::string& text, const NumericConfig& cfg) {
  std::vector<double> p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--spectrum: cannot parse '" + item + "'");
    }
  }
  if (p.empty()) throw UsageError("--spectrum is empty");
  Matrix m = Matrix::Zero(Eigen::Index(p.size()), Eigen::Index(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) m(Eigen::Index(i), Eigen::Index(i)) = p[i];
  try {
    return State(m, Layout({p.size()}, {Party::A}), cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--spectrum: ") + e.what());
  }
}

Outcome cmd_schur_demo(const RunConfig& rc, const NumericConfig& cfg) {
  if (rc.state_path.empty() == rc.spectrum.empty()) throw UsageError("schur-demo requires exactly one of --state, --spectrum");
  const State s = rc.state_path.empty() ? spectrum_state(rc.spectrum, cfg) : load_state(rc.state_path, cfg);
  const std::size_t da = s.layout().dim_of(s.layout().factors_held_by_a());
  const std::size_t d = rc.dim ? rc.dim : da;
  if (d != da) throw UsageError("--dim " + std::to_string(d) + " differs from the A dimension " + std::to_string(da));
  const std::size_t l = rc.blocklength ? rc.blocklength : 4;
  if (!(rc.eta > 0.0)) throw UsageError("--eta must be positive");
  std::size_t total = 1;
  for (std::size_t i = 0; i < l; ++i) {
    total *= d;
    check_cap("schur-demo d^l", total, cfg.dim_cap);
  }
  const EntropyInstrument inst = build_entropy_instrument(l, d, rc.eta, cfg);
  const std::vector<double> probs = bin_probabilities(inst, s, cfg);
  const double sa = von_neumann_entropy(marginal(s, {Party::A}), cfg).value;
  const std::size_t true_bin = inst.binning.bin_of(sa);

  Json bins = Json::array();
  std::ostringstream csv;
  csv << "bin_index,interval_lo,interval_hi,probability\n" << std::setprecision(17);
  for (std::size_t i = 0; i < inst.bins.size(); ++i) {
    const EntropyBin& b = inst.bins[i];
    bins.push_back(Json{{"bin_index", b.index}, {"interval_lo", b.lo}, {"interval_hi", b.hi}, {"probability", probs[i]},
                        {"rank", b.rank}});
    csv << b.index << "," << b.lo << "," << b.hi << "," << probs[i] << "\n";
  }
  Json j;
  j["dim"] = d;
  j["blocklength"] = l;
  j["eta"] = rc.eta;
  j["entropy_a"] = sa;
  j["true_bin"] = true_bin;
  j["misbin_probability"] = misbin_probability(inst, s, true_bin, cfg);
  j["bins"] = bins;
  return {j, true, csv.str()};
}

// f(s^l) = <Phi| rho_{s_1} |Phi> with Phi maximally entangled of rank min(dA, dB).
std::vector<double> first_copy_fidelities(const StateSet& xs, const NumericConfig& cfg) {
  const Layout& lay = xs.layout();
  const FactorSet a = lay.factors_of(Party::A), b = lay.factors_of(Party::B);
  if (a.empty() || b.empty()) throw UsageError("robustify-check needs A and B factors in the set layout");
  FactorSet ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  std::sort(ab.begin(), ab.end());
  const std::size_t da = lay.dim_of(a), db = lay.dim_of(b), r = std::min(da, db);
  std::vector<double> out;
  for (const State& s : xs.members()) {
    State m = partial_trace(s, ab);
    // put A before B
    FactorSet perm;
    for (std::size_t i = 0; i < m.layout().size(); ++i)
      if (m.layout().parties[i] == Party::A) perm.push_back(i);
    for (std::size_t i = 0; i < m.layout().size(); ++i)
      if (m.layout().parties[i] == Party::B) perm.push_back(i);
    m = permute_factors(m, perm);
    Vector phi = Vector::Zero(Eigen::Index(da * db));
    for (std::size_t i = 0; i < r; ++i) phi(Eigen::Index(i * db + i)) = 1.0 / std::sqrt(double(r));
    out.push_back(fidelity_with_pure(m.matrix(), phi));
  }
  (void)cfg;
  return out;
}

Outcome cmd_robustify(const RunConfig& rc, const NumericConfig& cfg) {
  const StateSet xs = load_set(rc, cfg);
  const std::size_t l = rc.blocklength ? rc.blocklength : 4;
  if (rc.exhaustive == (rc.trials > 0)) throw UsageError("robustify-check requires exactly one of --exhaustive, --trials");
  const std::vector<double> fs = first_copy_fidelities(xs, cfg);
  const WordFunction f =
      WordFunction::tabulate(xs.size(), l, [&](const Word& w) { return fs[w.front()]; }, rc.word_cap);
  RobustificationReport r = check_robustification(f);
  if (rc.trials > 0) {
    SplitMix64 rng(rc.seed);
    std::vector<WordMargin> sampled;
    std::size_t worst = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < rc.trials; ++t) {
      const WordMargin& wm = r.words[rng.below(r.words.size())];
      if (wm.margin < min_margin) {
        min_margin = wm.margin;
        worst = sampled.size();
      }
      sampled.push_back(wm);
    }
    r.words = std::move(sampled);
    r.worst_word = worst;
    r.min_word_margin = min_margin;
    r.pass = min_margin >= -1e-12;
  }
  Json j;
  j["word_function"] = "first-copy fidelity with the maximally entangled state";
  j["member_fidelities"] = fs;
  j["mode"] = rc.trials > 0 ? "sampled" : "exhaustive";
  j["robustification"] = to_json(r);
  return {j, r.pass, {}};
}

State builtin_base(const std::string& label, const NumericConfig& cfg) {
  const std::string name = label.substr(std::string("builtin:").size());
  std::size_t d = 0;
  if (name == "bell") {
    d = 2;
  } else if (name.rfind("mes", 0) == 0) {
    try {
      d = std::stoul(name.substr(3));
    } catch (const std::exception&) {
      d = 0;
    }
  }
  if (d < 2) throw UsageError("unknown base '" + label + "' (builtin:bell or builtin:mes<d>)");
  check_cap("base dimension", d * d, cfg.dim_cap);
  return maximally_entangled(d).density();
}

Outcome cmd_example_gap(const RunConfig& rc, const NumericConfig& cfg) {
  if (rc.n == 0) throw UsageError("--N must be positive");
  const std::size_t l = rc.blocklength ? rc.blocklength : 1;
  const State base = rc.base.rfind("builtin:", 0) == 0 ? builtin_base(rc.base, cfg) : load_state(rc.base, cfg);
  const ExampleFamily fam = build_example_family(base, rc.n, cfg);
  SimplexOptions opts;
  opts.seed = rc.seed;
  const RateGapReport r = rate_gap_report(fam, l, std::nullopt, opts, cfg);
  if (!rc.emit_set.empty()) write_json_file(rc.emit_set, state_set_to_json(fam.members));
  if (!rc.emit_protocol.empty()) {
    const MergingProtocol sub = known_pure_state_merging(fam.compressed, l, cfg);
    write_json_file(rc.emit_protocol, protocol_to_json(example_merging_protocol(fam, sub, l, rc.word_cap, cfg)));
  }
  return {to_json(r), r.gaps_ok && r.closed_forms_agree, {}};
}

Outcome dispatch(const RunConfig& rc, const NumericConfig& cfg) {
  const std::string& c = rc.subcommand;
  if (c == "rates") return cmd_rates(rc, cfg);
  if (c == "distill-capacity") return cmd_distill(rc, cfg);
  if (c == "worst-case") return cmd_worst_case(rc, cfg);
  if (c == "merge-fidelity") return cmd_merge_fidelity(rc, cfg);
  if (c == "schur-demo") return cmd_schur_demo(rc, cfg);
  if (c == "robustify-check") return cmd_robustify(rc, cfg);
  if (c == "example-gap") return cmd_example_gap(rc, cfg);
  throw UsageError("unknown subcommand '" + c + "'");
}

}  // namespace

int run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  try {
    const NumericConfig cfg = numeric_config(rc);
    std::string format = rc.format;
    if (format.empty()) format = rc.subcommand == "schur-demo" ? "csv" : "json";
    if (format != "json" && format != "csv") throw UsageError("--format must be json or csv");
    Outcome o = dispatch(rc, cfg);
    Json report;
    report["command"] = rc.subcommand;
    report["seed"] = rc.seed;
    for (auto it = o.report.begin(); it != o.report.end(); ++it) report[it.key()] = it.value();
    report["verified"] = o.verified;
    if (format == "json")
      out << report.dump(2) << "\n";
    else
      out << (o.csv.empty() ? to_csv(report) : o.csv);
    if (!o.verified) err << "qmerge: " << rc.subcommand << ": verification failed\n";
    return o.verified ? kOk : kVerificationFailed;
  } catch (const CapExceeded& e) {
    err << "qmerge: resource cap: " << e.what() << "\n";
    return kCap;
  } catch (const ParseError& e) {
    err << "qmerge: parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "qmerge: usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "qmerge: invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "qmerge: error: " << e.what() << "\n";
    return kVerificationFailed;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Numerical workbench for one-way state merging and distillation with compound and AVQS sources",
               "qmerge"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  bool csv = false;
  double tol = 0.0;
  std::size_t dim_cap = 0;
  auto add_globals = [&](CLI::App* a) {
    a->add_option("--seed", rc.seed, "Seed for every random draw");
    a->add_option("--format", rc.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    a->add_flag("--csv", csv, "Same as --format csv");
    a->add_option("--tol", tol, "Validation tolerance override");
    a->add_option("--dim-cap", dim_cap, "Maximum Hilbert-space dimension");
    a->add_option("--word-cap", rc.word_cap, "Maximum number of enumerated words");
  };

  auto* rates = app.add_subcommand("rates", "Compound merging and classical costs of a state set");
  rates->add_option("--set", rc.set_path, "StateSet JSON file")->required();
  rates->add_flag("--hull", rc.hull, "Optimize over the convex hull");

  auto* distill = app.add_subcommand("distill-capacity", "One-way distillation rate lower bound");
  distill->add_option("--set", rc.set_path, "StateSet JSON file")->required();
  distill->add_option("--k", rc.k, "Letters per instrument (1 or 2)");
  distill->add_option("--outcomes", rc.outcomes, "Instrument outcomes J");
  distill->add_option("--restarts", rc.restarts, "Optimizer restarts");
  distill->add_flag("--hull", rc.hull, "Infimum over the convex hull");
  distill->add_flag("--avqs", rc.avqs, "Arbitrarily varying capacity (hull infimum)");

  auto* worst = app.add_subcommand("worst-case", "Minimum merging fidelity over all words");
  worst->add_option("--protocol", rc.protocol_path, "Protocol JSON file")->required();
  worst->add_option("--set", rc.set_path, "StateSet JSON file")->required();
  worst->add_option("--blocklength", rc.blocklength, "Blocklength l");
  worst->add_option("--trials", rc.trials, "Sample this many words instead of enumerating");

  auto* mf = app.add_subcommand("merge-fidelity", "Merging fidelity of a protocol on one state");
  mf->add_option("--protocol", rc.protocol_path, "Protocol JSON file")->required();
  mf->add_option("--state", rc.state_path, "State JSON file")->required();

  auto* schur = app.add_subcommand("schur-demo", "Entropy-estimating instrument bin probabilities");
  schur->add_option("--dim", rc.dim, "Local dimension d");
  schur->add_option("--blocklength", rc.blocklength, "Blocklength l");
  schur->add_option("--eta", rc.eta, "Bin width");
  schur->add_option("--state", rc.state_path, "State JSON file");
  schur->add_option("--spectrum", rc.spectrum, "Comma separated eigenvalues of a diagonal state");

  auto* rob = app.add_subcommand("robustify-check", "Check the robustification bound on a state set");
  rob->add_option("--set", rc.set_path, "StateSet JSON file")->required();
  rob->add_option("--blocklength", rc.blocklength, "Blocklength l");
  rob->add_flag("--exhaustive", rc.exhaustive, "Check every word");
  rob->add_option("--trials", rc.trials, "Check this many seeded random words");

  auto* gap = app.add_subcommand("example-gap", "Rate gap of the orthogonal-support family");
  gap->add_option("--N", rc.n, "Family size N");
  gap->add_option("--base", rc.base, "builtin:bell, builtin:mes<d>, or a state file");
  gap->add_option("--blocklength", rc.blocklength, "Blocklength l");
  gap->add_option("--emit-protocol", rc.emit_protocol, "Write the example protocol here");
  gap->add_option("--emit-set", rc.emit_set, "Write the family state set here");

  for (CLI::App* a : {rates, distill, worst, mf, schur, rob, gap}) add_globals(a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "qmerge: usage: " << e.what() << "\n";
    return kUsage;
  }
  for (CLI::App* a : app.get_subcommands()) {
    rc.subcommand = a->get_name();
    if (a->count("--tol")) rc.tol = tol;
    if (a->count("--dim-cap")) rc.dim_cap = dim_cap;
    if (csv) rc.format = "csv";
  }
  return run(rc, out, err);
}

}  // namespace qmerge::cli
