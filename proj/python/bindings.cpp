#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qmerge/cli.hpp"
#include "qmerge/entropy.hpp"
#include "qmerge/io.hpp"
#include "qmerge/merging_example.hpp"
#include "qmerge/robustification.hpp"
#include "qmerge/schur_weyl.hpp"
#include "qmerge/sources.hpp"

namespace py = pybind11;
using namespace qmerge;

namespace {

Layout make_layout(const std::vector<std::size_t>& dims, const std::vector<std::string>& parties) {
  if (dims.size() != parties.size()) throw std::invalid_argument("dims and parties differ in length");
  std::vector<Party> p;
  for (const auto& s : parties) p.push_back(parse_party(s));
  return Layout(dims, p);
}

std::vector<std::string> party_names(const Layout& l) {
  std::vector<std::string> out;
  for (Party p : l.parties) out.emplace_back(party_name(p));
  return out;
}

NumericConfig config(std::optional<double> tol) {
  return tol ? default_config().with_validation_tol(*tol) : default_config();
}

std::string dump(const Json& j) { return j.dump(); }

SetScope scope_of(bool hull) { return hull ? SetScope::Hull : SetScope::Members; }

}  // namespace

PYBIND11_MODULE(_qmerge, m) {
  m.doc() = "Numerical workbench for one-way state merging and distillation";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_MemoryError);

  py::class_<State>(m, "State")
      .def(py::init([](const Matrix& rho, const std::vector<std::size_t>& dims, const std::vector<std::string>& parties,
                       std::optional<double> tol) { return State(rho, make_layout(dims, parties), config(tol)); }),
           py::arg("matrix"), py::arg("dims"), py::arg("parties"), py::arg("tol") = py::none())
      .def_property_readonly("matrix", &State::matrix)
      .def_property_readonly("dims", [](const State& s) { return s.layout().dims; })
      .def_property_readonly("parties", [](const State& s) { return party_names(s.layout()); })
      .def("to_json", [](const State& s) { return dump(state_to_json(s)); });

  py::class_<StateSet>(m, "StateSet")
      .def(py::init([](const std::vector<State>& members, const std::vector<std::string>& labels) {
             return StateSet(members, labels);
           }),
           py::arg("members"), py::arg("labels") = std::vector<std::string>{})
      .def("__len__", &StateSet::size)
      .def("__getitem__",
           [](const StateSet& xs, std::size_t i) {
             if (i >= xs.size()) throw py::index_error();
             return xs[i];
           })
      .def_property_readonly("labels", &StateSet::labels)
      .def_property_readonly("warnings", &StateSet::warnings)
      .def("to_json", [](const StateSet& xs) { return dump(state_set_to_json(xs)); });

  m.def("state_from_json", [](const std::string& text) { return state_from_json(parse_json_text(text)); });
  m.def("state_set_from_json", [](const std::string& text) { return state_set_from_json(parse_json_text(text)); });

  m.def("maximally_entangled", [](std::size_t d) { return maximally_entangled(d).density(); }, py::arg("d"));
  m.def("partial_trace",
        [](const State& s, const std::vector<std::size_t>& kept) { return partial_trace(s, kept); }, py::arg("state"),
        py::arg("kept"));
  m.def("fidelity", [](const Matrix& a, const Matrix& b) { return fidelity(a, b); }, py::arg("a"), py::arg("b"));
  m.def("trace_norm", &trace_norm, py::arg("m"));

  m.def("von_neumann_entropy", [](const State& s) { return von_neumann_entropy(s).value; });
  m.def("conditional_entropy", [](const State& s) { return conditional_entropy(s).value; });
  m.def("mutual_info_env", [](const State& s) { return mutual_info_env(s).value; });
  m.def("coherent_information", [](const State& s) { return coherent_information(s).value; });
  m.def(
      "d1_rate",
      [](const State& s, const std::vector<std::vector<Matrix>>& outcomes) {
        std::vector<CpMap> maps;
        for (const auto& k : outcomes) maps.emplace_back(k);
        return d1_rate(s, Instrument(std::move(maps))).value;
      },
      py::arg("state"), py::arg("kraus_per_outcome"));

  m.def(
      "compound_merging_cost",
      [](const StateSet& xs, bool hull, std::uint64_t seed) {
        SimplexOptions o;
        o.seed = seed;
        return dump(to_json(compound_merging_cost(xs, scope_of(hull), o)));
      },
      py::arg("states"), py::arg("hull") = false, py::arg("seed") = 0);
  m.def(
      "compound_classical_cost",
      [](const StateSet& xs, bool hull, std::uint64_t seed) {
        SimplexOptions o;
        o.seed = seed;
        return dump(to_json(compound_classical_cost(xs, scope_of(hull), o)));
      },
      py::arg("states"), py::arg("hull") = false, py::arg("seed") = 0);
  m.def(
      "distillation_rate_lower_bound",
      [](const StateSet& xs, bool hull, std::size_t k, std::size_t outcomes, std::size_t restarts, std::uint64_t seed) {
        DistillationOptions o;
        o.k = k;
        o.outcomes = outcomes;
        o.restarts = restarts;
        o.seed = seed;
        return dump(to_json(distillation_rate_lower_bound(xs, scope_of(hull), o)));
      },
      py::arg("states"), py::arg("hull") = false, py::arg("k") = 1, py::arg("outcomes") = 2, py::arg("restarts") = 8,
      py::arg("seed") = 0);

  m.def(
      "hausdorff_distance",
      [](const StateSet& xs, const StateSet& ys, bool hull) {
        return hausdorff_distance(xs, ys, hull ? HausdorffMode::Hull : HausdorffMode::Pointset);
      },
      py::arg("xs"), py::arg("ys"), py::arg("hull") = false);
  m.def(
      "distance_to_hull",
      [](const Matrix& sigma, const StateSet& ys, double tol) {
        SubgradientOptions o;
        o.tol = tol;
        const SimplexResult r = distance_to_hull(sigma, ys, o);
        return py::make_tuple(r.value, r.p);
      },
      py::arg("sigma"), py::arg("states"), py::arg("tol") = 1e-9);

  m.def(
      "entropy_bin_probabilities",
      [](const State& s, std::size_t l, double eta) {
        const std::size_t d = s.layout().dim_of(s.layout().factors_held_by_a());
        const EntropyInstrument inst = build_entropy_instrument(l, d, eta);
        const std::vector<double> p = bin_probabilities(inst, s);
        py::list rows;
        for (std::size_t i = 0; i < p.size(); ++i)
          rows.append(py::make_tuple(inst.bins[i].index, inst.bins[i].lo, inst.bins[i].hi, p[i]));
        return rows;
      },
      py::arg("state"), py::arg("blocklength"), py::arg("eta"));
  m.def(
      "misbin_probability",
      [](const State& s, std::size_t l, double eta) {
        const std::size_t d = s.layout().dim_of(s.layout().factors_held_by_a());
        return misbin_probability(build_entropy_instrument(l, d, eta), s);
      },
      py::arg("state"), py::arg("blocklength"), py::arg("eta"));

  m.def(
      "check_robustification",
      [](std::size_t alphabet, std::size_t l, const std::vector<double>& table, std::optional<double> gamma) {
        return dump(to_json(check_robustification(WordFunction(alphabet, l, table), gamma)));
      },
      py::arg("alphabet"), py::arg("blocklength"), py::arg("table"), py::arg("gamma") = py::none());

  m.def(
      "rate_gap_report",
      [](const State& base, std::size_t n, std::size_t l) {
        return dump(to_json(rate_gap_report(build_example_family(base, n), l)));
      },
      py::arg("base"), py::arg("n"), py::arg("blocklength") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"qmerge"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run_cli(int(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
