#include "qmerge/io.hpp"

#include <fstream>
#include <sstream>

namespace qmerge {

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) { throw ParseError(field + ": " + what); }

const Json& require(const Json& j, const char* key, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) field_error(field, std::string("missing field '") + key + "'");
  return *it;
}

std::size_t size_field(const Json& j, const char* key, const std::string& field) {
  const Json& v = require(j, key, field);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    field_error(field + "." + key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

cplx entry_from_json(const Json& e, const std::string& field) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
    field_error(field, "expected a [re, im] pair");
  return {e[0].get<double>(), e[1].get<double>()};
}

bool is_pair(const Json& e) { return e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(); }

std::vector<CpMap> maps_from_json(const Json& j, const std::string& field, const NumericConfig& cfg) {
  if (!j.is_array() || j.empty()) field_error(field, "expected a non-empty array of {\"kraus\": [...]} objects");
  std::vector<CpMap> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const Json& ks = require(j[i], "kraus", f);
    if (!ks.is_array() || ks.empty()) field_error(f + ".kraus", "expected a non-empty array of matrices");
    std::vector<Matrix> kraus;
    for (std::size_t k = 0; k < ks.size(); ++k)
      kraus.push_back(matrix_from_json(ks[k], f + ".kraus[" + std::to_string(k) + "]"));
    try {
      out.emplace_back(std::move(kraus), cfg);
    } catch (const std::invalid_argument& e) {
      field_error(f, e.what());
    }
  }
  return out;
}

Json maps_to_json(const std::vector<CpMap>& maps) {
  Json arr = Json::array();
  for (const CpMap& m : maps) {
    Json ks = Json::array();
    for (const Matrix& k : m.kraus()) ks.push_back(matrix_to_json(k));
    arr.push_back(Json{{"kraus", ks}});
  }
  return arr;
}

Json word_json(const Word& w) {
  Json a = Json::array();
  for (std::size_t s : w) a.push_back(s);
  return a;
}

const char* scope_name(SetScope s) { return s == SetScope::Hull ? "hull" : "members"; }

void flatten(const Json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    std::string v = j.is_string() ? j.get<std::string>() : j.dump();
    if (v.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = q + "\"";
    }
    out << path << "," << v << "\n";
  }
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << j.dump(2) << "\n";
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) field_error(field, "expected a non-empty array");
  const std::size_t n2 = j.size();
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(double(n2))));
  // [[1, 0], [0, 0]] is a nested real 2x2, not two flat pairs
  const bool flat = j[0].is_number() || (is_pair(j[0]) && n2 != 2);
  if (flat) {
    if (n * n != n2) field_error(field, "flat matrix with " + std::to_string(n2) + " entries is not square");
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n2; ++i)
      m(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) =
          entry_from_json(j[i], field + "[" + std::to_string(i) + "]");
    return m;
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) field_error(field + "[0]", "expected a row array");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols)
      field_error(rf, "expected a row of " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          entry_from_json(j[r][c], rf + "[" + std::to_string(c) + "]");
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

Vector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) field_error(field, "expected a non-empty array of [re, im] pairs");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = entry_from_json(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(Json::array({v(i).real(), v(i).imag()}));
  return a;
}

Layout layout_from_json(const Json& j, const std::string& field) {
  const Json& dims = require(j, "dims", field);
  const Json& parties = require(j, "parties", field);
  if (!dims.is_array() || dims.empty()) field_error(field + ".dims", "expected a non-empty array of integers");
  if (!parties.is_array() || parties.size() != dims.size())
    field_error(field + ".parties", "expected one party label per factor (" + std::to_string(dims.size()) + ")");
  std::vector<std::size_t> d;
  std::vector<Party> p;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!dims[i].is_number_integer() || dims[i].get<long long>() <= 0)
      field_error(field + ".dims[" + std::to_string(i) + "]", "expected a positive integer");
    d.push_back(dims[i].get<std::size_t>());
    if (!parties[i].is_string()) field_error(field + ".parties[" + std::to_string(i) + "]", "expected a string");
    try {
      p.push_back(parse_party(parties[i].get<std::string>()));
    } catch (const std::invalid_argument& e) {
      field_error(field + ".parties[" + std::to_string(i) + "]", e.what());
    }
  }
  return Layout(std::move(d), std::move(p));
}

Json layout_to_json(const Layout& l) {
  Json parties = Json::array();
  for (Party p : l.parties) parties.push_back(std::string(party_name(p)));
  return Json{{"dims", l.dims}, {"parties", parties}};
}

namespace {

State state_with_layout(const Json& mj, const Layout& layout, const NumericConfig& cfg, const std::string& field) {
  Matrix m = matrix_from_json(mj, field);
  if (m.rows() != m.cols())
    field_error(field, "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", not square");
  const std::size_t n = layout.total_dim(cfg.dim_cap);
  if (std::size_t(m.rows()) != n)
    field_error(field, "matrix dimension " + std::to_string(m.rows()) + " differs from the product of dims " +
                           std::to_string(n));
  try {
    return State(std::move(m), layout, cfg);
  } catch (const std::invalid_argument& e) {
    field_error(field, e.what());
  }
}

}  // namespace

State state_from_json(const Json& j, const NumericConfig& cfg, const std::string& field) {
  const Layout layout = layout_from_json(j, field);
  return state_with_layout(require(j, "matrix", field), layout, cfg, field + ".matrix");
}

Json state_to_json(const State& s) {
  Json j = layout_to_json(s.layout());
  j["matrix"] = matrix_to_json(s.matrix());
  return j;
}

StateSet state_set_from_json(const Json& j, const NumericConfig& cfg) {
  const Layout layout = layout_from_json(j, "set");
  const Json& members = require(j, "members", "set");
  if (!members.is_array() || members.empty()) field_error("set.members", "expected a non-empty array");
  std::vector<State> states;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::string f = "set.members[" + std::to_string(i) + "]";
    const Json& m = members[i];
    labels.push_back(m.is_object() && m.contains("name") && m["name"].is_string() ? m["name"].get<std::string>()
                                                                                  : std::to_string(i));
    states.push_back(state_with_layout(require(m, "matrix", f), layout, cfg, f + ".matrix"));
  }
  return StateSet(std::move(states), std::move(labels), cfg);
}

Json state_set_to_json(const StateSet& xs) {
  Json j = layout_to_json(xs.layout());
  Json members = Json::array();
  for (std::size_t i = 0; i < xs.size(); ++i)
    members.push_back(Json{{"name", xs.labels()[i]}, {"matrix", matrix_to_json(xs[i].matrix())}});
  j["members"] = members;
  return j;
}

ProtocolFile protocol_from_json(const Json& j, const NumericConfig& cfg) {
  const std::string kind = j.is_object() && j.contains("kind") && j["kind"].is_string() ? j["kind"].get<std::string>() : "merging";
  const Json& inst = require(j, "instrument", "protocol");
  const Json& bch = require(j, "b_channels", "protocol");
  std::vector<CpMap> a_maps = maps_from_json(inst, "protocol.instrument", cfg);
  std::vector<CpMap> b_maps = maps_from_json(bch, "protocol.b_channels", cfg);
  ProtocolFile out;
  try {
    if (kind == "merging") {
      const Layout copy = layout_from_json(require(j, "copy", "protocol"), "protocol.copy");
      const std::size_t l = size_field(j, "blocklength", "protocol");
      const std::size_t r0 = size_field(j, "input_rank", "protocol"), r1 = size_field(j, "output_rank", "protocol");
      if (l == 0 || r0 == 0 || r1 == 0) field_error("protocol", "blocklength and ranks must be positive");
      OneWayLoccChannel c(merging_input_layout(copy, l, r0), merging_output_layout(copy, l, r1),
                          Instrument(std::move(a_maps), cfg), std::move(b_maps), cfg);
      out.merging.emplace(std::move(c), resource_state(r0), resource_state(r1), copy, l, cfg);
    } else if (kind == "channel") {
      const Layout in = layout_from_json(require(j, "in", "protocol"), "protocol.in");
      const Layout o = layout_from_json(require(j, "out", "protocol"), "protocol.out");
      const Json& t = require(j, "target", "protocol");
      const Layout tl = layout_from_json(t, "protocol.target");
      out.target.emplace(vector_from_json(require(t, "vector", "protocol.target"), "protocol.target.vector"), tl, cfg);
      out.channel.emplace(in, o, Instrument(std::move(a_maps), cfg), std::move(b_maps), cfg);
    } else {
      field_error("protocol.kind", "expected \"merging\" or \"channel\", got \"" + kind + "\"");
    }
  } catch (const std::invalid_argument& e) {
    field_error("protocol", e.what());
  }
  return out;
}

Json protocol_to_json(const MergingProtocol& p) {
  Json j;
  j["kind"] = "merging";
  j["copy"] = layout_to_json(p.copy_layout());
  j["blocklength"] = p.blocklength();
  j["input_rank"] = p.k().input_rank;
  j["output_rank"] = p.k().output_rank;
  j["instrument"] = maps_to_json(p.locc().a_instrument().outcomes());
  j["b_channels"] = maps_to_json(p.locc().b_channels());
  return j;
}

Json channel_to_json(const OneWayLoccChannel& c, const PureState& target) {
  Json j;
  j["kind"] = "channel";
  j["in"] = layout_to_json(c.in_layout());
  j["out"] = layout_to_json(c.out_layout());
  j["instrument"] = maps_to_json(c.a_instrument().outcomes());
  j["b_channels"] = maps_to_json(c.b_channels());
  Json t = layout_to_json(target.layout());
  t["vector"] = vector_to_json(target.amplitudes());
  j["target"] = t;
  return j;
}

Json instrument_to_json(const Instrument& e) { return maps_to_json(e.outcomes()); }

Json to_json(const RateReport& r) {
  Json j;
  j["quantity"] = r.quantity;
  j["value"] = r.value;
  j["scope"] = scope_name(r.scope);
  j["member"] = r.member ? Json(*r.member) : Json(nullptr);
  j["weights"] = r.weights;
  j["baseline"] = r.baseline;
  j["optimizer"] = Json{{"method", r.optimizer.method},
                        {"iterations", r.optimizer.iterations},
                        {"evaluations", r.optimizer.evaluations},
                        {"restarts", r.optimizer.restarts},
                        {"seed", r.optimizer.seed}};
  if (r.instrument) j["instrument"] = instrument_to_json(*r.instrument);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json to_json(const WorstCase& w) {
  return Json{{"min_fidelity", w.value}, {"argmin_word", word_json(w.word)}, {"evaluated", w.evaluated}, {"sampled", w.sampled}};
}

Json to_json(const RobustificationReport& r) {
  Json types = Json::array();
  for (const TypeMargin& t : r.types)
    types.push_back(Json{{"type", t.type.counts}, {"iid_average", t.iid_average}, {"margin", t.margin}});
  Json j;
  j["alphabet"] = r.alphabet;
  j["blocklength"] = r.blocklength;
  j["gamma"] = r.gamma;
  j["gamma_supplied"] = r.gamma_supplied;
  j["polynomial_factor"] = r.polynomial_factor;
  j["bound"] = r.bound;
  j["hypothesis_holds"] = r.hypothesis_holds;
  j["types"] = types;
  j["words_checked"] = r.words.size();
  if (!r.words.empty()) {
    const WordMargin& w = r.words[r.worst_word];
    j["worst_word"] = Json{{"word", word_json(w.word)}, {"permutation_average", w.permutation_average}, {"margin", w.margin}};
  }
  j["min_word_margin"] = r.min_word_margin;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const RateGapReport& r) {
  Json j;
  j["N"] = r.n;
  j["blocklength"] = r.blocklength;
  j["log_N"] = r.log_n;
  j["base"] = Json{{"conditional_entropy", r.base_conditional_entropy}, {"mutual_info_env", r.base_mutual_info_env}};
  j["hull_merging_cost"] = Json{{"closed_form", r.hull_merging_closed},
                                {"numeric", r.hull_merging_numeric.value},
                                {"maximizer", r.hull_merging_numeric.weights}};
  j["hull_classical_cost"] = Json{{"closed_form", r.hull_classical_closed},
                                  {"numeric", r.hull_classical_numeric.value},
                                  {"maximizer", r.hull_classical_numeric.weights}};
  j["protocol"] = Json{{"entanglement_rate", r.protocol_entanglement_rate},
                       {"classical_rate", r.protocol_classical_rate},
                       {"messages", r.messages},
                       {"sub_messages", r.sub_messages},
                       {"worst_case_fidelity", to_json(r.protocol_fidelity)},
                       {"sub_fidelity", r.sub_fidelity}};
  j["gaps"] = Json::array({r.merging_gap, r.classical_gap});
  j["gaps_ok"] = r.gaps_ok;
  j["closed_forms_agree"] = r.closed_forms_agree;
  return j;
}

std::string to_csv(const Json& j) {
  std::ostringstream out;
  out << "key,value\n";
  flatten(j, "", out);
  return out.str();
}

}  // namespace qmerge
