#pragma once

// JSON file formats and report serialization.
//
// Matrices are arrays of [re, im] pairs, either flat in row-major order
// (square matrices only) or nested as an array of rows.
// State:    {"dims": [...], "parties": ["A", "B"], "matrix": ...}
// StateSet: {"dims": [...], "parties": [...], "members": [{"name": "...", "matrix": ...}, ...]}
// Protocol: {"kind": "merging", "copy": {"dims", "parties"}, "blocklength": l,
//            "input_rank": r0, "output_rank": r1,
//            "instrument": [{"kraus": [M, ...]}, ...], "b_channels": [{"kraus": [...]}, ...]}
//        or {"kind": "channel", "in": layout, "out": layout, "instrument": ..., "b_channels": ...,
//            "target": {"dims", "parties", "vector": [[re, im], ...]}}

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qmerge/channels.hpp"
#include "qmerge/merging_example.hpp"
#include "qmerge/robustification.hpp"
#include "qmerge/schur_weyl.hpp"
#include "qmerge/sources.hpp"

namespace qmerge {

using Json = nlohmann::ordered_json;

// Malformed input: carries "<source>:<line>:<column>" or a field path.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json parse_json_text(const std::string& text, const std::string& source = "<input>");
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

Matrix matrix_from_json(const Json& j, const std::string& field);
Json matrix_to_json(const Matrix& m);
Vector vector_from_json(const Json& j, const std::string& field);
Json vector_to_json(const Vector& v);
Layout layout_from_json(const Json& j, const std::string& field);
Json layout_to_json(const Layout& l);

State state_from_json(const Json& j, const NumericConfig& cfg = default_config(), const std::string& field = "state");
Json state_to_json(const State& s);
StateSet state_set_from_json(const Json& j, const NumericConfig& cfg = default_config());
Json state_set_to_json(const StateSet& xs);

struct ProtocolFile {
  std::optional<MergingProtocol> merging;
  std::optional<OneWayLoccChannel> channel;
  std::optional<PureState> target;
};
ProtocolFile protocol_from_json(const Json& j, const NumericConfig& cfg = default_config());
Json protocol_to_json(const MergingProtocol& p);
Json channel_to_json(const OneWayLoccChannel& c, const PureState& target);

Json instrument_to_json(const Instrument& e);
Json to_json(const RateReport& r);
Json to_json(const WorstCase& w);
Json to_json(const RobustificationReport& r);
Json to_json(const RateGapReport& r);

// Lossy flattening: one "path,value" row per leaf, arrays indexed as path[i].
std::string to_csv(const Json& j);

}  // namespace qmerge
