#include "doctest.h"
#include "qmerge/io.hpp"
#include "qmerge/merging_example.hpp"
#include "qmerge/random.hpp"

using namespace qmerge;

TEST_CASE("flat and nested matrices agree") {
  const Json flat = parse_json_text(R"([[0.5,0],[0,0.5],[0,-0.5],[0.5,0]])");
  const Json nested = parse_json_text(R"([[[0.5,0],[0,0.5]],[[0,-0.5],[0.5,0]]])");
  const Matrix a = matrix_from_json(flat, "m"), b = matrix_from_json(nested, "m");
  CHECK(a.rows() == 2);
  CHECK((a - b).norm() == 0.0);
  CHECK(a(0, 1) == cplx(0.0, 0.5));
  const Matrix real2 = matrix_from_json(parse_json_text("[[1, 0], [0, 0]]"), "m");
  CHECK(real2.rows() == 2);
  CHECK(real2(0, 0) == cplx(1.0, 0.0));
}

TEST_CASE("state and state set round-trip exactly") {
  SplitMix64 rng(17);
  const Layout l({2, 3}, {Party::A, Party::B});
  const State s = random_state(l, rng);
  const State back = state_from_json(parse_json_text(state_to_json(s).dump()));
  CHECK(back.layout() == l);
  CHECK((back.matrix() - s.matrix()).norm() == 0.0);

  const StateSet xs({s, random_state(l, rng)}, {"x", "y"});
  const StateSet ys = state_set_from_json(parse_json_text(state_set_to_json(xs).dump()));
  CHECK(ys.labels() == xs.labels());
  CHECK((ys[1].matrix() - xs[1].matrix()).norm() == 0.0);
}

TEST_CASE("set members must match the declared dims") {
  const Json j = parse_json_text(
      R"({"dims":[2],"parties":["A"],"members":[{"name":"a","matrix":[[1,0],[0,0]]},{"name":"b","matrix":[1]}]})");
  try {
    state_set_from_json(j);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("set.members[1].matrix") != std::string::npos);
  }
}

TEST_CASE("protocol files round-trip with identical fidelity") {
  const ExampleFamily fam = build_example_family(maximally_entangled(2).density(), 2);
  const MergingProtocol p = example_merging_protocol(fam, known_pure_state_merging(fam.compressed, 1), 1);
  const ProtocolFile pf = protocol_from_json(parse_json_text(protocol_to_json(p).dump()));
  REQUIRE(pf.merging.has_value());
  CHECK(pf.merging->messages() == p.messages());
  CHECK(pf.merging->k().log2() == p.k().log2());
  for (const State& m : fam.members.members())
    CHECK(merging_fidelity(*pf.merging, m) == doctest::Approx(merging_fidelity(p, m)).epsilon(1e-14));
}

TEST_CASE("channel protocol files carry their target") {
  const Layout copy({2, 2}, {Party::A, Party::B});
  const OneWayLoccChannel c = keep_copy_channel(copy, 2, 1);
  const PureState target = resource_state(2);
  const ProtocolFile pf = protocol_from_json(parse_json_text(channel_to_json(c, target).dump()));
  REQUIRE(pf.channel.has_value());
  REQUIRE(pf.target.has_value());
  CHECK(pf.channel->in_layout() == c.in_layout());
  CHECK((pf.target->amplitudes() - target.amplitudes()).norm() == 0.0);
}

TEST_CASE("csv flattening quotes commas") {
  const Json j = parse_json_text(R"({"a":{"b":[1,2]},"s":"x,y"})");
  CHECK(to_csv(j) == "key,value\na.b[0],1\na.b[1],2\ns,\"x,y\"\n");
}
