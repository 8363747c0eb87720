#include "support/systems.hpp"

#include <sponge/report.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace sponge;
using namespace sponge::testing;

namespace {

std::string spec_file(const std::string& name) {
  std::ifstream in(std::string(SPONGE_SPEC_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parsed(const CommandResult& r) { return Json::parse(r.output); }

CommandOptions quiet() {
  CommandOptions o;
  o.oracle = "off";
  return o;
}

}  // namespace

TEST(SpecIO, RoundTrip) {
  auto spec = parse_spec(spec_file("bedford_mcmullen_2x4.json"));
  EXPECT_EQ(spec.raw, bedford_mcmullen().raw());
  ASSERT_TRUE(spec.weights);
  EXPECT_EQ(*spec.weights, uniform(3));
  auto again = parse_spec(serialize_spec(spec));
  EXPECT_EQ(again.raw, spec.raw);
  EXPECT_EQ(again.weights, spec.weights);
}

TEST(SpecIO, NumericFormsAreExact) {
  auto spec = parse_spec(R"({"dimension": 2, "maps": [{"ratios": [0.5, "1/4"], "translation": [0, "0.25"]}]})");
  EXPECT_EQ(spec.raw.maps[0].ratios[0], Rational(1, 2));
  EXPECT_EQ(spec.raw.maps[0].translation[1], Rational(1, 4));
  EXPECT_FALSE(spec.weights);
  auto tenth = parse_spec(R"({"dimension": 1, "maps": [{"ratios": [0.1], "translation": [0]}]})");
  EXPECT_EQ(tenth.raw.maps[0].ratios[0], Rational(1, 10));
}

TEST(SpecIO, ParseErrors) {
  EXPECT_THROW(parse_spec("{"), ParseError);
  EXPECT_THROW(parse_spec("[]"), ParseError);
  EXPECT_THROW(parse_spec(R"({"maps": []})"), ParseError);
  EXPECT_THROW(parse_spec(R"({"dimension": 2})"), ParseError);
  EXPECT_THROW(parse_spec(R"({"dimension": 2, "maps": [{"ratios": ["1/2"]}]})"), ParseError);
  EXPECT_THROW(parse_spec(R"({"dimension": 2, "maps": [{"ratios": [true], "translation": [0]}]})"), ParseError);
  EXPECT_THROW(parse_spec(spec_file("malformed_number.json")), ParseError);
}

TEST(Validate, ExitCodes) {
  auto ok = cmd_validate(spec_file("shrunken_2x4.json"));
  EXPECT_EQ(ok.exit_code, kExitOk);
  EXPECT_TRUE(parsed(ok)["separation"]["very_strong"].get<bool>());

  auto bad = cmd_validate(spec_file("escaping_map.json"));
  EXPECT_EQ(bad.exit_code, kExitInvalid);
  auto j = parsed(bad);
  EXPECT_FALSE(j["validation"]["valid"].get<bool>());
  EXPECT_EQ(j["validation"]["errors"][0]["kind"], "EscapesUnitCube");

  auto malformed = cmd_validate(spec_file("malformed_number.json"));
  EXPECT_EQ(malformed.exit_code, kExitParse);
  EXPECT_EQ(parsed(malformed)["error"]["kind"], "ParseError");
}

TEST(Orderings, ReportsCertificates) {
  auto r = cmd_orderings(spec_file("four_dim_two_map.json"));
  EXPECT_EQ(r.exit_code, kExitOk);
  auto j = parsed(r);
  EXPECT_TRUE(j.contains("orderings"));
  EXPECT_EQ(j["notes"][0]["kind"], "two-map-criterion");
}

TEST(Dims, FourDimensionalDiscrepancyNote) {
  auto r = cmd_dims(spec_file("four_dim_two_map.json"), quiet());
  ASSERT_EQ(r.exit_code, kExitOk) << r.output;
  auto j = parsed(r);
  bool found = false;
  for (const auto& n : j["notes"]) found = found || n["kind"] == "discrepancy";
  EXPECT_TRUE(found);
}

TEST(Dims, TouchingNeedsFormulaOnly) {
  auto text = spec_file("bedford_mcmullen_2x4.json");
  auto strict = cmd_dims(text, quiet());
  EXPECT_EQ(strict.exit_code, kExitSeparation);
  EXPECT_EQ(parsed(strict)["error"]["kind"], "SeparationNotVerified");
  auto opt = quiet();
  opt.formula_only = true;
  auto loose = cmd_dims(text, opt);
  ASSERT_EQ(loose.exit_code, kExitOk);
  auto j = parsed(loose);
  EXPECT_FALSE(j["bounds"]["hypothesis_met"].get<bool>());
  EXPECT_TRUE(j["bounds"].contains("label"));
  EXPECT_NEAR(j["bounds"]["assouad"]["lower"].get<double>(), std::log(3.0) / std::log(2.0) + 0.5, 1e-9);
}

TEST(Dims, MeasureSelection) {
  auto text = spec_file("attained_carpet.json");
  auto given = cmd_dims(text, quiet());
  EXPECT_EQ(given.exit_code, kExitInvalid);
  EXPECT_EQ(parsed(given)["error"]["kind"], "MissingWeights");
  auto opt = quiet();
  opt.measure = "natural:(1,2)";
  auto nat = cmd_dims(text, opt);
  ASSERT_EQ(nat.exit_code, kExitOk) << nat.output;
  opt.measure = "natural:(1,1)";
  EXPECT_EQ(cmd_dims(text, opt).exit_code, kExitInvalid);
  opt.measure = "banana";
  EXPECT_EQ(cmd_dims(text, opt).exit_code, kExitInvalid);
  opt.measure = "uniform";
  EXPECT_EQ(cmd_dims(text, opt).exit_code, kExitOk);
}

TEST(Dims, OracleWithinBounds) {
  CommandOptions opt;
  opt.measure = "uniform";
  auto r = cmd_dims(spec_file("shrunken_2x4.json"), opt);
  ASSERT_EQ(r.exit_code, kExitOk);
  auto j = parsed(r);
  EXPECT_TRUE(j["oracle"]["within_bounds"].get<bool>());
  EXPECT_FALSE(j["oracle"]["disagreement"].get<bool>());
  EXPECT_EQ(j["oracle"]["cube_checks"], j["oracle"]["cube_agreements"]);
}

TEST(Dims, Deterministic) {
  auto text = spec_file("shrunken_2x4.json");
  CommandOptions opt;
  opt.seed = 17;
  EXPECT_EQ(cmd_dims(text, opt).output, cmd_dims(text, opt).output);
  opt.format = "text";
  auto t = cmd_dims(text, opt);
  EXPECT_EQ(t.output, cmd_dims(text, opt).output);
  EXPECT_NE(t.output.find("bounds.hypothesis_met = true"), std::string::npos);
}

TEST(Gap, Planar) {
  auto r = cmd_gap(spec_file("gap_carpet.json"));
  ASSERT_EQ(r.exit_code, kExitOk);
  auto j = parsed(r);
  EXPECT_NEAR(j["minimizer"]["inf_estimate"].get<double>(), 1.0, 1e-3);
  EXPECT_TRUE(j["certificate"]["bound_holds"].get<bool>());
  auto none = parsed(cmd_gap(spec_file("shrunken_2x4.json")));
  EXPECT_TRUE(none["certificate"].is_null());
  EXPECT_TRUE(none.contains("certificate_reason"));
}

TEST(Gap, NonPlanarNotApplicable) {
  auto r = cmd_gap(spec_file("four_dim_two_map.json"));
  EXPECT_EQ(r.exit_code, kExitNotApplicable);
  EXPECT_EQ(parsed(r)["error"]["kind"], "NotApplicable");
}

TEST(Render, CylinderCounts) {
  auto s = bedford_mcmullen();
  EXPECT_EQ(cylinders(s, 1).size(), 3u);
  EXPECT_EQ(cylinders(s, 2).size(), 9u);
  EXPECT_EQ(cylinders(s, 2)[7].lo, (std::vector<Rational>{Rational(1, 2), Rational(1, 8)}));
  EXPECT_THROW(cylinders(s, 20, 1000), CapExceeded);
  CommandOptions opt;
  opt.depth = 2;
  auto r = cmd_render(spec_file("bedford_mcmullen_2x4.json"), opt);
  ASSERT_EQ(r.exit_code, kExitOk);
  std::size_t count = 0;
  for (auto pos = r.output.find("fill=\"#4a6fa5\""); pos != std::string::npos;
       pos = r.output.find("fill=\"#4a6fa5\"", pos + 1))
    ++count;
  EXPECT_EQ(count, 9u);
  EXPECT_EQ(r.output.rfind("<svg", 0), 0u);
}

TEST(Render, UnsupportedDimension) {
  EXPECT_THROW(render_svg(four_dim_two_map(), 1), UnsupportedDimension);
  auto r = cmd_render(spec_file("four_dim_two_map.json"));
  EXPECT_EQ(r.exit_code, kExitNotApplicable);
  EXPECT_EQ(parsed(r)["error"]["kind"], "UnsupportedDimension");
}
