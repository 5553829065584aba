#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "archsec/model.hpp"
#include "archsec/pipeline.hpp"

using namespace archsec;

namespace {

const char* kFixtureModel = ARCHSEC_FIXTURES "/model/medgateway.xml";

std::string small_model(const std::string& blocks) {
  return "<?xml version=\"1.0\"?><sysml:Model name=\"t\">" + blocks + "</sysml:Model>";
}

}  // namespace

TEST_CASE("medgateway fixture parses to 9 components, 4 layers, 3 boundaries") {
  SysmlParseResult result = parse_sysml(read_file(kFixtureModel));
  CHECK(result.diagnostics.empty());
  const ComponentRegistry& registry = result.registry;
  CHECK(registry.components.size() == 9);
  CHECK(registry.layers.size() == 4);
  REQUIRE(registry.boundaries.size() == 3);
  CHECK(registry.boundaries[0] == "IoT LAN");
  CHECK(registry.boundaries[1] == "Edge Processing");
  CHECK(registry.boundaries[2] == "Cloud DMZ");

  const Component* audit = registry.find("AuditLog_Service");
  REQUIRE(audit != nullptr);
  CHECK(audit->cpe == parse_cpe("cpe:2.3:a:apache:log4j:2.14.1"));
  CHECK(audit->layer == "Middleware");
  CHECK(audit->trust_boundary == "Edge Processing");

  for (const Component& c : registry.components) {
    if (c.trust_boundary.empty()) continue;
    CHECK(std::find(registry.boundaries.begin(), registry.boundaries.end(),
                    c.trust_boundary) != registry.boundaries.end());
  }
}

TEST_CASE("parse_sysml is deterministic over the fixture") {
  std::string bytes = read_file(kFixtureModel);
  nlohmann::ordered_json a = registry_to_json(parse_sysml(bytes).registry);
  nlohmann::ordered_json b = registry_to_json(parse_sysml(bytes).registry);
  CHECK(a.dump() == b.dump());
}

TEST_CASE("registry json round-trips") {
  ComponentRegistry registry = parse_sysml(read_file(kFixtureModel)).registry;
  ComponentRegistry back = registry_from_json(registry_to_json(registry));
  CHECK(back.components == registry.components);
  CHECK(back.boundaries == registry.boundaries);
  CHECK(back.layers == registry.layers);
}

TEST_CASE("empty model yields an empty registry") {
  SysmlParseResult result = parse_sysml(small_model(""));
  CHECK(result.registry.components.empty());
  CHECK(result.registry.boundaries.empty());
}

TEST_CASE("cpeHint wins over conflicting product attributes") {
  // Oracle: the declared precedence rule.
  SysmlParseResult result = parse_sysml(small_model(
      "<sysml:Block name=\"b\" product=\"other thing\" version=\"9.9\" "
      "cpeHint=\"cpe:2.3:a:apache:log4j:2.14.1\"/>"));
  REQUIRE(result.registry.components.size() == 1);
  CHECK(result.registry.components[0].cpe == parse_cpe("cpe:2.3:a:apache:log4j:2.14.1"));
}

TEST_CASE("block without cpeHint falls back to normalized attributes") {
  SysmlParseResult result = parse_sysml(small_model(
      "<sysml:Block name=\"b\" vendor=\"Eclipse\" product=\"Mosquitto Broker\" "
      "version=\"2.0.14\"/>"));
  REQUIRE(result.registry.components.size() == 1);
  CHECK(result.registry.components[0].cpe.to_string() ==
        "cpe:2.3:a:eclipse:mosquitto_broker:2.0.14:*:*:*:*:*:*:*");
}

TEST_CASE("block with neither cpeHint nor product is reported and skipped") {
  SysmlParseResult result = parse_sysml(small_model(
      "<sysml:Block name=\"broken\" vendor=\"x\"/>"
      "<sysml:Block name=\"ok\" product=\"thing\" version=\"1\"/>"));
  CHECK(result.registry.components.size() == 1);
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].code == "MissingProduct");
  CHECK(result.diagnostics[0].detail == "broken");
}

TEST_CASE("duplicate block names are rejected per block") {
  SysmlParseResult result = parse_sysml(small_model(
      "<sysml:Block name=\"dup\" product=\"a\"/>"
      "<sysml:Block name=\"dup\" product=\"b\"/>"));
  REQUIRE(result.registry.components.size() == 1);
  CHECK(result.registry.components[0].cpe.product == "a");
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].code == "DuplicateBlock");
}

TEST_CASE("component without boundary reference keeps an empty zone") {
  SysmlParseResult result = parse_sysml(small_model(
      "<sysml:Block name=\"inzone\" product=\"a\"/>"
      "<sysml:Block name=\"outzone\" product=\"b\"/>"
      "<sysml:Boundary name=\"Z\"><sysml:BlockRef name=\"inzone\"/></sysml:Boundary>"));
  CHECK(result.registry.find("inzone")->trust_boundary == "Z");
  CHECK(result.registry.find("outzone")->trust_boundary.empty());
}

TEST_CASE("malformed xml throws XmlSyntax") {
  CHECK_THROWS_AS(parse_sysml("<sysml:Model><unclosed>"), XmlSyntax);
  CHECK_THROWS_AS(parse_sysml("not xml at all"), XmlSyntax);
}

TEST_CASE("registry matches the golden canonical form") {
  ComponentRegistry registry = parse_sysml(read_file(kFixtureModel)).registry;
  std::string rendered = registry_to_json(registry).dump(2) + "\n";
  std::string golden = read_file(ARCHSEC_FIXTURES "/golden/registry.json");
  CHECK(rendered == golden);
}
