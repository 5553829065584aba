#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "archsec/cpe.hpp"

namespace archsec {

struct XmlSyntax : std::runtime_error {
  explicit XmlSyntax(const std::string& what) : std::runtime_error(what) {}
};

/// One deployed software or hardware block from the architecture model.
struct Component {
  std::string block_name;
  std::string vendor;
  std::string product;
  std::string version;
  CpeIdentifier cpe;
  std::string layer;
  std::string trust_boundary;  // zone label, may be empty

  bool operator==(const Component&) const = default;
};

struct ComponentRegistry {
  std::vector<Component> components;       // document order
  std::vector<std::string> boundaries;     // document order, unique
  std::vector<std::string> layers;         // first-seen order, unique

  const Component* find(const std::string& block_name) const;
};

struct ModelDiagnostic {
  std::string code;    // MissingProduct, DuplicateBlock, ...
  std::string detail;
};

struct SysmlParseResult {
  ComponentRegistry registry;
  std::vector<ModelDiagnostic> diagnostics;
};

/// Walks a SysML XML document and extracts every sysml:Block into a
/// component registry. Blocks carry name/vendor/product/version/cpeHint/layer
/// attributes; sysml:Boundary elements assign trust zones through
/// sysml:BlockRef children. A cpeHint attribute wins over the normalized
/// vendor/product/version fallback. Per-block problems (missing product,
/// duplicate names) become diagnostics and parsing continues; malformed XML
/// throws XmlSyntax.
SysmlParseResult parse_sysml(const std::string& xml_bytes);

/// Canonical JSON form of a registry: stable field order, suitable for
/// golden-file comparison.
nlohmann::ordered_json registry_to_json(const ComponentRegistry& registry);
ComponentRegistry registry_from_json(const nlohmann::json& doc);

/// Plain-text profile of the system of interest, used as one extra document
/// when fitting retrieval vectorizers.
std::string registry_profile_text(const ComponentRegistry& registry);

}  // namespace archsec
