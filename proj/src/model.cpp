#include "archsec/model.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace archsec {

namespace pt = boost::property_tree;

const Component* ComponentRegistry::find(const std::string& block_name) const {
  for (const Component& c : components) {
    if (c.block_name == block_name) return &c;
  }
  return nullptr;
}

namespace {

std::string attr(const pt::ptree& node, const std::string& name) {
  return node.get<std::string>("<xmlattr>." + name, "");
}

struct Walker {
  ComponentRegistry registry;
  std::vector<ModelDiagnostic> diagnostics;
  std::set<std::string> seen_blocks;
  std::map<std::string, std::string> boundary_of;  // block name -> boundary

  void visit(const pt::ptree& node) {
    for (const auto& [key, child] : node) {
      if (key == "<xmlattr>" || key == "<xmlcomment>" || key == "<xmltext>") continue;
      if (key == "sysml:Block") {
        handle_block(child);
      } else if (key == "sysml:Boundary") {
        handle_boundary(child);
      }
      visit(child);
    }
  }

  void handle_block(const pt::ptree& node) {
    std::string name = attr(node, "name");
    if (name.empty()) {
      diagnostics.push_back({"MissingBlockName", "block without a name attribute"});
      return;
    }
    if (!seen_blocks.insert(name).second) {
      diagnostics.push_back({"DuplicateBlock", name});
      return;
    }

    Component c;
    c.block_name = name;
    c.vendor = attr(node, "vendor");
    c.product = attr(node, "product");
    c.version = attr(node, "version");
    c.layer = attr(node, "layer");

    std::string hint = attr(node, "cpeHint");
    if (!hint.empty()) {
      try {
        c.cpe = parse_cpe(hint);
      } catch (const MalformedCpe& e) {
        diagnostics.push_back({"MalformedCpe", name + ": " + e.what()});
        return;
      }
    } else if (!c.product.empty()) {
      c.cpe = normalize_cpe(c.vendor, c.product, c.version);
    } else {
      diagnostics.push_back({"MissingProduct", name});
      return;
    }

    if (!c.layer.empty() &&
        std::find(registry.layers.begin(), registry.layers.end(), c.layer) ==
            registry.layers.end()) {
      registry.layers.push_back(c.layer);
    }
    registry.components.push_back(std::move(c));
  }

  void handle_boundary(const pt::ptree& node) {
    std::string boundary = attr(node, "name");
    if (boundary.empty()) {
      diagnostics.push_back({"MissingBoundaryName", "boundary without a name attribute"});
      return;
    }
    registry.boundaries.push_back(boundary);
    for (const auto& [key, child] : node) {
      if (key != "sysml:BlockRef") continue;
      std::string ref = attr(child, "name");
      if (ref.empty()) continue;
      auto [it, inserted] = boundary_of.emplace(ref, boundary);
      if (!inserted) {
        diagnostics.push_back({"DuplicateBoundaryRef", ref});
      }
    }
  }

  void resolve_boundaries() {
    std::set<std::string> resolved;
    for (Component& c : registry.components) {
      auto it = boundary_of.find(c.block_name);
      if (it != boundary_of.end()) {
        c.trust_boundary = it->second;
        resolved.insert(c.block_name);
      }
    }
    for (const auto& [block, boundary] : boundary_of) {
      if (!resolved.count(block)) {
        diagnostics.push_back({"DanglingBlockRef", boundary + " -> " + block});
      }
    }
  }
};

}  // namespace

SysmlParseResult parse_sysml(const std::string& xml_bytes) {
  pt::ptree doc;
  try {
    std::istringstream in(xml_bytes);
    pt::read_xml(in, doc, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw XmlSyntax(e.what());
  }

  Walker walker;
  walker.visit(doc);
  walker.resolve_boundaries();
  return {std::move(walker.registry), std::move(walker.diagnostics)};
}

nlohmann::ordered_json registry_to_json(const ComponentRegistry& registry) {
  nlohmann::ordered_json components = nlohmann::ordered_json::array();
  for (const Component& c : registry.components) {
    components.push_back({{"block_name", c.block_name},
                          {"vendor", c.vendor},
                          {"product", c.product},
                          {"version", c.version},
                          {"cpe", c.cpe.to_string()},
                          {"layer", c.layer},
                          {"trust_boundary", c.trust_boundary}});
  }
  return {{"components", std::move(components)},
          {"boundaries", registry.boundaries},
          {"layers", registry.layers}};
}

ComponentRegistry registry_from_json(const nlohmann::json& doc) {
  ComponentRegistry registry;
  for (const auto& item : doc.at("components")) {
    Component c;
    c.block_name = item.at("block_name").get<std::string>();
    c.vendor = item.at("vendor").get<std::string>();
    c.product = item.at("product").get<std::string>();
    c.version = item.at("version").get<std::string>();
    c.cpe = parse_cpe(item.at("cpe").get<std::string>());
    c.layer = item.at("layer").get<std::string>();
    c.trust_boundary = item.at("trust_boundary").get<std::string>();
    registry.components.push_back(std::move(c));
  }
  registry.boundaries = doc.at("boundaries").get<std::vector<std::string>>();
  registry.layers = doc.at("layers").get<std::vector<std::string>>();
  return registry;
}

std::string registry_profile_text(const ComponentRegistry& registry) {
  std::string out;
  for (const Component& c : registry.components) {
    out += c.block_name + " " + c.vendor + " " + c.product + " " + c.version;
    if (!c.layer.empty()) out += " " + c.layer;
    if (!c.trust_boundary.empty()) out += " " + c.trust_boundary;
    out += "\n";
  }
  for (const std::string& b : registry.boundaries) out += b + "\n";
  return out;
}

}  // namespace archsec
