#include "archsec/cpe.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace archsec {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string escape_field(const std::string& field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    if (c == '\\' || c == ':') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Splits on unescaped ':' and removes the escaping backslashes.
std::vector<std::string> split_fields(const std::string& text) {
  std::vector<std::string> fields;
  std::string current;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\\' && i + 1 < text.size()) {
      current.push_back(text[++i]);
    } else if (c == ':') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

}  // namespace

char cpe_part_char(CpePart part) {
  switch (part) {
    case CpePart::Application: return 'a';
    case CpePart::OperatingSystem: return 'o';
    case CpePart::Hardware: return 'h';
  }
  return 'a';
}

std::string CpeIdentifier::to_string() const {
  std::string out = "cpe:2.3:";
  out.push_back(cpe_part_char(part));
  for (const std::string* f : {&vendor, &product, &version, &update, &edition, &language,
                               &sw_edition, &target_sw, &target_hw, &other}) {
    out.push_back(':');
    out += escape_field(*f);
  }
  return out;
}

CpeIdentifier parse_cpe(const std::string& text) {
  const std::string lowered = to_lower(text);
  static const std::string prefix = "cpe:2.3:";
  if (lowered.rfind(prefix, 0) != 0) {
    throw MalformedCpe("missing cpe:2.3: prefix: " + text);
  }

  std::vector<std::string> fields = split_fields(lowered.substr(prefix.size()));
  if (fields.empty() || fields[0].size() != 1) {
    throw MalformedCpe("bad part attribute: " + text);
  }
  if (fields.size() > 11) {
    throw MalformedCpe("too many attribute fields: " + text);
  }

  CpeIdentifier cpe;
  switch (fields[0][0]) {
    case 'a': cpe.part = CpePart::Application; break;
    case 'o': cpe.part = CpePart::OperatingSystem; break;
    case 'h': cpe.part = CpePart::Hardware; break;
    default: throw MalformedCpe("part must be one of a/o/h: " + text);
  }

  std::string* slots[] = {&cpe.vendor, &cpe.product, &cpe.version, &cpe.update,
                          &cpe.edition, &cpe.language, &cpe.sw_edition, &cpe.target_sw,
                          &cpe.target_hw, &cpe.other};
  for (size_t i = 1; i < fields.size(); ++i) {
    *slots[i - 1] = fields[i].empty() ? "*" : fields[i];
  }
  return cpe;
}

CpeIdentifier normalize_cpe(const std::string& vendor, const std::string& product,
                            const std::string& version) {
  auto squash = [](const std::string& raw) {
    std::string out;
    bool in_space = false;
    for (unsigned char c : raw) {
      if (std::isspace(c)) {
        in_space = !out.empty();
        continue;
      }
      if (in_space) {
        out.push_back('_');
        in_space = false;
      }
      out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
  };

  CpeIdentifier cpe;
  cpe.product = squash(product);
  if (cpe.product.empty()) throw EmptyProduct();
  cpe.vendor = squash(vendor);
  if (cpe.vendor.empty()) cpe.vendor = cpe.product;
  cpe.version = squash(version);
  if (cpe.version.empty()) cpe.version = "*";
  return cpe;
}

}  // namespace archsec
