#pragma once

#include <stdexcept>
#include <string>

namespace archsec {

struct MalformedCpe : std::runtime_error {
  explicit MalformedCpe(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyProduct : std::runtime_error {
  EmptyProduct() : std::runtime_error("product name is empty") {}
};

// What kind of platform a CPE names.
enum class CpePart { Application, OperatingSystem, Hardware };

char cpe_part_char(CpePart part);

/// One CPE 2.3 identifier. Unspecified attributes hold "*"; all fields are
/// kept lowercase.
struct CpeIdentifier {
  CpePart part = CpePart::Application;
  std::string vendor = "*";
  std::string product = "*";
  std::string version = "*";
  std::string update = "*";
  std::string edition = "*";
  std::string language = "*";
  std::string sw_edition = "*";
  std::string target_sw = "*";
  std::string target_hw = "*";
  std::string other = "*";

  bool operator==(const CpeIdentifier&) const = default;

  /// Formatted string with all 11 attribute fields; embedded ':' and '\'
  /// are backslash-escaped.
  std::string to_string() const;
};

/// Parses a CPE 2.3 formatted string. Truncated strings (fewer than 11
/// attributes after the prefix) are padded with "*". Throws MalformedCpe
/// when the "cpe:2.3:" prefix is missing or the part is not one of a/o/h.
CpeIdentifier parse_cpe(const std::string& text);

/// Builds a CPE from free-form block attributes: lowercases everything,
/// replaces internal whitespace runs with underscores, defaults the part to
/// application, an empty vendor to the product name and an empty version to
/// "*". Throws EmptyProduct when the product is empty.
CpeIdentifier normalize_cpe(const std::string& vendor, const std::string& product,
                            const std::string& version);

}  // namespace archsec
