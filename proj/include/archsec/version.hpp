#pragma once

#include <string>

namespace archsec {

enum class VersionOrder { LT, EQ, GT };

/// Total order over release strings. Segments are split on '.' and '-';
/// purely numeric segments compare numerically, anything else compares
/// lexicographically. When one string is a prefix of the other, a trailing
/// numeric segment sorts after the shared base ("2.0.1" > "2.0") while a
/// trailing non-numeric segment sorts before it ("2.0-beta9" < "2.0").
VersionOrder version_compare(const std::string& a, const std::string& b);

}  // namespace archsec
