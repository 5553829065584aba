#include <doctest.h>

#include <string>
#include <vector>

#include "archsec/version.hpp"

using namespace archsec;

TEST_CASE("version_compare basic orderings") {
  CHECK(version_compare("2.14.1", "2.15.0") == VersionOrder::LT);
  CHECK(version_compare("2.0", "2.0") == VersionOrder::EQ);
  CHECK(version_compare("2.15.0", "2.14.1") == VersionOrder::GT);
  CHECK(version_compare("10.0", "9.9") == VersionOrder::GT);
  CHECK(version_compare("1.0.1", "1.0") == VersionOrder::GT);
}

TEST_CASE("pre-release segments order before the plain base") {
  // Oracle: trailing non-numeric segment sorts below the same base.
  CHECK(version_compare("2.0-beta9", "2.0") == VersionOrder::LT);
  CHECK(version_compare("2.0", "2.0-beta9") == VersionOrder::GT);
  CHECK(version_compare("2.0-beta9", "2.15.0") == VersionOrder::LT);
  CHECK(version_compare("2.14.1", "2.0-beta9") == VersionOrder::GT);
  CHECK(version_compare("1.0-rc1", "1.0.0") == VersionOrder::LT);
}

TEST_CASE("numeric segments compare numerically, not lexically") {
  CHECK(version_compare("2.9", "2.10") == VersionOrder::LT);
  CHECK(version_compare("1.02", "1.2") == VersionOrder::EQ);
  CHECK(version_compare("99999999999999999999", "100000000000000000000") == VersionOrder::LT);
}

TEST_CASE("version_compare is a total order over a mixed corpus") {
  const std::vector<std::string> corpus = {
      "1",        "1.0",     "1.0.0",    "1.0.1",   "1.1",      "1.2",
      "1.02",     "1.10",    "2",        "2.0",     "2.0-beta9", "2.0-beta10",
      "2.0-rc1",  "2.0.1",   "2.9",      "2.10",    "2.14.1",   "2.15.0",
      "3.0.2",    "3.0.2a",  "10",       "10.0",    "0.1",      "0.0.1",
      "22.04",    "20.10.14", "1.21.6",  "18.0.0",  "5.3.18",   "14.2"};

  auto sign = [](VersionOrder o) { return o == VersionOrder::LT ? -1 : (o == VersionOrder::EQ ? 0 : 1); };

  for (const auto& a : corpus) {
    CHECK(version_compare(a, a) == VersionOrder::EQ);
    for (const auto& b : corpus) {
      int ab = sign(version_compare(a, b));
      int ba = sign(version_compare(b, a));
      CAPTURE(a);
      CAPTURE(b);
      CHECK(ab == -ba);  // antisymmetry
      for (const auto& c : corpus) {
        int bc = sign(version_compare(b, c));
        int ac = sign(version_compare(a, c));
        // transitivity: a<=b and b<=c implies a<=c
        if (ab <= 0 && bc <= 0) {
          CAPTURE(c);
          CHECK(ac <= 0);
        }
      }
    }
  }
}
