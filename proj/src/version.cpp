#include "archsec/version.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace archsec {

namespace {

struct Segment {
  std::string text;
  bool numeric;
};

std::vector<Segment> split_segments(const std::string& version) {
  std::vector<Segment> segments;
  std::string current;
  auto flush = [&] {
    bool numeric = !current.empty() &&
                   std::all_of(current.begin(), current.end(),
                               [](unsigned char c) { return std::isdigit(c); });
    segments.push_back({current, numeric});
    current.clear();
  };
  for (char c : version) {
    if (c == '.' || c == '-') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return segments;
}

int compare_numeric(const std::string& a, const std::string& b) {
  // Arbitrary-precision digit-string compare: strip leading zeros, then
  // longer wins, then lexicographic.
  auto strip = [](const std::string& s) {
    size_t i = s.find_first_not_of('0');
    return i == std::string::npos ? std::string("0") : s.substr(i);
  };
  std::string sa = strip(a), sb = strip(b);
  if (sa.size() != sb.size()) return sa.size() < sb.size() ? -1 : 1;
  return sa.compare(sb) < 0 ? -1 : (sa == sb ? 0 : 1);
}

// Segment classes: non-numeric (pre-release style) < absent < numeric.
int segment_class(const Segment* s) {
  if (s == nullptr) return 1;
  return s->numeric ? 2 : 0;
}

}  // namespace

VersionOrder version_compare(const std::string& a, const std::string& b) {
  std::vector<Segment> sa = split_segments(a);
  std::vector<Segment> sb = split_segments(b);
  size_t n = std::max(sa.size(), sb.size());
  for (size_t i = 0; i < n; ++i) {
    const Segment* pa = i < sa.size() ? &sa[i] : nullptr;
    const Segment* pb = i < sb.size() ? &sb[i] : nullptr;
    int ca = segment_class(pa), cb = segment_class(pb);
    if (ca != cb) return ca < cb ? VersionOrder::LT : VersionOrder::GT;
    if (pa == nullptr) continue;
    int cmp;
    if (pa->numeric) {
      cmp = compare_numeric(pa->text, pb->text);
    } else {
      cmp = pa->text.compare(pb->text);
      cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    }
    if (cmp != 0) return cmp < 0 ? VersionOrder::LT : VersionOrder::GT;
  }
  return VersionOrder::EQ;
}

}  // namespace archsec
