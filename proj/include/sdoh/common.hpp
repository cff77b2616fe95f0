#ifndef SDOH_COMMON_HPP
#define SDOH_COMMON_HPP

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace sdoh {

// Half-open character span [start, end). Offsets count Unicode code points,
// not bytes, throughout the toolkit.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end > start ? end - start : 0; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

inline bool overlaps(const Span& a, const Span& b) {
  return a.start < b.end && b.start < a.end;
}

// A span together with the text it covers.
struct Mention {
  Span span;
  std::string surface;

  friend auto operator<=>(const Mention&, const Mention&) = default;
};

enum class Severity { Warning, Error };

// Validation and normalization problems are reported as findings, never as
// exceptions, so partially broken inputs can still be inspected.
struct Finding {
  Severity severity = Severity::Error;
  std::string where;  // annotation or document id the finding refers to
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

std::string to_string(const Finding& f);

inline bool has_errors(const std::vector<Finding>& findings) {
  for (const auto& f : findings)
    if (f.severity == Severity::Error) return true;
  return false;
}

}  // namespace sdoh

#endif
