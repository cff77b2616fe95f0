#ifndef SDOH_BRAT_HPP
#define SDOH_BRAT_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sdoh/common.hpp"

namespace sdoh::brat {

struct TextDocument {
  std::string doc_id;
  std::string text;  // UTF-8 narrative; all spans count code points

  friend bool operator==(const TextDocument&, const TextDocument&) = default;
};

// T line: a labeled, possibly discontinuous extent of the narrative.
struct TextBound {
  std::string id;  // T<digits>
  std::string label;
  std::vector<Span> fragments;  // ascending, non-overlapping
  std::string surface;          // fragment texts joined with one space

  friend bool operator==(const TextBound&, const TextBound&) = default;
};

// E line: an event anchored on a trigger text-bound with role-named arguments.
struct EventAnnotation {
  std::string id;  // E<digits>
  std::string event_type;
  std::string trigger_ref;
  std::vector<std::pair<std::string, std::string>> args;  // (role, T id)

  friend bool operator==(const EventAnnotation&, const EventAnnotation&) = default;
};

// A line: a value attached to a text-bound.
struct AttributeAnnotation {
  std::string id;  // A<digits>
  std::string name;
  std::string target;  // T id
  std::string value;

  friend bool operator==(const AttributeAnnotation&, const AttributeAnnotation&) = default;
};

class AnnotatedDocument {
 public:
  TextDocument document;
  std::vector<TextBound> text_bounds;
  std::vector<EventAnnotation> events;
  std::vector<AttributeAnnotation> attributes;
  // Line kinds the toolkit does not model (R, N, M, #...) are kept verbatim
  // and re-emitted on serialization.
  std::vector<std::string> ignored_lines;

  // Rebuilds the id index; call after filling the collections by hand.
  void reindex();

  const TextBound* find_text_bound(std::string_view id) const;
  const EventAnnotation* find_event(std::string_view id) const;
  const AttributeAnnotation* find_attribute(std::string_view id) const;
  bool has_id(std::string_view id) const;

  friend bool operator==(const AnnotatedDocument& a, const AnnotatedDocument& b) {
    return a.document == b.document && a.text_bounds == b.text_bounds &&
           a.events == b.events && a.attributes == b.attributes &&
           a.ignored_lines == b.ignored_lines;
  }

 private:
  std::unordered_map<std::string, std::size_t> tb_index_;
  std::unordered_map<std::string, std::size_t> ev_index_;
  std::unordered_map<std::string, std::size_t> at_index_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Parses line-oriented tab-separated standoff. Malformed lines (wrong field
// count, non-numeric offsets) throw ParseError with the 1-based line number.
// Offset-range and surface problems are left to validate_document.
AnnotatedDocument parse_ann(std::string_view ann_text, TextDocument document);

// Emits T lines, then E lines, then A lines, then ignored lines, each
// newline-terminated. Throws std::runtime_error naming the offending id if a
// cross-reference does not resolve.
std::string serialize_ann(const AnnotatedDocument& doc);

// Empty result iff every structural invariant holds.
std::vector<Finding> validate_document(const AnnotatedDocument& doc);

}  // namespace sdoh::brat

#endif
