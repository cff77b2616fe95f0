#include "sdoh/brat.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "sdoh/utf8.hpp"

namespace sdoh::brat {

namespace {

std::vector<std::string_view> split_char(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_offset(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool id_well_formed(std::string_view id, char kind) {
  if (id.size() < 2 || id[0] != kind) return false;
  return std::all_of(id.begin() + 1, id.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

// brat keeps T-line reference text on one line; newlines inside covered text
// appear as spaces there.
std::string sanitize_surface(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  return s;
}

TextBound parse_text_bound(std::size_t line_no, std::string_view id,
                           std::string_view mid, std::string_view surface) {
  TextBound tb;
  tb.id = std::string(id);
  const std::size_t sp = mid.find(' ');
  if (sp == std::string_view::npos)
    throw ParseError(line_no, "T line: missing offsets after label");
  tb.label = std::string(mid.substr(0, sp));
  if (tb.label.empty()) throw ParseError(line_no, "T line: empty label");
  for (std::string_view group : split_char(mid.substr(sp + 1), ';')) {
    const auto nums = split_spaces(group);
    if (nums.size() != 2)
      throw ParseError(line_no, "T line: each fragment needs two offsets");
    Span frag;
    if (!parse_offset(nums[0], frag.start) || !parse_offset(nums[1], frag.end))
      throw ParseError(line_no, "T line: non-numeric offset");
    tb.fragments.push_back(frag);
  }
  tb.surface = std::string(surface);
  return tb;
}

EventAnnotation parse_event(std::size_t line_no, std::string_view id,
                            std::string_view body) {
  EventAnnotation ev;
  ev.id = std::string(id);
  const auto parts = split_spaces(body);
  if (parts.empty()) throw ParseError(line_no, "E line: empty body");
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::size_t colon = parts[k].find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == parts[k].size())
      throw ParseError(line_no, "E line: expected role:target pairs");
    std::string role(parts[k].substr(0, colon));
    std::string target(parts[k].substr(colon + 1));
    if (k == 0) {
      ev.event_type = std::move(role);
      ev.trigger_ref = std::move(target);
    } else {
      ev.args.emplace_back(std::move(role), std::move(target));
    }
  }
  return ev;
}

AttributeAnnotation parse_attribute(std::size_t line_no, std::string_view id,
                                    std::string_view body) {
  AttributeAnnotation at;
  at.id = std::string(id);
  const auto parts = split_spaces(body);
  if (parts.size() < 2)
    throw ParseError(line_no, "A line: expected name and target");
  at.name = std::string(parts[0]);
  at.target = std::string(parts[1]);
  if (parts.size() > 2) {
    // Value may contain spaces; rejoin the remainder.
    const char* begin = parts[2].data();
    const char* end = body.data() + body.size();
    at.value = std::string(begin, end);
  }
  return at;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

void AnnotatedDocument::reindex() {
  tb_index_.clear();
  ev_index_.clear();
  at_index_.clear();
  for (std::size_t i = 0; i < text_bounds.size(); ++i)
    tb_index_.emplace(text_bounds[i].id, i);
  for (std::size_t i = 0; i < events.size(); ++i)
    ev_index_.emplace(events[i].id, i);
  for (std::size_t i = 0; i < attributes.size(); ++i)
    at_index_.emplace(attributes[i].id, i);
}

const TextBound* AnnotatedDocument::find_text_bound(std::string_view id) const {
  const auto it = tb_index_.find(std::string(id));
  return it == tb_index_.end() ? nullptr : &text_bounds[it->second];
}

const EventAnnotation* AnnotatedDocument::find_event(std::string_view id) const {
  const auto it = ev_index_.find(std::string(id));
  return it == ev_index_.end() ? nullptr : &events[it->second];
}

const AttributeAnnotation* AnnotatedDocument::find_attribute(std::string_view id) const {
  const auto it = at_index_.find(std::string(id));
  return it == at_index_.end() ? nullptr : &attributes[it->second];
}

bool AnnotatedDocument::has_id(std::string_view id) const {
  const std::string key(id);
  return tb_index_.count(key) || ev_index_.count(key) || at_index_.count(key);
}

AnnotatedDocument parse_ann(std::string_view ann_text, TextDocument document) {
  AnnotatedDocument doc;
  doc.document = std::move(document);

  std::size_t line_no = 0;
  for (std::string_view line : split_char(ann_text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const char kind = line[0];
    if (kind != 'T' && kind != 'E' && kind != 'A') {
      doc.ignored_lines.emplace_back(line);
      continue;
    }

    const std::size_t tab1 = line.find('\t');
    if (tab1 == std::string_view::npos)
      throw ParseError(line_no, "expected tab-separated fields");
    const std::string_view id = line.substr(0, tab1);
    const std::string_view rest = line.substr(tab1 + 1);

    if (kind == 'T') {
      const std::size_t tab2 = rest.find('\t');
      if (tab2 == std::string_view::npos)
        throw ParseError(line_no, "T line: expected 3 tab-separated fields");
      doc.text_bounds.push_back(
          parse_text_bound(line_no, id, rest.substr(0, tab2), rest.substr(tab2 + 1)));
    } else if (kind == 'E') {
      doc.events.push_back(parse_event(line_no, id, rest));
    } else {
      doc.attributes.push_back(parse_attribute(line_no, id, rest));
    }
  }

  doc.reindex();
  return doc;
}

std::string serialize_ann(const AnnotatedDocument& doc) {
  for (const auto& ev : doc.events) {
    if (!doc.find_text_bound(ev.trigger_ref))
      throw std::runtime_error("serialize_ann: unresolved reference " + ev.trigger_ref);
    for (const auto& [role, target] : ev.args)
      if (!doc.find_text_bound(target))
        throw std::runtime_error("serialize_ann: unresolved reference " + target);
  }
  for (const auto& at : doc.attributes)
    if (!doc.find_text_bound(at.target))
      throw std::runtime_error("serialize_ann: unresolved reference " + at.target);

  std::string out;
  for (const auto& tb : doc.text_bounds) {
    out += tb.id;
    out += '\t';
    out += tb.label;
    for (std::size_t i = 0; i < tb.fragments.size(); ++i) {
      out += i == 0 ? ' ' : ';';
      out += std::to_string(tb.fragments[i].start);
      out += ' ';
      out += std::to_string(tb.fragments[i].end);
    }
    out += '\t';
    out += sanitize_surface(tb.surface);
    out += '\n';
  }
  for (const auto& ev : doc.events) {
    out += ev.id;
    out += '\t';
    out += ev.event_type;
    out += ':';
    out += ev.trigger_ref;
    for (const auto& [role, target] : ev.args) {
      out += ' ';
      out += role;
      out += ':';
      out += target;
    }
    out += '\n';
  }
  for (const auto& at : doc.attributes) {
    out += at.id;
    out += '\t';
    out += at.name;
    out += ' ';
    out += at.target;
    if (!at.value.empty()) {
      out += ' ';
      out += at.value;
    }
    out += '\n';
  }
  for (const auto& line : doc.ignored_lines) {
    out += line;
    out += '\n';
  }
  return out;
}

std::vector<Finding> validate_document(const AnnotatedDocument& doc) {
  std::vector<Finding> findings;
  const auto err = [&](std::string where, std::string msg) {
    findings.push_back({Severity::Error, std::move(where), std::move(msg)});
  };

  if (doc.document.doc_id.empty()) err("document", "empty doc_id");

  std::set<std::string> seen;
  const auto check_unique = [&](const std::string& id) {
    if (!seen.insert(id).second) err(id, "duplicate annotation id");
  };
  for (const auto& tb : doc.text_bounds) check_unique(tb.id);
  for (const auto& ev : doc.events) check_unique(ev.id);
  for (const auto& at : doc.attributes) check_unique(at.id);

  const std::size_t text_len = utf8::length(doc.document.text);

  for (const auto& tb : doc.text_bounds) {
    if (!id_well_formed(tb.id, 'T')) err(tb.id, "id does not match T<digits>");
    if (tb.fragments.empty()) {
      err(tb.id, "no fragments");
      continue;
    }
    bool offsets_ok = true;
    for (const auto& frag : tb.fragments) {
      if (frag.start >= frag.end) {
        err(tb.id, "fragment start must precede end");
        offsets_ok = false;
      }
      if (frag.end > text_len) {
        err(tb.id, "fragment extends past end of text");
        offsets_ok = false;
      }
    }
    for (std::size_t i = 1; i < tb.fragments.size(); ++i) {
      if (tb.fragments[i].start < tb.fragments[i - 1].end) {
        err(tb.id, "fragments overlap or are out of order");
        offsets_ok = false;
      }
    }
    if (offsets_ok) {
      std::string expected;
      for (std::size_t i = 0; i < tb.fragments.size(); ++i) {
        if (i) expected += ' ';
        expected += utf8::slice(doc.document.text, tb.fragments[i].start,
                                tb.fragments[i].end);
      }
      if (sanitize_surface(std::move(expected)) != sanitize_surface(tb.surface))
        err(tb.id, "surface text does not match the referenced fragments");
    }
  }

  for (const auto& ev : doc.events) {
    if (!id_well_formed(ev.id, 'E')) err(ev.id, "id does not match E<digits>");
    const TextBound* trigger = doc.find_text_bound(ev.trigger_ref);
    if (!trigger) {
      err(ev.id, "unresolved reference " + ev.trigger_ref);
    } else if (trigger->label != ev.event_type) {
      err(ev.id, "event type '" + ev.event_type + "' differs from trigger label '" +
                     trigger->label + "'");
    }
    for (const auto& [role, target] : ev.args) {
      if (!doc.find_text_bound(target))
        err(ev.id, "unresolved reference " + target + " for role " + role);
    }
  }

  std::set<std::pair<std::string, std::string>> attr_keys;
  for (const auto& at : doc.attributes) {
    if (!id_well_formed(at.id, 'A')) err(at.id, "id does not match A<digits>");
    if (!doc.find_text_bound(at.target))
      err(at.id, "unresolved reference " + at.target);
    if (at.value.empty()) err(at.id, "empty attribute value");
    if (!attr_keys.insert({at.name, at.target}).second)
      err(at.id, "duplicate attribute '" + at.name + "' on " + at.target);
  }

  return findings;
}

}  // namespace sdoh::brat
