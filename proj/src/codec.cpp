#include "sdoh/codec.hpp"

#include <algorithm>

#include "sdoh/utf8.hpp"

namespace sdoh::codec {

namespace {

const char* kPromptPrefix = "Make a table about ";
const char* kPromptSuffix =
    " in the following story. Use exact words or phrases from the story.";

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

char32_t lower32(char32_t c) { return c >= U'A' && c <= U'Z' ? c + 32 : c; }

// First case-insensitive occurrence of needle at or after `from` (code-point
// offsets); npos when absent.
std::size_t ci_find(const std::u32string& haystack_lower, const std::string& needle,
                    std::size_t from) {
  std::u32string n32 = utf8::decode(needle);
  for (char32_t& c : n32) c = lower32(c);
  if (n32.empty() || haystack_lower.size() < n32.size())
    return std::u32string::npos;
  for (std::size_t i = from; i + n32.size() <= haystack_lower.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < n32.size(); ++k)
      if (haystack_lower[i + k] != n32[k]) {
        hit = false;
        break;
      }
    if (hit) return i;
  }
  return std::u32string::npos;
}

std::vector<std::string> split_cells(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    const std::size_t bar = line.find('|', pos);
    if (bar == std::string_view::npos) {
      cells.push_back(trim(line.substr(pos)));
      return cells;
    }
    cells.push_back(trim(line.substr(pos, bar - pos)));
    pos = bar + 1;
  }
}

}  // namespace

std::vector<std::string> table_columns(const std::string& event_type,
                                       const Schema& schema) {
  const EventTypeDef* et = schema.find_event_type(event_type);
  if (!et)
    throw std::invalid_argument("table_columns: unknown event type '" + event_type +
                                "'");
  std::vector<std::string> columns{"Trigger"};
  for (const auto& arg : et->arguments)
    if (arg.kind == ArgKind::Labeled) columns.push_back(arg.name);
  for (const auto& arg : et->arguments)
    if (arg.kind == ArgKind::SpanOnly) columns.push_back(arg.name);
  return columns;
}

EventTable events_to_table(const std::vector<SdohEvent>& events,
                           const std::string& event_type, const Schema& schema) {
  EventTable table;
  table.event_type = event_type;
  table.columns = table_columns(event_type, schema);
  const EventTypeDef* et = schema.find_event_type(event_type);

  for (const auto& event : events) {
    if (event.event_type != event_type)
      throw std::invalid_argument("events_to_table: event of type " +
                                  event.event_type + " in a " + event_type +
                                  " table");
    std::vector<std::string> row;
    row.push_back(event.trigger.surface);
    for (const auto& arg : et->arguments) {
      if (arg.kind != ArgKind::Labeled) continue;
      const auto it = event.labeled.find(arg.name);
      row.push_back(it == event.labeled.end() ? "" : it->second.value);
    }
    for (const auto& arg : et->arguments) {
      if (arg.kind != ArgKind::SpanOnly) continue;
      const auto it = event.span_only.find(arg.name);
      std::string cell;
      if (it != event.span_only.end())
        for (const auto& mention : it->second) {
          if (!cell.empty()) cell += "; ";
          cell += mention.surface;
        }
      row.push_back(std::move(cell));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string render_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += " | ";
    out += cells[i];
  }
  return out;
}

std::string render_table(const EventTable& table) {
  std::string out = render_row(table.columns) + "\n";
  for (const auto& row : table.rows) out += render_row(row) + "\n";
  return out;
}

std::string strip_newlines(std::string_view text) {
  std::string out(text);
  for (char& c : out)
    if (c == '\n' || c == '\r') c = ' ';
  return out;
}

PromptSandwich build_sandwich(std::string_view narrative,
                              const std::string& event_type,
                              const std::vector<SdohEvent>* gold,
                              const Schema& schema) {
  PromptSandwich s;
  s.prompt = kPromptPrefix + event_type + kPromptSuffix;
  s.narrative = strip_newlines(narrative);
  s.header = render_row(table_columns(event_type, schema));
  if (gold) {
    const EventTable table = events_to_table(*gold, event_type, schema);
    for (const auto& row : table.rows) s.gold_rows.push_back(render_row(row));
  }
  return s;
}

std::string render_sandwich(const PromptSandwich& sandwich) {
  std::string out = sandwich.prompt;
  out += "\n\n";
  out += sandwich.narrative;
  out += "\n\n";
  out += sandwich.header;
  out += "\n";
  for (const auto& row : sandwich.gold_rows) {
    out += row;
    out += "\n";
  }
  return out;
}

DecodeResult parse_table(std::string_view generated, std::string_view narrative,
                         const std::string& event_type, const Schema& schema) {
  DecodeResult out;
  const EventTypeDef* et = schema.find_event_type(event_type);
  if (!et)
    throw std::invalid_argument("parse_table: unknown event type '" + event_type + "'");
  const std::vector<std::string> columns = table_columns(event_type, schema);

  std::u32string narrative_lower = utf8::decode(narrative);
  for (char32_t& c : narrative_lower) c = lower32(c);

  const auto mention_at = [&](std::size_t start, std::size_t len) {
    return Mention{{start, start + len}, utf8::slice(narrative, start, start + len)};
  };

  std::size_t row_no = 0;
  // Rows list events in narrative order, so each row's trigger search starts
  // past the previous row's trigger; repeated trigger words then land on
  // successive occurrences instead of all mapping to the first.
  std::size_t table_cursor = 0;
  std::size_t pos = 0;
  while (pos < generated.size()) {
    const std::size_t eol = generated.find('\n', pos);
    std::string_view line = generated.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? generated.size() : eol + 1;

    const std::string trimmed_line = trim(line);
    if (trimmed_line.empty() || trimmed_line[0] == '#') continue;

    std::vector<std::string> cells = split_cells(trimmed_line);
    if (!cells.empty() && cells[0] == "Trigger") continue;  // header row
    ++row_no;
    const std::string row_id = event_type + " row " + std::to_string(row_no);

    if (cells.size() > columns.size())
      out.findings.push_back({Severity::Warning, row_id,
                              "extra cells beyond the " +
                                  std::to_string(columns.size()) +
                                  "-column table dropped"});
    cells.resize(columns.size());

    if (cells[0].empty()) {
      out.findings.push_back({Severity::Warning, row_id, "empty Trigger cell; row dropped"});
      continue;
    }
    std::size_t trigger_at = ci_find(narrative_lower, cells[0], table_cursor);
    if (trigger_at == std::u32string::npos)
      trigger_at = ci_find(narrative_lower, cells[0], 0);
    if (trigger_at == std::u32string::npos) {
      out.findings.push_back({Severity::Warning, row_id,
                              "trigger '" + cells[0] +
                                  "' not found in the narrative; row dropped"});
      continue;
    }
    table_cursor = trigger_at + 1;

    SdohEvent event;
    event.event_type = event_type;
    event.trigger = mention_at(trigger_at, utf8::length(cells[0]));
    std::size_t cursor = trigger_at;

    std::size_t col = 1;
    for (const auto& arg : et->arguments) {
      if (arg.kind != ArgKind::Labeled) continue;
      const std::string& cell = cells[col++];
      if (cell.empty()) continue;
      if (std::find(arg.values.begin(), arg.values.end(), cell) == arg.values.end()) {
        out.findings.push_back({Severity::Warning, row_id,
                                "value '" + cell + "' not in the schema for " +
                                    event_type + "/" + arg.name + "; cell dropped"});
        continue;
      }
      event.labeled[arg.name] = LabeledArg{cell, event.trigger};
    }
    for (const auto& arg : et->arguments) {
      if (arg.kind != ArgKind::SpanOnly) continue;
      const std::string& cell = cells[col++];
      if (cell.empty()) continue;
      // Multiple phrases in one cell are "; "-joined.
      std::size_t piece_pos = 0;
      while (piece_pos <= cell.size()) {
        const std::size_t semi = cell.find(';', piece_pos);
        const std::string phrase = trim(
            semi == std::string::npos ? std::string_view(cell).substr(piece_pos)
                                      : std::string_view(cell).substr(
                                            piece_pos, semi - piece_pos));
        piece_pos = semi == std::string::npos ? cell.size() + 1 : semi + 1;
        if (phrase.empty()) continue;
        std::size_t at = ci_find(narrative_lower, phrase, cursor);
        if (at == std::u32string::npos) at = ci_find(narrative_lower, phrase, 0);
        if (at == std::u32string::npos) {
          out.findings.push_back({Severity::Warning, row_id,
                                  arg.name + " phrase '" + phrase +
                                      "' not found in the narrative; dropped"});
          continue;
        }
        event.span_only[arg.name].push_back(mention_at(at, utf8::length(phrase)));
        cursor = at;
      }
    }

    for (const auto& arg : et->arguments)
      if (arg.kind == ArgKind::Labeled && arg.mandatory &&
          !event.labeled.count(arg.name))
        out.findings.push_back({Severity::Warning, row_id,
                                "mandatory labeled argument " + arg.name +
                                    " missing"});

    out.events.push_back(std::move(event));
  }
  return out;
}

}  // namespace sdoh::codec
