#ifndef SDOH_CODEC_HPP
#define SDOH_CODEC_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdoh/common.hpp"
#include "sdoh/schema.hpp"

namespace sdoh::codec {

// Pipe-delimited single-line rows under a header row; one table per event
// type. Cells: Trigger surface, labeled values, span-only surfaces joined
// with "; ". Empty string means absent.
struct EventTable {
  std::string event_type;
  std::vector<std::string> columns;  // Trigger, labeled args, span-only args
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const EventTable&, const EventTable&) = default;
};

// Natural-language prompt, the newline-stripped narrative, the header row,
// and (in training mode) the gold rows.
struct PromptSandwich {
  std::string prompt;
  std::string narrative;  // no newlines
  std::string header;
  std::vector<std::string> gold_rows;

  friend bool operator==(const PromptSandwich&, const PromptSandwich&) = default;
};

std::vector<std::string> table_columns(const std::string& event_type,
                                       const Schema& schema);

// One row per event, all of one event type.
EventTable events_to_table(const std::vector<SdohEvent>& events,
                           const std::string& event_type, const Schema& schema);

std::string render_table(const EventTable& table);       // header + rows
std::string render_row(const std::vector<std::string>& cells);

// Replaces each newline (and carriage return) with one space, preserving
// character offsets one-to-one.
std::string strip_newlines(std::string_view text);

PromptSandwich build_sandwich(std::string_view narrative,
                              const std::string& event_type,
                              const std::vector<SdohEvent>* gold,
                              const Schema& schema);

// Sections separated by single blank lines; inference mode ends at the header.
std::string render_sandwich(const PromptSandwich& sandwich);

struct DecodeResult {
  std::vector<SdohEvent> events;
  std::vector<Finding> findings;
};

// Maps generated table text back onto the narrative. Trigger and span-only
// cells become spans via first case-insensitive occurrence, searching forward
// from the previous match in the row (with a fallback scan from the start);
// a trigger with no occurrence drops the row, a span-only phrase with no
// occurrence drops that cell. Labeled cells keep the value only.
DecodeResult parse_table(std::string_view generated, std::string_view narrative,
                         const std::string& event_type, const Schema& schema);

}  // namespace sdoh::codec

#endif
