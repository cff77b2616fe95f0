#ifndef SDOH_SCHEMA_HPP
#define SDOH_SCHEMA_HPP

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdoh/brat.hpp"
#include "sdoh/common.hpp"

namespace sdoh {

enum class ArgKind { Labeled, SpanOnly };

struct ArgumentDef {
  std::string name;
  ArgKind kind = ArgKind::SpanOnly;
  std::vector<std::string> values;  // labeled only, closed value set
  bool mandatory = false;
  std::string attribute_name;  // brat A-line name carrying the value (labeled only)

  friend bool operator==(const ArgumentDef&, const ArgumentDef&) = default;
};

struct EventTypeDef {
  std::string name;
  std::vector<ArgumentDef> arguments;

  const ArgumentDef* find_argument(std::string_view arg_name) const;

  friend bool operator==(const EventTypeDef&, const EventTypeDef&) = default;
};

// Declarative inventory of the SDOH event types. Drives target enumeration,
// scoring rows, table columns, and event validation everywhere.
struct Schema {
  std::string version;
  std::vector<EventTypeDef> event_types;

  const EventTypeDef* find_event_type(std::string_view name) const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The built-in five-type inventory: Alcohol, Drug, Tobacco, Employment,
// LivingStatus with their labeled value sets and span-only argument names.
Schema default_schema();

// Loads a schema from its JSON config form; throws SchemaError on duplicate
// names or a labeled argument without values.
Schema load_schema(const std::string& json_text);
Schema load_schema_file(const std::filesystem::path& path);

std::string schema_to_json(const Schema& schema);

// A normalized argument value with its (optional) evidence phrase.
struct LabeledArg {
  std::string value;
  std::optional<Mention> evidence;

  friend auto operator<=>(const LabeledArg&, const LabeledArg&) = default;
};

// Normalized event: everything the scorers and codecs consume.
struct SdohEvent {
  std::string event_type;
  Mention trigger;
  std::map<std::string, LabeledArg> labeled;
  std::map<std::string, std::vector<Mention>> span_only;

  friend auto operator<=>(const SdohEvent&, const SdohEvent&) = default;
};

enum class TargetKind { Trigger, LabeledValue, SpanOnly, Overall };

// One classification or sequence-labeling target derived from the schema.
struct Target {
  TargetKind kind = TargetKind::Trigger;
  std::string event_type;
  std::string arg_name;  // empty for Trigger/Overall
  std::string value;     // LabeledValue only

  // "event_type/argument/subtype" form used in reports and model manifests.
  std::string key() const;

  friend auto operator<=>(const Target&, const Target&) = default;
};

struct TargetSets {
  std::vector<Target> classification;  // triggers + labeled (arg, value) triples
  std::vector<Target> sequence;        // triggers + span-only args
};

// Pure function of the schema; output order is stable across runs.
TargetSets enumerate_targets(const Schema& schema);

struct NormalizeResult {
  std::vector<SdohEvent> events;
  std::vector<Finding> findings;
};

// Converts raw brat annotations into normalized events. Annotations that do
// not conform to the schema produce findings and are skipped, never dropped
// silently. The first fragment's extent defines every span.
NormalizeResult normalize_events(const brat::AnnotatedDocument& doc,
                                 const Schema& schema);

// Emits fresh T/E/A ids for a prediction so it can be written as standoff.
// Labeled arguments without an evidence span receive the trigger span as a
// placeholder. Throws std::invalid_argument on a span outside the text.
brat::AnnotatedDocument denormalize_events(const std::vector<SdohEvent>& events,
                                           const std::string& doc_id,
                                           const std::string& text,
                                           const Schema& schema);

}  // namespace sdoh

#endif
