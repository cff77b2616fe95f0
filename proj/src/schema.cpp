#include "sdoh/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sdoh/utf8.hpp"

namespace sdoh {

namespace {

ArgumentDef labeled(std::string name, std::vector<std::string> values) {
  ArgumentDef def;
  def.name = name;
  def.kind = ArgKind::Labeled;
  def.values = std::move(values);
  def.mandatory = true;
  def.attribute_name = name + "Val";
  return def;
}

ArgumentDef span_only(std::string name) {
  ArgumentDef def;
  def.name = std::move(name);
  def.kind = ArgKind::SpanOnly;
  return def;
}

void check_schema(const Schema& schema) {
  std::set<std::string> type_names;
  for (const auto& et : schema.event_types) {
    if (et.name.empty()) throw SchemaError("event type with empty name");
    if (!type_names.insert(et.name).second)
      throw SchemaError("duplicate event type '" + et.name + "'");
    std::set<std::string> arg_names;
    for (const auto& arg : et.arguments) {
      if (arg.name.empty())
        throw SchemaError(et.name + ": argument with empty name");
      if (!arg_names.insert(arg.name).second)
        throw SchemaError(et.name + ": duplicate argument '" + arg.name + "'");
      if (arg.kind == ArgKind::Labeled) {
        if (arg.values.empty())
          throw SchemaError(et.name + "/" + arg.name +
                            ": labeled argument needs a value set");
        std::set<std::string> vals(arg.values.begin(), arg.values.end());
        if (vals.size() != arg.values.size())
          throw SchemaError(et.name + "/" + arg.name + ": duplicate value");
      } else if (!arg.values.empty()) {
        throw SchemaError(et.name + "/" + arg.name +
                          ": span-only argument cannot list values");
      }
    }
  }
}

// Role names repeat with a numeric suffix when an argument occurs more than
// once in one event (History, History2, ...).
std::string strip_role_suffix(std::string_view role) {
  std::size_t end = role.size();
  while (end > 1 && role[end - 1] >= '0' && role[end - 1] <= '9') --end;
  return std::string(role.substr(0, end));
}

}  // namespace

const ArgumentDef* EventTypeDef::find_argument(std::string_view arg_name) const {
  for (const auto& arg : arguments)
    if (arg.name == arg_name) return &arg;
  return nullptr;
}

const EventTypeDef* Schema::find_event_type(std::string_view name) const {
  for (const auto& et : event_types)
    if (et.name == name) return &et;
  return nullptr;
}

Schema default_schema() {
  Schema schema;
  schema.version = "sdoh-default-v1";

  for (const char* substance : {"Alcohol", "Drug", "Tobacco"}) {
    EventTypeDef et;
    et.name = substance;
    et.arguments.push_back(labeled("Status", {"current", "none", "past"}));
    et.arguments.push_back(span_only("Amount"));
    et.arguments.push_back(span_only("Duration"));
    et.arguments.push_back(span_only("Frequency"));
    et.arguments.push_back(span_only("History"));
    if (et.name != "Alcohol") et.arguments.push_back(span_only("Method"));
    et.arguments.push_back(span_only("Type"));
    schema.event_types.push_back(std::move(et));
  }

  EventTypeDef employment;
  employment.name = "Employment";
  employment.arguments.push_back(labeled(
      "Status", {"employed", "homemaker", "on_disability", "retired", "student",
                 "unemployed"}));
  employment.arguments.push_back(span_only("Duration"));
  employment.arguments.push_back(span_only("History"));
  employment.arguments.push_back(span_only("Type"));
  schema.event_types.push_back(std::move(employment));

  EventTypeDef living;
  living.name = "LivingStatus";
  living.arguments.push_back(labeled("Status", {"current", "past"}));
  living.arguments.push_back(
      labeled("Type", {"alone", "homeless", "with_family", "with_others"}));
  living.arguments.push_back(span_only("Duration"));
  living.arguments.push_back(span_only("History"));
  schema.event_types.push_back(std::move(living));

  check_schema(schema);
  return schema;
}

Schema load_schema(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema config is not valid JSON: ") + e.what());
  }

  Schema schema;
  try {
    schema.version = j.value("version", "custom");
    for (const auto& jet : j.at("event_types")) {
      EventTypeDef et;
      et.name = jet.at("name").get<std::string>();
      for (const auto& jarg : jet.value("arguments", nlohmann::json::array())) {
        ArgumentDef arg;
        arg.name = jarg.at("name").get<std::string>();
        const std::string kind = jarg.value("kind", "span_only");
        if (kind == "labeled")
          arg.kind = ArgKind::Labeled;
        else if (kind == "span_only")
          arg.kind = ArgKind::SpanOnly;
        else
          throw SchemaError(et.name + "/" + arg.name + ": unknown kind '" + kind + "'");
        if (jarg.contains("values"))
          arg.values = jarg["values"].get<std::vector<std::string>>();
        arg.mandatory = jarg.value("mandatory", arg.kind == ArgKind::Labeled);
        if (arg.kind == ArgKind::Labeled)
          arg.attribute_name = jarg.value("attribute_name", arg.name + "Val");
        et.arguments.push_back(std::move(arg));
      }
      schema.event_types.push_back(std::move(et));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema config: ") + e.what());
  }

  check_schema(schema);
  return schema;
}

Schema load_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_schema(buf.str());
}

std::string schema_to_json(const Schema& schema) {
  nlohmann::json j;
  j["version"] = schema.version;
  j["event_types"] = nlohmann::json::array();
  for (const auto& et : schema.event_types) {
    nlohmann::json jet;
    jet["name"] = et.name;
    jet["arguments"] = nlohmann::json::array();
    for (const auto& arg : et.arguments) {
      nlohmann::json jarg;
      jarg["name"] = arg.name;
      jarg["kind"] = arg.kind == ArgKind::Labeled ? "labeled" : "span_only";
      if (arg.kind == ArgKind::Labeled) {
        jarg["values"] = arg.values;
        jarg["mandatory"] = arg.mandatory;
        jarg["attribute_name"] = arg.attribute_name;
      }
      jet["arguments"].push_back(std::move(jarg));
    }
    j["event_types"].push_back(std::move(jet));
  }
  return j.dump(2) + "\n";
}

std::string Target::key() const {
  switch (kind) {
    case TargetKind::Trigger:
      return event_type + "/Trigger/N/A";
    case TargetKind::LabeledValue:
      return event_type + "/" + arg_name + "/" + value;
    case TargetKind::SpanOnly:
      return event_type + "/" + arg_name + "/N/A";
    case TargetKind::Overall:
      return "OVERALL/-/-";
  }
  return {};
}

TargetSets enumerate_targets(const Schema& schema) {
  TargetSets out;
  for (const auto& et : schema.event_types) {
    out.classification.push_back({TargetKind::Trigger, et.name, "", ""});
    out.sequence.push_back({TargetKind::Trigger, et.name, "", ""});
  }
  for (const auto& et : schema.event_types)
    for (const auto& arg : et.arguments)
      if (arg.kind == ArgKind::Labeled)
        for (const auto& value : arg.values)
          out.classification.push_back(
              {TargetKind::LabeledValue, et.name, arg.name, value});
  for (const auto& et : schema.event_types)
    for (const auto& arg : et.arguments)
      if (arg.kind == ArgKind::SpanOnly)
        out.sequence.push_back({TargetKind::SpanOnly, et.name, arg.name, ""});
  return out;
}

NormalizeResult normalize_events(const brat::AnnotatedDocument& doc,
                                 const Schema& schema) {
  NormalizeResult out;
  const std::string& text = doc.document.text;

  const auto mention_of = [&](const brat::TextBound& tb) {
    const Span span = tb.fragments.front();
    return Mention{span, utf8::slice(text, span.start, span.end)};
  };

  // Attribute lookup by (name, target).
  std::map<std::pair<std::string_view, std::string_view>, const brat::AttributeAnnotation*>
      attrs;
  for (const auto& at : doc.attributes)
    attrs.emplace(std::make_pair(std::string_view(at.name), std::string_view(at.target)),
                  &at);

  for (const auto& ev : doc.events) {
    const EventTypeDef* et = schema.find_event_type(ev.event_type);
    if (!et) {
      out.findings.push_back({Severity::Error, ev.id,
                              "unknown event type '" + ev.event_type + "'; event skipped"});
      continue;
    }
    const brat::TextBound* trigger_tb = doc.find_text_bound(ev.trigger_ref);
    if (!trigger_tb || trigger_tb->fragments.empty()) {
      out.findings.push_back(
          {Severity::Error, ev.id, "trigger does not resolve; event skipped"});
      continue;
    }

    SdohEvent event;
    event.event_type = ev.event_type;
    event.trigger = mention_of(*trigger_tb);

    for (const auto& [role, target] : ev.args) {
      const ArgumentDef* def = et->find_argument(role);
      if (!def) def = et->find_argument(strip_role_suffix(role));
      if (!def) {
        out.findings.push_back({Severity::Warning, ev.id,
                                "unknown role '" + role + "'; argument skipped"});
        continue;
      }
      const brat::TextBound* tb = doc.find_text_bound(target);
      if (!tb || tb->fragments.empty()) {
        out.findings.push_back({Severity::Error, ev.id,
                                "argument " + target + " does not resolve; skipped"});
        continue;
      }
      if (def->kind == ArgKind::SpanOnly) {
        event.span_only[def->name].push_back(mention_of(*tb));
        continue;
      }
      const auto it = attrs.find({std::string_view(def->attribute_name),
                                  std::string_view(tb->id)});
      if (it == attrs.end()) {
        out.findings.push_back(
            {Severity::Warning, ev.id,
             "no attribute '" + def->attribute_name + "' on " + tb->id +
                 "; labeled argument " + def->name + " omitted"});
        continue;
      }
      const std::string& value = it->second->value;
      if (std::find(def->values.begin(), def->values.end(), value) ==
          def->values.end()) {
        out.findings.push_back({Severity::Warning, ev.id,
                                "value '" + value + "' not in the schema for " +
                                    ev.event_type + "/" + def->name + "; omitted"});
        continue;
      }
      if (event.labeled.count(def->name)) {
        out.findings.push_back({Severity::Warning, ev.id,
                                "repeated labeled argument " + def->name +
                                    "; first occurrence kept"});
        continue;
      }
      event.labeled[def->name] = LabeledArg{value, mention_of(*tb)};
    }

    for (const auto& arg : et->arguments)
      if (arg.kind == ArgKind::Labeled && arg.mandatory &&
          !event.labeled.count(arg.name))
        out.findings.push_back({Severity::Warning, ev.id,
                                "mandatory labeled argument " + arg.name +
                                    " missing"});

    out.events.push_back(std::move(event));
  }
  return out;
}

brat::AnnotatedDocument denormalize_events(const std::vector<SdohEvent>& events,
                                           const std::string& doc_id,
                                           const std::string& text,
                                           const Schema& schema) {
  brat::AnnotatedDocument doc;
  doc.document = {doc_id, text};
  const std::size_t text_len = utf8::length(text);

  std::size_t next_t = 1, next_e = 1, next_a = 1;
  const auto add_text_bound = [&](const std::string& label, Span span,
                                  std::string_view context) {
    if (span.start >= span.end || span.end > text_len)
      throw std::invalid_argument("denormalize_events: span [" +
                                  std::to_string(span.start) + "," +
                                  std::to_string(span.end) + ") of " +
                                  std::string(context) + " is outside the text");
    brat::TextBound tb;
    tb.id = "T" + std::to_string(next_t++);
    tb.label = label;
    tb.fragments = {span};
    tb.surface = utf8::slice(text, span.start, span.end);
    doc.text_bounds.push_back(std::move(tb));
    return doc.text_bounds.back().id;
  };

  for (const auto& event : events) {
    const EventTypeDef* et = schema.find_event_type(event.event_type);
    if (!et)
      throw std::invalid_argument("denormalize_events: unknown event type '" +
                                  event.event_type + "'");

    brat::EventAnnotation ev;
    ev.id = "E" + std::to_string(next_e++);
    ev.event_type = event.event_type;
    ev.trigger_ref = add_text_bound(event.event_type, event.trigger.span,
                                    event.event_type + " trigger");

    for (const auto& arg : et->arguments) {
      if (arg.kind == ArgKind::Labeled) {
        const auto it = event.labeled.find(arg.name);
        if (it == event.labeled.end()) continue;
        const Span span =
            it->second.evidence ? it->second.evidence->span : event.trigger.span;
        const std::string tid = add_text_bound(arg.name, span, arg.name);
        ev.args.emplace_back(arg.name, tid);
        brat::AttributeAnnotation at;
        at.id = "A" + std::to_string(next_a++);
        at.name = arg.attribute_name;
        at.target = tid;
        at.value = it->second.value;
        doc.attributes.push_back(std::move(at));
      } else {
        const auto it = event.span_only.find(arg.name);
        if (it == event.span_only.end()) continue;
        std::size_t occurrence = 0;
        for (const auto& mention : it->second) {
          ++occurrence;
          const std::string role =
              occurrence == 1 ? arg.name : arg.name + std::to_string(occurrence);
          ev.args.emplace_back(role, add_text_bound(arg.name, mention.span, arg.name));
        }
      }
    }
    doc.events.push_back(std::move(ev));
  }

  doc.reindex();
  return doc;
}

}  // namespace sdoh
