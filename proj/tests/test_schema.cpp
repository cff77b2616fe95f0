#include <filesystem>

#include <doctest.h>

#include "sdoh/brat.hpp"
#include "sdoh/schema.hpp"

using namespace sdoh;

TEST_CASE("the default schema declares the five event types") {
  const Schema schema = default_schema();
  REQUIRE(schema.event_types.size() == 5);
  CHECK(schema.event_types[0].name == "Alcohol");
  CHECK(schema.event_types[1].name == "Drug");
  CHECK(schema.event_types[2].name == "Tobacco");
  CHECK(schema.event_types[3].name == "Employment");
  CHECK(schema.event_types[4].name == "LivingStatus");
}

TEST_CASE("substance status values are none, current, past") {
  const Schema schema = default_schema();
  const ArgumentDef* status = schema.find_event_type("Alcohol")->find_argument("Status");
  REQUIRE(status);
  CHECK(status->kind == ArgKind::Labeled);
  CHECK(status->values == std::vector<std::string>{"current", "none", "past"});
  CHECK(status->mandatory);
  CHECK(status->attribute_name == "StatusVal");
}

TEST_CASE("target enumeration over the default schema") {
  const TargetSets targets = enumerate_targets(default_schema());

  // 5 triggers + 3+3+3+6+(2+4) labeled values.
  CHECK(targets.classification.size() == 26);
  // 5 triggers + 5+6+6+3+2 span-only arguments.
  CHECK(targets.sequence.size() == 27);

  std::size_t trigger_count = 0;
  for (const auto& t : targets.classification)
    if (t.kind == TargetKind::Trigger) ++trigger_count;
  CHECK(trigger_count == 5);

  // Deterministic order across runs.
  const TargetSets again = enumerate_targets(default_schema());
  CHECK(again.classification == targets.classification);
  CHECK(again.sequence == targets.sequence);

  CHECK(enumerate_targets(Schema{}).classification.empty());
  CHECK(enumerate_targets(Schema{}).sequence.empty());
}

TEST_CASE("schema config errors are rejected") {
  CHECK_THROWS_AS(
      load_schema(R"({"event_types":[{"name":"X","arguments":[
        {"name":"Status","kind":"labeled","values":[]}]}]})"),
      SchemaError);
  CHECK_THROWS_AS(
      load_schema(R"({"event_types":[{"name":"X"},{"name":"X"}]})"), SchemaError);
  CHECK_THROWS_AS(load_schema("not json"), SchemaError);
}

TEST_CASE("schema JSON round-trips and the shipped default file matches") {
  const Schema schema = default_schema();
  CHECK(load_schema(schema_to_json(schema)) == schema);
  const auto path = std::filesystem::path(SDOH_DATA_DIR) / "default_schema.json";
  CHECK(load_schema_file(path) == schema);
}

TEST_CASE("normalize maps the standoff example to one event") {
  const auto doc = brat::parse_ann(
      "T1\tAlcohol 0 4\tEtOH\n"
      "T2\tStatus 5 11\tdenies\n"
      "E1\tAlcohol:T1 Status:T2\n"
      "A1\tStatusVal T2 none\n",
      {"d", "EtOH denies drinking."});
  const auto result = normalize_events(doc, default_schema());
  CHECK(result.findings.empty());
  REQUIRE(result.events.size() == 1);
  const SdohEvent& event = result.events[0];
  CHECK(event.event_type == "Alcohol");
  CHECK(event.trigger.span == Span{0, 4});
  CHECK(event.trigger.surface == "EtOH");
  REQUIRE(event.labeled.count("Status"));
  CHECK(event.labeled.at("Status").value == "none");
  CHECK(event.labeled.at("Status").evidence->span == Span{5, 11});
}

TEST_CASE("unknown roles are skipped with a finding") {
  const auto doc = brat::parse_ann(
      "T1\tAlcohol 0 4\tEtOH\n"
      "T2\tStatus 5 11\tdenies\n"
      "E1\tAlcohol:T1 Foo:T2\n",
      {"d", "EtOH denies drinking."});
  const auto result = normalize_events(doc, default_schema());
  REQUIRE(result.events.size() == 1);
  CHECK(result.events[0].labeled.empty());
  CHECK(result.events[0].span_only.empty());
  bool saw_unknown_role = false;
  for (const auto& f : result.findings)
    if (f.message.find("unknown role 'Foo'") != std::string::npos)
      saw_unknown_role = true;
  CHECK(saw_unknown_role);
}

TEST_CASE("two events of one type in a document both normalize") {
  const auto doc = brat::parse_ann(
      "T1\tTobacco 0 7\tTobacco\n"
      "T2\tTobacco 20 29\tcigarette\n"
      "E1\tTobacco:T1\n"
      "E2\tTobacco:T2\n",
      {"d", "Tobacco use daily.  cigarette pack hidden."});
  const auto result = normalize_events(doc, default_schema());
  CHECK(result.events.size() == 2);
}

TEST_CASE("labeled argument without its attribute is omitted with a finding") {
  const auto doc = brat::parse_ann(
      "T1\tAlcohol 0 4\tEtOH\n"
      "T2\tStatus 5 11\tdenies\n"
      "E1\tAlcohol:T1 Status:T2\n",
      {"d", "EtOH denies drinking."});
  const auto result = normalize_events(doc, default_schema());
  REQUIRE(result.events.size() == 1);
  CHECK(!result.events[0].labeled.count("Status"));
  CHECK(result.findings.size() >= 1);
}

TEST_CASE("unknown event types are skipped, not dropped silently") {
  const auto doc = brat::parse_ann(
      "T1\tHousing 0 4\tEtOH\nE1\tHousing:T1\n", {"d", "EtOH denies"});
  const auto result = normalize_events(doc, default_schema());
  CHECK(result.events.empty());
  REQUIRE(result.findings.size() == 1);
  CHECK(result.findings[0].severity == Severity::Error);
}


TEST_CASE("labeled values outside the schema are omitted with a finding") {
  const auto doc = brat::parse_ann(
      "T1\tAlcohol 0 4\tEtOH\n"
      "T2\tStatus 5 11\tdenies\n"
      "E1\tAlcohol:T1 Status:T2\n"
      "A1\tStatusVal T2 sometimes\n",
      {"d", "EtOH denies drinking."});
  const auto result = normalize_events(doc, default_schema());
  REQUIRE(result.events.size() == 1);
  CHECK(!result.events[0].labeled.count("Status"));
  bool saw = false;
  for (const auto& f : result.findings)
    if (f.message.find("sometimes") != std::string::npos) saw = true;
  CHECK(saw);
}

TEST_CASE("denormalize of an empty list is an empty document") {
  const auto doc = denormalize_events({}, "d", "some text", default_schema());
  CHECK(doc.text_bounds.empty());
  CHECK(doc.events.empty());
  CHECK(brat::serialize_ann(doc).empty());
}

TEST_CASE("one event round-trips through denormalize and normalize") {
  const std::string text = "EtOH denies drinking.";
  SdohEvent event;
  event.event_type = "Alcohol";
  event.trigger = {{0, 4}, "EtOH"};
  event.labeled["Status"] = {"none", Mention{{5, 11}, "denies"}};

  const auto doc = denormalize_events({event}, "d", text, default_schema());
  CHECK(brat::validate_document(doc).empty());
  const auto result = normalize_events(doc, default_schema());
  CHECK(result.findings.empty());
  REQUIRE(result.events.size() == 1);
  CHECK(result.events[0] == event);
}

TEST_CASE("repeated span-only roles use numeric suffixes and round-trip") {
  const std::string text = "quit in 2005 and again in 2019 smoking";
  SdohEvent event;
  event.event_type = "Tobacco";
  event.trigger = {{31, 38}, "smoking"};
  event.labeled["Status"] = {"past", Mention{{0, 4}, "quit"}};
  event.span_only["History"].push_back({{5, 12}, "in 2005"});
  event.span_only["History"].push_back({{23, 30}, "in 2019"});

  const auto doc = denormalize_events({event}, "d", text, default_schema());
  bool saw_history2 = false;
  for (const auto& [role, target] : doc.events[0].args) {
    (void)target;
    if (role == "History2") saw_history2 = true;
  }
  CHECK(saw_history2);

  // Round trip through the standoff text itself.
  const auto reparsed = brat::parse_ann(brat::serialize_ann(doc), doc.document);
  const auto result = normalize_events(reparsed, default_schema());
  CHECK(result.findings.empty());
  REQUIRE(result.events.size() == 1);
  CHECK(result.events[0] == event);
}

TEST_CASE("denormalize rejects spans outside the text") {
  SdohEvent event;
  event.event_type = "Alcohol";
  event.trigger = {{0, 50}, "way too long"};
  CHECK_THROWS_AS(denormalize_events({event}, "d", "short", default_schema()),
                  std::invalid_argument);
}

TEST_CASE("labeled argument without evidence gets the trigger span placeholder") {
  SdohEvent event;
  event.event_type = "Alcohol";
  event.trigger = {{0, 4}, "EtOH"};
  event.labeled["Status"] = {"none", std::nullopt};
  const auto doc = denormalize_events({event}, "d", "EtOH denies", default_schema());
  const auto result = normalize_events(doc, default_schema());
  REQUIRE(result.events.size() == 1);
  CHECK(result.events[0].labeled.at("Status").evidence->span == Span{0, 4});
}
