#include "sdoh/synth.hpp"

#include <cstdio>
#include <stdexcept>

#include "sdoh/training.hpp"
#include "sdoh/utf8.hpp"

namespace sdoh::synth {

namespace {

enum class Role { Plain, Trigger, Labeled, SpanOnly };

struct Piece {
  std::vector<std::string> alts;
  Role role = Role::Plain;
  std::string arg;    // Labeled/SpanOnly
  std::string value;  // Labeled
};

struct Template {
  std::string event_type;
  std::vector<Piece> pieces;
};

Piece plain(std::vector<std::string> alts) { return {std::move(alts), Role::Plain, "", ""}; }
Piece trig(std::vector<std::string> alts) { return {std::move(alts), Role::Trigger, "", ""}; }
Piece lab(std::string arg, std::string value, std::vector<std::string> alts) {
  return {std::move(alts), Role::Labeled, std::move(arg), std::move(value)};
}
Piece span(std::string arg, std::vector<std::string> alts) {
  return {std::move(alts), Role::SpanOnly, std::move(arg), ""};
}

std::vector<Template> templates_v1() {
  std::vector<Template> ts;

  // Alcohol
  ts.push_back({"Alcohol",
                {lab("Status", "none", {"Denies", "Denies any", "No"}), plain({" "}),
                 trig({"ETOH", "EtOH", "alcohol"}), plain({" use.", " intake.", "."})}});
  ts.push_back({"Alcohol",
                {trig({"ETOH", "Alcohol"}), plain({": "}),
                 lab("Status", "current", {"drinks", "currently drinks"}), plain({" "}),
                 span("Amount", {"2-3 beers", "a six pack", "4 glasses of wine", "1-2 drinks"}),
                 plain({" "}),
                 span("Frequency", {"nightly", "most nights", "on weekends", "every Friday"}),
                 plain({"."})}});
  ts.push_back({"Alcohol",
                {lab("Status", "current", {"Currently", "Actively"}), plain({" uses "}),
                 trig({"EtOH", "ETOH"}), plain({", mostly "}),
                 span("Type", {"wine", "beer", "whiskey", "vodka"}), plain({", "}),
                 span("Frequency", {"socially", "on weekends"}), plain({"."})}});
  ts.push_back({"Alcohol",
                {lab("Status", "past", {"Quit", "Stopped"}), plain({" drinking "}),
                 trig({"alcohol", "ETOH"}), plain({" "}),
                 span("History", {"7 years ago", "in 2010", "last year", "10 years ago"}),
                 plain({"."})}});
  ts.push_back({"Alcohol",
                {lab("Status", "past", {"Former", "Prior"}), plain({" heavy "}),
                 trig({"alcohol", "ETOH"}), plain({" use "}),
                 span("Duration", {"for eight years", "for a decade", "for 15 years"}),
                 plain({"."})}});

  // Drug
  ts.push_back({"Drug",
                {lab("Status", "none", {"Denies", "No"}), plain({" "}),
                 trig({"IVDU", "illicit drug use", "recreational drugs"}), plain({"."})}});
  ts.push_back({"Drug",
                {trig({"Drug use", "Drugs"}), plain({": "}),
                 lab("Status", "current", {"currently", "actively"}), plain({" "}),
                 span("Method", {"smokes", "injects", "snorts"}), plain({" "}),
                 span("Type", {"heroin", "cocaine", "marijuana", "methamphetamine"}),
                 plain({"."})}});
  ts.push_back({"Drug",
                {lab("Status", "past", {"Quit", "Stopped using"}), plain({" "}),
                 trig({"drugs", "IVDU"}), plain({" "}),
                 span("History", {"5 years ago", "in 2018", "two years ago"}), plain({"."})}});
  ts.push_back({"Drug",
                {trig({"IVDU"}), plain({": "}),
                 lab("Status", "current", {"active", "ongoing"}), plain({", about "}),
                 span("Amount", {"1 gram", "2 bags", "3 pills"}), plain({" "}),
                 span("Frequency", {"daily", "weekly", "twice a week"}), plain({"."})}});
  ts.push_back({"Drug",
                {trig({"Drug use", "Substance use"}), plain({": "}),
                 lab("Status", "past", {"in remission", "quit"}), plain({", used "}),
                 span("Duration", {"for six years", "for a decade"}), plain({"."})}});

  // Tobacco
  ts.push_back({"Tobacco",
                {lab("Status", "none", {"Denies", "Never used"}), plain({" "}),
                 trig({"tobacco", "cigarettes"}), plain({".", " products."})}});
  ts.push_back({"Tobacco",
                {trig({"Tobacco", "Cigarettes"}), plain({": "}),
                 lab("Status", "current", {"currently"}), plain({" "}),
                 span("Method", {"smokes", "vapes"}), plain({" "}),
                 span("Amount", {"1 ppd", "2 ppd", "half a pack"}), plain({"."})}});
  ts.push_back({"Tobacco",
                {lab("Status", "past", {"Quit"}), plain({" "}),
                 trig({"smoking", "cigarettes", "tobacco"}), plain({" "}),
                 span("History", {"in 2005", "10 years ago", "last spring"}), plain({"."})}});
  ts.push_back({"Tobacco",
                {lab("Status", "past", {"Former", "Prior"}), plain({" "}),
                 trig({"smoker"}), plain({", "}), span("Amount", {"1 ppd", "2 ppd"}),
                 plain({" "}), span("Duration", {"for 20 years", "for 30 years"}),
                 plain({"."})}});
  ts.push_back({"Tobacco",
                {trig({"Tobacco"}), plain({": "}),
                 lab("Status", "current", {"uses", "currently uses"}), plain({" "}),
                 span("Type", {"cigars", "chewing tobacco", "menthols"}), plain({" "}),
                 span("Frequency", {"daily", "occasionally"}), plain({"."})}});

  // Employment
  ts.push_back({"Employment",
                {trig({"Employment", "Work"}), plain({": "}),
                 lab("Status", "employed", {"works", "working"}), plain({" as a "}),
                 span("Type", {"nurse", "teacher", "welder", "cashier", "mechanic"}),
                 plain({"."})}});
  ts.push_back({"Employment",
                {trig({"Employment", "Work history"}), plain({": "}),
                 lab("Status", "retired", {"retired"}), plain({" "}),
                 span("Type", {"nurse", "machinist", "teacher"}), plain({"."})}});
  ts.push_back({"Employment",
                {trig({"Employment"}), plain({": "}),
                 lab("Status", "unemployed", {"unemployed", "currently unemployed"}),
                 plain({"."})}});
  ts.push_back({"Employment",
                {trig({"Employment"}), plain({": "}),
                 lab("Status", "on_disability", {"on disability"}), plain({" "}),
                 span("History", {"since 2019", "since last year"}), plain({"."})}});
  ts.push_back({"Employment",
                {trig({"Employment", "Work"}), plain({": "}),
                 lab("Status", "student", {"student", "full-time student"}),
                 plain({" at the local college.", "."})}});
  ts.push_back({"Employment",
                {trig({"Employment"}), plain({": "}),
                 lab("Status", "homemaker", {"homemaker", "stay-at-home parent"}),
                 plain({"."})}});
  ts.push_back({"Employment",
                {lab("Status", "employed", {"Works", "Employed"}), plain({" as a "}),
                 span("Type", {"plumber", "clerk", "driver"}), plain({" "}),
                 span("Duration", {"for 15 years", "for two decades"}), plain({" per "}),
                 trig({"employment", "work"}), plain({" history."})}});

  // LivingStatus
  ts.push_back({"LivingStatus",
                {lab("Status", "current", {"Currently"}), plain({" "}),
                 trig({"lives", "living"}), plain({" "}),
                 lab("Type", "alone", {"alone", "by himself", "by herself"}), plain({"."})}});
  ts.push_back({"LivingStatus",
                {lab("Status", "current", {"Currently"}), plain({" "}), trig({"lives"}),
                 plain({" "}),
                 lab("Type", "with_family",
                     {"with family", "with his wife", "with her husband", "with parents"}),
                 plain({"."})}});
  ts.push_back({"LivingStatus",
                {lab("Status", "current", {"Currently"}), plain({" "}),
                 trig({"lives", "living"}), plain({" "}),
                 lab("Type", "with_others",
                     {"with a roommate", "with friends", "with roommates"}),
                 plain({"."})}});
  ts.push_back({"LivingStatus",
                {lab("Status", "current", {"Currently"}), plain({" "}),
                 trig({"living", "lives"}), plain({" "}),
                 lab("Type", "homeless", {"in a shelter", "on the streets", "homeless"}),
                 plain({"."})}});
  ts.push_back({"LivingStatus",
                {lab("Status", "past", {"Previously", "Formerly"}), plain({" "}),
                 trig({"lived"}), plain({" "}),
                 lab("Type", "with_family", {"with family", "with his parents"}),
                 plain({" "}), span("History", {"until last year", "until 2020"}),
                 plain({"."})}});
  ts.push_back({"LivingStatus",
                {lab("Status", "current", {"Currently"}), plain({" "}), trig({"lives"}),
                 plain({" "}), lab("Type", "alone", {"alone"}), plain({" "}),
                 span("Duration", {"for 3 years", "for the past decade"}), plain({"."})}});

  return ts;
}

const std::vector<std::string>& distractors() {
  static const std::vector<std::string> kDistractors = {
      "No acute distress.",
      "Vitals stable.",
      "Denies chest pain.",
      "Family history of diabetes.",
      "Takes lisinopril each morning.",
      "Reviewed home medications.",
      "Follow up in 2 weeks.",
      "Sleeps 7 hours.",
      "Appetite good.",
      "Exercises twice a week.",
  };
  return kDistractors;
}

struct BuiltSentence {
  std::string text;
  std::vector<SdohEvent> events;  // spans local to text
};

BuiltSentence build_from_template(const Template& tmpl, Rng& rng) {
  BuiltSentence out;
  SdohEvent event;
  event.event_type = tmpl.event_type;
  bool has_trigger = false;

  for (const Piece& piece : tmpl.pieces) {
    const std::string& chosen = piece.alts[rng.below(piece.alts.size())];
    const std::size_t start = utf8::length(out.text);
    const Span span{start, start + utf8::length(chosen)};
    switch (piece.role) {
      case Role::Plain:
        break;
      case Role::Trigger:
        event.trigger = {span, chosen};
        has_trigger = true;
        break;
      case Role::Labeled:
        event.labeled[piece.arg] = LabeledArg{piece.value, Mention{span, chosen}};
        break;
      case Role::SpanOnly:
        event.span_only[piece.arg].push_back({span, chosen});
        break;
    }
    out.text += chosen;
  }

  if (!has_trigger)
    throw std::logic_error("synth template for " + tmpl.event_type + " has no trigger");
  out.events.push_back(std::move(event));
  return out;
}

void shift_event(SdohEvent& event, std::size_t offset) {
  event.trigger.span.start += offset;
  event.trigger.span.end += offset;
  for (auto& [name, arg] : event.labeled) {
    (void)name;
    if (arg.evidence) {
      arg.evidence->span.start += offset;
      arg.evidence->span.end += offset;
    }
  }
  for (auto& [name, mentions] : event.span_only) {
    (void)name;
    for (auto& m : mentions) {
      m.span.start += offset;
      m.span.end += offset;
    }
  }
}

}  // namespace

std::vector<brat::AnnotatedDocument> generate_corpus(const GenConfig& config,
                                                     const Schema& schema) {
  if (config.n_documents < 1)
    throw std::invalid_argument("generate_corpus: n_documents must be >= 1");
  if (config.template_version != "v1")
    throw std::invalid_argument("generate_corpus: unknown template inventory '" +
                                config.template_version + "'");
  const auto templates = templates_v1();
  for (const auto& tmpl : templates)
    if (!schema.find_event_type(tmpl.event_type))
      throw std::invalid_argument("generate_corpus: schema lacks event type " +
                                  tmpl.event_type);

  std::vector<brat::AnnotatedDocument> corpus;
  corpus.reserve(config.n_documents);

  for (std::size_t di = 0; di < config.n_documents; ++di) {
    Rng rng(mix64(config.seed) + di);

    std::vector<BuiltSentence> sentences;
    const std::size_t n_events = 1 + rng.below(5);
    for (std::size_t k = 0; k < n_events; ++k) {
      // The first event sentence cycles the inventory for guaranteed coverage.
      const std::size_t ti =
          k == 0 ? di % templates.size() : rng.below(templates.size());
      sentences.push_back(build_from_template(templates[ti], rng));
      if (sentences.size() < 8 && rng.uniform() < config.distractor_rate)
        sentences.push_back({distractors()[rng.below(distractors().size())], {}});
    }

    auto order = index_range(sentences.size());
    shuffle_indices(order, rng);

    std::string text;
    std::vector<SdohEvent> events;
    if (rng.below(4) == 0) text += "SOCIAL HISTORY:\n";
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k > 0) text += rng.below(10) < 7 ? "\n" : " ";
      const std::size_t offset = utf8::length(text);
      BuiltSentence& s = sentences[order[k]];
      text += s.text;
      for (SdohEvent& event : s.events) {
        shift_event(event, offset);
        events.push_back(std::move(event));
      }
    }
    text += "\n";

    char doc_id[32];
    std::snprintf(doc_id, sizeof(doc_id), "synth-%04zu", di);
    corpus.push_back(denormalize_events(events, doc_id, text, schema));
  }

  return corpus;
}

}  // namespace sdoh::synth
