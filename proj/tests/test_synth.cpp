#include <map>

#include <doctest.h>

#include "sdoh/corpus.hpp"
#include "sdoh/pipeline_s1.hpp"
#include "sdoh/scorer.hpp"
#include "sdoh/synth.hpp"

using namespace sdoh;

TEST_CASE("identical configs generate byte-identical corpora") {
  synth::GenConfig config;
  config.seed = 7;
  config.n_documents = 5;
  const Schema schema = default_schema();
  const auto a = synth::generate_corpus(config, schema);
  const auto b = synth::generate_corpus(config, schema);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].document.text == b[i].document.text);
    CHECK(brat::serialize_ann(a[i]) == brat::serialize_ann(b[i]));
  }

  synth::GenConfig other = config;
  other.seed = 8;
  const auto c = synth::generate_corpus(other, schema);
  CHECK(c[0].document.text != a[0].document.text);
}

TEST_CASE("every generated document validates and normalizes cleanly") {
  synth::GenConfig config;
  config.seed = 11;
  config.n_documents = 40;
  const Schema schema = default_schema();
  for (const auto& doc : synth::generate_corpus(config, schema)) {
    CHECK(brat::validate_document(doc).empty());
    const auto result = normalize_events(doc, schema);
    CHECK(result.findings.empty());
    CHECK(!result.events.empty());
  }
}

TEST_CASE("generated gold self-scores to one through the full path") {
  synth::GenConfig config;
  config.seed = 3;
  config.n_documents = 25;
  const Schema schema = default_schema();
  const auto docs = synth::generate_corpus(config, schema);

  // Serialize, reparse, normalize, score against itself.
  std::vector<brat::AnnotatedDocument> reparsed;
  for (const auto& doc : docs)
    reparsed.push_back(brat::parse_ann(brat::serialize_ann(doc), doc.document));
  const auto corpus = corpus::normalize_corpus(reparsed, schema);
  const auto report = score::score_corpus_serial(corpus, corpus, schema);
  CHECK(report.metrics.precision == 1.0);
  CHECK(report.metrics.recall == 1.0);
  CHECK(report.metrics.f1 == 1.0);
  CHECK(report.findings.empty());
}

TEST_CASE("a 200-document corpus covers every classification target") {
  synth::GenConfig config;
  config.seed = 7;
  config.n_documents = 200;
  const Schema schema = default_schema();
  const auto docs = synth::generate_corpus(config, schema);
  REQUIRE(docs.size() == 200);

  std::map<Target, std::size_t> positive_sentences;
  for (const auto& doc : docs) {
    const auto result = normalize_events(doc, schema);
    const auto projected = s1::project_gold(doc.document.doc_id, doc.document.text,
                                            result.events, schema);
    for (const auto& example : projected.examples)
      for (const Target& t : example.positives) positive_sentences[t] += 1;
  }

  for (const Target& t : enumerate_targets(schema).classification) {
    INFO("target ", t.key());
    CHECK(positive_sentences[t] >= 5);
  }
}

TEST_CASE("span-only coverage: every sequence target appears in the corpus") {
  synth::GenConfig config;
  config.seed = 7;
  config.n_documents = 60;
  const Schema schema = default_schema();
  std::map<std::string, std::size_t> span_counts;
  for (const auto& doc : synth::generate_corpus(config, schema))
    for (const auto& event : normalize_events(doc, schema).events)
      for (const auto& [arg, mentions] : event.span_only)
        span_counts[event.event_type + "/" + arg] += mentions.size();

  for (const auto& et : schema.event_types)
    for (const auto& arg : et.arguments)
      if (arg.kind == ArgKind::SpanOnly) {
        INFO(et.name, "/", arg.name);
        CHECK(span_counts[et.name + "/" + arg.name] > 0);
      }
}

TEST_CASE("distractor-free corpora are possible") {
  synth::GenConfig config;
  config.seed = 5;
  config.n_documents = 6;
  config.distractor_rate = 0.0;
  const Schema schema = default_schema();
  for (const auto& doc : synth::generate_corpus(config, schema)) {
    const auto result = normalize_events(doc, schema);
    // With no distractors every sentence carries an event.
    const auto sentences = textproc::split_sentences(doc.document.text);
    std::size_t header = doc.document.text.rfind("SOCIAL HISTORY:", 0) == 0 ? 1 : 0;
    CHECK(result.events.size() == sentences.size() - header);
  }
}
