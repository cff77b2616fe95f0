#include <filesystem>

#include <doctest.h>

#include "sdoh/corpus.hpp"
#include "sdoh/pipeline_s1.hpp"
#include "sdoh/pipeline_s3.hpp"
#include "sdoh/scorer.hpp"
#include "sdoh/synth.hpp"

// The OpenMP kernels must be bit-identical to their serial references:
// per-document results merge in document order, and counts are integers.

using namespace sdoh;

namespace {

struct Fixture {
  Schema schema = default_schema();
  std::vector<brat::AnnotatedDocument> docs;
  std::vector<brat::TextDocument> texts;
  score::EventCorpus gold;

  explicit Fixture(std::size_t n_docs) {
    synth::GenConfig gen;
    gen.seed = 99;
    gen.n_documents = n_docs;
    docs = synth::generate_corpus(gen, schema);
    for (const auto& doc : docs) texts.push_back(doc.document);
    gold = corpus::normalize_corpus(docs, schema);
  }
};

}  // namespace

TEST_CASE("parallel scoring equals the serial reference") {
  const Fixture fx(60);

  // Perturb predictions so counting is not the identity case: drop every
  // third event and blank every fifth document.
  score::EventCorpus pred = fx.gold;
  std::size_t k = 0;
  for (auto& doc : pred) {
    if (++k % 5 == 0) {
      doc.events.clear();
      continue;
    }
    std::vector<SdohEvent> kept;
    for (std::size_t i = 0; i < doc.events.size(); ++i)
      if (i % 3 != 2) kept.push_back(doc.events[i]);
    doc.events = std::move(kept);
  }

  const auto serial = score::score_corpus_serial(fx.gold, pred, fx.schema);
  const auto parallel = score::score_corpus(fx.gold, pred, fx.schema);
  CHECK(serial == parallel);
  CHECK(score::to_tsv(serial) == score::to_tsv(parallel));
  CHECK(score::to_json(serial) == score::to_json(parallel));
}

TEST_CASE("parallel S1 prediction equals the serial reference") {
  const Fixture fx(30);
  const auto train_docs = s1::to_train_documents(
      {fx.docs.begin(), fx.docs.begin() + 25}, fx.schema);
  s1::S1Config config;
  config.classifier.epochs = 6;
  config.tagger.epochs = 4;
  const auto model = s1::train_s1(train_docs, fx.schema, config);

  const auto serial = s1::predict_corpus_s1_serial(model, fx.texts);
  const auto parallel = s1::predict_corpus_s1(model, fx.texts);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].doc_id == parallel[i].doc_id);
    CHECK(serial[i].events == parallel[i].events);
  }
}

TEST_CASE("parallel S3 prediction equals the serial reference") {
  const Fixture fx(30);
  const auto train_docs = s1::to_train_documents(
      {fx.docs.begin(), fx.docs.begin() + 25}, fx.schema);
  TrainConfig config;
  config.epochs = 6;
  const auto detector = s3::train_phrase_detector(train_docs, fx.schema, config);
  const auto rules = s3::load_ruleset_file(
      std::filesystem::path(SDOH_DATA_DIR) / "starter.rules", fx.schema);

  const auto serial =
      s3::predict_corpus_s3_serial(detector, rules, fx.texts, fx.schema);
  const auto parallel = s3::predict_corpus_s3(detector, rules, fx.texts, fx.schema);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i)
    CHECK(serial[i].events == parallel[i].events);
}
