#ifndef SDOH_PIPELINE_S1_HPP
#define SDOH_PIPELINE_S1_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sdoh/brat.hpp"
#include "sdoh/crf.hpp"
#include "sdoh/linear.hpp"
#include "sdoh/schema.hpp"
#include "sdoh/scorer.hpp"
#include "sdoh/textproc.hpp"

namespace sdoh::s1 {

// A document with its normalized gold events, the unit both pipelines train on.
struct TrainDocument {
  std::string doc_id;
  std::string text;
  std::vector<SdohEvent> events;
};

std::vector<TrainDocument> to_train_documents(
    const std::vector<brat::AnnotatedDocument>& docs, const Schema& schema,
    std::vector<Finding>* findings = nullptr);

// Sentence-level projection of document-level gold annotations.
struct SentenceExample {
  std::string doc_id;
  textproc::Sentence sentence;                    // document offsets
  std::vector<Target> positives;                  // classification targets
  std::map<Target, std::vector<std::size_t>> bio;  // 0=O 1=B 2=I per sequence target
};

struct ProjectResult {
  std::vector<SentenceExample> examples;
  std::vector<Finding> warnings;
};

// A sentence is positive for a trigger target when a gold trigger of that type
// overlaps it, and for a labeled-value target when an overlapping-trigger event
// carries that value. BIO rows mark gold spans clipped to the sentence;
// sentence-crossing spans generate a warning.
ProjectResult project_gold(const std::string& doc_id, const std::string& text,
                           const std::vector<SdohEvent>& events,
                           const Schema& schema);

struct S1Config {
  TrainConfig classifier;
  TrainConfig tagger;
};

// One multi-label sentence classifier plus one small CRF per sequence target
// (separate models because trigger and span-only phrases may overlap).
struct S1Model {
  Schema schema;
  std::vector<Target> sequence_targets;
  linear::MultiLabelModel classifier;
  std::vector<crf::CrfModel> taggers;  // aligned with sequence_targets

  // Bundle directory: manifest + classifier file + one tagger file per target.
  void save(const std::filesystem::path& dir) const;
  static S1Model load(const std::filesystem::path& dir);
};

S1Model train_s1(const std::vector<TrainDocument>& docs, const Schema& schema,
                 const S1Config& config);

// Per sentence and event type, at most one event. An event is reported when a
// trigger is predicted by either method or any argument is; the trigger span
// falls back to the sentence span when no tagger span exists.
std::vector<SdohEvent> predict_s1(const S1Model& model, const std::string& text);

score::EventCorpus predict_corpus_s1(const S1Model& model,
                                     const std::vector<brat::TextDocument>& texts);
score::EventCorpus predict_corpus_s1_serial(const S1Model& model,
                                            const std::vector<brat::TextDocument>& texts);

}  // namespace sdoh::s1

#endif
