#ifndef SDOH_PIPELINE_S3_HPP
#define SDOH_PIPELINE_S3_HPP

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "sdoh/crf.hpp"
#include "sdoh/pipeline_s1.hpp"
#include "sdoh/schema.hpp"
#include "sdoh/scorer.hpp"

namespace sdoh::s3 {

using s1::TrainDocument;

// Typed trigger phrase or argument-candidate phrase from the joint detector.
struct PhraseCandidate {
  std::string category;  // event type name, or argument category (Status, ...)
  Mention mention;
  std::size_t sentence_index = 0;

  friend bool operator==(const PhraseCandidate&, const PhraseCandidate&) = default;
};

enum class Direction { Left, Right, Either };

// One linking rule: pattern predicates over the trigger and candidate
// surfaces plus a token-distance window, scoped to the sentence.
struct Rule {
  std::string id;
  std::string event_type;
  std::string arg_name;
  std::optional<std::string> value;            // labeled arguments only
  std::optional<std::string> trigger_pattern;  // sources kept for reporting
  std::string candidate_pattern;
  std::regex trigger_re;
  std::regex candidate_re;
  Direction direction = Direction::Either;
  std::size_t max_token_distance = 8;
};

struct RuleSet {
  std::vector<Rule> rules;  // file order = application priority
};

class RuleParseError : public std::runtime_error {
 public:
  RuleParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Line-oriented DSL: '#' comments, blank lines, and
//   RULE <id> event=<type> arg=<name> [value=<v>] [trig=/re/] cand=/re/
//        [dir=left|right|either] [dist=<n>]
// Patterns are slash-delimited; a leading (?i) makes them case-insensitive.
RuleSet parse_ruleset(std::string_view text, const Schema& schema);
RuleSet load_ruleset_file(const std::filesystem::path& path, const Schema& schema);

// Categories of the joint tagset: the event types, then the argument names in
// schema order.
std::vector<std::string> candidate_categories(const Schema& schema);

// Joint CRF over trigger and argument phrases. Overlapping gold phrases keep
// the higher-priority label (trigger, then labeled evidence, then span-only).
crf::CrfModel train_phrase_detector(const std::vector<TrainDocument>& docs,
                                    const Schema& schema, const TrainConfig& config);

std::vector<PhraseCandidate> detect_phrases(const crf::CrfModel& model,
                                            const std::string& text);

struct LinkOptions {
  bool emit_incomplete = false;  // keep events missing mandatory labeled args
};

struct LinkResult {
  std::vector<SdohEvent> events;
  std::vector<Finding> findings;
};

// Scans rules in priority order per trigger; a candidate links to at most one
// trigger (nearest wins, ties leftward) and is consumed by at most one rule.
LinkResult link_arguments(const std::vector<PhraseCandidate>& candidates,
                          const RuleSet& rules,
                          const std::vector<textproc::Sentence>& sentences,
                          const Schema& schema, const LinkOptions& options = {});

std::vector<SdohEvent> predict_s3(const crf::CrfModel& model, const RuleSet& rules,
                                  const std::string& text, const Schema& schema,
                                  const LinkOptions& options = {});

score::EventCorpus predict_corpus_s3(const crf::CrfModel& model, const RuleSet& rules,
                                     const std::vector<brat::TextDocument>& texts,
                                     const Schema& schema,
                                     const LinkOptions& options = {});
score::EventCorpus predict_corpus_s3_serial(
    const crf::CrfModel& model, const RuleSet& rules,
    const std::vector<brat::TextDocument>& texts, const Schema& schema,
    const LinkOptions& options = {});

}  // namespace sdoh::s3

#endif
