#ifndef SDOH_SCORER_HPP
#define SDOH_SCORER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sdoh/schema.hpp"

namespace sdoh::score {

struct CountRow {
  Target target;
  long positives = 0;
  long true_positives = 0;
  long predicted_positives = 0;

  friend bool operator==(const CountRow&, const CountRow&) = default;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const Prf&, const Prf&) = default;
};

// precision = tp/pp, recall = tp/positives, f1 = harmonic mean; a zero
// denominator yields 0.0 for that quantity. Throws std::invalid_argument when
// tp exceeds either denominator.
Prf prf1(long tp, long pp, long positives);

struct ScoreReport {
  std::vector<CountRow> rows;  // one per target, schema (table) order
  CountRow overall;            // column sums of rows
  Prf metrics;                 // micro metrics from the overall row
  std::vector<Finding> findings;

  friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

// One-to-one trigger-overlap pairing, per event type, chosen greedily in
// ascending (gold trigger start, predicted trigger start) order.
struct EventAlignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (gold, pred) indices
};

EventAlignment align_events(const std::vector<SdohEvent>& gold,
                            const std::vector<SdohEvent>& pred);

struct DocEvents {
  std::string doc_id;
  std::vector<SdohEvent> events;
};

using EventCorpus = std::vector<DocEvents>;

// Counts triggers, labeled-argument values, and span-only argument spans
// separately per target and micro-aggregates. Documents are matched by id;
// labeled arguments are scored by value only. Per-document counts merge
// associatively, so the parallel kernel is bit-identical to the serial one.
ScoreReport score_corpus(const EventCorpus& gold, const EventCorpus& pred,
                         const Schema& schema);

// Plain sequential reference used to cross-check the parallel kernel.
ScoreReport score_corpus_serial(const EventCorpus& gold, const EventCorpus& pred,
                                const Schema& schema);

// Report rows in table layout: per event type a Trigger row, then one row per
// labeled value and one per span-only argument, in schema order.
std::vector<Target> report_targets(const Schema& schema);

// Tab-separated table (SDOH type, argument, subtype, Positives, True
// Positives, Predicted Positives) plus a summary line; byte-stable.
std::string to_tsv(const ScoreReport& report);

// JSON document with rows keyed "event_type/argument/subtype".
std::string to_json(const ScoreReport& report);

}  // namespace sdoh::score

#endif
