#include <doctest.h>

#include "sdoh/scorer.hpp"
#include "sdoh/training.hpp"

using namespace sdoh;
using namespace sdoh::score;

namespace {

SdohEvent make_event(const std::string& type, Span trigger,
                     const std::string& status = "") {
  SdohEvent e;
  e.event_type = type;
  e.trigger = {trigger, "t"};
  if (!status.empty()) e.labeled["Status"] = {status, std::nullopt};
  return e;
}

const CountRow& row_for(const ScoreReport& report, const Target& target) {
  for (const auto& row : report.rows)
    if (row.target == target) return row;
  REQUIRE(false);
  return report.overall;
}

// Small random event corpora for the scorer property tests.
EventCorpus random_corpus(Rng& rng, std::size_t n_docs) {
  const char* types[] = {"Alcohol", "Tobacco", "LivingStatus"};
  const char* statuses[] = {"current", "none", "past"};
  EventCorpus corpus;
  for (std::size_t d = 0; d < n_docs; ++d) {
    DocEvents doc;
    doc.doc_id = "doc-" + std::to_string(d);
    const std::size_t n_events = rng.below(5);
    for (std::size_t i = 0; i < n_events; ++i) {
      const std::string type = types[rng.below(2)];
      const std::size_t a = rng.below(30);
      SdohEvent e = make_event(type, {a, a + 1 + rng.below(6)});
      if (type != "LivingStatus" && rng.below(3) > 0)
        e.labeled["Status"] = {statuses[rng.below(3)], std::nullopt};
      if (rng.below(3) == 0) {
        const std::size_t b = rng.below(30);
        e.span_only["Amount"].push_back({{b, b + 1 + rng.below(4)}, "x"});
      }
      if (rng.below(4) == 0) {
        const std::size_t b = rng.below(30);
        e.span_only["Amount"].push_back({{b, b + 1 + rng.below(4)}, "y"});
      }
      doc.events.push_back(std::move(e));
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace

TEST_CASE("prf1 reproduces the published metric arithmetic") {
  // System 1: (TP, PP, positives) = (3070, 3472, 3471)
  Prf p = prf1(3070, 3472, 3471);
  CHECK(std::abs(p.precision - 0.8842) < 5e-4);
  CHECK(std::abs(p.recall - 0.8845) < 5e-4);
  CHECK(std::abs(p.f1 - 0.8843) < 5e-4);

  p = prf1(2776, 3210, 3471);
  CHECK(std::abs(p.precision - 0.8648) < 5e-4);
  CHECK(std::abs(p.recall - 0.7998) < 5e-4);
  CHECK(std::abs(p.f1 - 0.8310) < 5e-4);

  p = prf1(2157, 3032, 3471);
  CHECK(std::abs(p.precision - 0.7114) < 5e-4);
  CHECK(std::abs(p.recall - 0.6214) < 5e-4);
  CHECK(std::abs(p.f1 - 0.6634) < 5e-4);

  CHECK(std::abs(prf1(18376, 23261, 24577).precision - 0.7900) < 5e-4);
}

TEST_CASE("prf1 zero denominators yield zero, and contracts hold") {
  const Prf z = prf1(0, 0, 0);
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);
  CHECK(prf1(0, 5, 0).precision == 0.0);
  CHECK_THROWS_AS(prf1(3, 2, 5), std::invalid_argument);
  CHECK_THROWS_AS(prf1(3, 5, 2), std::invalid_argument);
}

TEST_CASE("identical corpora align completely") {
  std::vector<SdohEvent> gold{make_event("Alcohol", {0, 5}),
                              make_event("Tobacco", {10, 14})};
  const auto alignment = align_events(gold, gold);
  CHECK(alignment.pairs.size() == 2);
}

TEST_CASE("disjoint triggers never align") {
  const auto alignment = align_events({make_event("Alcohol", {0, 5})},
                                      {make_event("Alcohol", {10, 15})});
  CHECK(alignment.pairs.empty());
}

TEST_CASE("greedy alignment prefers the earlier predicted start") {
  // One gold (0,10); predictions (0,3) and (4,10): exactly one pair, with
  // (0,3) chosen by the ascending-start rule.
  const auto alignment =
      align_events({make_event("Alcohol", {0, 10})},
                    {make_event("Alcohol", {0, 3}), make_event("Alcohol", {4, 10})});
  REQUIRE(alignment.pairs.size() == 1);
  CHECK(alignment.pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
}

TEST_CASE("different event types never align") {
  const auto alignment =
      align_events({make_event("Alcohol", {0, 5})}, {make_event("Drug", {0, 5})});
  CHECK(alignment.pairs.empty());
}

TEST_CASE("value disagreement counts trigger TP but splits the value rows") {
  const Schema schema = default_schema();
  const EventCorpus gold{{"d1", {make_event("Alcohol", {0, 4}, "none")}}};
  const EventCorpus pred{{"d1", {make_event("Alcohol", {0, 4}, "current")}}};
  const auto report = score_corpus_serial(gold, pred, schema);

  const auto& trigger = row_for(report, {TargetKind::Trigger, "Alcohol", "", ""});
  CHECK(trigger.positives == 1);
  CHECK(trigger.true_positives == 1);
  CHECK(trigger.predicted_positives == 1);

  const auto& none =
      row_for(report, {TargetKind::LabeledValue, "Alcohol", "Status", "none"});
  CHECK(none.positives == 1);
  CHECK(none.true_positives == 0);
  CHECK(none.predicted_positives == 0);

  const auto& current =
      row_for(report, {TargetKind::LabeledValue, "Alcohol", "Status", "current"});
  CHECK(current.positives == 0);
  CHECK(current.true_positives == 0);
  CHECK(current.predicted_positives == 1);
}

TEST_CASE("an unmatched prediction contributes only predicted positives") {
  const Schema schema = default_schema();
  SdohEvent pred_event = make_event("Tobacco", {20, 25}, "current");
  pred_event.span_only["Amount"].push_back({{26, 31}, "1 ppd"});
  const EventCorpus gold{{"d1", {}}};
  const EventCorpus pred{{"d1", {pred_event}}};
  const auto report = score_corpus_serial(gold, pred, schema);
  CHECK(report.overall.true_positives == 0);
  CHECK(report.overall.positives == 0);
  CHECK(report.overall.predicted_positives == 3);  // trigger + value + span
  CHECK(report.metrics.precision == 0.0);
}

TEST_CASE("span-only spans pair by overlap only within aligned events") {
  const Schema schema = default_schema();
  SdohEvent g = make_event("Alcohol", {0, 4}, "current");
  g.span_only["Amount"].push_back({{10, 15}, "a"});
  g.span_only["Amount"].push_back({{20, 25}, "b"});
  SdohEvent p = make_event("Alcohol", {2, 6}, "current");
  p.span_only["Amount"].push_back({{12, 14}, "c"});   // overlaps the first
  p.span_only["Amount"].push_back({{40, 45}, "d"});   // overlaps nothing
  const auto report =
      score_corpus_serial({{"d", {g}}}, {{"d", {p}}}, schema);
  const auto& amount = row_for(report, {TargetKind::SpanOnly, "Alcohol", "Amount", ""});
  CHECK(amount.positives == 2);
  CHECK(amount.predicted_positives == 2);
  CHECK(amount.true_positives == 1);
}

TEST_CASE("arguments of unaligned events never count as true positives") {
  const Schema schema = default_schema();
  SdohEvent g = make_event("Alcohol", {0, 4}, "none");
  SdohEvent p = make_event("Alcohol", {30, 34}, "none");  // no trigger overlap
  const auto report = score_corpus_serial({{"d", {g}}}, {{"d", {p}}}, schema);
  const auto& none =
      row_for(report, {TargetKind::LabeledValue, "Alcohol", "Status", "none"});
  CHECK(none.positives == 1);
  CHECK(none.predicted_positives == 1);
  CHECK(none.true_positives == 0);
}

TEST_CASE("self-scoring is exactly one everywhere") {
  Rng rng(5151);
  const EventCorpus corpus = random_corpus(rng, 12);
  const auto report = score_corpus_serial(corpus, corpus, default_schema());
  CHECK(report.metrics.precision == 1.0);
  CHECK(report.metrics.recall == 1.0);
  CHECK(report.metrics.f1 == 1.0);
  for (const auto& row : report.rows) {
    CHECK(row.true_positives == row.positives);
    CHECK(row.predicted_positives == row.positives);
  }
}

TEST_CASE("overall equals the column sums of all rows") {
  Rng rng(77);
  const EventCorpus gold = random_corpus(rng, 10);
  const EventCorpus pred = random_corpus(rng, 10);
  const auto report = score_corpus_serial(gold, pred, default_schema());
  long p = 0, tp = 0, pp = 0;
  for (const auto& row : report.rows) {
    p += row.positives;
    tp += row.true_positives;
    pp += row.predicted_positives;
  }
  CHECK(report.overall.positives == p);
  CHECK(report.overall.true_positives == tp);
  CHECK(report.overall.predicted_positives == pp);
}

TEST_CASE("removing a predicted event never increases TP or PP") {
  Rng rng(31337);
  for (int iter = 0; iter < 30; ++iter) {
    const EventCorpus gold = random_corpus(rng, 4);
    EventCorpus pred = random_corpus(rng, 4);
    const auto before = score_corpus_serial(gold, pred, default_schema());

    // Drop one random event from a non-empty predicted document.
    std::vector<std::size_t> candidates;
    for (std::size_t d = 0; d < pred.size(); ++d)
      if (!pred[d].events.empty()) candidates.push_back(d);
    if (candidates.empty()) continue;
    const std::size_t d = candidates[rng.below(candidates.size())];
    pred[d].events.erase(pred[d].events.begin() +
                         static_cast<long>(rng.below(pred[d].events.size())));

    const auto after = score_corpus_serial(gold, pred, default_schema());
    for (std::size_t r = 0; r < before.rows.size(); ++r) {
      CHECK(after.rows[r].true_positives <= before.rows[r].true_positives);
      CHECK(after.rows[r].predicted_positives <= before.rows[r].predicted_positives);
      CHECK(after.rows[r].positives == before.rows[r].positives);
    }
  }
}

TEST_CASE("swapping gold and pred swaps positives with PP and keeps TP") {
  Rng rng(909);
  for (int iter = 0; iter < 30; ++iter) {
    const EventCorpus a = random_corpus(rng, 4);
    const EventCorpus b = random_corpus(rng, 4);
    const auto fwd = score_corpus_serial(a, b, default_schema());
    const auto rev = score_corpus_serial(b, a, default_schema());
    for (std::size_t r = 0; r < fwd.rows.size(); ++r) {
      CHECK(fwd.rows[r].positives == rev.rows[r].predicted_positives);
      CHECK(fwd.rows[r].predicted_positives == rev.rows[r].positives);
      CHECK(fwd.rows[r].true_positives == rev.rows[r].true_positives);
    }
  }
}

TEST_CASE("unknown event types in predictions are ignored with a finding") {
  const Schema schema = default_schema();
  const EventCorpus gold{{"d", {make_event("Alcohol", {0, 4}, "none")}}};
  const EventCorpus pred{{"d", {make_event("Housing", {0, 4})}}};
  const auto report = score_corpus_serial(gold, pred, schema);
  CHECK(report.overall.predicted_positives == 0);
  REQUIRE(!report.findings.empty());
  CHECK(report.findings[0].message.find("unknown type") != std::string::npos);
}

TEST_CASE("the TSV report is byte-stable with the table layout") {
  const Schema schema = default_schema();
  const EventCorpus gold{{"d", {make_event("Alcohol", {0, 4}, "none")}}};
  const auto report = score_corpus_serial(gold, gold, schema);
  const std::string tsv = to_tsv(report);
  CHECK(tsv == to_tsv(score_corpus_serial(gold, gold, schema)));
  CHECK(tsv.find("SDOH type\targument\tsubtype\tPositives\tTrue Positives\t"
                 "Predicted Positives\n") != std::string::npos);
  CHECK(tsv.find("OVERALL\t-\t-\t2\t2\t2\n") != std::string::npos);
  CHECK(tsv.find("Alcohol\tTrigger\tN/A\t1\t1\t1\n") != std::string::npos);
  CHECK(tsv.find("Alcohol\tStatus\tnone\t1\t1\t1\n") != std::string::npos);
  CHECK(tsv.find("precision=1.0000\trecall=1.0000\tf1=1.0000") != std::string::npos);
  // The value-only assumption is stated in the header.
  CHECK(tsv.find("value only") != std::string::npos);
}

TEST_CASE("the JSON report keys rows by event_type/argument/subtype") {
  const Schema schema = default_schema();
  const EventCorpus gold{{"d", {make_event("Alcohol", {0, 4}, "none")}}};
  const std::string json = to_json(score_corpus_serial(gold, gold, schema));
  CHECK(json.find("\"Alcohol/Trigger/N/A\"") != std::string::npos);
  CHECK(json.find("\"Alcohol/Status/none\"") != std::string::npos);
  CHECK(json.find("\"value_only\"") != std::string::npos);
}
