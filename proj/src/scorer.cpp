#include "sdoh/scorer.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace sdoh::score {

namespace {

// Greedy one-to-one pairing of overlapping spans in ascending
// (left start, right start) order; shared by triggers and span-only spans.
std::vector<std::pair<std::size_t, std::size_t>> greedy_overlap_pairs(
    const std::vector<Span>& left, const std::vector<Span>& right) {
  struct Cand {
    std::size_t li, ri;
  };
  std::vector<Cand> cands;
  for (std::size_t li = 0; li < left.size(); ++li)
    for (std::size_t ri = 0; ri < right.size(); ++ri)
      if (overlaps(left[li], right[ri])) cands.push_back({li, ri});

  std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
    const auto ka = std::make_tuple(left[a.li].start, right[a.ri].start, a.li, a.ri);
    const auto kb = std::make_tuple(left[b.li].start, right[b.ri].start, b.li, b.ri);
    return ka < kb;
  });

  std::vector<char> left_used(left.size(), 0), right_used(right.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const Cand& c : cands) {
    if (left_used[c.li] || right_used[c.ri]) continue;
    left_used[c.li] = right_used[c.ri] = 1;
    pairs.emplace_back(c.li, c.ri);
  }
  return pairs;
}

struct RowIndex {
  std::map<Target, std::size_t> index;

  explicit RowIndex(const std::vector<Target>& targets) {
    std::size_t next = 0;
    for (const Target& t : targets) index.emplace(t, next++);
  }
  // -1 when the target is not a schema row.
  long find(const Target& t) const {
    const auto it = index.find(t);
    return it == index.end() ? -1 : static_cast<long>(it->second);
  }
};

struct DocCounts {
  std::vector<long> positives, true_positives, predicted_positives;
  std::vector<Finding> findings;

  explicit DocCounts(std::size_t rows)
      : positives(rows, 0), true_positives(rows, 0), predicted_positives(rows, 0) {}

  void merge_into(ScoreReport& report) const {
    for (std::size_t i = 0; i < positives.size(); ++i) {
      report.rows[i].positives += positives[i];
      report.rows[i].true_positives += true_positives[i];
      report.rows[i].predicted_positives += predicted_positives[i];
    }
    report.findings.insert(report.findings.end(), findings.begin(), findings.end());
  }
};

// Counts one side (gold -> positives or pred -> predicted_positives).
void count_side(const std::vector<SdohEvent>& events, const Schema& schema,
                const RowIndex& rows, std::vector<long>& out, const char* side,
                const std::string& doc_id, std::vector<Finding>& findings,
                std::vector<char>& usable) {
  usable.assign(events.size(), 0);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const SdohEvent& ev = events[i];
    const EventTypeDef* et = schema.find_event_type(ev.event_type);
    if (!et) {
      findings.push_back({Severity::Warning, doc_id,
                          std::string(side) + " event with unknown type '" +
                              ev.event_type + "' ignored for counting"});
      continue;
    }
    usable[i] = 1;
    out[rows.find({TargetKind::Trigger, ev.event_type, "", ""})] += 1;
    for (const auto& [arg_name, larg] : ev.labeled) {
      const long row =
          rows.find({TargetKind::LabeledValue, ev.event_type, arg_name, larg.value});
      if (row < 0) {
        findings.push_back({Severity::Warning, doc_id,
                            std::string(side) + " labeled argument " + ev.event_type +
                                "/" + arg_name + "=" + larg.value +
                                " not in schema; ignored"});
        continue;
      }
      out[row] += 1;
    }
    for (const auto& [arg_name, mentions] : ev.span_only) {
      const long row = rows.find({TargetKind::SpanOnly, ev.event_type, arg_name, ""});
      if (row < 0) {
        findings.push_back({Severity::Warning, doc_id,
                            std::string(side) + " span-only argument " + ev.event_type +
                                "/" + arg_name + " not in schema; ignored"});
        continue;
      }
      out[row] += static_cast<long>(mentions.size());
    }
  }
}

DocCounts count_document(const std::vector<SdohEvent>& gold,
                         const std::vector<SdohEvent>& pred, const Schema& schema,
                         const RowIndex& rows, const std::string& doc_id) {
  DocCounts counts(rows.index.size());

  std::vector<char> gold_usable, pred_usable;
  count_side(gold, schema, rows, counts.positives, "gold", doc_id, counts.findings,
             gold_usable);
  count_side(pred, schema, rows, counts.predicted_positives, "predicted", doc_id,
             counts.findings, pred_usable);

  // True positives per event type over aligned trigger pairs.
  for (const auto& et : schema.event_types) {
    std::vector<std::size_t> gi, pi;
    std::vector<Span> gspans, pspans;
    for (std::size_t i = 0; i < gold.size(); ++i)
      if (gold_usable[i] && gold[i].event_type == et.name) {
        gi.push_back(i);
        gspans.push_back(gold[i].trigger.span);
      }
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred_usable[i] && pred[i].event_type == et.name) {
        pi.push_back(i);
        pspans.push_back(pred[i].trigger.span);
      }

    const auto pairs = greedy_overlap_pairs(gspans, pspans);
    counts.true_positives[rows.find({TargetKind::Trigger, et.name, "", ""})] +=
        static_cast<long>(pairs.size());

    for (const auto& [gl, pl] : pairs) {
      const SdohEvent& g = gold[gi[gl]];
      const SdohEvent& p = pred[pi[pl]];

      // Labeled arguments: the inferred values must agree; spans are ignored.
      for (const auto& arg : et.arguments) {
        if (arg.kind != ArgKind::Labeled) continue;
        const auto git = g.labeled.find(arg.name);
        const auto pit = p.labeled.find(arg.name);
        if (git == g.labeled.end() || pit == p.labeled.end()) continue;
        if (git->second.value != pit->second.value) continue;
        const long row = rows.find(
            {TargetKind::LabeledValue, et.name, arg.name, git->second.value});
        if (row >= 0) counts.true_positives[row] += 1;
      }

      // Span-only arguments: greedy overlap pairing within the aligned event.
      for (const auto& arg : et.arguments) {
        if (arg.kind != ArgKind::SpanOnly) continue;
        const auto git = g.span_only.find(arg.name);
        const auto pit = p.span_only.find(arg.name);
        if (git == g.span_only.end() || pit == p.span_only.end()) continue;
        std::vector<Span> gs, ps;
        for (const auto& m : git->second) gs.push_back(m.span);
        for (const auto& m : pit->second) ps.push_back(m.span);
        const long row = rows.find({TargetKind::SpanOnly, et.name, arg.name, ""});
        if (row >= 0)
          counts.true_positives[row] +=
              static_cast<long>(greedy_overlap_pairs(gs, ps).size());
      }
    }
  }
  return counts;
}

// Pairs gold and pred documents by id; unmatched documents score against an
// empty side and are flagged.
struct PairedDoc {
  const std::string* doc_id;
  const std::vector<SdohEvent>* gold;
  const std::vector<SdohEvent>* pred;
};

std::vector<PairedDoc> pair_documents(const EventCorpus& gold, const EventCorpus& pred,
                                      std::vector<Finding>& findings) {
  static const std::vector<SdohEvent> kEmpty;
  std::map<std::string_view, const DocEvents*> pred_by_id;
  for (const auto& d : pred) pred_by_id.emplace(d.doc_id, &d);

  std::vector<PairedDoc> out;
  std::map<std::string_view, char> seen;
  for (const auto& g : gold) {
    seen.emplace(g.doc_id, 1);
    const auto it = pred_by_id.find(g.doc_id);
    if (it == pred_by_id.end()) {
      findings.push_back({Severity::Warning, g.doc_id,
                          "document missing from predictions; scored as empty"});
      out.push_back({&g.doc_id, &g.events, &kEmpty});
    } else {
      out.push_back({&g.doc_id, &g.events, &it->second->events});
    }
  }
  for (const auto& p : pred) {
    if (seen.count(p.doc_id)) continue;
    findings.push_back({Severity::Warning, p.doc_id,
                        "document missing from gold; scored against empty gold"});
    out.push_back({&p.doc_id, &kEmpty, &p.events});
  }
  return out;
}

void finalize(ScoreReport& report) {
  report.overall = CountRow{{TargetKind::Overall, "OVERALL", "", ""}, 0, 0, 0};
  for (const auto& row : report.rows) {
    report.overall.positives += row.positives;
    report.overall.true_positives += row.true_positives;
    report.overall.predicted_positives += row.predicted_positives;
  }
  report.metrics = prf1(report.overall.true_positives,
                        report.overall.predicted_positives, report.overall.positives);
}

ScoreReport make_report_shell(const Schema& schema) {
  ScoreReport report;
  for (const Target& t : report_targets(schema)) report.rows.push_back({t, 0, 0, 0});
  return report;
}

}  // namespace

Prf prf1(long tp, long pp, long positives) {
  if (tp > pp || tp > positives || tp < 0 || pp < 0 || positives < 0)
    throw std::invalid_argument("prf1: true positives exceed a denominator");
  Prf out;
  out.precision = pp > 0 ? static_cast<double>(tp) / static_cast<double>(pp) : 0.0;
  out.recall =
      positives > 0 ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

EventAlignment align_events(const std::vector<SdohEvent>& gold,
                            const std::vector<SdohEvent>& pred) {
  EventAlignment out;
  std::map<std::string_view, char> types;
  for (const auto& e : gold) types.emplace(e.event_type, 1);
  for (const auto& e : pred) types.emplace(e.event_type, 1);

  for (const auto& [type, unused] : types) {
    (void)unused;
    std::vector<std::size_t> gi, pi;
    std::vector<Span> gs, ps;
    for (std::size_t i = 0; i < gold.size(); ++i)
      if (gold[i].event_type == type) {
        gi.push_back(i);
        gs.push_back(gold[i].trigger.span);
      }
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred[i].event_type == type) {
        pi.push_back(i);
        ps.push_back(pred[i].trigger.span);
      }
    for (const auto& [gl, pl] : greedy_overlap_pairs(gs, ps))
      out.pairs.emplace_back(gi[gl], pi[pl]);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

std::vector<Target> report_targets(const Schema& schema) {
  std::vector<Target> out;
  for (const auto& et : schema.event_types) {
    out.push_back({TargetKind::Trigger, et.name, "", ""});
    for (const auto& arg : et.arguments) {
      if (arg.kind == ArgKind::Labeled)
        for (const auto& value : arg.values)
          out.push_back({TargetKind::LabeledValue, et.name, arg.name, value});
      else
        out.push_back({TargetKind::SpanOnly, et.name, arg.name, ""});
    }
  }
  return out;
}

ScoreReport score_corpus_serial(const EventCorpus& gold, const EventCorpus& pred,
                                const Schema& schema) {
  ScoreReport report = make_report_shell(schema);
  const RowIndex rows(report_targets(schema));

  std::vector<Finding> pairing_findings;
  const auto paired = pair_documents(gold, pred, pairing_findings);
  report.findings = pairing_findings;

  for (const PairedDoc& doc : paired)
    count_document(*doc.gold, *doc.pred, schema, rows, *doc.doc_id)
        .merge_into(report);

  finalize(report);
  return report;
}

ScoreReport score_corpus(const EventCorpus& gold, const EventCorpus& pred,
                         const Schema& schema) {
  ScoreReport report = make_report_shell(schema);
  const RowIndex rows(report_targets(schema));

  std::vector<Finding> pairing_findings;
  const auto paired = pair_documents(gold, pred, pairing_findings);
  report.findings = pairing_findings;

  // Per-document counting is independent; results are merged in document
  // order so the report is identical to the serial path.
  std::vector<DocCounts> per_doc(paired.size(), DocCounts(rows.index.size()));
  const long n = static_cast<long>(paired.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i)
    per_doc[i] = count_document(*paired[i].gold, *paired[i].pred, schema, rows,
                                *paired[i].doc_id);

  for (const DocCounts& counts : per_doc) counts.merge_into(report);

  finalize(report);
  return report;
}

namespace {

void append_target_fields(std::string& out, const Target& t) {
  switch (t.kind) {
    case TargetKind::Trigger:
      out += t.event_type + "\tTrigger\tN/A";
      break;
    case TargetKind::LabeledValue:
      out += t.event_type + "\t" + t.arg_name + "\t" + t.value;
      break;
    case TargetKind::SpanOnly:
      out += t.event_type + "\t" + t.arg_name + "\tN/A";
      break;
    case TargetKind::Overall:
      out += "OVERALL\t-\t-";
      break;
  }
}

std::string format4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string to_tsv(const ScoreReport& report) {
  std::string out;
  out += "# sdoh score report v1\n";
  out += "# labeled arguments are scored by value only; evidence spans are not compared\n";
  out += "SDOH type\targument\tsubtype\tPositives\tTrue Positives\tPredicted Positives\n";
  const auto emit_row = [&](const CountRow& row) {
    append_target_fields(out, row.target);
    out += "\t" + std::to_string(row.positives);
    out += "\t" + std::to_string(row.true_positives);
    out += "\t" + std::to_string(row.predicted_positives);
    out += "\n";
  };
  emit_row(report.overall);
  for (const auto& row : report.rows) emit_row(row);
  out += "SUMMARY\ttp=" + std::to_string(report.overall.true_positives);
  out += "\tpp=" + std::to_string(report.overall.predicted_positives);
  out += "\tpositives=" + std::to_string(report.overall.positives);
  out += "\tprecision=" + format4(report.metrics.precision);
  out += "\trecall=" + format4(report.metrics.recall);
  out += "\tf1=" + format4(report.metrics.f1);
  out += "\n";
  return out;
}

std::string to_json(const ScoreReport& report) {
  nlohmann::json j;
  j["format"] = "sdoh-score-report";
  j["format_version"] = 1;
  j["semantics"] = {{"labeled_arguments", "value_only"},
                    {"alignment", "greedy_trigger_overlap"}};
  j["rows"] = nlohmann::json::array();
  const auto row_json = [](const CountRow& row) {
    return nlohmann::json{{"target", row.target.key()},
                          {"positives", row.positives},
                          {"true_positives", row.true_positives},
                          {"predicted_positives", row.predicted_positives}};
  };
  for (const auto& row : report.rows) j["rows"].push_back(row_json(row));
  j["overall"] = row_json(report.overall);
  j["precision"] = report.metrics.precision;
  j["recall"] = report.metrics.recall;
  j["f1"] = report.metrics.f1;
  j["findings"] = nlohmann::json::array();
  for (const auto& f : report.findings) j["findings"].push_back(to_string(f));
  return j.dump(2) + "\n";
}

}  // namespace sdoh::score
