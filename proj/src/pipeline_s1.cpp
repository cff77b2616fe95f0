#include "sdoh/pipeline_s1.hpp"

#include <algorithm>

#include "model_io.hpp"
#include "sdoh/utf8.hpp"

namespace sdoh::s1 {

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kBundleKind = "s1-bundle";

bool is_substance(const std::string& event_type) {
  return event_type == "Alcohol" || event_type == "Drug" || event_type == "Tobacco";
}

// Marks the tokens overlapping `span` as one B-I... run.
void mark_bio(std::vector<std::size_t>& row, const textproc::Sentence& sentence,
              const Span& span) {
  bool first = true;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (!overlaps(sentence.tokens[i].span, span)) continue;
    if (row[i] != 0) continue;  // keep the earlier span
    row[i] = first ? 1 : 2;
    first = false;
  }
}

std::string tagger_category(const Target& target) {
  return target.kind == TargetKind::Trigger ? target.event_type
                                            : target.event_type + ":" + target.arg_name;
}

}  // namespace

std::vector<TrainDocument> to_train_documents(
    const std::vector<brat::AnnotatedDocument>& docs, const Schema& schema,
    std::vector<Finding>* findings) {
  std::vector<TrainDocument> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    NormalizeResult norm = normalize_events(doc, schema);
    if (findings)
      for (Finding& f : norm.findings) {
        f.where = doc.document.doc_id + "/" + f.where;
        findings->push_back(std::move(f));
      }
    out.push_back({doc.document.doc_id, doc.document.text, std::move(norm.events)});
  }
  return out;
}

ProjectResult project_gold(const std::string& doc_id, const std::string& text,
                           const std::vector<SdohEvent>& events,
                           const Schema& schema) {
  ProjectResult out;
  const TargetSets targets = enumerate_targets(schema);
  const auto sentences = textproc::analyze(text);

  out.examples.reserve(sentences.size());
  for (const auto& sentence : sentences) {
    SentenceExample ex;
    ex.doc_id = doc_id;
    ex.sentence = sentence;
    for (const Target& t : targets.sequence)
      ex.bio.emplace(t, std::vector<std::size_t>(sentence.tokens.size(), 0));
    out.examples.push_back(std::move(ex));
  }

  const auto sentences_overlapping = [&](const Span& span) {
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < sentences.size(); ++i)
      if (overlaps(sentences[i].span, span)) hits.push_back(i);
    return hits;
  };

  const auto mark_span = [&](const Target& target, const Span& span,
                             const char* what) {
    const auto hits = sentences_overlapping(span);
    if (hits.size() != 1)
      out.warnings.push_back(
          {Severity::Warning, doc_id,
           std::string(what) + " span [" + std::to_string(span.start) + "," +
               std::to_string(span.end) + ") for " + target.key() +
               (hits.empty() ? " lies outside every sentence"
                             : " crosses a sentence boundary; clipped")});
    for (const std::size_t si : hits)
      mark_bio(out.examples[si].bio[target], sentences[si], span);
  };

  for (const SdohEvent& event : events) {
    const EventTypeDef* et = schema.find_event_type(event.event_type);
    if (!et) continue;  // normalize_events already reported it

    const Target trigger_target{TargetKind::Trigger, event.event_type, "", ""};
    for (const std::size_t si : sentences_overlapping(event.trigger.span)) {
      auto& positives = out.examples[si].positives;
      if (std::find(positives.begin(), positives.end(), trigger_target) ==
          positives.end())
        positives.push_back(trigger_target);
      for (const auto& [arg_name, larg] : event.labeled) {
        const Target t{TargetKind::LabeledValue, event.event_type, arg_name,
                       larg.value};
        if (std::find(positives.begin(), positives.end(), t) == positives.end())
          positives.push_back(t);
      }
    }

    mark_span(trigger_target, event.trigger.span, "trigger");
    for (const auto& [arg_name, mentions] : event.span_only) {
      const Target t{TargetKind::SpanOnly, event.event_type, arg_name, ""};
      for (const auto& mention : mentions) mark_span(t, mention.span, "argument");
    }
  }

  return out;
}

S1Model train_s1(const std::vector<TrainDocument>& docs, const Schema& schema,
                 const S1Config& config) {
  S1Model model;
  model.schema = schema;
  const TargetSets targets = enumerate_targets(schema);
  model.sequence_targets = targets.sequence;

  std::vector<SentenceExample> examples;
  for (const auto& doc : docs) {
    ProjectResult projected = project_gold(doc.doc_id, doc.text, doc.events, schema);
    for (auto& ex : projected.examples) examples.push_back(std::move(ex));
  }
  if (examples.empty()) throw std::invalid_argument("train_s1: no sentences");

  // Classifier over all classification targets.
  {
    textproc::Vocabulary vocab;
    std::vector<linear::Example> train;
    train.reserve(examples.size());
    for (const auto& ex : examples)
      train.push_back({textproc::featurize_sentence(ex.sentence.tokens, vocab,
                                                    textproc::VocabMode::Grow),
                       ex.positives});
    model.classifier =
        linear::train_multilabel(train, targets.classification, vocab,
                                 config.classifier);
  }

  // One CRF per sequence target over a shared token-context vocabulary.
  textproc::Vocabulary tagger_vocab;
  std::vector<std::vector<textproc::FeatureVector>> token_features;
  token_features.reserve(examples.size());
  for (const auto& ex : examples) {
    std::vector<textproc::FeatureVector> fvs;
    fvs.reserve(ex.sentence.tokens.size());
    for (std::size_t i = 0; i < ex.sentence.tokens.size(); ++i)
      fvs.push_back(textproc::featurize_token_context(ex.sentence.tokens, i,
                                                      tagger_vocab,
                                                      textproc::VocabMode::Grow));
    token_features.push_back(std::move(fvs));
  }

  model.taggers.reserve(targets.sequence.size());
  for (std::size_t ti = 0; ti < targets.sequence.size(); ++ti) {
    const Target& target = targets.sequence[ti];
    const crf::TagSet tagset = crf::TagSet::for_categories({tagger_category(target)});

    std::vector<crf::TaggedSequence> data;
    data.reserve(examples.size());
    for (std::size_t ei = 0; ei < examples.size(); ++ei) {
      if (examples[ei].sentence.tokens.empty()) continue;
      crf::TaggedSequence seq;
      seq.features = token_features[ei];
      seq.labels = examples[ei].bio.at(target);
      data.push_back(std::move(seq));
    }

    TrainConfig cfg = config.tagger;
    cfg.seed = config.tagger.seed + ti;  // independent stream per target
    model.taggers.push_back(crf::train_crf(data, tagset, tagger_vocab, cfg));
  }

  return model;
}

std::vector<SdohEvent> predict_s1(const S1Model& model, const std::string& text) {
  std::vector<SdohEvent> out;
  const double threshold = model.classifier.config.threshold;
  const TargetSets targets = enumerate_targets(model.schema);

  // classification target -> index
  std::map<Target, std::size_t> cls_index;
  for (std::size_t i = 0; i < model.classifier.targets.size(); ++i)
    cls_index.emplace(model.classifier.targets[i], i);

  const textproc::Vocabulary& tagger_vocab =
      model.taggers.empty() ? model.classifier.vocabulary
                            : model.taggers.front().vocabulary;

  for (const auto& sentence : textproc::analyze(text)) {
    if (sentence.tokens.empty()) continue;

    const auto fv =
        textproc::featurize_sentence(sentence.tokens, model.classifier.vocabulary);
    const std::vector<double> probs = model.classifier.scores(fv);

    std::vector<textproc::FeatureVector> token_fvs;
    token_fvs.reserve(sentence.tokens.size());
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i)
      token_fvs.push_back(
          textproc::featurize_token_context(sentence.tokens, i, tagger_vocab));

    // Decoded spans per sequence target.
    std::map<Target, std::vector<Span>> tagged;
    for (std::size_t ti = 0; ti < model.sequence_targets.size(); ++ti) {
      const auto path = crf::viterbi_decode(model.taggers[ti], token_fvs);
      auto spans = crf::decode_bio_spans(path, model.taggers[ti].tagset,
                                         sentence.tokens);
      auto& dst = tagged[model.sequence_targets[ti]];
      for (auto& [cat, span] : spans) {
        (void)cat;
        dst.push_back(span);
      }
    }

    const auto prob_of = [&](const Target& t) {
      const auto it = cls_index.find(t);
      return it == cls_index.end() ? 0.0 : probs[it->second];
    };
    const auto mention_at = [&](const Span& span) {
      return Mention{span, utf8::slice(text, span.start, span.end)};
    };

    for (const auto& et : model.schema.event_types) {
      const Target trigger_target{TargetKind::Trigger, et.name, "", ""};
      const auto& trigger_spans = tagged[trigger_target];
      const bool trigger_by_classifier = prob_of(trigger_target) > threshold;

      // Collect argument signals first: any argument implies the event.
      struct Group {
        const ArgumentDef* def;
        std::string value;  // chosen value, empty = none
      };
      std::vector<Group> labeled_groups;
      bool any_arg = false;
      bool history_span = false;

      for (const auto& arg : et.arguments) {
        if (arg.kind == ArgKind::SpanOnly) {
          const auto it = tagged.find({TargetKind::SpanOnly, et.name, arg.name, ""});
          if (it != tagged.end() && !it->second.empty()) {
            any_arg = true;
            if (arg.name == "History") history_span = true;
          }
          continue;
        }
        Group group{&arg, ""};
        double best = -1.0;
        std::string best_value;
        for (const auto& value : arg.values) {
          const double p = prob_of({TargetKind::LabeledValue, et.name, arg.name, value});
          if (p > best) {
            best = p;
            best_value = value;
          }
        }
        if (best > threshold) {
          group.value = best_value;
          any_arg = true;
        }
        labeled_groups.push_back(group);
      }

      if (!trigger_by_classifier && trigger_spans.empty() && !any_arg) continue;

      SdohEvent event;
      event.event_type = et.name;
      event.trigger = trigger_spans.empty() ? mention_at(sentence.span)
                                            : mention_at(trigger_spans.front());

      // Resolve labeled groups: confident value, else the History -> past
      // coherence rule for substances, else the mandatory argmax fallback.
      for (const auto& arg : et.arguments) {
        if (arg.kind != ArgKind::Labeled) continue;
        const auto git =
            std::find_if(labeled_groups.begin(), labeled_groups.end(),
                         [&](const Group& g) { return g.def->name == arg.name; });
        std::string value = git != labeled_groups.end() ? git->value : "";
        if (value.empty() && arg.name == "Status" && is_substance(et.name) &&
            history_span &&
            std::find(arg.values.begin(), arg.values.end(), "past") != arg.values.end()) {
          value = "past";
        }
        if (value.empty() && arg.mandatory) {
          double best = -1.0;
          for (const auto& candidate : arg.values) {
            const double p =
                prob_of({TargetKind::LabeledValue, et.name, arg.name, candidate});
            if (p > best) {
              best = p;
              value = candidate;
            }
          }
        }
        if (!value.empty())
          event.labeled[arg.name] = LabeledArg{value, mention_at(sentence.span)};
      }

      for (const auto& arg : et.arguments) {
        if (arg.kind != ArgKind::SpanOnly) continue;
        const auto it = tagged.find({TargetKind::SpanOnly, et.name, arg.name, ""});
        if (it == tagged.end()) continue;
        for (const Span& span : it->second)
          event.span_only[arg.name].push_back(mention_at(span));
      }

      out.push_back(std::move(event));
    }
  }
  return out;
}

score::EventCorpus predict_corpus_s1(const S1Model& model,
                                     const std::vector<brat::TextDocument>& texts) {
  score::EventCorpus out(texts.size());
  const long n = static_cast<long>(texts.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i)
    out[i] = {texts[i].doc_id, predict_s1(model, texts[i].text)};
  return out;
}

score::EventCorpus predict_corpus_s1_serial(
    const S1Model& model, const std::vector<brat::TextDocument>& texts) {
  score::EventCorpus out;
  out.reserve(texts.size());
  for (const auto& doc : texts)
    out.push_back({doc.doc_id, predict_s1(model, doc.text)});
  return out;
}

void S1Model::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  classifier.save(dir / "classifier.json");

  nlohmann::json manifest;
  manifest["model_kind"] = kBundleKind;
  manifest["format_version"] = kFormatVersion;
  manifest["schema"] = nlohmann::json::parse(schema_to_json(schema));
  manifest["classifier"] = {{"file", "classifier.json"},
                            {"seed", classifier.config.seed}};
  manifest["taggers"] = nlohmann::json::array();
  for (std::size_t i = 0; i < sequence_targets.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "tagger_%03zu.json", i);
    taggers[i].save(dir / name);
    manifest["taggers"].push_back({{"target", model_io::target_to_json(sequence_targets[i])},
                                   {"file", name},
                                   {"seed", taggers[i].config.seed}});
  }
  model_io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

S1Model S1Model::load(const std::filesystem::path& dir) {
  const nlohmann::json manifest =
      model_io::load_model_json(dir / "manifest.json", kBundleKind, kFormatVersion);
  S1Model model;
  model.schema = load_schema(manifest.at("schema").dump());
  model.classifier =
      linear::MultiLabelModel::load(dir / manifest.at("classifier").at("file").get<std::string>());
  for (const auto& jt : manifest.at("taggers")) {
    model.sequence_targets.push_back(model_io::target_from_json(jt.at("target")));
    model.taggers.push_back(crf::CrfModel::load(dir / jt.at("file").get<std::string>()));
  }
  return model;
}

}  // namespace sdoh::s1
