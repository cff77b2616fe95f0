#include "sdoh/pipeline_s3.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sdoh/utf8.hpp"

namespace sdoh::s3 {

namespace {

struct CompiledPattern {
  std::string source;
  std::regex re;
};

CompiledPattern compile_pattern(std::size_t line_no, std::string_view body) {
  CompiledPattern out;
  out.source = std::string(body);
  auto flags = std::regex::ECMAScript;
  if (body.rfind("(?i)", 0) == 0) {
    flags |= std::regex::icase;
    body.remove_prefix(4);
  }
  try {
    out.re = std::regex(std::string(body), flags);
  } catch (const std::regex_error& e) {
    throw RuleParseError(line_no, "bad pattern /" + out.source + "/: " + e.what());
  }
  return out;
}

// key=value tokens; a value starting with '/' runs to the closing slash and
// may contain spaces ("\/" escapes one).
std::vector<std::pair<std::string, std::string>> scan_pairs(std::size_t line_no,
                                                            std::string_view rest) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  while (i < rest.size()) {
    while (i < rest.size() && rest[i] == ' ') ++i;
    if (i >= rest.size()) break;
    const std::size_t eq = rest.find('=', i);
    if (eq == std::string_view::npos || eq == i)
      throw RuleParseError(line_no, "expected key=value near '" +
                                        std::string(rest.substr(i)) + "'");
    std::string key(rest.substr(i, eq - i));
    std::string value;
    i = eq + 1;
    if (i < rest.size() && rest[i] == '/') {
      ++i;
      bool closed = false;
      while (i < rest.size()) {
        if (rest[i] == '\\' && i + 1 < rest.size() && rest[i + 1] == '/') {
          value += '/';
          i += 2;
          continue;
        }
        if (rest[i] == '/') {
          ++i;
          closed = true;
          break;
        }
        value += rest[i++];
      }
      if (!closed) throw RuleParseError(line_no, "unterminated pattern for " + key);
    } else {
      const std::size_t end = rest.find(' ', i);
      value = std::string(rest.substr(i, end == std::string_view::npos ? end : end - i));
      i = end == std::string_view::npos ? rest.size() : end;
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

// Token index range [first, last] of a mention inside its sentence;
// nullopt when the mention covers no token.
std::optional<std::pair<std::size_t, std::size_t>> token_range(
    const textproc::Sentence& sentence, const Span& span) {
  std::optional<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (!overlaps(sentence.tokens[i].span, span)) continue;
    if (!out)
      out = {i, i};
    else
      out->second = i;
  }
  return out;
}

std::size_t token_distance(const std::pair<std::size_t, std::size_t>& a,
                           const std::pair<std::size_t, std::size_t>& b) {
  if (a.second < b.first) return b.first - a.second;
  if (b.second < a.first) return a.first - b.second;
  return 0;
}

}  // namespace

RuleParseError::RuleParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

RuleSet parse_ruleset(std::string_view text, const Schema& schema) {
  RuleSet out;
  std::set<std::string> ids;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t start = 0;
    while (start < line.size() && line[start] == ' ') ++start;
    line = line.substr(start);
    if (line.empty() || line[0] == '#') continue;

    if (line.rfind("RULE ", 0) != 0)
      throw RuleParseError(line_no, "expected 'RULE <id> key=value...'");
    line.remove_prefix(5);
    const std::size_t sp = line.find(' ');
    if (sp == std::string_view::npos)
      throw RuleParseError(line_no, "rule id without body");

    Rule rule;
    rule.id = std::string(line.substr(0, sp));
    if (!ids.insert(rule.id).second)
      throw RuleParseError(line_no, "duplicate rule id '" + rule.id + "'");

    bool have_cand = false;
    for (auto& [key, value] : scan_pairs(line_no, line.substr(sp + 1))) {
      if (key == "event") {
        rule.event_type = value;
      } else if (key == "arg") {
        rule.arg_name = value;
      } else if (key == "value") {
        rule.value = value;
      } else if (key == "trig") {
        const auto p = compile_pattern(line_no, value);
        rule.trigger_pattern = p.source;
        rule.trigger_re = p.re;
      } else if (key == "cand") {
        const auto p = compile_pattern(line_no, value);
        rule.candidate_pattern = p.source;
        rule.candidate_re = p.re;
        have_cand = true;
      } else if (key == "dir") {
        if (value == "left")
          rule.direction = Direction::Left;
        else if (value == "right")
          rule.direction = Direction::Right;
        else if (value == "either")
          rule.direction = Direction::Either;
        else
          throw RuleParseError(line_no, "dir must be left, right, or either");
      } else if (key == "dist") {
        try {
          rule.max_token_distance = std::stoul(value);
        } catch (...) {
          throw RuleParseError(line_no, "dist must be a number");
        }
      } else {
        throw RuleParseError(line_no, "unknown key '" + key + "'");
      }
    }

    if (!have_cand) throw RuleParseError(line_no, "rule needs cand=/pattern/");
    const EventTypeDef* et = schema.find_event_type(rule.event_type);
    if (!et)
      throw RuleParseError(line_no, "unknown event type '" + rule.event_type + "'");
    const ArgumentDef* arg = et->find_argument(rule.arg_name);
    if (!arg)
      throw RuleParseError(line_no, rule.event_type + " has no argument '" +
                                        rule.arg_name + "'");
    if (arg->kind == ArgKind::Labeled) {
      if (!rule.value)
        throw RuleParseError(line_no, "labeled argument rule needs value=");
      if (std::find(arg->values.begin(), arg->values.end(), *rule.value) ==
          arg->values.end())
        throw RuleParseError(line_no, "value '" + *rule.value + "' not in schema for " +
                                          rule.event_type + "/" + rule.arg_name);
    } else if (rule.value) {
      throw RuleParseError(line_no, "span-only argument rule cannot set value=");
    }

    out.rules.push_back(std::move(rule));
  }
  return out;
}

RuleSet load_ruleset_file(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open ruleset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ruleset(buf.str(), schema);
}

std::vector<std::string> candidate_categories(const Schema& schema) {
  std::vector<std::string> out;
  for (const auto& et : schema.event_types) out.push_back(et.name);
  for (const auto& et : schema.event_types)
    for (const auto& arg : et.arguments)
      if (std::find(out.begin(), out.end(), arg.name) == out.end())
        out.push_back(arg.name);
  return out;
}

crf::CrfModel train_phrase_detector(const std::vector<TrainDocument>& docs,
                                    const Schema& schema, const TrainConfig& config) {
  const crf::TagSet tagset = crf::TagSet::for_categories(candidate_categories(schema));

  textproc::Vocabulary vocab;
  std::vector<crf::TaggedSequence> data;

  for (const auto& doc : docs) {
    const auto sentences = textproc::analyze(doc.text);

    // Gold phrases ranked: triggers, then labeled evidence, then span-only.
    struct GoldPhrase {
      Span span;
      std::string category;
      int rank;
    };
    std::vector<GoldPhrase> phrases;
    for (const auto& event : doc.events) {
      phrases.push_back({event.trigger.span, event.event_type, 0});
      for (const auto& [name, arg] : event.labeled)
        if (arg.evidence) phrases.push_back({arg.evidence->span, name, 1});
      for (const auto& [name, mentions] : event.span_only)
        for (const auto& m : mentions) phrases.push_back({m.span, name, 2});
    }
    std::stable_sort(phrases.begin(), phrases.end(),
                     [](const GoldPhrase& a, const GoldPhrase& b) {
                       return a.rank < b.rank;
                     });

    for (const auto& sentence : sentences) {
      if (sentence.tokens.empty()) continue;
      crf::TaggedSequence seq;
      seq.labels.assign(sentence.tokens.size(), 0);
      for (const auto& phrase : phrases) {
        if (!overlaps(phrase.span, sentence.span)) continue;
        const auto cat_b = tagset.index_of("B-" + phrase.category);
        if (!cat_b) continue;
        bool first = true;
        bool blocked = false;
        for (std::size_t i = 0; i < sentence.tokens.size() && !blocked; ++i) {
          if (!overlaps(sentence.tokens[i].span, phrase.span)) continue;
          if (seq.labels[i] != 0) blocked = true;  // higher-priority phrase holds it
        }
        if (blocked) continue;
        for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
          if (!overlaps(sentence.tokens[i].span, phrase.span)) continue;
          seq.labels[i] = first ? *cat_b : *cat_b + 1;
          first = false;
        }
      }
      seq.features.reserve(sentence.tokens.size());
      for (std::size_t i = 0; i < sentence.tokens.size(); ++i)
        seq.features.push_back(textproc::featurize_token_context(
            sentence.tokens, i, vocab, textproc::VocabMode::Grow));
      data.push_back(std::move(seq));
    }
  }

  return crf::train_crf(data, tagset, vocab, config);
}

std::vector<PhraseCandidate> detect_phrases(const crf::CrfModel& model,
                                            const std::string& text) {
  std::vector<PhraseCandidate> out;
  const auto sentences = textproc::analyze(text);
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    const auto& sentence = sentences[si];
    if (sentence.tokens.empty()) continue;
    std::vector<textproc::FeatureVector> fvs;
    fvs.reserve(sentence.tokens.size());
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i)
      fvs.push_back(textproc::featurize_token_context(sentence.tokens, i,
                                                      model.vocabulary));
    const auto path = crf::viterbi_decode(model, fvs);
    for (auto& [category, span] : crf::decode_bio_spans(path, model.tagset,
                                                        sentence.tokens))
      out.push_back({category,
                     {span, utf8::slice(text, span.start, span.end)},
                     si});
  }
  return out;
}

LinkResult link_arguments(const std::vector<PhraseCandidate>& candidates,
                          const RuleSet& rules,
                          const std::vector<textproc::Sentence>& sentences,
                          const Schema& schema, const LinkOptions& options) {
  LinkResult out;

  std::vector<std::size_t> triggers;  // candidate indices
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> ranges(
      candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ranges[i] = token_range(sentences[candidates[i].sentence_index],
                            candidates[i].mention.span);
    if (schema.find_event_type(candidates[i].category)) triggers.push_back(i);
  }

  // Each candidate may serve only its nearest trigger (ties leftward).
  std::vector<std::optional<std::size_t>> eligible_trigger(candidates.size());
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    if (schema.find_event_type(candidates[ci].category)) continue;
    if (!ranges[ci]) continue;
    std::optional<std::size_t> best;
    std::size_t best_dist = 0;
    for (const std::size_t ti : triggers) {
      if (candidates[ti].sentence_index != candidates[ci].sentence_index) continue;
      if (!ranges[ti]) continue;
      const std::size_t d = token_distance(*ranges[ci], *ranges[ti]);
      if (!best || d < best_dist ||
          (d == best_dist &&
           candidates[ti].mention.span.start < candidates[*best].mention.span.start)) {
        best = ti;
        best_dist = d;
      }
    }
    eligible_trigger[ci] = best;
  }

  std::vector<char> consumed(candidates.size(), 0);

  for (const std::size_t ti : triggers) {
    const PhraseCandidate& trigger = candidates[ti];
    const EventTypeDef* et = schema.find_event_type(trigger.category);

    SdohEvent event;
    event.event_type = trigger.category;
    event.trigger = trigger.mention;

    for (const Rule& rule : rules.rules) {
      if (rule.event_type != trigger.category) continue;
      const ArgumentDef* arg = et->find_argument(rule.arg_name);
      if (!arg) continue;  // ruleset was validated against another schema
      if (arg->kind == ArgKind::Labeled && event.labeled.count(arg->name))
        continue;  // first firing rule wins the group
      if (rule.trigger_pattern &&
          !std::regex_search(trigger.mention.surface, rule.trigger_re))
        continue;

      // Nearest qualifying candidate, ties leftward.
      std::optional<std::size_t> chosen;
      std::size_t chosen_dist = 0;
      for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        if (consumed[ci] || ci == ti) continue;
        if (candidates[ci].sentence_index != trigger.sentence_index) continue;
        if (!eligible_trigger[ci] || *eligible_trigger[ci] != ti) continue;
        if (!ranges[ci] || !ranges[ti]) continue;
        const std::size_t d = token_distance(*ranges[ci], *ranges[ti]);
        if (d > rule.max_token_distance) continue;
        const Span& cs = candidates[ci].mention.span;
        const Span& ts = trigger.mention.span;
        if (rule.direction == Direction::Left && cs.start >= ts.start) continue;
        if (rule.direction == Direction::Right && cs.start <= ts.start) continue;
        if (!std::regex_search(candidates[ci].mention.surface, rule.candidate_re))
          continue;
        if (!chosen || d < chosen_dist ||
            (d == chosen_dist && cs.start < candidates[*chosen].mention.span.start)) {
          chosen = ci;
          chosen_dist = d;
        }
      }
      if (!chosen) continue;

      consumed[*chosen] = 1;
      const Mention& m = candidates[*chosen].mention;
      if (arg->kind == ArgKind::Labeled)
        event.labeled[arg->name] = LabeledArg{*rule.value, m};
      else
        event.span_only[arg->name].push_back(m);
    }

    std::vector<std::string> missing;
    for (const auto& arg : et->arguments)
      if (arg.kind == ArgKind::Labeled && arg.mandatory &&
          !event.labeled.count(arg.name))
        missing.push_back(arg.name);

    if (missing.empty() || options.emit_incomplete) {
      if (!missing.empty())
        out.findings.push_back({Severity::Warning, trigger.mention.surface,
                                event.event_type + " event missing mandatory " +
                                    missing.front() + "; emitted incomplete"});
      out.events.push_back(std::move(event));
    } else {
      out.findings.push_back({Severity::Warning, trigger.mention.surface,
                              event.event_type + " event missing mandatory " +
                                  missing.front() + "; dropped"});
    }
  }

  return out;
}

std::vector<SdohEvent> predict_s3(const crf::CrfModel& model, const RuleSet& rules,
                                  const std::string& text, const Schema& schema,
                                  const LinkOptions& options) {
  const auto candidates = detect_phrases(model, text);
  const auto sentences = textproc::analyze(text);
  return link_arguments(candidates, rules, sentences, schema, options).events;
}

score::EventCorpus predict_corpus_s3(const crf::CrfModel& model, const RuleSet& rules,
                                     const std::vector<brat::TextDocument>& texts,
                                     const Schema& schema, const LinkOptions& options) {
  score::EventCorpus out(texts.size());
  const long n = static_cast<long>(texts.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i)
    out[i] = {texts[i].doc_id, predict_s3(model, rules, texts[i].text, schema, options)};
  return out;
}

score::EventCorpus predict_corpus_s3_serial(
    const crf::CrfModel& model, const RuleSet& rules,
    const std::vector<brat::TextDocument>& texts, const Schema& schema,
    const LinkOptions& options) {
  score::EventCorpus out;
  out.reserve(texts.size());
  for (const auto& doc : texts)
    out.push_back({doc.doc_id, predict_s3(model, rules, doc.text, schema, options)});
  return out;
}

}  // namespace sdoh::s3
