#include "sdoh/textproc.hpp"

#include <algorithm>

#include "sdoh/utf8.hpp"

namespace sdoh::textproc {

namespace {

bool is_ws(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v';
}

bool is_upper(char32_t c) { return c >= U'A' && c <= U'Z'; }
bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

// Non-ASCII code points count as word characters.
bool is_word(char32_t c) {
  return (c >= U'a' && c <= U'z') || is_upper(c) || is_digit(c) || c >= 0x80;
}

char32_t to_lower(char32_t c) {
  return is_upper(c) ? c + (U'a' - U'A') : c;
}

Span trimmed(const std::u32string& text, std::size_t start, std::size_t end) {
  while (start < end && is_ws(text[start])) ++start;
  while (end > start && is_ws(text[end - 1])) --end;
  return {start, end};
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
  return out;
}

void emit(FeatureVector& fv, Vocabulary& vocab, VocabMode mode,
          const std::string& name, double weight = 1.0) {
  if (mode == VocabMode::Grow) {
    fv.add(vocab.intern(name), weight);
  } else if (const auto id = vocab.lookup(name)) {
    fv.add(*id, weight);
  }
}

}  // namespace

std::vector<Span> split_sentences(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  const std::size_t n = cps.size();
  std::vector<Span> out;

  std::size_t start = 0;
  std::size_t i = 0;
  const auto flush = [&](std::size_t end, std::size_t next_start) {
    const Span span = trimmed(cps, start, end);
    if (span.start < span.end) out.push_back(span);
    start = next_start;
  };

  while (i < n) {
    const char32_t c = cps[i];
    if (c == U'\n') {
      flush(i, i + 1);
      ++i;
      continue;
    }
    if (c == U'.' || c == U'?' || c == U'!') {
      std::size_t k = i + 1;
      while (k < n && is_ws(cps[k]) && cps[k] != U'\n') ++k;
      if (k > i + 1 && k < n && (is_upper(cps[k]) || is_digit(cps[k]))) {
        flush(i + 1, k);
        i = k;
        continue;
      }
    }
    ++i;
  }
  flush(n, n);
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  const std::size_t n = cps.size();
  std::vector<Token> out;

  std::size_t i = 0;
  while (i < n) {
    if (is_ws(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (is_word(cps[i]))
      while (j < n && is_word(cps[j])) ++j;
    out.push_back({{i, j}, utf8::encode(std::u32string_view(cps).substr(i, j - i))});
    i = j;
  }
  return out;
}

std::vector<Sentence> analyze(std::string_view text) {
  std::vector<Sentence> out;
  for (const Span& span : split_sentences(text)) {
    Sentence sentence;
    sentence.span = span;
    sentence.tokens = tokenize(utf8::slice(text, span.start, span.end));
    for (Token& tok : sentence.tokens) {
      tok.span.start += span.start;
      tok.span.end += span.start;
    }
    out.push_back(std::move(sentence));
  }
  return out;
}

std::uint32_t Vocabulary::intern(const std::string& name) {
  const auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

std::optional<std::uint32_t> Vocabulary::lookup(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::from_names(std::vector<std::string> names) {
  Vocabulary v;
  v.names_ = std::move(names);
  v.index_.reserve(v.names_.size());
  for (std::uint32_t i = 0; i < v.names_.size(); ++i) v.index_.emplace(v.names_[i], i);
  return v;
}

void FeatureVector::compact() {
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < items.size(); ++r) {
    if (w > 0 && items[w - 1].first == items[r].first)
      items[w - 1].second += items[r].second;
    else
      items[w++] = items[r];
  }
  items.resize(w);
}

FeatureVector featurize_sentence(const std::vector<Token>& tokens,
                                 Vocabulary& vocab, VocabMode mode) {
  FeatureVector fv;
  bool has_digit = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string lower = lower_ascii(tokens[i].surface);
    emit(fv, vocab, mode, "u=" + lower);
    if (i + 1 < tokens.size())
      emit(fv, vocab, mode, "b=" + lower + "_" + lower_ascii(tokens[i + 1].surface));
    for (char c : tokens[i].surface)
      if (c >= '0' && c <= '9') has_digit = true;
  }
  if (has_digit) emit(fv, vocab, mode, "has_digit");
  emit(fv, vocab, mode, "bias");
  fv.compact();
  return fv;
}

FeatureVector featurize_token_context(const std::vector<Token>& tokens,
                                      std::size_t index, Vocabulary& vocab,
                                      VocabMode mode) {
  FeatureVector fv;
  const std::u32string cps = utf8::decode(tokens[index].surface);

  std::u32string lower;
  std::u32string shape;
  lower.reserve(cps.size());
  shape.reserve(cps.size());
  for (char32_t c : cps) {
    lower.push_back(to_lower(c));
    if (is_upper(c))
      shape.push_back(U'X');
    else if (c >= U'a' && c <= U'z')
      shape.push_back(U'x');
    else if (is_digit(c))
      shape.push_back(U'9');
    else
      shape.push_back(c);
  }

  emit(fv, vocab, mode, "w=" + utf8::encode(lower));
  for (std::size_t len = 1; len <= 3 && len <= lower.size(); ++len) {
    emit(fv, vocab, mode,
         "p" + std::to_string(len) + "=" + utf8::encode(lower.substr(0, len)));
    emit(fv, vocab, mode,
         "s" + std::to_string(len) + "=" +
             utf8::encode(lower.substr(lower.size() - len)));
  }
  emit(fv, vocab, mode, "shape=" + utf8::encode(shape));
  emit(fv, vocab, mode,
       "w-1=" + (index > 0 ? lower_ascii(tokens[index - 1].surface)
                           : std::string("<s>")));
  emit(fv, vocab, mode,
       "w+1=" + (index + 1 < tokens.size()
                     ? lower_ascii(tokens[index + 1].surface)
                     : std::string("</s>")));
  emit(fv, vocab, mode, "bias");
  fv.compact();
  return fv;
}

// Frozen mode never mutates the vocabulary, so these casts are safe.
FeatureVector featurize_sentence(const std::vector<Token>& tokens,
                                 const Vocabulary& vocab) {
  return featurize_sentence(tokens, const_cast<Vocabulary&>(vocab),
                            VocabMode::Frozen);
}

FeatureVector featurize_token_context(const std::vector<Token>& tokens,
                                      std::size_t index, const Vocabulary& vocab) {
  return featurize_token_context(tokens, index, const_cast<Vocabulary&>(vocab),
                                 VocabMode::Frozen);
}

}  // namespace sdoh::textproc
