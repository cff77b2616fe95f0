#ifndef SDOH_TEXTPROC_HPP
#define SDOH_TEXTPROC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sdoh/common.hpp"

namespace sdoh::textproc {

struct Token {
  Span span;  // code-point offsets into the analyzed text
  std::string surface;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  Span span;
  std::vector<Token> tokens;  // document offsets

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Sentence boundaries fall at newline runs and after . ? ! followed by
// whitespace and an uppercase letter or digit. Spans are trimmed of
// surrounding whitespace; every non-whitespace character is covered.
std::vector<Span> split_sentences(std::string_view text);

// Maximal letter+digit runs are one token; every other non-whitespace
// character stands alone. Spans are relative to the given text.
std::vector<Token> tokenize(std::string_view text);

// split_sentences + tokenize with token spans shifted to document offsets.
std::vector<Sentence> analyze(std::string_view text);

// Interned feature-name table. Ids are assigned in first-seen order, so a
// fixed featurization order gives a reproducible vocabulary.
class Vocabulary {
 public:
  std::uint32_t intern(const std::string& name);
  std::optional<std::uint32_t> lookup(const std::string& name) const;
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::uint32_t id) const { return names_[id]; }
  const std::vector<std::string>& names() const { return names_; }

  static Vocabulary from_names(std::vector<std::string> names);

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> names_;
};

// Sparse feature vector, sorted by id with unique ids after compact().
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> items;

  void add(std::uint32_t id, double weight) { items.emplace_back(id, weight); }
  void compact();  // sort by id, sum duplicates

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

enum class VocabMode { Grow, Frozen };

// Bag of lowercased unigrams and bigrams, a has-digit flag, and a bias term.
// In Frozen mode unknown features are dropped.
FeatureVector featurize_sentence(const std::vector<Token>& tokens,
                                 Vocabulary& vocab, VocabMode mode);
FeatureVector featurize_sentence(const std::vector<Token>& tokens,
                                 const Vocabulary& vocab);  // frozen

// Per-token context features: lowercase token, prefixes and suffixes up to
// length 3, word shape, the neighbors at +-1, and a bias term.
FeatureVector featurize_token_context(const std::vector<Token>& tokens,
                                      std::size_t index, Vocabulary& vocab,
                                      VocabMode mode);
FeatureVector featurize_token_context(const std::vector<Token>& tokens,
                                      std::size_t index,
                                      const Vocabulary& vocab);  // frozen

}  // namespace sdoh::textproc

#endif
