#ifndef SDOH_CRF_HPP
#define SDOH_CRF_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdoh/textproc.hpp"
#include "sdoh/training.hpp"

namespace sdoh::crf {

using textproc::FeatureVector;
using textproc::Vocabulary;

// Label 0 is "O"; every category contributes a B-/I- pair in order.
struct TagSet {
  std::vector<std::string> labels;

  static TagSet for_categories(const std::vector<std::string>& categories);

  std::size_t size() const { return labels.size(); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  bool is_begin(std::size_t label) const { return label != 0 && (label & 1u) == 1; }
  bool is_inside(std::size_t label) const { return label != 0 && (label & 1u) == 0; }
  // Category of a B-/I- label; empty for "O".
  std::string_view category_of(std::size_t label) const;
  std::size_t begin_of(std::size_t label) const { return label == 0 ? 0 : ((label - 1) | 1u); }

  friend bool operator==(const TagSet&, const TagSet&) = default;
};

// Linear-chain CRF with sparse emission features and dense transitions.
// Immutable after training; decoding is safe to call concurrently.
struct CrfModel {
  TagSet tagset;
  Vocabulary vocabulary;
  std::vector<double> emission;    // [feature id * L + label]
  std::vector<double> transition;  // [prev * L + next]
  TrainConfig config;
  double final_loss = 0.0;

  std::size_t n_labels() const { return tagset.size(); }
  double emission_weight(std::uint32_t feature, std::size_t label) const {
    return emission[feature * tagset.size() + label];
  }
  double transition_weight(std::size_t prev, std::size_t next) const {
    return transition[prev * tagset.size() + next];
  }

  void save(const std::filesystem::path& path) const;
  static CrfModel load(const std::filesystem::path& path);
};

struct TaggedSequence {
  std::vector<FeatureVector> features;  // one per token
  std::vector<std::size_t> labels;      // gold label indices
};

// All sequence-level quantities are computed in log space with
// forward-backward; no scaling tricks. Empty sequences throw.

double log_partition(const CrfModel& model,
                     const std::vector<FeatureVector>& features);

struct Marginals {
  double log_z = 0.0;
  // node[t][y]: probability of label y at position t; each row sums to 1.
  std::vector<std::vector<double>> node;
  // edge[t][prev * L + next]: probability of the transition into position t+1.
  std::vector<std::vector<double>> edge;
};

Marginals marginals(const CrfModel& model,
                    const std::vector<FeatureVector>& features);

// Argmax label path; ties broken toward the lower label index at each
// backpointer and at the final position.
std::vector<std::size_t> viterbi_decode(const CrfModel& model,
                                        const std::vector<FeatureVector>& features);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> d_emission;
  std::vector<double> d_transition;
};

// Negative log-likelihood of the gold path plus the model's L2 term, with its
// exact gradient (expected minus empirical feature counts, plus l2 * w).
LossGrad nll_gradient(const CrfModel& model, const std::vector<FeatureVector>& features,
                      const std::vector<std::size_t>& gold);

// Seeded SGD over per-sequence gradients; deterministic for a fixed seed.
// The L2 update touches the features active in each sequence (transitions are
// dense and always regularized). Records the final regularized loss.
CrfModel train_crf(const std::vector<TaggedSequence>& data, const TagSet& tagset,
                   const Vocabulary& vocabulary, const TrainConfig& config);

// Maximal B-,I-,...,I- runs become (category, span) phrases; an I- with no
// matching preceding label is repaired to B-. Total over any label sequence.
std::vector<std::pair<std::string, Span>> decode_bio_spans(
    const std::vector<std::size_t>& labels, const TagSet& tagset,
    const std::vector<textproc::Token>& tokens);

}  // namespace sdoh::crf

#endif
