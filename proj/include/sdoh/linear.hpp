#ifndef SDOH_LINEAR_HPP
#define SDOH_LINEAR_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "sdoh/schema.hpp"
#include "sdoh/textproc.hpp"
#include "sdoh/training.hpp"

namespace sdoh::linear {

using textproc::FeatureVector;
using textproc::Vocabulary;

struct Example {
  FeatureVector features;
  std::vector<Target> positives;
};

// One-vs-rest logistic regression over a fixed target list. Immutable after
// training; prediction is safe to call concurrently.
struct MultiLabelModel {
  std::vector<Target> targets;
  Vocabulary vocabulary;
  std::vector<std::vector<double>> weights;  // [target][feature id]
  std::vector<double> bias;                  // per target
  TrainConfig config;
  std::vector<double> epoch_loss;  // regularized training loss after each epoch

  // Per-target probability, aligned with `targets`.
  std::vector<double> scores(const FeatureVector& fv) const;

  void save(const std::filesystem::path& path) const;
  static MultiLabelModel load(const std::filesystem::path& path);
};

// Logistic loss with SGD, per-epoch shuffling seeded by config.seed, and L2
// regularization applied to the features active in each step. The learning
// rate decays as lr/(1+epoch). Bit-deterministic for a fixed seed.
MultiLabelModel train_multilabel(const std::vector<Example>& examples,
                                 const std::vector<Target>& targets,
                                 const Vocabulary& vocabulary,
                                 const TrainConfig& config);

double sigmoid(double z);

// Single-instance binary logistic loss and gradient, including the L2 term
// over the given weight vector. Shared by training and the gradient checks.
double binary_logistic_loss(const std::vector<double>& weights, double bias,
                            const FeatureVector& fv, bool label, double l2);
void binary_logistic_grad(const std::vector<double>& weights, double bias,
                          const FeatureVector& fv, bool label, double l2,
                          std::vector<double>& grad_w, double& grad_b);

}  // namespace sdoh::linear

#endif
