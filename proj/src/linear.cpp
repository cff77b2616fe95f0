#include "sdoh/linear.hpp"

#include <cmath>
#include <stdexcept>

#include "model_io.hpp"

namespace sdoh::linear {

namespace {
constexpr int kFormatVersion = 1;
constexpr const char* kModelKind = "multilabel-logistic";
}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double binary_logistic_loss(const std::vector<double>& weights, double bias,
                            const FeatureVector& fv, bool label, double l2) {
  double z = bias;
  for (const auto& [id, x] : fv.items) z += weights[id] * x;
  // log(1 + exp(-m)) with m = z for y=1, m = -z for y=0, computed stably.
  const double m = label ? z : -z;
  const double data = m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  double reg = 0;
  for (const double w : weights) reg += w * w;
  return data + 0.5 * l2 * reg;
}

void binary_logistic_grad(const std::vector<double>& weights, double bias,
                          const FeatureVector& fv, bool label, double l2,
                          std::vector<double>& grad_w, double& grad_b) {
  grad_w.assign(weights.size(), 0.0);
  double z = bias;
  for (const auto& [id, x] : fv.items) z += weights[id] * x;
  const double g = sigmoid(z) - (label ? 1.0 : 0.0);
  for (const auto& [id, x] : fv.items) grad_w[id] += g * x;
  for (std::size_t i = 0; i < weights.size(); ++i) grad_w[i] += l2 * weights[i];
  grad_b = g;
}

std::vector<double> MultiLabelModel::scores(const FeatureVector& fv) const {
  std::vector<double> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    double z = bias[t];
    for (const auto& [id, x] : fv.items)
      if (id < weights[t].size()) z += weights[t][id] * x;
    out[t] = sigmoid(z);
  }
  return out;
}

MultiLabelModel train_multilabel(const std::vector<Example>& examples,
                                 const std::vector<Target>& targets,
                                 const Vocabulary& vocabulary,
                                 const TrainConfig& config) {
  if (examples.empty())
    throw std::invalid_argument("train_multilabel: no training examples");

  MultiLabelModel model;
  model.targets = targets;
  model.vocabulary = vocabulary;
  model.config = config;
  model.weights.assign(targets.size(), std::vector<double>(vocabulary.size(), 0.0));
  model.bias.assign(targets.size(), 0.0);

  std::map<Target, std::size_t> target_index;
  for (std::size_t t = 0; t < targets.size(); ++t) target_index.emplace(targets[t], t);

  // Per-example positive masks.
  std::vector<std::vector<char>> positive(examples.size(),
                                          std::vector<char>(targets.size(), 0));
  for (std::size_t i = 0; i < examples.size(); ++i) {
    for (const Target& t : examples[i].positives) {
      const auto it = target_index.find(t);
      if (it == target_index.end())
        throw std::invalid_argument("train_multilabel: positive target " + t.key() +
                                    " is not in the target list");
      positive[i][it->second] = 1;
    }
  }

  Rng rng(config.seed);
  auto order = index_range(examples.size());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate / (1.0 + static_cast<double>(epoch));
    shuffle_indices(order, rng);
    for (const std::size_t i : order) {
      const FeatureVector& fv = examples[i].features;
      for (std::size_t t = 0; t < targets.size(); ++t) {
        double z = model.bias[t];
        for (const auto& [id, x] : fv.items) z += model.weights[t][id] * x;
        const double g = sigmoid(z) - (positive[i][t] ? 1.0 : 0.0);
        for (const auto& [id, x] : fv.items) {
          double& w = model.weights[t][id];
          w -= lr * (g * x + config.l2 * w);
        }
        model.bias[t] -= lr * g;
      }
    }

    double loss = 0;
    for (std::size_t i = 0; i < examples.size(); ++i)
      for (std::size_t t = 0; t < targets.size(); ++t)
        loss += binary_logistic_loss(model.weights[t], model.bias[t],
                                     examples[i].features, positive[i][t], 0.0);
    double reg = 0;
    for (const auto& w : model.weights)
      for (const double v : w) reg += v * v;
    model.epoch_loss.push_back(loss + 0.5 * config.l2 * reg);
  }

  return model;
}

void MultiLabelModel::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["model_kind"] = kModelKind;
  j["format_version"] = kFormatVersion;
  j["targets"] = nlohmann::json::array();
  for (const Target& t : targets) j["targets"].push_back(model_io::target_to_json(t));
  j["vocabulary"] = vocabulary.names();
  j["weights"] = weights;
  j["bias"] = bias;
  j["config"] = model_io::config_to_json(config);
  j["epoch_loss"] = epoch_loss;
  model_io::write_file(path, j.dump() + "\n");
}

MultiLabelModel MultiLabelModel::load(const std::filesystem::path& path) {
  const nlohmann::json j = model_io::load_model_json(path, kModelKind, kFormatVersion);
  MultiLabelModel model;
  for (const auto& jt : j.at("targets"))
    model.targets.push_back(model_io::target_from_json(jt));
  model.vocabulary =
      Vocabulary::from_names(j.at("vocabulary").get<std::vector<std::string>>());
  model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  model.bias = j.at("bias").get<std::vector<double>>();
  model.config = model_io::config_from_json(j.at("config"));
  model.epoch_loss = j.value("epoch_loss", std::vector<double>{});
  if (model.weights.size() != model.targets.size() ||
      model.bias.size() != model.targets.size())
    throw std::runtime_error(path.string() + ": inconsistent weight shapes");
  return model;
}

}  // namespace sdoh::linear
