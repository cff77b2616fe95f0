#include "sdoh/crf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "model_io.hpp"

namespace sdoh::crf {

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kModelKind = "linear-chain-crf";
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& xs) {
  double m = kNegInf;
  for (const double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0;
  for (const double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// emission scores for every (position, label).
std::vector<std::vector<double>> emission_scores(
    const CrfModel& model, const std::vector<FeatureVector>& features) {
  const std::size_t L = model.n_labels();
  std::vector<std::vector<double>> em(features.size(), std::vector<double>(L, 0.0));
  for (std::size_t t = 0; t < features.size(); ++t)
    for (const auto& [id, x] : features[t].items)
      for (std::size_t y = 0; y < L; ++y)
        em[t][y] += model.emission[id * L + y] * x;
  return em;
}

struct ForwardBackward {
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<double>> beta;
  double log_z = 0.0;
};

ForwardBackward forward_backward(const CrfModel& model,
                                 const std::vector<std::vector<double>>& em) {
  const std::size_t T = em.size();
  const std::size_t L = model.n_labels();
  ForwardBackward fb;
  fb.alpha.assign(T, std::vector<double>(L, 0.0));
  fb.beta.assign(T, std::vector<double>(L, 0.0));

  fb.alpha[0] = em[0];
  std::vector<double> acc(L);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t p = 0; p < L; ++p)
        acc[p] = fb.alpha[t - 1][p] + model.transition_weight(p, y);
      fb.alpha[t][y] = log_sum_exp(acc) + em[t][y];
    }
  }
  fb.log_z = log_sum_exp(fb.alpha[T - 1]);

  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t n = 0; n < L; ++n)
        acc[n] = model.transition_weight(y, n) + em[t + 1][n] + fb.beta[t + 1][n];
      fb.beta[t][y] = log_sum_exp(acc);
    }
  }
  return fb;
}

void require_nonempty(const std::vector<FeatureVector>& features, const char* op) {
  if (features.empty())
    throw std::invalid_argument(std::string(op) + ": empty sequence");
}

}  // namespace

TagSet TagSet::for_categories(const std::vector<std::string>& categories) {
  TagSet ts;
  ts.labels.push_back("O");
  for (const auto& cat : categories) {
    ts.labels.push_back("B-" + cat);
    ts.labels.push_back("I-" + cat);
  }
  return ts;
}

std::optional<std::size_t> TagSet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  return std::nullopt;
}

std::string_view TagSet::category_of(std::size_t label) const {
  if (label == 0) return {};
  return std::string_view(labels[label]).substr(2);
}

double log_partition(const CrfModel& model,
                     const std::vector<FeatureVector>& features) {
  require_nonempty(features, "log_partition");
  const auto em = emission_scores(model, features);
  const std::size_t T = em.size();
  const std::size_t L = model.n_labels();

  std::vector<double> alpha = em[0];
  std::vector<double> next(L), acc(L);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t p = 0; p < L; ++p)
        acc[p] = alpha[p] + model.transition_weight(p, y);
      next[y] = log_sum_exp(acc) + em[t][y];
    }
    alpha = next;
  }
  return log_sum_exp(alpha);
}

Marginals marginals(const CrfModel& model,
                    const std::vector<FeatureVector>& features) {
  require_nonempty(features, "marginals");
  const auto em = emission_scores(model, features);
  const auto fb = forward_backward(model, em);
  const std::size_t T = em.size();
  const std::size_t L = model.n_labels();

  Marginals m;
  m.log_z = fb.log_z;
  m.node.assign(T, std::vector<double>(L, 0.0));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t y = 0; y < L; ++y)
      m.node[t][y] = std::exp(fb.alpha[t][y] + fb.beta[t][y] - fb.log_z);

  m.edge.assign(T > 0 ? T - 1 : 0, std::vector<double>(L * L, 0.0));
  for (std::size_t t = 0; t + 1 < T; ++t)
    for (std::size_t p = 0; p < L; ++p)
      for (std::size_t y = 0; y < L; ++y)
        m.edge[t][p * L + y] =
            std::exp(fb.alpha[t][p] + model.transition_weight(p, y) + em[t + 1][y] +
                     fb.beta[t + 1][y] - fb.log_z);
  return m;
}

std::vector<std::size_t> viterbi_decode(const CrfModel& model,
                                        const std::vector<FeatureVector>& features) {
  require_nonempty(features, "viterbi_decode");
  const auto em = emission_scores(model, features);
  const std::size_t T = em.size();
  const std::size_t L = model.n_labels();

  std::vector<std::vector<double>> delta(T, std::vector<double>(L, 0.0));
  std::vector<std::vector<std::size_t>> back(T, std::vector<std::size_t>(L, 0));
  delta[0] = em[0];
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      double best = kNegInf;
      std::size_t arg = 0;
      for (std::size_t p = 0; p < L; ++p) {
        const double s = delta[t - 1][p] + model.transition_weight(p, y);
        if (s > best) {  // strict: ties keep the lower label index
          best = s;
          arg = p;
        }
      }
      delta[t][y] = best + em[t][y];
      back[t][y] = arg;
    }
  }

  double best = kNegInf;
  std::size_t arg = 0;
  for (std::size_t y = 0; y < L; ++y) {
    if (delta[T - 1][y] > best) {
      best = delta[T - 1][y];
      arg = y;
    }
  }

  std::vector<std::size_t> path(T);
  path[T - 1] = arg;
  for (std::size_t t = T - 1; t > 0; --t) path[t - 1] = back[t][path[t]];
  return path;
}

LossGrad nll_gradient(const CrfModel& model, const std::vector<FeatureVector>& features,
                      const std::vector<std::size_t>& gold) {
  require_nonempty(features, "nll_gradient");
  if (gold.size() != features.size())
    throw std::invalid_argument("nll_gradient: label/feature length mismatch");
  const std::size_t L = model.n_labels();
  for (const std::size_t y : gold)
    if (y >= L) throw std::invalid_argument("nll_gradient: label out of tagset");

  const auto em = emission_scores(model, features);
  const auto fb = forward_backward(model, em);
  const std::size_t T = em.size();

  double gold_score = 0;
  for (std::size_t t = 0; t < T; ++t) {
    gold_score += em[t][gold[t]];
    if (t > 0) gold_score += model.transition_weight(gold[t - 1], gold[t]);
  }

  LossGrad out;
  out.d_emission.assign(model.emission.size(), 0.0);
  out.d_transition.assign(model.transition.size(), 0.0);

  // Expected minus empirical counts.
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      const double p = std::exp(fb.alpha[t][y] + fb.beta[t][y] - fb.log_z);
      const double diff = p - (y == gold[t] ? 1.0 : 0.0);
      if (diff == 0.0) continue;
      for (const auto& [id, x] : features[t].items)
        out.d_emission[id * L + y] += diff * x;
    }
  }
  for (std::size_t t = 0; t + 1 < T; ++t) {
    for (std::size_t p = 0; p < L; ++p) {
      for (std::size_t y = 0; y < L; ++y) {
        const double prob =
            std::exp(fb.alpha[t][p] + model.transition_weight(p, y) + em[t + 1][y] +
                     fb.beta[t + 1][y] - fb.log_z);
        const double diff =
            prob - (p == gold[t] && y == gold[t + 1] ? 1.0 : 0.0);
        out.d_transition[p * L + y] += diff;
      }
    }
  }

  double reg = 0;
  const double l2 = model.config.l2;
  if (l2 > 0) {
    for (std::size_t i = 0; i < model.emission.size(); ++i) {
      reg += model.emission[i] * model.emission[i];
      out.d_emission[i] += l2 * model.emission[i];
    }
    for (std::size_t i = 0; i < model.transition.size(); ++i) {
      reg += model.transition[i] * model.transition[i];
      out.d_transition[i] += l2 * model.transition[i];
    }
  }
  out.loss = fb.log_z - gold_score + 0.5 * l2 * reg;
  return out;
}

CrfModel train_crf(const std::vector<TaggedSequence>& data, const TagSet& tagset,
                   const Vocabulary& vocabulary, const TrainConfig& config) {
  if (data.empty()) throw std::invalid_argument("train_crf: no training data");
  const std::size_t L = tagset.size();
  for (const auto& seq : data) {
    if (seq.features.empty())
      throw std::invalid_argument("train_crf: empty sequence in training data");
    if (seq.features.size() != seq.labels.size())
      throw std::invalid_argument("train_crf: label/feature length mismatch");
    for (const std::size_t y : seq.labels)
      if (y >= L) throw std::invalid_argument("train_crf: label out of tagset");
  }

  CrfModel model;
  model.tagset = tagset;
  model.vocabulary = vocabulary;
  model.config = config;
  model.emission.assign(vocabulary.size() * L, 0.0);
  model.transition.assign(L * L, 0.0);

  Rng rng(config.seed);
  auto order = index_range(data.size());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate / (1.0 + static_cast<double>(epoch));
    shuffle_indices(order, rng);
    for (const std::size_t si : order) {
      const auto& seq = data[si];
      const auto em = emission_scores(model, seq.features);
      const auto fb = forward_backward(model, em);
      const std::size_t T = em.size();

      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t y = 0; y < L; ++y) {
          const double p = std::exp(fb.alpha[t][y] + fb.beta[t][y] - fb.log_z);
          const double diff = p - (y == seq.labels[t] ? 1.0 : 0.0);
          if (diff == 0.0) continue;
          for (const auto& [id, x] : seq.features[t].items)
            model.emission[id * L + y] -= lr * diff * x;
        }
      }
      // L2 once per feature the sequence touches.
      if (config.l2 > 0) {
        std::vector<std::uint32_t> active;
        for (const auto& fv : seq.features)
          for (const auto& [id, x] : fv.items) {
            (void)x;
            active.push_back(id);
          }
        std::sort(active.begin(), active.end());
        active.erase(std::unique(active.begin(), active.end()), active.end());
        for (const std::uint32_t id : active)
          for (std::size_t y = 0; y < L; ++y)
            model.emission[id * L + y] -= lr * config.l2 * model.emission[id * L + y];
      }
      for (std::size_t t = 0; t + 1 < T; ++t) {
        for (std::size_t p = 0; p < L; ++p) {
          for (std::size_t y = 0; y < L; ++y) {
            const double prob = std::exp(fb.alpha[t][p] + model.transition_weight(p, y) +
                                         em[t + 1][y] + fb.beta[t + 1][y] - fb.log_z);
            const double diff =
                prob - (p == seq.labels[t] && y == seq.labels[t + 1] ? 1.0 : 0.0);
            model.transition[p * L + y] -= lr * diff;
          }
        }
      }
      if (config.l2 > 0)
        for (double& w : model.transition) w -= lr * config.l2 * w;
    }
  }

  double loss = 0;
  {
    CrfModel data_term = model;
    data_term.config.l2 = 0;
    for (const auto& seq : data)
      loss += nll_gradient(data_term, seq.features, seq.labels).loss;
    double reg = 0;
    for (const double w : model.emission) reg += w * w;
    for (const double w : model.transition) reg += w * w;
    loss += 0.5 * config.l2 * reg;
  }
  model.final_loss = loss;
  return model;
}

std::vector<std::pair<std::string, Span>> decode_bio_spans(
    const std::vector<std::size_t>& labels, const TagSet& tagset,
    const std::vector<textproc::Token>& tokens) {
  if (labels.size() != tokens.size())
    throw std::invalid_argument("decode_bio_spans: label/token length mismatch");
  std::vector<std::pair<std::string, Span>> spans;

  std::string open_category;
  Span open_span;
  const auto close = [&]() {
    if (!open_category.empty()) spans.emplace_back(open_category, open_span);
    open_category.clear();
  };

  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t y = labels[i];
    if (y == 0 || y >= tagset.size()) {
      close();
      continue;
    }
    const std::string cat(tagset.category_of(y));
    const bool continues =
        tagset.is_inside(y) && !open_category.empty() && open_category == cat;
    if (continues) {
      open_span.end = tokens[i].span.end;
    } else {
      // B- starts a span; a dangling I- is repaired to B-.
      close();
      open_category = cat;
      open_span = tokens[i].span;
    }
  }
  close();
  return spans;
}

void CrfModel::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["model_kind"] = kModelKind;
  j["format_version"] = kFormatVersion;
  j["labels"] = tagset.labels;
  j["vocabulary"] = vocabulary.names();
  j["emission"] = emission;
  j["transition"] = transition;
  j["config"] = model_io::config_to_json(config);
  j["final_loss"] = final_loss;
  model_io::write_file(path, j.dump() + "\n");
}

CrfModel CrfModel::load(const std::filesystem::path& path) {
  const nlohmann::json j = model_io::load_model_json(path, kModelKind, kFormatVersion);
  CrfModel model;
  model.tagset.labels = j.at("labels").get<std::vector<std::string>>();
  model.vocabulary =
      Vocabulary::from_names(j.at("vocabulary").get<std::vector<std::string>>());
  model.emission = j.at("emission").get<std::vector<double>>();
  model.transition = j.at("transition").get<std::vector<double>>();
  model.config = model_io::config_from_json(j.at("config"));
  model.final_loss = j.value("final_loss", 0.0);
  const std::size_t L = model.tagset.size();
  if (model.transition.size() != L * L ||
      model.emission.size() != model.vocabulary.size() * L)
    throw std::runtime_error(path.string() + ": inconsistent weight shapes");
  return model;
}

}  // namespace sdoh::crf
