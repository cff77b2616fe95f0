#ifndef SDOH_TESTS_CRF_REFERENCE_HPP
#define SDOH_TESTS_CRF_REFERENCE_HPP

// Brute-force reference for the CRF quantities, independent of the
// forward-backward implementation: enumerates every one of the L^T labelings.

#include <cmath>
#include <limits>
#include <vector>

#include "sdoh/crf.hpp"

namespace crf_reference {

inline double path_score(const sdoh::crf::CrfModel& model,
                         const std::vector<sdoh::crf::FeatureVector>& features,
                         const std::vector<std::size_t>& path) {
  const std::size_t L = model.n_labels();
  double score = 0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    for (const auto& [id, x] : features[t].items)
      score += model.emission[id * L + path[t]] * x;
    if (t > 0) score += model.transition_weight(path[t - 1], path[t]);
  }
  return score;
}

template <typename Fn>
void for_each_path(std::size_t T, std::size_t L, Fn&& fn) {
  std::vector<std::size_t> path(T, 0);
  while (true) {
    fn(path);
    std::size_t t = 0;
    while (t < T) {
      if (++path[t] < L) break;
      path[t] = 0;
      ++t;
    }
    if (t == T) return;
  }
}

inline double log_partition(const sdoh::crf::CrfModel& model,
                            const std::vector<sdoh::crf::FeatureVector>& features) {
  const std::size_t T = features.size();
  const std::size_t L = model.n_labels();
  double max_score = -std::numeric_limits<double>::infinity();
  for_each_path(T, L, [&](const std::vector<std::size_t>& path) {
    max_score = std::max(max_score, path_score(model, features, path));
  });
  double sum = 0;
  for_each_path(T, L, [&](const std::vector<std::size_t>& path) {
    sum += std::exp(path_score(model, features, path) - max_score);
  });
  return max_score + std::log(sum);
}

struct Reference {
  double log_z;
  std::vector<std::vector<double>> node;  // [t][y]
  std::vector<std::vector<double>> edge;  // [t][prev*L+next]
  std::vector<std::size_t> viterbi;
};

inline Reference compute(const sdoh::crf::CrfModel& model,
                         const std::vector<sdoh::crf::FeatureVector>& features) {
  const std::size_t T = features.size();
  const std::size_t L = model.n_labels();
  Reference ref;
  ref.log_z = crf_reference::log_partition(model, features);
  ref.node.assign(T, std::vector<double>(L, 0.0));
  ref.edge.assign(T > 0 ? T - 1 : 0, std::vector<double>(L * L, 0.0));

  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_path;
  for_each_path(T, L, [&](const std::vector<std::size_t>& path) {
    const double s = path_score(model, features, path);
    const double p = std::exp(s - ref.log_z);
    for (std::size_t t = 0; t < T; ++t) {
      ref.node[t][path[t]] += p;
      if (t + 1 < T) ref.edge[t][path[t] * L + path[t + 1]] += p;
    }
    // The decoder breaks ties toward the lower label index at each
    // backpointer, which picks the optimal path whose reversed label
    // sequence is lexicographically smallest.
    bool better = s > best;
    if (!better && s == best) {
      for (std::size_t t = T; t-- > 0;) {
        if (path[t] != best_path[t]) {
          better = path[t] < best_path[t];
          break;
        }
      }
    }
    if (better) {
      best = s;
      best_path = path;
    }
  });
  ref.viterbi = best_path;
  return ref;
}

}  // namespace crf_reference

#endif
