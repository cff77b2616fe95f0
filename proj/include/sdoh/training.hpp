#ifndef SDOH_TRAINING_HPP
#define SDOH_TRAINING_HPP

#include <cstdint>
#include <numeric>
#include <vector>

namespace sdoh {

struct TrainConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 30;
  double l2 = 1e-4;
  std::uint64_t seed = 7;
  double threshold = 0.5;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// splitmix64; used to derive independent streams from one seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Small self-contained generator so shuffles are identical on every
// platform (std::shuffle is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}

  std::uint64_t next() {
    state_ = mix64(state_);
    return state_;
  }

  // Uniform in [0, n); n > 0.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.below(i)]);
}

inline std::vector<std::size_t> index_range(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace sdoh

#endif
