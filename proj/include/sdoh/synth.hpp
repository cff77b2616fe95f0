#ifndef SDOH_SYNTH_HPP
#define SDOH_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "sdoh/brat.hpp"
#include "sdoh/schema.hpp"

namespace sdoh::synth {

struct GenConfig {
  std::uint64_t seed = 7;
  std::size_t n_documents = 200;
  double distractor_rate = 0.5;        // chance of a filler sentence per event sentence
  std::string template_version = "v1";
};

// Deterministic synthetic social-history documents with gold annotations
// emitted by construction. The template inventory covers every event type,
// every labeled value, and every span-only argument; the first event sentence
// of document i cycles through the inventory so that coverage does not depend
// on sampling luck. Identical config -> byte-identical corpus.
std::vector<brat::AnnotatedDocument> generate_corpus(const GenConfig& config,
                                                     const Schema& schema);

}  // namespace sdoh::synth

#endif
