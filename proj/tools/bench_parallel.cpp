// Benchmark comparing the OpenMP corpus kernels against their serial
// reference implementations: scoring, S1 prediction, and S3 prediction.
//
//   sdoh_bench [--docs N] [--reps R] [--seed S]

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sdoh/corpus.hpp"
#include "sdoh/pipeline_s1.hpp"
#include "sdoh/pipeline_s3.hpp"
#include "sdoh/scorer.hpp"
#include "sdoh/synth.hpp"

using namespace sdoh;
using Clock = std::chrono::steady_clock;

namespace {

template <typename Fn>
double time_best_ms(std::size_t reps, Fn&& fn) {
  double best = 1e300;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void print_row(const char* name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-14s %10.1f ms %10.1f ms %8.2fx   %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, equal ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_docs = 400;
  std::size_t reps = 3;
  std::uint64_t seed = 7;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--docs")
      n_docs = std::stoul(argv[i + 1]);
    else if (key == "--reps")
      reps = std::stoul(argv[i + 1]);
    else if (key == "--seed")
      seed = std::stoull(argv[i + 1]);
    else {
      std::fprintf(stderr, "usage: sdoh_bench [--docs N] [--reps R] [--seed S]\n");
      return 2;
    }
  }

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run serially\n");
#endif

  const Schema schema = default_schema();
  synth::GenConfig gen;
  gen.seed = seed;
  gen.n_documents = n_docs;
  const auto docs = synth::generate_corpus(gen, schema);
  std::vector<brat::TextDocument> texts;
  for (const auto& doc : docs) texts.push_back(doc.document);
  const auto gold = corpus::normalize_corpus(docs, schema);
  std::printf("corpus: %zu documents\n\n", docs.size());

  const std::size_t n_train = std::min<std::size_t>(150, docs.size());
  const auto train_docs =
      s1::to_train_documents({docs.begin(), docs.begin() + n_train}, schema);

  s1::S1Config s1_config;
  s1_config.classifier.epochs = 12;
  s1_config.tagger.epochs = 6;
  const auto s1_model = s1::train_s1(train_docs, schema, s1_config);

  TrainConfig s3_config;
  s3_config.epochs = 8;
  const auto detector = s3::train_phrase_detector(train_docs, schema, s3_config);
  const auto rules = s3::load_ruleset_file(
      std::filesystem::path(SDOH_DATA_DIR) / "starter.rules", schema);

  std::printf("%-14s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  {
    const auto pred = s1::predict_corpus_s1(s1_model, texts);
    const auto serial_report = score::score_corpus_serial(gold, pred, schema);
    score::ScoreReport parallel_report;
    const double serial_ms = time_best_ms(
        reps, [&] { (void)score::score_corpus_serial(gold, pred, schema); });
    const double parallel_ms = time_best_ms(
        reps, [&] { parallel_report = score::score_corpus(gold, pred, schema); });
    print_row("score", serial_ms, parallel_ms, parallel_report == serial_report);
  }
  {
    score::EventCorpus parallel;
    const auto serial = s1::predict_corpus_s1_serial(s1_model, texts);
    const double serial_ms = time_best_ms(
        reps, [&] { (void)s1::predict_corpus_s1_serial(s1_model, texts); });
    const double parallel_ms =
        time_best_ms(reps, [&] { parallel = s1::predict_corpus_s1(s1_model, texts); });
    bool equal = parallel.size() == serial.size();
    for (std::size_t i = 0; equal && i < serial.size(); ++i)
      equal = serial[i].events == parallel[i].events;
    print_row("s1 predict", serial_ms, parallel_ms, equal);
  }
  {
    score::EventCorpus parallel;
    const auto serial = s3::predict_corpus_s3_serial(detector, rules, texts, schema);
    const double serial_ms = time_best_ms(reps, [&] {
      (void)s3::predict_corpus_s3_serial(detector, rules, texts, schema);
    });
    const double parallel_ms = time_best_ms(reps, [&] {
      parallel = s3::predict_corpus_s3(detector, rules, texts, schema);
    });
    bool equal = parallel.size() == serial.size();
    for (std::size_t i = 0; equal && i < serial.size(); ++i)
      equal = serial[i].events == parallel[i].events;
    print_row("s3 predict", serial_ms, parallel_ms, equal);
  }

  return 0;
}
