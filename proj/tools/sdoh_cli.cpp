// Command-line entry point wiring all toolkit modules together.
//
// Exit codes: 0 success, 1 findings under --strict, 2 usage or input error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdoh/codec.hpp"
#include "sdoh/corpus.hpp"
#include "sdoh/pipeline_s1.hpp"
#include "sdoh/pipeline_s3.hpp"
#include "sdoh/schema.hpp"
#include "sdoh/scorer.hpp"
#include "sdoh/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "sdoh 0.1.0";

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

sdoh::Schema load_schema_opt(const std::string& path) {
  return path.empty() ? sdoh::default_schema() : sdoh::load_schema_file(path);
}

void write_text_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
}

// Every run records its effective configuration; the hash pins it.
void write_manifest(const fs::path& path, const std::string& command,
                    json options) {
  json manifest;
  manifest["tool"] = kToolVersion;
  manifest["command"] = command;
  manifest["options"] = std::move(options);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "fnv1a:%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(manifest["options"].dump())));
  manifest["config_hash"] = hash;
  write_text_file(path, manifest.dump(2) + "\n");
}

int report_findings(const std::vector<sdoh::Finding>& findings, bool strict) {
  for (const auto& f : findings) std::cout << sdoh::to_string(f) << "\n";
  std::cout << (findings.empty() ? "no findings\n"
                                 : std::to_string(findings.size()) + " finding(s)\n");
  return findings.empty() || !strict ? 0 : 1;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string dir;
  std::string schema;
  bool strict = false;
};

int run_validate(const ValidateArgs& args) {
  const sdoh::Schema schema = load_schema_opt(args.schema);
  std::vector<sdoh::Finding> findings;
  const auto docs = sdoh::corpus::read_corpus(args.dir);
  for (const auto& doc : docs) {
    for (sdoh::Finding f : sdoh::brat::validate_document(doc)) {
      f.where = doc.document.doc_id + "/" + f.where;
      findings.push_back(std::move(f));
    }
  }
  sdoh::corpus::normalize_corpus(docs, schema, &findings);
  std::cout << docs.size() << " document(s) checked\n";
  return report_findings(findings, args.strict);
}

// ------------------------------------------------------------------- synth

struct SynthArgs {
  std::uint64_t seed = 7;
  std::size_t n = 200;
  double distractor_rate = 0.5;
  std::string out;
  std::string split;
  std::string schema;
};

int run_synth(const SynthArgs& args) {
  const sdoh::Schema schema = load_schema_opt(args.schema);
  sdoh::synth::GenConfig config;
  config.seed = args.seed;
  config.n_documents = args.n;
  config.distractor_rate = args.distractor_rate;
  const auto docs = sdoh::synth::generate_corpus(config, schema);

  json options{{"seed", args.seed},
               {"n", args.n},
               {"distractor_rate", args.distractor_rate},
               {"split", args.split},
               {"schema_version", schema.version},
               {"template_version", config.template_version}};

  if (args.split.empty()) {
    sdoh::corpus::write_corpus(args.out, docs);
  } else {
    double a = 0, b = 0, c = 0;
    if (std::sscanf(args.split.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3 ||
        a <= 0 || b < 0 || c < 0 || a + b + c > 1.0001)
      throw std::runtime_error("--split expects three fractions like 0.8,0.1,0.1");
    const auto n = docs.size();
    const std::size_t n_train = static_cast<std::size_t>(a * n);
    const std::size_t n_dev = static_cast<std::size_t>(b * n);
    std::vector<sdoh::brat::AnnotatedDocument> train(docs.begin(),
                                                     docs.begin() + n_train);
    std::vector<sdoh::brat::AnnotatedDocument> dev(
        docs.begin() + n_train, docs.begin() + n_train + n_dev);
    std::vector<sdoh::brat::AnnotatedDocument> test(docs.begin() + n_train + n_dev,
                                                    docs.end());
    sdoh::corpus::write_corpus(fs::path(args.out) / "train", train);
    sdoh::corpus::write_corpus(fs::path(args.out) / "dev", dev);
    sdoh::corpus::write_corpus(fs::path(args.out) / "test", test);
  }
  fs::create_directories(args.out);
  write_manifest(fs::path(args.out) / "manifest.json", "synth", options);
  std::cout << "wrote " << docs.size() << " documents to " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------- s1

struct S1TrainArgs {
  std::string in;
  std::string model_dir;
  std::string schema;
  std::uint64_t seed = 7;
  std::size_t epochs = 30;
  std::size_t tagger_epochs = 12;
  double lr = 0.5;
  double l2 = 1e-4;
};

int run_s1_train(const S1TrainArgs& args) {
  const sdoh::Schema schema = load_schema_opt(args.schema);
  const auto docs = sdoh::corpus::read_corpus(args.in);
  const auto train_docs = sdoh::s1::to_train_documents(docs, schema);

  sdoh::s1::S1Config config;
  config.classifier.seed = args.seed;
  config.classifier.epochs = args.epochs;
  config.classifier.learning_rate = args.lr;
  config.classifier.l2 = args.l2;
  config.tagger = config.classifier;
  config.tagger.epochs = args.tagger_epochs;

  const auto model = sdoh::s1::train_s1(train_docs, schema, config);
  model.save(args.model_dir);
  write_manifest(fs::path(args.model_dir) / "run_manifest.json", "s1 train",
                 {{"in", args.in},
                  {"seed", args.seed},
                  {"epochs", args.epochs},
                  {"tagger_epochs", args.tagger_epochs},
                  {"lr", args.lr},
                  {"l2", args.l2},
                  {"schema_version", schema.version},
                  {"documents", docs.size()}});
  std::cout << "trained on " << docs.size() << " documents -> " << args.model_dir
            << "\n";
  return 0;
}

struct PredictArgs {
  std::string in;
  std::string model;
  std::string rules;  // s3 only
  std::string out;
  std::string schema;  // s3 only
  bool emit_incomplete = false;
  bool serial = false;
};

void write_predictions(const fs::path& out_dir,
                       const std::vector<sdoh::brat::TextDocument>& texts,
                       const sdoh::score::EventCorpus& predictions,
                       const sdoh::Schema& schema) {
  std::vector<sdoh::brat::AnnotatedDocument> docs;
  for (std::size_t i = 0; i < texts.size(); ++i)
    docs.push_back(sdoh::denormalize_events(predictions[i].events, texts[i].doc_id,
                                            texts[i].text, schema));
  sdoh::corpus::write_corpus(out_dir, docs);
}

int run_s1_predict(const PredictArgs& args) {
  const auto model = sdoh::s1::S1Model::load(args.model);
  const auto texts = sdoh::corpus::read_texts(args.in);
  const auto predictions =
      args.serial ? sdoh::s1::predict_corpus_s1_serial(model, texts)
                  : sdoh::s1::predict_corpus_s1(model, texts);
  write_predictions(args.out, texts, predictions, model.schema);
  write_manifest(fs::path(args.out) / "manifest.json", "s1 predict",
                 {{"in", args.in},
                  {"model", args.model},
                  {"serial", args.serial},
                  {"documents", texts.size()}});
  std::cout << "predicted " << texts.size() << " documents -> " << args.out << "\n";
  return 0;
}

struct S3TrainArgs {
  std::string in;
  std::string model;
  std::string schema;
  std::uint64_t seed = 7;
  std::size_t epochs = 12;
  double lr = 0.5;
  double l2 = 1e-4;
};

int run_s3_train(const S3TrainArgs& args) {
  const sdoh::Schema schema = load_schema_opt(args.schema);
  const auto docs = sdoh::corpus::read_corpus(args.in);
  const auto train_docs = sdoh::s1::to_train_documents(docs, schema);

  sdoh::TrainConfig config;
  config.seed = args.seed;
  config.epochs = args.epochs;
  config.learning_rate = args.lr;
  config.l2 = args.l2;

  const auto detector = sdoh::s3::train_phrase_detector(train_docs, schema, config);
  detector.save(args.model);
  write_manifest(fs::path(args.model).string() + ".manifest.json", "s3 train",
                 {{"in", args.in},
                  {"seed", args.seed},
                  {"epochs", args.epochs},
                  {"lr", args.lr},
                  {"l2", args.l2},
                  {"schema_version", schema.version},
                  {"documents", docs.size()},
                  {"final_loss", detector.final_loss}});
  std::cout << "trained phrase detector on " << docs.size() << " documents -> "
            << args.model << "\n";
  return 0;
}

int run_s3_predict(const PredictArgs& args) {
  const sdoh::Schema schema = load_schema_opt(args.schema);
  const auto detector = sdoh::crf::CrfModel::load(args.model);
  const auto rules = sdoh::s3::load_ruleset_file(args.rules, schema);
  const auto texts = sdoh::corpus::read_texts(args.in);
  const sdoh::s3::LinkOptions options{args.emit_incomplete};
  const auto predictions =
      args.serial
          ? sdoh::s3::predict_corpus_s3_serial(detector, rules, texts, schema, options)
          : sdoh::s3::predict_corpus_s3(detector, rules, texts, schema, options);
  write_predictions(args.out, texts, predictions, schema);
  write_manifest(fs::path(args.out) / "manifest.json", "s3 predict",
                 {{"in", args.in},
                  {"model", args.model},
                  {"rules", args.rules},
                  {"emit_incomplete", args.emit_incomplete},
                  {"serial", args.serial},
                  {"documents", texts.size()}});
  std::cout << "predicted " << texts.size() << " documents -> " << args.out << "\n";
  return 0;
}

// ------------------------------------------------------------------- score

struct ScoreArgs {
  std::string gold;
  std::string pred;
  std::string schema;
  std::string json_out;
  std::string tsv_out;
  bool serial = false;
  bool strict = false;
};

int run_score(const ScoreArgs& args) {
  const sdoh::Schema schema = load_schema_opt(args.schema);
  const auto gold_docs = sdoh::corpus::read_corpus(args.gold);
  const auto pred_docs = sdoh::corpus::read_corpus(args.pred);
  std::vector<sdoh::Finding> findings;
  const auto gold = sdoh::corpus::normalize_corpus(gold_docs, schema, &findings);
  const auto pred = sdoh::corpus::normalize_corpus(pred_docs, schema, &findings);

  const auto report = args.serial ? sdoh::score::score_corpus_serial(gold, pred, schema)
                                  : sdoh::score::score_corpus(gold, pred, schema);
  findings.insert(findings.end(), report.findings.begin(), report.findings.end());

  const json options{{"gold", args.gold},     {"pred", args.pred},
                     {"json", args.json_out}, {"tsv", args.tsv_out},
                     {"serial", args.serial}, {"schema_version", schema.version}};
  if (!args.json_out.empty()) {
    write_text_file(args.json_out, sdoh::score::to_json(report));
    write_manifest(args.json_out + ".manifest.json", "score", options);
  }
  if (!args.tsv_out.empty()) {
    write_text_file(args.tsv_out, sdoh::score::to_tsv(report));
    if (args.json_out.empty())
      write_manifest(args.tsv_out + ".manifest.json", "score", options);
  }

  char line[160];
  std::snprintf(line, sizeof(line),
                "OVERALL positives=%ld tp=%ld pp=%ld precision=%.4f recall=%.4f "
                "f1=%.4f\n",
                report.overall.positives, report.overall.true_positives,
                report.overall.predicted_positives, report.metrics.precision,
                report.metrics.recall, report.metrics.f1);
  std::cout << line;
  for (const auto& f : findings) std::cerr << sdoh::to_string(f) << "\n";
  return findings.empty() || !args.strict ? 0 : 1;
}

// ------------------------------------------------------------------- codec

struct CodecArgs {
  std::string in;      // encode: corpus dir
  std::string tables;  // decode: generated tables dir
  std::string text;    // decode: narrative dir
  std::string out;
  std::string schema;
  bool train = false;
  bool emit_tables = false;
};

int run_codec_encode(const CodecArgs& args) {
  const sdoh::Schema schema = load_schema_opt(args.schema);
  fs::create_directories(args.out);
  std::size_t files = 0;

  const auto encode_one = [&](const std::string& doc_id, const std::string& text,
                              const std::vector<sdoh::SdohEvent>* gold) {
    for (const auto& et : schema.event_types) {
      std::vector<sdoh::SdohEvent> typed;
      if (gold)
        for (const auto& event : *gold)
          if (event.event_type == et.name) typed.push_back(event);
      const auto sandwich = sdoh::codec::build_sandwich(
          text, et.name, gold ? &typed : nullptr, schema);
      write_text_file(fs::path(args.out) / (doc_id + "." + et.name + ".prompt.txt"),
                      sdoh::codec::render_sandwich(sandwich));
      ++files;
      if (args.emit_tables && gold) {
        write_text_file(fs::path(args.out) / (doc_id + "." + et.name + ".table.txt"),
                        sdoh::codec::render_table(
                            sdoh::codec::events_to_table(typed, et.name, schema)));
        ++files;
      }
    }
  };

  if (args.train) {
    for (const auto& doc : sdoh::corpus::read_corpus(args.in)) {
      const auto events = sdoh::normalize_events(doc, schema).events;
      encode_one(doc.document.doc_id, doc.document.text, &events);
    }
  } else {
    for (const auto& doc : sdoh::corpus::read_texts(args.in))
      encode_one(doc.doc_id, doc.text, nullptr);
  }

  write_manifest(fs::path(args.out) / "manifest.json", "codec encode",
                 {{"in", args.in},
                  {"train", args.train},
                  {"emit_tables", args.emit_tables},
                  {"schema_version", schema.version}});
  std::cout << "wrote " << files << " sandwich file(s) to " << args.out << "\n";
  return 0;
}

int run_codec_decode(const CodecArgs& args) {
  const sdoh::Schema schema = load_schema_opt(args.schema);
  const auto texts = sdoh::corpus::read_texts(args.text);
  std::vector<sdoh::Finding> findings;

  std::vector<sdoh::brat::AnnotatedDocument> out_docs;
  for (const auto& doc : texts) {
    std::vector<sdoh::SdohEvent> events;
    const std::string narrative = sdoh::codec::strip_newlines(doc.text);
    for (const auto& et : schema.event_types) {
      const fs::path table =
          fs::path(args.tables) / (doc.doc_id + "." + et.name + ".table.txt");
      if (!fs::exists(table)) continue;
      std::ifstream in(table, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      auto decoded = sdoh::codec::parse_table(buf.str(), narrative, et.name, schema);
      for (sdoh::Finding& f : decoded.findings) {
        f.where = doc.doc_id + "/" + f.where;
        findings.push_back(std::move(f));
      }
      for (auto& event : decoded.events) events.push_back(std::move(event));
    }
    out_docs.push_back(sdoh::denormalize_events(events, doc.doc_id, doc.text, schema));
  }
  sdoh::corpus::write_corpus(args.out, out_docs);
  write_manifest(fs::path(args.out) / "manifest.json", "codec decode",
                 {{"tables", args.tables},
                  {"text", args.text},
                  {"schema_version", schema.version},
                  {"documents", out_docs.size()}});
  std::cout << "decoded " << out_docs.size() << " document(s) -> " << args.out << "\n";
  for (const auto& f : findings) std::cerr << sdoh::to_string(f) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDOH event extraction toolkit"};
  app.require_subcommand(1);

  ValidateArgs validate_args;
  CLI::App* validate = app.add_subcommand("validate", "check a brat corpus directory");
  validate->add_option("dir", validate_args.dir, "corpus directory")->required();
  validate->add_option("--schema", validate_args.schema, "schema config file");
  validate->add_flag("--strict", validate_args.strict, "exit 1 on findings");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--seed", synth_args.seed, "generator seed");
  synth->add_option("--n", synth_args.n, "number of documents");
  synth->add_option("--distractor-rate", synth_args.distractor_rate,
                    "filler sentence probability");
  synth->add_option("--out", synth_args.out, "output directory")->required();
  synth->add_option("--split", synth_args.split, "train,dev,test fractions");
  synth->add_option("--schema", synth_args.schema, "schema config file");

  CLI::App* s1 = app.add_subcommand("s1", "classifier + tagger pipeline");
  s1->require_subcommand(1);
  S1TrainArgs s1_train_args;
  CLI::App* s1_train = s1->add_subcommand("train", "train the S1 models");
  s1_train->add_option("--in", s1_train_args.in, "training corpus")->required();
  s1_train->add_option("--model-dir", s1_train_args.model_dir, "output bundle dir")
      ->required();
  s1_train->add_option("--schema", s1_train_args.schema, "schema config file");
  s1_train->add_option("--seed", s1_train_args.seed, "training seed");
  s1_train->add_option("--epochs", s1_train_args.epochs, "classifier epochs");
  s1_train->add_option("--tagger-epochs", s1_train_args.tagger_epochs, "CRF epochs");
  s1_train->add_option("--lr", s1_train_args.lr, "learning rate");
  s1_train->add_option("--l2", s1_train_args.l2, "L2 strength");

  PredictArgs s1_predict_args;
  CLI::App* s1_predict = s1->add_subcommand("predict", "predict with an S1 bundle");
  s1_predict->add_option("--in", s1_predict_args.in, "input directory of .txt")
      ->required();
  s1_predict->add_option("--model-dir", s1_predict_args.model, "model bundle dir")
      ->required();
  s1_predict->add_option("--out", s1_predict_args.out, "output directory")->required();
  s1_predict->add_flag("--serial", s1_predict_args.serial, "disable parallelism");

  CLI::App* s3 = app.add_subcommand("s3", "phrase detector + rule pipeline");
  s3->require_subcommand(1);
  S3TrainArgs s3_train_args;
  CLI::App* s3_train = s3->add_subcommand("train", "train the joint phrase detector");
  s3_train->add_option("--in", s3_train_args.in, "training corpus")->required();
  s3_train->add_option("--model", s3_train_args.model, "output model file")->required();
  s3_train->add_option("--schema", s3_train_args.schema, "schema config file");
  s3_train->add_option("--seed", s3_train_args.seed, "training seed");
  s3_train->add_option("--epochs", s3_train_args.epochs, "CRF epochs");
  s3_train->add_option("--lr", s3_train_args.lr, "learning rate");
  s3_train->add_option("--l2", s3_train_args.l2, "L2 strength");

  PredictArgs s3_predict_args;
  CLI::App* s3_predict = s3->add_subcommand("predict", "detect phrases and link rules");
  s3_predict->add_option("--in", s3_predict_args.in, "input directory of .txt")
      ->required();
  s3_predict->add_option("--model", s3_predict_args.model, "detector model file")
      ->required();
  s3_predict->add_option("--rules", s3_predict_args.rules, "linking rule file")
      ->required();
  s3_predict->add_option("--out", s3_predict_args.out, "output directory")->required();
  s3_predict->add_option("--schema", s3_predict_args.schema, "schema config file");
  s3_predict->add_flag("--emit-incomplete", s3_predict_args.emit_incomplete,
                       "keep events missing mandatory arguments");
  s3_predict->add_flag("--serial", s3_predict_args.serial, "disable parallelism");

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "score predictions against gold");
  score->add_option("--gold", score_args.gold, "gold corpus directory")->required();
  score->add_option("--pred", score_args.pred, "predicted corpus directory")
      ->required();
  score->add_option("--schema", score_args.schema, "schema config file");
  score->add_option("--json", score_args.json_out, "JSON report path");
  score->add_option("--tsv", score_args.tsv_out, "TSV report path");
  score->add_flag("--serial", score_args.serial, "disable parallelism");
  score->add_flag("--strict", score_args.strict, "exit 1 on findings");

  CLI::App* codec = app.add_subcommand("codec", "table/prompt encoding and decoding");
  codec->require_subcommand(1);
  CodecArgs encode_args;
  CLI::App* encode = codec->add_subcommand("encode", "write prompt sandwiches");
  encode->add_option("--in", encode_args.in, "corpus or text directory")->required();
  encode->add_option("--out", encode_args.out, "output directory")->required();
  encode->add_option("--schema", encode_args.schema, "schema config file");
  encode->add_flag("--train", encode_args.train, "append gold rows (needs .ann)");
  encode->add_flag("--emit-tables", encode_args.emit_tables,
                   "also write gold .table.txt files (with --train)");

  CodecArgs decode_args;
  CLI::App* decode = codec->add_subcommand("decode", "parse generated tables");
  decode->add_option("--tables", decode_args.tables, "directory of *.table.txt")
      ->required();
  decode->add_option("--text", decode_args.text, "directory of narratives")
      ->required();
  decode->add_option("--out", decode_args.out, "output corpus directory")->required();
  decode->add_option("--schema", decode_args.schema, "schema config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return run_validate(validate_args);
    if (synth->parsed()) return run_synth(synth_args);
    if (s1->parsed() && s1_train->parsed()) return run_s1_train(s1_train_args);
    if (s1->parsed() && s1_predict->parsed()) return run_s1_predict(s1_predict_args);
    if (s3->parsed() && s3_train->parsed()) return run_s3_train(s3_train_args);
    if (s3->parsed() && s3_predict->parsed()) return run_s3_predict(s3_predict_args);
    if (score->parsed()) return run_score(score_args);
    if (codec->parsed() && encode->parsed()) return run_codec_encode(encode_args);
    if (codec->parsed() && decode->parsed()) return run_codec_decode(decode_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
