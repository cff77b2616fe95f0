#ifndef SDOH_SRC_MODEL_IO_HPP
#define SDOH_SRC_MODEL_IO_HPP

// Shared pieces of the versioned JSON model persistence scheme.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sdoh/schema.hpp"
#include "sdoh/textproc.hpp"
#include "sdoh/training.hpp"

namespace sdoh::model_io {

inline nlohmann::json target_to_json(const Target& t) {
  nlohmann::json j;
  switch (t.kind) {
    case TargetKind::Trigger: j["kind"] = "trigger"; break;
    case TargetKind::LabeledValue: j["kind"] = "labeled_value"; break;
    case TargetKind::SpanOnly: j["kind"] = "span_only"; break;
    case TargetKind::Overall: j["kind"] = "overall"; break;
  }
  j["event_type"] = t.event_type;
  if (!t.arg_name.empty()) j["arg"] = t.arg_name;
  if (!t.value.empty()) j["value"] = t.value;
  return j;
}

inline Target target_from_json(const nlohmann::json& j) {
  Target t;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "trigger")
    t.kind = TargetKind::Trigger;
  else if (kind == "labeled_value")
    t.kind = TargetKind::LabeledValue;
  else if (kind == "span_only")
    t.kind = TargetKind::SpanOnly;
  else if (kind == "overall")
    t.kind = TargetKind::Overall;
  else
    throw std::runtime_error("unknown target kind '" + kind + "'");
  t.event_type = j.at("event_type").get<std::string>();
  t.arg_name = j.value("arg", "");
  t.value = j.value("value", "");
  return t;
}

inline nlohmann::json config_to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"epochs", c.epochs},
          {"l2", c.l2},                       {"seed", c.seed},
          {"threshold", c.threshold}};
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.l2 = j.at("l2").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threshold = j.value("threshold", 0.5);
  return c;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
  if (!out) throw std::runtime_error("short write to " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Loads a model document and fails loudly on any other format or version.
inline nlohmann::json load_model_json(const std::filesystem::path& path,
                                      const std::string& expected_kind,
                                      int expected_version) {
  nlohmann::json j = nlohmann::json::parse(read_file(path));
  const std::string kind = j.value("model_kind", "");
  const int version = j.value("format_version", -1);
  if (kind != expected_kind || version != expected_version)
    throw std::runtime_error(path.string() + ": expected " + expected_kind +
                             " v" + std::to_string(expected_version) + ", found '" +
                             kind + "' v" + std::to_string(version));
  return j;
}

}  // namespace sdoh::model_io

#endif
