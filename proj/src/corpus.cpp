#include "sdoh/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sdoh::corpus {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
}

std::vector<std::filesystem::path> txt_files_sorted(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> txts;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      txts.push_back(entry.path());
  std::sort(txts.begin(), txts.end());
  return txts;
}

}  // namespace

std::vector<brat::AnnotatedDocument> read_corpus(const std::filesystem::path& dir) {
  std::vector<brat::AnnotatedDocument> docs;
  for (const auto& txt : txt_files_sorted(dir)) {
    brat::TextDocument document{txt.stem().string(), read_file(txt)};
    std::filesystem::path ann = txt;
    ann.replace_extension(".ann");
    if (!std::filesystem::exists(ann))
      throw std::runtime_error("missing annotation file " + ann.string());
    try {
      docs.push_back(brat::parse_ann(read_file(ann), std::move(document)));
    } catch (const brat::ParseError& e) {
      throw std::runtime_error(ann.string() + ": " + e.what());
    }
  }
  return docs;
}

std::vector<brat::TextDocument> read_texts(const std::filesystem::path& dir) {
  std::vector<brat::TextDocument> docs;
  for (const auto& txt : txt_files_sorted(dir))
    docs.push_back({txt.stem().string(), read_file(txt)});
  return docs;
}

void write_corpus(const std::filesystem::path& dir,
                  const std::vector<brat::AnnotatedDocument>& docs) {
  std::filesystem::create_directories(dir);
  for (const auto& doc : docs) {
    write_file(dir / (doc.document.doc_id + ".txt"), doc.document.text);
    write_file(dir / (doc.document.doc_id + ".ann"), brat::serialize_ann(doc));
  }
}

score::EventCorpus normalize_corpus(const std::vector<brat::AnnotatedDocument>& docs,
                                    const Schema& schema,
                                    std::vector<Finding>* findings) {
  score::EventCorpus corpus;
  for (const auto& doc : docs) {
    NormalizeResult result = normalize_events(doc, schema);
    if (findings)
      for (Finding& f : result.findings) {
        f.where = doc.document.doc_id + "/" + f.where;
        findings->push_back(std::move(f));
      }
    corpus.push_back({doc.document.doc_id, std::move(result.events)});
  }
  return corpus;
}

}  // namespace sdoh::corpus
