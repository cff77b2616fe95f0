#ifndef SDOH_CORPUS_HPP
#define SDOH_CORPUS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "sdoh/brat.hpp"
#include "sdoh/schema.hpp"
#include "sdoh/scorer.hpp"

namespace sdoh::corpus {

// A corpus directory holds paired <name>.txt / <name>.ann files, UTF-8.
// Documents are returned sorted by id so corpus order is reproducible.

std::vector<brat::AnnotatedDocument> read_corpus(const std::filesystem::path& dir);

// Reads only the narrative side (.ann files optional), for prediction input.
std::vector<brat::TextDocument> read_texts(const std::filesystem::path& dir);

void write_corpus(const std::filesystem::path& dir,
                  const std::vector<brat::AnnotatedDocument>& docs);

// Normalizes a whole corpus; findings are tagged with the document id.
score::EventCorpus normalize_corpus(const std::vector<brat::AnnotatedDocument>& docs,
                                    const Schema& schema,
                                    std::vector<Finding>* findings = nullptr);

}  // namespace sdoh::corpus

#endif
