#pragma once

// Versioned text model format:
//
//   reflines-model
//   format_version 1
//   order <m>
//   labels B-REF I-REF O-REF O
//   constraints_default <0|1>
//   feature_config <single-line JSON, gazetteers inlined>
//   meta.corpus_hash <16 hex digits>
//   meta.iterations <n>
//   meta.objective <%.17g>
//   weights <count>
//   <name>\t<%.17g>          (count lines, sorted by name)
//
// Output is byte-stable for a given model and metadata.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "reflines/corpus.hpp"
#include "reflines/crf.hpp"

namespace reflines {

inline constexpr int kModelFormatVersion = 1;

struct ModelMetadata {
  std::string corpus_hash;
  int iterations = 0;
  double objective = 0;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

struct ModelFile {
  CrfModel model;
  ModelMetadata metadata;
};

void write_model(std::ostream& out, const CrfModel& model, const ModelMetadata& meta = {});
ModelFile read_model(std::istream& in);

void save(const CrfModel& model, const std::string& path, const ModelMetadata& meta = {});
ModelFile load(const std::string& path);

/// FNV-1a over the canonical JSONL rendering of the corpus, as hex.
std::string corpus_hash(const std::vector<LabeledDocument>& corpus);

}  // namespace reflines
