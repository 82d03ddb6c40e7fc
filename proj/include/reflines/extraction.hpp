#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "reflines/corpus.hpp"
#include "reflines/crf.hpp"
#include "reflines/label.hpp"

namespace reflines {

struct ReferenceString {
  std::string text;
  std::vector<std::size_t> line_indices;  // strictly increasing, non-empty
  bool promoted = false;  // began with an I-REF run that had no open reference

  friend bool operator==(const ReferenceString&, const ReferenceString&) = default;
};

/// Groups labeled lines into reference strings.
///
/// B-REF opens a reference, I-REF extends the open one (or opens a promoted
/// one), O-REF is skipped without closing, O closes. Lines are trimmed and
/// joined with one space, except that a trailing `-` followed by a line
/// whose first letter is lowercase is removed and the halves concatenated.
std::vector<ReferenceString> group(std::span<const LineRecord> lines,
                                   std::span<const Label> labels);

std::vector<Label> label_document(const Document& doc, const CrfModel& model,
                                  const Constraints& constraints);

/// group(lines, viterbi(model, vectorize(doc))).
std::vector<ReferenceString> extract(const Document& doc, const CrfModel& model,
                                     const Constraints& constraints);

// Corpus-level batch kernels. The OpenMP versions parallelise across
// documents (jobs <= 0 uses the OpenMP default); the serial versions are the
// reference the parallel ones are tested against. Output order always
// matches input order.
std::vector<std::vector<Label>> label_corpus(std::span<const Document> docs,
                                             const CrfModel& model,
                                             const Constraints& constraints, int jobs = 0);
std::vector<std::vector<Label>> label_corpus_serial(std::span<const Document> docs,
                                                    const CrfModel& model,
                                                    const Constraints& constraints);
std::vector<std::vector<ReferenceString>> extract_corpus(std::span<const Document> docs,
                                                         const CrfModel& model,
                                                         const Constraints& constraints,
                                                         int jobs = 0);
std::vector<std::vector<ReferenceString>> extract_corpus_serial(
    std::span<const Document> docs, const CrfModel& model, const Constraints& constraints);

/// `{doc_id, references: [{text, line_indices, promoted}]}`
nlohmann::json extraction_to_json(const std::string& doc_id,
                                  const std::vector<ReferenceString>& refs);

}  // namespace reflines
