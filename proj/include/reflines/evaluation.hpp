#pragma once

// Line-level and reference-level quality metrics. Corpus figures are
// micro-averaged: counts are pooled over documents before any ratio is taken.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "reflines/corpus.hpp"
#include "reflines/crf.hpp"
#include "reflines/extraction.hpp"
#include "reflines/label.hpp"

namespace reflines {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// P, R and their harmonic mean; each ratio is 0 when its denominator is.
Prf prf(const Counts& c);

struct Metrics {
  std::array<Counts, kNumLabels> labels{};
  std::size_t lines = 0;
  std::size_t lines_correct = 0;
  Counts references;

  double accuracy() const {
    return lines == 0 ? 0.0 : static_cast<double>(lines_correct) / static_cast<double>(lines);
  }
  Prf label(Label y) const { return prf(labels[static_cast<std::size_t>(index_of(y))]); }
  Prf reference() const { return prf(references); }

  Metrics& operator+=(const Metrics& o);
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Fills the line part of Metrics by one-vs-rest counting.
Metrics line_metrics(std::span<const Label> gold, std::span<const Label> predicted);

/// A prediction is a true positive iff its line-index set equals the set of
/// a not yet matched gold reference.
Metrics reference_metrics(std::span<const ReferenceString> gold,
                          std::span<const ReferenceString> predicted);

/// Line and reference metrics for one document and a predicted labeling.
Metrics document_metrics(const LabeledDocument& doc, std::span<const Label> predicted);

/// Decodes every document with `model` and pools the metrics.
Metrics evaluate_corpus(const CrfModel& model, std::span<const LabeledDocument> docs,
                        const Constraints& constraints, int jobs = 0);

/// Flat JSON object with every ratio and count.
nlohmann::json to_json(const Metrics& m);

/// Aligned text table for terminals.
std::string format_table(const Metrics& m);

}  // namespace reflines
