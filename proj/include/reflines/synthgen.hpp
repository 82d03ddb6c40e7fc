#pragma once

// Deterministic generator of synthetic labeled documents: body text with
// headings, page breaks with page numbers and running headers, and either an
// end-of-document reference section or per-page footnote references.

#include <cstdint>
#include <vector>

#include "reflines/corpus.hpp"

namespace reflines {

enum class RefStyle { Numbered, AuthorYear, Mixed };
enum class GenMode { EndSection, Footnotes };

struct IntRange {
  int min = 0;
  int max = 0;
};

struct GenConfig {
  std::uint64_t seed = 1;
  int n_documents = 20;
  IntRange body_lines_per_page = {18, 30};
  IntRange body_pages = {1, 3};
  IntRange references_per_document = {6, 20};
  RefStyle style = RefStyle::Mixed;  // Mixed picks one style per document
  GenMode mode = GenMode::EndSection;
  int page_height = 45;  // lines per page before a page break is forced
  double hyphenation_probability = 0.3;

  void check() const;
};

std::vector<LabeledDocument> generate(const GenConfig& config);

}  // namespace reflines
