#pragma once

// Document data model and the two on-disk corpus formats (JSONL and TSV).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reflines/label.hpp"

namespace reflines {

/// One text line with optional layout attributes. Every optional field is
/// independent of the others.
struct LineRecord {
  std::string text;  // no newline characters
  int page = 0;
  std::optional<double> v_gap;      // points to previous line, >= 0
  std::optional<double> indent;     // left-offset delta vs previous line
  std::optional<double> font_size;  // points, > 0
  std::optional<bool> bold;

  friend bool operator==(const LineRecord&, const LineRecord&) = default;
};

struct Document {
  std::string doc_id;
  std::vector<LineRecord> lines;

  friend bool operator==(const Document&, const Document&) = default;
};

struct LabeledDocument {
  Document document;
  std::vector<Label> labels;  // same length as document.lines

  friend bool operator==(const LabeledDocument&, const LabeledDocument&) = default;
};

/// A document as read from JSONL: labels are present only if the file
/// labeled every line of it.
struct CorpusDocument {
  Document document;
  std::optional<std::vector<Label>> labels;

  bool labeled() const { return labels.has_value(); }
  LabeledDocument as_labeled() const;

  friend bool operator==(const CorpusDocument&, const CorpusDocument&) = default;
};

std::vector<CorpusDocument> read_jsonl(std::istream& in);
std::vector<CorpusDocument> read_jsonl_file(const std::string& path);

std::vector<LabeledDocument> read_tsv(std::istream& in);
std::vector<LabeledDocument> read_tsv_file(const std::string& path);

/// Reads by extension: `.tsv` uses the TSV reader, anything else JSONL.
/// `format` ("jsonl"/"tsv") overrides the extension when non-empty.
std::vector<CorpusDocument> read_corpus_file(const std::string& path,
                                             const std::string& format = "");

/// Fails with ErrorKind::Corpus unless every document carries labels.
std::vector<LabeledDocument> require_labeled(const std::vector<CorpusDocument>& docs);

void write_jsonl(std::ostream& out, const std::vector<CorpusDocument>& docs);
void write_jsonl(std::ostream& out, const std::vector<LabeledDocument>& docs);

/// Non-fatal consistency checks. Never throws.
std::vector<std::string> validate(const Document& doc);
std::vector<std::string> validate(const LabeledDocument& doc);

}  // namespace reflines
