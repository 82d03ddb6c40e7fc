#include "reflines/extraction.hpp"

#include <optional>

#include "parallel.hpp"
#include "reflines/error.hpp"
#include "reflines/feature_space.hpp"
#include "reflines/text.hpp"

namespace reflines {
namespace {

void append_line(ReferenceString& ref, std::string_view line) {
  if (line.empty()) return;
  if (ref.text.empty()) {
    ref.text = line;
    return;
  }
  if (ref.text.back() == '-' && text::first_letter_case(line) == text::LetterCase::Lower) {
    ref.text.pop_back();
    ref.text += line;
  } else {
    ref.text += ' ';
    ref.text += line;
  }
}

}  // namespace

std::vector<ReferenceString> group(std::span<const LineRecord> lines,
                                   std::span<const Label> labels) {
  if (lines.size() != labels.size()) {
    throw Error(ErrorKind::Decode, "group: " + std::to_string(labels.size()) +
                                       " labels for " + std::to_string(lines.size()) +
                                       " lines");
  }
  std::vector<ReferenceString> out;
  std::optional<ReferenceString> open;
  auto close = [&] {
    if (open) out.push_back(std::move(*open));
    open.reset();
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i].text);
    switch (labels[i]) {
      case Label::BRef:
        close();
        open.emplace();
        break;
      case Label::IRef:
        if (!open) {
          open.emplace();
          open->promoted = true;
        }
        break;
      case Label::ORef:
        continue;
      case Label::O:
        close();
        continue;
    }
    open->line_indices.push_back(i);
    append_line(*open, line);
  }
  close();
  return out;
}

std::vector<Label> label_document(const Document& doc, const CrfModel& model,
                                  const Constraints& constraints) {
  const auto vectors = vectorize(doc, model.config, model.space);
  return viterbi(model, vectors, constraints).labels;
}

std::vector<ReferenceString> extract(const Document& doc, const CrfModel& model,
                                     const Constraints& constraints) {
  const auto labels = label_document(doc, model, constraints);
  return group(doc.lines, labels);
}

std::vector<std::vector<Label>> label_corpus(std::span<const Document> docs,
                                             const CrfModel& model,
                                             const Constraints& constraints, int jobs) {
  std::vector<std::vector<Label>> out(docs.size());
  detail::parallel_for(docs.size(), jobs, [&](std::size_t i) {
    out[i] = label_document(docs[i], model, constraints);
  });
  return out;
}

std::vector<std::vector<Label>> label_corpus_serial(std::span<const Document> docs,
                                                    const CrfModel& model,
                                                    const Constraints& constraints) {
  std::vector<std::vector<Label>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(label_document(d, model, constraints));
  return out;
}

std::vector<std::vector<ReferenceString>> extract_corpus(std::span<const Document> docs,
                                                         const CrfModel& model,
                                                         const Constraints& constraints,
                                                         int jobs) {
  std::vector<std::vector<ReferenceString>> out(docs.size());
  detail::parallel_for(docs.size(), jobs,
                       [&](std::size_t i) { out[i] = extract(docs[i], model, constraints); });
  return out;
}

std::vector<std::vector<ReferenceString>> extract_corpus_serial(
    std::span<const Document> docs, const CrfModel& model, const Constraints& constraints) {
  std::vector<std::vector<ReferenceString>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(extract(d, model, constraints));
  return out;
}

nlohmann::json extraction_to_json(const std::string& doc_id,
                                  const std::vector<ReferenceString>& refs) {
  nlohmann::json refs_json = nlohmann::json::array();
  for (const auto& r : refs) {
    refs_json.push_back({{"text", r.text},
                         {"line_indices", r.line_indices},
                         {"promoted", r.promoted}});
  }
  return {{"doc_id", doc_id}, {"references", std::move(refs_json)}};
}

}  // namespace reflines
