#include "reflines/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "reflines/error.hpp"

namespace reflines {

Prf prf(const Counts& c) {
  Prf r;
  const auto p_den = c.tp + c.fp;
  const auto r_den = c.tp + c.fn;
  r.precision = p_den == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(p_den);
  r.recall = r_den == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(r_den);
  const double s = r.precision + r.recall;
  r.f1 = s == 0 ? 0.0 : 2 * r.precision * r.recall / s;
  return r;
}

Metrics& Metrics::operator+=(const Metrics& o) {
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] += o.labels[i];
  lines += o.lines;
  lines_correct += o.lines_correct;
  references += o.references;
  return *this;
}

Metrics line_metrics(std::span<const Label> gold, std::span<const Label> predicted) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorKind::Usage, "line_metrics: gold and predicted lengths differ");
  }
  Metrics m;
  m.lines = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = static_cast<std::size_t>(index_of(gold[i]));
    const auto p = static_cast<std::size_t>(index_of(predicted[i]));
    if (g == p) {
      ++m.lines_correct;
      ++m.labels[g].tp;
    } else {
      ++m.labels[p].fp;
      ++m.labels[g].fn;
    }
  }
  return m;
}

Metrics reference_metrics(std::span<const ReferenceString> gold,
                          std::span<const ReferenceString> predicted) {
  Metrics m;
  std::vector<bool> used(gold.size(), false);
  for (const auto& p : predicted) {
    bool hit = false;
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (!used[g] && gold[g].line_indices == p.line_indices) {
        used[g] = true;
        hit = true;
        break;
      }
    }
    if (hit) {
      ++m.references.tp;
    } else {
      ++m.references.fp;
    }
  }
  m.references.fn = gold.size() - m.references.tp;
  return m;
}

Metrics document_metrics(const LabeledDocument& doc, std::span<const Label> predicted) {
  Metrics m = line_metrics(doc.labels, predicted);
  const auto gold_refs = group(doc.document.lines, doc.labels);
  const auto pred_refs = group(doc.document.lines, predicted);
  m += reference_metrics(gold_refs, pred_refs);
  return m;
}

Metrics evaluate_corpus(const CrfModel& model, std::span<const LabeledDocument> docs,
                        const Constraints& constraints, int jobs) {
  std::vector<Document> plain;
  plain.reserve(docs.size());
  for (const auto& d : docs) plain.push_back(d.document);
  const auto predicted = label_corpus(plain, model, constraints, jobs);
  Metrics total;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    total += document_metrics(docs[i], predicted[i]);
  }
  return total;
}

nlohmann::json to_json(const Metrics& m) {
  nlohmann::json j = nlohmann::json::object();
  j["averaging"] = "micro";
  j["lines"] = m.lines;
  j["accuracy"] = m.accuracy();
  for (Label y : kAllLabels) {
    const std::string k(to_string(y));
    const auto& c = m.labels[static_cast<std::size_t>(index_of(y))];
    const Prf r = prf(c);
    j[k + ".precision"] = r.precision;
    j[k + ".recall"] = r.recall;
    j[k + ".f1"] = r.f1;
    j[k + ".tp"] = c.tp;
    j[k + ".fp"] = c.fp;
    j[k + ".fn"] = c.fn;
  }
  const Prf r = m.reference();
  j["ref.precision"] = r.precision;
  j["ref.recall"] = r.recall;
  j["ref.f1"] = r.f1;
  j["ref.tp"] = m.references.tp;
  j["ref.fp"] = m.references.fp;
  j["ref.fn"] = m.references.fn;
  return j;
}

std::string format_table(const Metrics& m) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %9s %9s %9s %7s %7s %7s\n", "category",
                "precision", "recall", "f1", "tp", "fp", "fn");
  out << buf;
  auto row = [&](const std::string& name, const Counts& c) {
    const Prf r = prf(c);
    std::snprintf(buf, sizeof buf, "%-10s %9.4f %9.4f %9.4f %7zu %7zu %7zu\n", name.c_str(),
                  r.precision, r.recall, r.f1, c.tp, c.fp, c.fn);
    out << buf;
  };
  for (Label y : kAllLabels) {
    row(std::string(to_string(y)), m.labels[static_cast<std::size_t>(index_of(y))]);
  }
  row("reference", m.references);
  std::snprintf(buf, sizeof buf, "line accuracy %.4f over %zu lines (micro-averaged)\n",
                m.accuracy(), m.lines);
  out << buf;
  return out.str();
}

}  // namespace reflines
