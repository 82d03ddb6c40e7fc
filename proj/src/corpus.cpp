#include "reflines/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "reflines/error.hpp"

namespace reflines {
namespace {

using nlohmann::json;

[[noreturn]] void corpus_error(const std::string& msg) {
  throw Error(ErrorKind::Corpus, msg);
}

std::optional<double> opt_number(const json& obj, const char* key,
                                 std::size_t file_line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    corpus_error("line " + std::to_string(file_line) + ": field '" + key +
                 "' must be a number");
  }
  return it->get<double>();
}

CorpusDocument parse_document(const json& obj, std::size_t file_line) {
  const std::string where = "line " + std::to_string(file_line);
  if (!obj.is_object()) corpus_error(where + ": expected a JSON object");
  auto id_it = obj.find("doc_id");
  if (id_it == obj.end() || !id_it->is_string()) {
    corpus_error(where + ": missing string field 'doc_id'");
  }
  CorpusDocument out;
  out.document.doc_id = id_it->get<std::string>();
  const std::string doc_where = where + " (document '" + out.document.doc_id + "')";

  auto lines_it = obj.find("lines");
  if (lines_it == obj.end() || !lines_it->is_array()) {
    corpus_error(doc_where + ": missing array field 'lines'");
  }
  if (lines_it->empty()) corpus_error(doc_where + ": empty lines array");

  std::vector<Label> labels;
  std::size_t n_labeled = 0;
  for (const json& jl : *lines_it) {
    if (!jl.is_object()) corpus_error(doc_where + ": line entries must be objects");
    LineRecord rec;
    auto t = jl.find("text");
    if (t == jl.end() || !t->is_string()) {
      corpus_error(doc_where + ": line without string field 'text'");
    }
    rec.text = t->get<std::string>();
    if (rec.text.find('\n') != std::string::npos) {
      corpus_error(doc_where + ": line text contains a newline");
    }
    if (auto p = jl.find("page"); p != jl.end() && !p->is_null()) {
      if (!p->is_number_integer() || p->get<long long>() < 0) {
        corpus_error(doc_where + ": 'page' must be a non-negative integer");
      }
      rec.page = p->get<int>();
    }
    rec.v_gap = opt_number(jl, "v_gap", file_line);
    rec.indent = opt_number(jl, "indent", file_line);
    rec.font_size = opt_number(jl, "font_size", file_line);
    if (auto b = jl.find("bold"); b != jl.end() && !b->is_null()) {
      if (!b->is_boolean()) corpus_error(doc_where + ": 'bold' must be a boolean");
      rec.bold = b->get<bool>();
    }
    if (rec.v_gap && *rec.v_gap < 0) corpus_error(doc_where + ": negative v_gap");
    if (rec.font_size && *rec.font_size <= 0) {
      corpus_error(doc_where + ": font_size must be positive");
    }
    if (auto l = jl.find("label"); l != jl.end() && !l->is_null()) {
      if (!l->is_string()) corpus_error(doc_where + ": 'label' must be a string");
      const auto s = l->get<std::string>();
      auto parsed = parse_label(s);
      if (!parsed) corpus_error(doc_where + ": unknown label '" + s + "'");
      labels.push_back(*parsed);
      ++n_labeled;
    }
    out.document.lines.push_back(std::move(rec));
  }
  if (n_labeled != 0 && n_labeled != out.document.lines.size()) {
    corpus_error(doc_where + ": mixed labeled and unlabeled lines");
  }
  if (n_labeled != 0) out.labels = std::move(labels);
  return out;
}

json line_to_json(const LineRecord& rec, const Label* label) {
  json jl = json::object();
  jl["text"] = rec.text;
  jl["page"] = rec.page;
  if (rec.v_gap) jl["v_gap"] = *rec.v_gap;
  if (rec.indent) jl["indent"] = *rec.indent;
  if (rec.font_size) jl["font_size"] = *rec.font_size;
  if (rec.bold) jl["bold"] = *rec.bold;
  if (label) jl["label"] = std::string(to_string(*label));
  return jl;
}

void write_one(std::ostream& out, const Document& doc,
               const std::vector<Label>* labels) {
  json obj = json::object();
  obj["doc_id"] = doc.doc_id;
  json lines = json::array();
  for (std::size_t i = 0; i < doc.lines.size(); ++i) {
    lines.push_back(line_to_json(doc.lines[i], labels ? &(*labels)[i] : nullptr));
  }
  obj["lines"] = std::move(lines);
  out << obj.dump() << '\n';
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return in;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

LabeledDocument CorpusDocument::as_labeled() const {
  if (!labels) corpus_error("document '" + document.doc_id + "' has no labels");
  return LabeledDocument{document, *labels};
}

std::vector<CorpusDocument> read_jsonl(std::istream& in) {
  std::vector<CorpusDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      corpus_error("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    docs.push_back(parse_document(obj, line_no));
  }
  return docs;
}

std::vector<CorpusDocument> read_jsonl_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_jsonl(in);
}

std::vector<LabeledDocument> read_tsv(std::istream& in) {
  std::vector<LabeledDocument> docs;
  LabeledDocument current;
  std::string row;
  std::size_t row_no = 0;
  auto flush = [&] {
    if (current.labels.empty()) return;
    current.document.doc_id = std::to_string(docs.size());
    docs.push_back(std::move(current));
    current = LabeledDocument{};
  };
  while (std::getline(in, row)) {
    ++row_no;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) {
      flush();
      continue;
    }
    const auto tab = row.find('\t');
    if (tab == std::string::npos || row.find('\t', tab + 1) != std::string::npos) {
      corpus_error("row " + std::to_string(row_no) + ": expected 2 tab-separated fields");
    }
    const std::string label_str = row.substr(tab + 1);
    auto label = parse_label(label_str);
    if (!label) {
      corpus_error("row " + std::to_string(row_no) + ": unknown label '" + label_str + "'");
    }
    LineRecord rec;
    rec.text = row.substr(0, tab);
    current.document.lines.push_back(std::move(rec));
    current.labels.push_back(*label);
  }
  flush();
  if (docs.empty()) corpus_error("empty file");
  return docs;
}

std::vector<LabeledDocument> read_tsv_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_tsv(in);
}

std::vector<CorpusDocument> read_corpus_file(const std::string& path,
                                             const std::string& format) {
  const bool tsv = format.empty() ? ends_with(path, ".tsv") : format == "tsv";
  if (!format.empty() && format != "tsv" && format != "jsonl") {
    throw Error(ErrorKind::Usage, "unknown corpus format '" + format + "'");
  }
  if (!tsv) return read_jsonl_file(path);
  std::vector<CorpusDocument> out;
  for (auto& d : read_tsv_file(path)) {
    out.push_back(CorpusDocument{std::move(d.document), std::move(d.labels)});
  }
  return out;
}

std::vector<LabeledDocument> require_labeled(const std::vector<CorpusDocument>& docs) {
  std::vector<LabeledDocument> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.as_labeled());
  return out;
}

void write_jsonl(std::ostream& out, const std::vector<CorpusDocument>& docs) {
  for (const auto& d : docs) {
    write_one(out, d.document, d.labels ? &*d.labels : nullptr);
  }
}

void write_jsonl(std::ostream& out, const std::vector<LabeledDocument>& docs) {
  for (const auto& d : docs) write_one(out, d.document, &d.labels);
}

std::vector<std::string> validate(const Document& doc) {
  std::vector<std::string> warnings;
  for (std::size_t i = 1; i < doc.lines.size(); ++i) {
    if (doc.lines[i].page < doc.lines[i - 1].page) {
      warnings.push_back("page indices decrease at line " + std::to_string(i));
    }
  }
  return warnings;
}

std::vector<std::string> validate(const LabeledDocument& doc) {
  auto warnings = validate(doc.document);
  const auto& labels = doc.labels;
  if (labels.size() != doc.document.lines.size()) {
    warnings.push_back("label count " + std::to_string(labels.size()) +
                       " differs from line count " +
                       std::to_string(doc.document.lines.size()));
  }
  if (!labels.empty() && (labels[0] == Label::IRef || labels[0] == Label::ORef)) {
    warnings.push_back("document starts with continuation label");
  }
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == Label::IRef && labels[i - 1] == Label::O) {
      warnings.push_back("I-REF follows O at line " + std::to_string(i));
    }
  }
  return warnings;
}

}  // namespace reflines
