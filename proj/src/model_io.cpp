#include "reflines/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "reflines/error.hpp"

namespace reflines {
namespace {

[[noreturn]] void model_error(const std::string& msg) { throw Error(ErrorKind::Model, msg); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    model_error("invalid number for " + what + ": '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (v != std::floor(v)) model_error("invalid integer for " + what + ": '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

void write_model(std::ostream& out, const CrfModel& model, const ModelMetadata& meta) {
  if (model.weights.size() != model.space.size()) {
    model_error("weight vector size does not match feature space");
  }
  out << "reflines-model\n";
  out << "format_version " << kModelFormatVersion << '\n';
  out << "order " << model.order() << '\n';
  out << "labels";
  for (Label l : kAllLabels) out << ' ' << to_string(l);
  out << '\n';
  out << "constraints_default " << (model.constraints_default ? 1 : 0) << '\n';
  out << "feature_config " << to_json(model.config).dump() << '\n';
  out << "meta.corpus_hash " << (meta.corpus_hash.empty() ? "-" : meta.corpus_hash) << '\n';
  out << "meta.iterations " << meta.iterations << '\n';
  out << "meta.objective " << format_double(meta.objective) << '\n';

  std::vector<std::pair<std::string, double>> entries;
  entries.reserve(model.weights.size());
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    entries.emplace_back(model.space.name(i), model.weights[i]);
  }
  std::sort(entries.begin(), entries.end());
  out << "weights " << entries.size() << '\n';
  for (const auto& [name, w] : entries) out << name << '\t' << format_double(w) << '\n';
}

ModelFile read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "reflines-model") {
    model_error("not a reflines model file (missing magic line)");
  }
  std::map<std::string, std::string> header;
  std::size_t declared = 0;
  bool have_weights = false;
  while (std::getline(in, line)) {
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string value = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (key == "weights") {
      declared = static_cast<std::size_t>(parse_int(value, "weights"));
      have_weights = true;
      break;
    }
    header[key] = value;
  }
  auto field = [&](const std::string& k) -> const std::string& {
    auto it = header.find(k);
    if (it == header.end()) model_error("missing field '" + k + "'");
    return it->second;
  };

  const int version = parse_int(field("format_version"), "format_version");
  if (version != kModelFormatVersion) {
    model_error("unknown version " + std::to_string(version));
  }
  const int order = parse_int(field("order"), "order");
  if (order < 1 || order > StateSpace::kMaxOrder) {
    model_error("unsupported order " + std::to_string(order));
  }
  if (field("labels") != "B-REF I-REF O-REF O") {
    model_error("unexpected label list '" + field("labels") + "'");
  }
  if (!have_weights) model_error("missing field 'weights'");

  ModelFile mf;
  mf.model.constraints_default = parse_int(field("constraints_default"), "constraints_default") != 0;
  try {
    mf.model.config = feature_config_from_json(nlohmann::json::parse(field("feature_config")));
  } catch (const nlohmann::json::exception& e) {
    model_error(std::string("bad feature_config: ") + e.what());
  } catch (const Error& e) {
    model_error(std::string("bad feature_config: ") + e.what());
  }
  mf.metadata.corpus_hash = field("meta.corpus_hash") == "-" ? "" : field("meta.corpus_hash");
  mf.metadata.iterations = parse_int(field("meta.iterations"), "meta.iterations");
  mf.metadata.objective = parse_double(field("meta.objective"), "meta.objective");

  std::map<std::string, double> weights;
  std::set<std::string> attributes;
  std::size_t read = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) model_error("malformed weight line '" + line + "'");
    const std::string name = line.substr(0, tab);
    weights[name] = parse_double(line.substr(tab + 1), "weight '" + name + "'");
    ++read;
    if (!name.starts_with("T:")) {
      const auto tilde = name.rfind('~');
      if (tilde == std::string::npos) model_error("malformed weight name '" + name + "'");
      attributes.insert(name.substr(0, tilde));
    }
  }

  mf.model.space = FeatureSpace::from_attributes({attributes.begin(), attributes.end()}, order);
  const auto& space = mf.model.space;
  mf.model.weights.assign(space.size(), 0.0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const std::string name = space.name(i);
    auto it = weights.find(name);
    if (it == weights.end()) {
      model_error("weight count mismatch: missing key '" + name + "'");
    }
    mf.model.weights[i] = it->second;
  }
  if (weights.size() != space.size() || read != weights.size()) {
    for (const auto& [name, w] : weights) {
      if (!space.index(name)) model_error("weight count mismatch: unexpected key '" + name + "'");
    }
    model_error("weight count mismatch: duplicate keys");
  }
  if (declared != read) {
    model_error("weight count mismatch: header declares " + std::to_string(declared) +
                ", file has " + std::to_string(read));
  }
  return mf;
}

void save(const CrfModel& model, const std::string& path, const ModelMetadata& meta) {
  std::ostringstream buf;
  write_model(buf, model, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write model to '" + path + "'");
  out << buf.str();
  if (!out) throw Error(ErrorKind::Io, "failed writing model to '" + path + "'");
}

ModelFile load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open model '" + path + "'");
  return read_model(in);
}

std::string corpus_hash(const std::vector<LabeledDocument>& corpus) {
  std::ostringstream buf;
  write_jsonl(buf, corpus);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : buf.str()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace reflines
