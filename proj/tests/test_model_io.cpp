#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "reflines/error.hpp"
#include "reflines/extraction.hpp"
#include "reflines/model_io.hpp"
#include "reflines/synthgen.hpp"
#include "reflines/training.hpp"
#include "support.hpp"

using namespace reflines;

namespace {

std::string serialize(const CrfModel& m, const ModelMetadata& meta = {}) {
  std::ostringstream out;
  write_model(out, m, meta);
  return out.str();
}

std::string read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_model(in);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Model);
    return e.what();
  }
  return "";
}

std::string replace_line(std::string text, const std::string& prefix, const std::string& with) {
  const auto at = text.find("\n" + prefix);
  REQUIRE(at != std::string::npos);
  const auto end = text.find('\n', at + 1);
  return text.replace(at + 1, end - at - 1, with);
}

CrfModel trained_model() {
  GenConfig g;
  g.seed = 50;
  g.n_documents = 8;
  return train(generate(g), {}, 2, {}).model;
}

}  // namespace

TEST_CASE("a toy model lists exactly its sorted weight names") {
  CrfModel m;
  m.space = FeatureSpace::from_attributes({"starts_digit", "bias"}, 1);
  m.weights.assign(m.space.size(), 0.0);
  for (std::size_t i = 0; i < m.weights.size(); ++i) m.weights[i] = 0.1 * static_cast<double>(i);
  const std::string text = serialize(m);

  std::vector<std::string> expected;
  const char* labels[] = {"B-REF", "I-REF", "O-REF", "O"};
  for (const char* a : {"bias", "starts_digit"}) {
    for (const char* y : labels) expected.push_back(std::string(a) + "~" + y);
  }
  for (const char* a : labels) {
    for (const char* b : labels) expected.push_back(std::string("T:") + a + ">" + b);
  }
  std::sort(expected.begin(), expected.end());

  std::istringstream in(text);
  std::string line;
  std::vector<std::string> keys;
  bool in_weights = false;
  while (std::getline(in, line)) {
    if (in_weights) keys.push_back(line.substr(0, line.find('\t')));
    if (line.starts_with("weights ")) {
      CHECK(line == "weights 24");
      in_weights = true;
    }
  }
  CHECK(keys == expected);
  CHECK(text.starts_with("reflines-model\nformat_version 1\norder 1\n"));
  CHECK(text.find("\r") == std::string::npos);
  CHECK(text.find("starts_digit~O\t0.70000000000000007\n") != std::string::npos);
}

TEST_CASE("canonical form is byte-stable across save and load") {
  const CrfModel m = trained_model();
  ModelMetadata meta{"abc123", 7, -1.25};
  const std::string a = serialize(m, meta);
  CHECK(serialize(m, meta) == a);
  std::istringstream in(a);
  const ModelFile back = read_model(in);
  CHECK(back.metadata == meta);
  CHECK(back.model.weights == m.weights);
  CHECK(back.model.space == m.space);
  CHECK(back.model.config == m.config);
  CHECK(serialize(back.model, back.metadata) == a);
}

TEST_CASE("files on disk round-trip and decode identically") {
  const CrfModel m = trained_model();
  const std::string path = "model_io_roundtrip.model";
  save(m, path);
  const ModelFile back = load(path);
  save(back.model, path + ".2");
  std::ifstream f1(path, std::ios::binary), f2(path + ".2", std::ios::binary);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());

  GenConfig g;
  g.seed = 51;
  g.n_documents = 50;
  for (const auto& d : generate(g)) {
    const auto c = Constraints::bio_only();
    const auto y = label_document(d.document, m, c);
    CHECK(label_document(d.document, back.model, c) == y);
    const auto vecs = vectorize(d.document, m.config, m.space);
    CHECK(std::abs(sequence_log_prob(m, vecs, y, c) -
                   sequence_log_prob(back.model, vecs, y, c)) < 1e-12);
  }
  std::remove(path.c_str());
  std::remove((path + ".2").c_str());
}

TEST_CASE("load errors are distinct") {
  CrfModel m;
  m.space = FeatureSpace::from_attributes({"bias", "starts_digit"}, 2);
  m.weights.assign(m.space.size(), 0.5);
  const std::string text = serialize(m);

  CHECK(read_error(replace_line(text, "format_version", "format_version 99")) ==
        "unknown version 99");
  CHECK(read_error(replace_line(text, "order", "")).find("missing field 'order'") !=
        std::string::npos);
  CHECK(read_error("not a model\n").find("magic") != std::string::npos);

  const auto deleted = replace_line(text, "bias~O-REF\t", "");
  CHECK(read_error(deleted) == "weight count mismatch: missing key 'bias~O-REF'");
  const auto deleted_t = replace_line(text, "T:I-REF|O>O|B-REF\t", "");
  CHECK(read_error(deleted_t) == "weight count mismatch: missing key 'T:I-REF|O>O|B-REF'");
  const auto extra = text + "bias~X\t1\n";
  CHECK(read_error(extra).find("weight count mismatch") != std::string::npos);
  CHECK(read_error(replace_line(text, "weights", "weights 3")).find("declares 3") !=
        std::string::npos);
  CHECK(read_error(replace_line(text, "bias~O\t", "bias~O\tnan")).find("invalid number") !=
        std::string::npos);
  CHECK_THROWS_AS(load("no/such/model"), Error);
}

TEST_CASE("corpus hash") {
  GenConfig g;
  g.n_documents = 2;
  const auto docs = generate(g);
  CHECK(corpus_hash(docs) == corpus_hash(docs));
  CHECK(corpus_hash(docs).size() == 16);
  auto other = docs;
  other[0].labels[0] = Label::BRef;
  CHECK(corpus_hash(other) != corpus_hash(docs));
}
