// Shared fixtures and brute-force oracles for the test binaries.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "reflines/corpus.hpp"
#include "reflines/crf.hpp"
#include "reflines/feature_space.hpp"
#include "reflines/label.hpp"

namespace reflines::testing {

inline LabeledDocument sample_page() {
  const std::vector<std::pair<std::string, Label>> rows = {
      {"grant numbers MA 3964/8-1 and STA 572/14-1.", Label::O},
      {"References", Label::O},
      {"Tkaczyk, D., et al. (2015) Cermine: automatic extraction of", Label::BRef},
      {"structured metadata from scientific literature. Interna-", Label::IRef},
      {"1252", Label::ORef},
      {"tional Journal on Document Analysis and Recognition (IJDAR) 18(4)", Label::IRef},
      {"Lafferty, J., McCallum, A., Pereira, F. (2001) Conditional random", Label::BRef},
  };
  LabeledDocument d;
  d.document.doc_id = "sample_page";
  for (const auto& [text, label] : rows) {
    LineRecord r;
    r.text = text;
    d.document.lines.push_back(r);
    d.labels.push_back(label);
  }
  return d;
}

inline const std::vector<Label>& sample_page_labels() {
  static const std::vector<Label> labels = {Label::O,    Label::O,    Label::BRef, Label::IRef,
                                            Label::ORef, Label::IRef, Label::BRef};
  return labels;
}

inline LineRecord line(std::string text, int page = 0) {
  LineRecord r;
  r.text = std::move(text);
  r.page = page;
  return r;
}

inline Document make_document(std::vector<std::string> texts, std::string id = "d") {
  Document d;
  d.doc_id = std::move(id);
  for (auto& t : texts) d.lines.push_back(line(std::move(t)));
  return d;
}

// A model over abstract attributes f0..f{n-1} with uniform random weights and
// a random observation sequence.
struct RandomInstance {
  CrfModel model;
  std::vector<FeatureVector> lines;
  std::vector<Label> gold;
};

inline RandomInstance random_instance(std::mt19937_64& rng, int order, int min_len, int max_len,
                                      double weight_range, int n_attributes = 4) {
  std::vector<std::string> attrs;
  for (int a = 0; a < n_attributes; ++a) attrs.push_back("f" + std::to_string(a));
  RandomInstance out;
  out.model.space = FeatureSpace::from_attributes(attrs, order);
  std::uniform_real_distribution<double> w(-weight_range, weight_range);
  out.model.weights.resize(out.model.space.size());
  for (double& x : out.model.weights) x = w(rng);
  const int T = std::uniform_int_distribution<int>(min_len, max_len)(rng);
  std::bernoulli_distribution fire(0.5);
  std::uniform_int_distribution<int> lab(0, kNumLabels - 1);
  for (int t = 0; t < T; ++t) {
    FeatureVector fv;
    for (int a = 0; a < n_attributes; ++a) {
      if (fire(rng)) fv.active.push_back(static_cast<std::uint32_t>(a));
    }
    out.lines.push_back(fv);
    out.gold.push_back(label_at(lab(rng)));
  }
  return out;
}

// Name of the label history ending at position t, padded with O before the
// first line.
inline std::string history_name(const std::vector<Label>& y, int t, int order) {
  std::string out;
  for (int k = t - order + 1; k <= t; ++k) {
    if (!out.empty()) out += '|';
    out += std::string(to_string(k < 0 ? Label::O : y[static_cast<std::size_t>(k)]));
  }
  return out;
}

using WeightMap = std::unordered_map<std::string, double>;

inline WeightMap weight_map(const CrfModel& model) {
  WeightMap out;
  for (std::size_t i = 0; i < model.space.size(); ++i) {
    out.emplace(model.space.name(i), model.weights[i]);
  }
  return out;
}

// Sequence score computed only through weight names.
inline double oracle_score(const WeightMap& w, int order, const std::vector<std::string>& attrs,
                           const std::vector<FeatureVector>& lines, const std::vector<Label>& y) {
  double s = 0;
  for (std::size_t t = 0; t < lines.size(); ++t) {
    for (std::uint32_t a : lines[t].active) {
      s += w.at(attrs[a] + "~" + std::string(to_string(y[t])));
    }
    if (t > 0) {
      const int ti = static_cast<int>(t);
      s += w.at("T:" + history_name(y, ti - 1, order) + ">" + history_name(y, ti, order));
    }
  }
  return s;
}

inline double oracle_score(const CrfModel& model, const std::vector<FeatureVector>& lines,
                           const std::vector<Label>& y) {
  return oracle_score(weight_map(model), model.order(), model.space.attributes(), lines, y);
}

inline bool bio_feasible(const std::vector<Label>& y) {
  Label prev = Label::O;
  for (Label l : y) {
    if (prev == Label::O && (l == Label::IRef || l == Label::ORef)) return false;
    prev = l;
  }
  return true;
}

// All 4^T sequences in lexicographic order under B-REF < I-REF < O-REF < O.
inline std::vector<std::vector<Label>> all_sequences(int T) {
  std::vector<std::vector<Label>> out;
  std::size_t n = 1;
  for (int t = 0; t < T; ++t) n *= kNumLabels;
  for (std::size_t code = 0; code < n; ++code) {
    std::vector<Label> y(static_cast<std::size_t>(T));
    std::size_t c = code;
    for (int t = T - 1; t >= 0; --t) {
      y[static_cast<std::size_t>(t)] = label_at(static_cast<int>(c % kNumLabels));
      c /= kNumLabels;
    }
    out.push_back(std::move(y));
  }
  return out;
}

struct BruteForce {
  double log_z = -std::numeric_limits<double>::infinity();
  std::vector<std::array<double, kNumLabels>> marginals;
  std::vector<Label> best;
  double best_score = -std::numeric_limits<double>::infinity();
};

inline BruteForce brute_force(const CrfModel& model, const std::vector<FeatureVector>& lines,
                              bool bio) {
  const int T = static_cast<int>(lines.size());
  const auto seqs = all_sequences(T);
  std::vector<double> scores;
  std::vector<const std::vector<Label>*> kept;
  const WeightMap w = weight_map(model);
  BruteForce out;
  for (const auto& y : seqs) {
    if (bio && !bio_feasible(y)) continue;
    const double s = oracle_score(w, model.order(), model.space.attributes(), lines, y);
    scores.push_back(s);
    kept.push_back(&y);
    if (s > out.best_score) {  // strict: the first (smallest) maximiser wins
      out.best_score = s;
      out.best = y;
    }
  }
  if (scores.empty()) return out;
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0;
  for (double s : scores) sum += std::exp(s - m);
  out.log_z = m + std::log(sum);
  out.marginals.assign(static_cast<std::size_t>(T), {0, 0, 0, 0});
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const double p = std::exp(scores[i] - out.log_z);
    for (int t = 0; t < T; ++t) {
      out.marginals[static_cast<std::size_t>(t)]
                   [static_cast<std::size_t>(index_of((*kept[i])[static_cast<std::size_t>(t)]))] +=
          p;
    }
  }
  return out;
}

// The order-2 model whose transitions depend only on the last two labels
// the way `m1` does, with identical emissions.
inline CrfModel lift_to_order2(const CrfModel& m1) {
  CrfModel m2;
  m2.space = FeatureSpace::from_attributes(m1.space.attributes(), 2);
  m2.weights.assign(m2.space.size(), 0.0);
  for (std::size_t i = 0; i < m2.space.size(); ++i) {
    const std::string name = m2.space.name(i);
    if (name.starts_with("T:")) {
      // T:a|b>b|c  ->  T:b>c
      const auto gt = name.find('>');
      const std::string from = name.substr(2, gt - 2);
      const std::string to = name.substr(gt + 1);
      const std::string reduced =
          "T:" + from.substr(from.find('|') + 1) + ">" + to.substr(to.find('|') + 1);
      m2.weights[i] = m1.weights[*m1.space.index(reduced)];
    } else {
      m2.weights[i] = m1.weights[*m1.space.index(name)];
    }
  }
  return m2;
}

}  // namespace reflines::testing
