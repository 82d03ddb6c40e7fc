#include "reflines/feature_space.hpp"

#include <algorithm>

#include "reflines/error.hpp"

namespace reflines {

FeatureSpace FeatureSpace::from_attributes(std::vector<std::string> attributes,
                                           int order) {
  FeatureSpace space;
  space.states_ = StateSpace(order);
  std::sort(attributes.begin(), attributes.end());
  attributes.erase(std::unique(attributes.begin(), attributes.end()), attributes.end());
  space.attributes_ = std::move(attributes);
  return space;
}

std::optional<std::uint32_t> FeatureSpace::attribute_index(std::string_view name) const {
  auto it = std::lower_bound(attributes_.begin(), attributes_.end(), name);
  if (it == attributes_.end() || *it != name) return std::nullopt;
  return static_cast<std::uint32_t>(it - attributes_.begin());
}

std::string FeatureSpace::state_name(int s) const {
  std::string out;
  for (Label l : states_.labels(s)) {
    if (!out.empty()) out += '|';
    out += to_string(l);
  }
  return out;
}

std::string FeatureSpace::name(std::size_t index) const {
  const std::size_t n_emit = attributes_.size() * kNumLabels;
  if (index < n_emit) {
    return attributes_[index / kNumLabels] + "~" +
           std::string(to_string(label_at(static_cast<int>(index % kNumLabels))));
  }
  const auto t = static_cast<int>(index - n_emit);
  const int from = t / kNumLabels;
  const Label next = label_at(t % kNumLabels);
  return "T:" + state_name(from) + ">" + state_name(states_.successor(from, next));
}

std::optional<std::size_t> FeatureSpace::index(std::string_view name) const {
  if (name.starts_with("T:")) {
    const auto gt = name.find('>');
    if (gt == std::string_view::npos) return std::nullopt;
    const auto from_name = name.substr(2, gt - 2);
    const auto to_name = name.substr(gt + 1);
    for (int s = 0; s < states_.size(); ++s) {
      if (state_name(s) != from_name) continue;
      for (Label y : kAllLabels) {
        if (state_name(states_.successor(s, y)) == to_name) {
          return transition_index(s, y);
        }
      }
      return std::nullopt;
    }
    return std::nullopt;
  }
  const auto tilde = name.rfind('~');
  if (tilde == std::string_view::npos) return std::nullopt;
  const auto label = parse_label(name.substr(tilde + 1));
  const auto attr = attribute_index(name.substr(0, tilde));
  if (!label || !attr) return std::nullopt;
  return emission_index(*attr, *label);
}

FeatureSpace build_feature_space(const std::vector<LabeledDocument>& docs,
                                 const FeatureConfig& config, int order) {
  if (docs.empty()) throw Error(ErrorKind::Corpus, "empty training set");
  std::vector<std::string> names;
  for (const auto& d : docs) {
    for (auto& line : extract_document_features(d.document, config)) {
      names.insert(names.end(), std::make_move_iterator(line.begin()),
                   std::make_move_iterator(line.end()));
    }
    // Keep the buffer bounded on large corpora.
    if (names.size() > (1u << 20)) {
      std::sort(names.begin(), names.end());
      names.erase(std::unique(names.begin(), names.end()), names.end());
    }
  }
  return FeatureSpace::from_attributes(std::move(names), order);
}

std::vector<FeatureVector> vectorize(const Document& doc, const FeatureConfig& config,
                                     const FeatureSpace& space) {
  std::vector<FeatureVector> out;
  out.reserve(doc.lines.size());
  for (const auto& names : extract_document_features(doc, config)) {
    FeatureVector v;
    v.active.reserve(names.size());
    for (const auto& n : names) {
      if (auto idx = space.attribute_index(n)) v.active.push_back(*idx);
    }
    // Names are sorted and attribute indices follow name order.
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace reflines
