#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reflines/corpus.hpp"
#include "reflines/features.hpp"
#include "reflines/label.hpp"
#include "reflines/state_space.hpp"

namespace reflines {

/// Sparse indicator vector for one line: sorted, unique observation
/// attribute indices of the owning FeatureSpace.
struct FeatureVector {
  std::vector<std::uint32_t> active;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Frozen interning of feature names to dense weight indices.
///
/// Observation attributes (the names produced by the feature templates) are
/// sorted lexicographically and numbered 0..A-1. Each attribute pairs with
/// every label, giving weight names `<attribute>~<label>` at index 4a + y.
/// Transition weights `T:<state>><state>` follow at 4A + 4s + y', one per
/// valid expanded-state pair. The layout is a pure function of the attribute
/// set and the Markov order, so it does not depend on corpus order.
class FeatureSpace {
 public:
  FeatureSpace() : states_(1) {}

  static FeatureSpace from_attributes(std::vector<std::string> attributes, int order);

  int order() const { return states_.order(); }
  const StateSpace& states() const { return states_; }

  std::size_t num_attributes() const { return attributes_.size(); }
  const std::vector<std::string>& attributes() const { return attributes_; }
  std::optional<std::uint32_t> attribute_index(std::string_view name) const;

  /// Total number of weights.
  std::size_t size() const {
    return attributes_.size() * kNumLabels +
           static_cast<std::size_t>(states_.num_transitions());
  }

  std::size_t emission_index(std::uint32_t attribute, Label y) const {
    return static_cast<std::size_t>(attribute) * kNumLabels +
           static_cast<std::size_t>(index_of(y));
  }
  std::size_t transition_index(int from_state, Label next) const {
    return attributes_.size() * kNumLabels +
           static_cast<std::size_t>(from_state * kNumLabels + index_of(next));
  }

  /// Weight name at `index`.
  std::string name(std::size_t index) const;
  /// Weight index of a full weight name; absent when unknown.
  std::optional<std::size_t> index(std::string_view name) const;

  std::string state_name(int s) const;

  friend bool operator==(const FeatureSpace& a, const FeatureSpace& b) {
    return a.order() == b.order() && a.attributes_ == b.attributes_;
  }

 private:
  StateSpace states_;
  std::vector<std::string> attributes_;
};

/// Attribute names fired anywhere in `docs`, interned and frozen.
FeatureSpace build_feature_space(const std::vector<LabeledDocument>& docs,
                                 const FeatureConfig& config, int order);

/// One vector per line; names unknown to `space` are dropped.
std::vector<FeatureVector> vectorize(const Document& doc, const FeatureConfig& config,
                                     const FeatureSpace& space);

}  // namespace reflines
