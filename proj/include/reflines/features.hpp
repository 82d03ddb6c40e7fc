#pragma once

// Per-line feature templates. Every feature is an indicator; real-valued
// signals are bucketed. Feature names follow the grammar
//
//   template(@offset)?(=bucket)?
//
// e.g. `has_year`, `punct=3`, `ends_period@-1`, `vgap@+2=0`. Names appear in
// model files and are part of the compatibility contract.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "reflines/corpus.hpp"

namespace reflines {

/// Names of every line-local template, in catalogue order.
const std::vector<std::string>& all_templates();

std::vector<std::string> default_heading_gazetteer();

struct FeatureConfig {
  std::set<std::string> templates = {all_templates().begin(), all_templates().end()};
  int window = 2;  // neighbour conjunction radius, 0..3
  std::vector<std::string> heading_gazetteer = default_heading_gazetteer();
  std::optional<std::vector<std::string>> name_gazetteer;

  // Bucket boundaries. A value v falls into bucket k = #{b : b <= v}.
  std::vector<double> vgap_bounds = {1.2, 2.0};  // multiples of the median gap
  std::vector<double> punct_bounds = {1, 3, 6};
  std::vector<double> capratio_bounds = {0.25, 0.5, 0.75};
  std::vector<double> length_bounds = {20, 50, 80};

  double indent_threshold = 2.0;  // points
  double font_dead_zone = 0.5;    // points

  /// Throws Error(ErrorKind::Config) on an out-of-range window, unknown
  /// template or non-increasing bucket boundaries.
  void check() const;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

nlohmann::json to_json(const FeatureConfig& config);
/// Reads the keys present in `j` over `base`; unknown keys are rejected.
FeatureConfig feature_config_from_json(const nlohmann::json& j,
                                       FeatureConfig base = {});

/// Gazetteer file: UTF-8, one phrase per line, `#` starts a comment line.
std::vector<std::string> read_gazetteer_file(const std::string& path);

/// Sorted, unique feature names fired at `line_index`.
std::vector<std::string> extract_line_features(const Document& doc,
                                               std::size_t line_index,
                                               const FeatureConfig& config);

/// Same as calling extract_line_features for every line, in O(lines).
std::vector<std::vector<std::string>> extract_document_features(
    const Document& doc, const FeatureConfig& config);

struct FeatureName {
  std::string template_name;
  std::optional<int> offset;
  std::optional<std::string> bucket;

  friend bool operator==(const FeatureName&, const FeatureName&) = default;
};

std::optional<FeatureName> parse_feature_name(std::string_view name);
std::string format_feature_name(const FeatureName& name);

}  // namespace reflines
