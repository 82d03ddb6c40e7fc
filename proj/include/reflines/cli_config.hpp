#pragma once

#include <string>

#include "json.hpp"
#include "reflines/features.hpp"
#include "reflines/training.hpp"

namespace reflines {

/// Everything a CLI run can be configured with. The config file is one flat
/// JSON object: feature keys (`window`, `templates`, `heading_gazetteer`,
/// ...), training keys (`l2_sigma`, `max_iterations`, `convergence_tol`,
/// `optimizer`, `seed`, `sgd_learning_rate`), plus `order`, `constraints`,
/// `jobs`, `heading_gazetteer_file` and `name_gazetteer_file`.
struct CliConfig {
  FeatureConfig features;
  TrainConfig train;
  int order = 2;
  bool constraints = true;
  int jobs = 0;
};

/// Applies the keys of `j` over `base`. Unknown keys are rejected.
CliConfig cli_config_from_json(const nlohmann::json& j, CliConfig base = {});
CliConfig load_cli_config(const std::string& path, CliConfig base = {});

/// `value` is parsed as JSON when possible, otherwise taken as a string.
void apply_override(CliConfig& config, const std::string& key, const std::string& value);

nlohmann::json to_json(const CliConfig& config);

}  // namespace reflines
