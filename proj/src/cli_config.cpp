#include "reflines/cli_config.hpp"

#include <fstream>
#include <set>

#include "reflines/error.hpp"

namespace reflines {
namespace {

using nlohmann::json;

const std::set<std::string>& feature_keys() {
  static const std::set<std::string> keys = {
      "templates",   "window",          "heading_gazetteer", "name_gazetteer",
      "vgap_bounds", "punct_bounds",    "capratio_bounds",   "length_bounds",
      "indent_threshold", "font_dead_zone"};
  return keys;
}

Optimizer parse_optimizer(const std::string& s) {
  if (s == "quasi-newton" || s == "lbfgs") return Optimizer::QuasiNewton;
  if (s == "sgd") return Optimizer::Sgd;
  throw Error(ErrorKind::Config, "unknown optimizer '" + s + "'");
}

bool parse_bool(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "on" || s == "true") return true;
    if (s == "off" || s == "false") return false;
  }
  throw Error(ErrorKind::Config, "expected on/off, got " + v.dump());
}

}  // namespace

CliConfig cli_config_from_json(const json& j, CliConfig c) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
  json feature_part = json::object();
  try {
    for (const auto& [key, v] : j.items()) {
      if (feature_keys().count(key)) {
        feature_part[key] = v;
      } else if (key == "heading_gazetteer_file") {
        feature_part["heading_gazetteer"] = read_gazetteer_file(v.get<std::string>());
      } else if (key == "name_gazetteer_file") {
        feature_part["name_gazetteer"] = read_gazetteer_file(v.get<std::string>());
      } else if (key == "order") {
        c.order = v.get<int>();
      } else if (key == "constraints") {
        c.constraints = parse_bool(v);
      } else if (key == "jobs") {
        c.jobs = v.get<int>();
      } else if (key == "l2_sigma") {
        c.train.l2_sigma = v.get<double>();
      } else if (key == "max_iterations") {
        c.train.max_iterations = v.get<int>();
      } else if (key == "convergence_tol") {
        c.train.convergence_tol = v.get<double>();
      } else if (key == "optimizer") {
        c.train.optimizer = parse_optimizer(v.get<std::string>());
      } else if (key == "seed") {
        c.train.seed = v.get<std::uint64_t>();
      } else if (key == "sgd_learning_rate") {
        c.train.sgd_learning_rate = v.get<double>();
      } else {
        throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad config value: ") + e.what());
  }
  c.features = feature_config_from_json(feature_part, c.features);
  if (c.order < 1 || c.order > StateSpace::kMaxOrder) {
    throw Error(ErrorKind::Config, "order must be in [1, 3]");
  }
  if (c.jobs < 0) throw Error(ErrorKind::Config, "jobs must be non-negative");
  c.train.jobs = c.jobs;
  c.train.check();
  return c;
}

CliConfig load_cli_config(const std::string& path, CliConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, "malformed config '" + path + "': " + e.what());
  }
  return cli_config_from_json(j, std::move(base));
}

void apply_override(CliConfig& config, const std::string& key, const std::string& value) {
  json v = json::parse(value, nullptr, false);
  if (v.is_discarded()) v = value;
  config = cli_config_from_json(json{{key, v}}, config);
}

json to_json(const CliConfig& c) {
  json j = to_json(c.features);
  j["order"] = c.order;
  j["constraints"] = c.constraints;
  j["jobs"] = c.jobs;
  j["l2_sigma"] = c.train.l2_sigma;
  j["max_iterations"] = c.train.max_iterations;
  j["convergence_tol"] = c.train.convergence_tol;
  j["optimizer"] = c.train.optimizer == Optimizer::QuasiNewton ? "quasi-newton" : "sgd";
  j["seed"] = c.train.seed;
  j["sgd_learning_rate"] = c.train.sgd_learning_rate;
  return j;
}

}  // namespace reflines
