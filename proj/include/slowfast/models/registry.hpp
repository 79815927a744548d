#ifndef SLOWFAST_MODELS_REGISTRY_HPP
#define SLOWFAST_MODELS_REGISTRY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slowfast/models/counterexample.hpp"
#include "slowfast/models/futile_cycle.hpp"

namespace slowfast::models {

using json = nlohmann::ordered_json;

/// Parsed form of the parameter document
///   {"model": string, "params": {name: number}, "eps": number}.
/// Unknown keys anywhere are errors.
struct ModelConfig {
  std::string model;
  std::map<std::string, double> params;
  std::optional<double> eps;
};

ModelConfig parse_model_config(const json& doc);
ModelConfig load_model_config(const std::string& path);

const std::vector<std::string>& model_keys();
bool is_known_model(const std::string& key);

/// Default parameter document for a model key (the canonical all-ones set
/// for the futile-cycle family).
json default_params_json(const std::string& model);

/// Futile-cycle parameters from a config; --eps style overrides rescale
/// E_tot (and F_tot, preserving c). Unknown parameter names are errors.
FutileCycleParams futile_params_from(const ModelConfig& cfg);

CounterexampleParams counterexample_params_from(const ModelConfig& cfg);

} // namespace slowfast::models

#endif
