#include "slowfast/models/registry.hpp"

#include <fstream>

namespace slowfast::models {

namespace {

const std::vector<std::string> kModels = {
    "futile-cycle", "futile-cycle-reduced", "futile-cycle-mass-action",
    "counterexample"};

const std::vector<std::string> kFutileKeys = {
    "k1", "k_m1", "k2", "k3", "k_m3", "k4", "h1", "h_m1",
    "h2", "h3", "h_m3", "h4", "S_tot", "E_tot", "F_tot"};

const std::vector<std::string> kCounterexampleKeys = {"a", "b1"};

bool key_in(const std::string& k, const std::vector<std::string>& v) {
  return std::find(v.begin(), v.end(), k) != v.end();
}

} // namespace

const std::vector<std::string>& model_keys() { return kModels; }

bool is_known_model(const std::string& key) { return key_in(key, kModels); }

ModelConfig parse_model_config(const json& doc) {
  if (!doc.is_object()) throw ValidationError("parameter document must be an object");
  ModelConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "model") {
      if (!value.is_string()) throw ValidationError("\"model\" must be a string");
      cfg.model = value.get<std::string>();
    } else if (key == "params") {
      if (!value.is_object()) throw ValidationError("\"params\" must be an object");
      for (const auto& [name, val] : value.items()) {
        if (!val.is_number())
          throw ValidationError("parameter " + name + " must be a number");
        cfg.params[name] = val.get<double>();
      }
    } else if (key == "eps") {
      if (!value.is_number()) throw ValidationError("\"eps\" must be a number");
      cfg.eps = value.get<double>();
    } else {
      throw ValidationError("unknown key in parameter document: " + key);
    }
  }
  if (cfg.model.empty()) throw ValidationError("parameter document needs \"model\"");
  if (!is_known_model(cfg.model))
    throw ValidationError("unknown model: " + cfg.model);
  const auto& allowed = cfg.model == "counterexample" ? kCounterexampleKeys
                                                      : kFutileKeys;
  for (const auto& [name, _] : cfg.params)
    if (!key_in(name, allowed))
      throw ValidationError("unknown parameter for " + cfg.model + ": " + name);
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open parameter file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  return parse_model_config(doc);
}

json default_params_json(const std::string& model) {
  if (!is_known_model(model)) throw ValidationError("unknown model: " + model);
  json doc;
  doc["model"] = model;
  if (model == "counterexample") {
    const auto cp = CounterexampleParams::with_defaults(0.5);
    doc["params"] = {{"a", cp.a}, {"b1", cp.b1}};
    doc["eps"] = cp.eps;
  } else {
    const auto p = FutileCycleParams::all_ones();
    json params;
    params["k1"] = p.k1;
    params["k_m1"] = p.k_m1;
    params["k2"] = p.k2;
    params["k3"] = p.k3;
    params["k_m3"] = p.k_m3;
    params["k4"] = p.k4;
    params["h1"] = p.h1;
    params["h_m1"] = p.h_m1;
    params["h2"] = p.h2;
    params["h3"] = p.h3;
    params["h_m3"] = p.h_m3;
    params["h4"] = p.h4;
    params["S_tot"] = p.S_tot;
    params["E_tot"] = p.E_tot;
    params["F_tot"] = p.F_tot;
    doc["params"] = params;
    doc["eps"] = p.eps();
  }
  return doc;
}

FutileCycleParams futile_params_from(const ModelConfig& cfg) {
  FutileCycleParams p = FutileCycleParams::all_ones();
  auto pick = [&](const std::string& name, double fallback) {
    auto it = cfg.params.find(name);
    return it == cfg.params.end() ? fallback : it->second;
  };
  p.k1 = pick("k1", p.k1);
  p.k_m1 = pick("k_m1", p.k_m1);
  p.k2 = pick("k2", p.k2);
  p.k3 = pick("k3", p.k3);
  p.k_m3 = pick("k_m3", p.k_m3);
  p.k4 = pick("k4", p.k4);
  p.h1 = pick("h1", p.h1);
  p.h_m1 = pick("h_m1", p.h_m1);
  p.h2 = pick("h2", p.h2);
  p.h3 = pick("h3", p.h3);
  p.h_m3 = pick("h_m3", p.h_m3);
  p.h4 = pick("h4", p.h4);
  p.S_tot = pick("S_tot", p.S_tot);
  p.E_tot = pick("E_tot", p.E_tot);
  p.F_tot = pick("F_tot", p.F_tot);
  if (cfg.eps) p = p.with_eps(*cfg.eps);
  p.validate();
  return p;
}

CounterexampleParams counterexample_params_from(const ModelConfig& cfg) {
  const double eps = cfg.eps ? *cfg.eps : 0.5;
  CounterexampleParams cp = CounterexampleParams::with_defaults(eps);
  auto it = cfg.params.find("a");
  if (it != cfg.params.end()) cp.a = it->second;
  it = cfg.params.find("b1");
  if (it != cfg.params.end()) cp.b1 = it->second;
  cp.validate();
  return cp;
}

} // namespace slowfast::models
