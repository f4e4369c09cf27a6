#pragma once

// JSON scenario configuration: versioned schema, per-figure defaults that
// reproduce the reference geometries, strict key validation (unknown keys are
// rejected with their path), and a canonical resolved document for
// provenance.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pinchsim/errors.hpp"
#include "pinchsim/params.hpp"

namespace pinchsim {

using Json = nlohmann::json;

struct FigureConfig {
  std::string figure;
  Json resolved;  // canonical fully-resolved config (defaults applied)

  std::uint64_t seed = 1;
  std::int64_t trials = 1;
  std::vector<double> sweep_dbm;
  std::string out;
  int workers = 0;
  PhysicalParams physical{};

  // figure-specific knobs; each runner reads the ones it owns
  std::vector<double> sides_m;
  double width_m = 10.0;
  std::vector<double> long_sides_m;
  double side_m = 10.0;
  std::vector<int> antenna_counts;
  std::vector<int> user_counts;
  double area_step_m = 20.0;
  std::array<double, 2> strong_area_center_m{-10.0, 0.0};
  double d1_m = 20.0;
  double d2_m = 10.0;
  std::vector<double> d1_list_m;
  std::vector<double> alphas;
  bool analytical = true;
  std::string search_domain = "D2";
  double window_wavelengths = 10.0;
  double step_wavelengths = 0.1;
  double coarse_step_wavelengths = 1.0;
  double fine_step_wavelengths = 0.05;
  double fine_window_wavelengths = 2.0;
  double power_dbm = 20.0;
  int cases = 2;
  int realizations = 100;
  std::int64_t mc_trials = 200000;
};

namespace detail {

inline Json default_sweep() {
  Json sweep = Json::array();
  for (int p = 0; p <= 50; p += 5) sweep.push_back(static_cast<double>(p));
  return sweep;
}

inline Json default_physical() {
  return Json{{"carrier_frequency_hz", 28e9},
              {"noise_power_dbm", -90.0},
              {"waveguide_height_m", 3.0},
              {"refractive_index", 1.4},
              {"guard_distance_m", nullptr}};
}

inline bool is_sweep_figure(const std::string& figure) {
  return figure == "fig4" || figure == "fig5" || figure == "fig6" || figure == "fig7" ||
         figure == "fig8" || figure == "gap" || figure == "fig9";
}

}  // namespace detail

inline Json default_config(const std::string& figure) {
  Json cfg{{"schema_version", 1},
           {"figure", figure},
           {"seed", 1},
           {"workers", 0},
           {"physical", detail::default_physical()}};
  if (detail::is_sweep_figure(figure) || figure == "fig10" || figure == "table1")
    cfg["out"] = figure + ".csv";
  if (detail::is_sweep_figure(figure)) cfg["sweep_dbm"] = detail::default_sweep();

  if (figure == "fig4") {
    cfg["trials"] = 100000;
    cfg["sides_m"] = {10.0, 20.0};
    cfg["analytical"] = true;
  } else if (figure == "fig5") {
    cfg["trials"] = 100000;
    cfg["width_m"] = 10.0;
    cfg["long_sides_m"] = {10.0, 30.0};
    cfg["analytical"] = true;
  } else if (figure == "fig6") {
    cfg["trials"] = 20000;
    cfg["side_m"] = 10.0;
    cfg["antenna_counts"] = {1, 2, 4, 8};
  } else if (figure == "fig7") {
    cfg["trials"] = 50000;
    cfg["side_m"] = 2.0;
    cfg["user_counts"] = {2, 5};
    cfg["area_step_m"] = 20.0;
    cfg["strong_area_center_m"] = {-10.0, 0.0};
    cfg["analytical"] = true;
  } else if (figure == "fig8") {
    cfg["trials"] = 50000;
    cfg["side_m"] = 2.0;
    cfg["d1_m"] = 20.0;
    cfg["d2_m"] = 10.0;
    cfg["alphas"] = {0.75, 0.25};
  } else if (figure == "gap") {
    cfg["trials"] = 50000;
    cfg["side_m"] = 2.0;
    cfg["d1_list_m"] = {20.0, 40.0};
    cfg["d2_m"] = 10.0;
    cfg["alphas"] = {0.75, 0.25};
    cfg["analytical"] = true;
  } else if (figure == "fig9") {
    cfg["trials"] = 400;
    cfg["side_m"] = 20.0;
    cfg["search_domain"] = "D2";
    cfg["window_wavelengths"] = 10.0;
    cfg["step_wavelengths"] = 0.1;
    cfg["coarse_step_wavelengths"] = 1.0;
    cfg["fine_step_wavelengths"] = 0.05;
    cfg["fine_window_wavelengths"] = 2.0;
  } else if (figure == "fig10") {
    cfg["side_m"] = 20.0;
    cfg["power_dbm"] = 20.0;
    cfg["cases"] = 2;
    cfg["window_wavelengths"] = 10.0;
    cfg["step_wavelengths"] = 0.1;
  } else if (figure == "table1") {
    cfg["side_m"] = 20.0;
    cfg["power_dbm"] = 20.0;
    cfg["realizations"] = 100;
    cfg["window_wavelengths"] = 10.0;
    cfg["step_wavelengths"] = 0.1;
  } else if (figure == "validate") {
    cfg["mc_trials"] = 200000;
  } else {
    throw ConfigError("unknown subcommand: " + figure);
  }
  return cfg;
}

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Merge `user` over `defaults`, rejecting keys the schema does not define and
// values whose JSON type disagrees with the default.
inline Json merge_config(const Json& defaults, const Json& user, const std::string& path) {
  if (!user.is_object())
    throw ConfigError("expected an object", path.empty() ? "<root>" : path);
  Json out = defaults;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string child = join_path(path, it.key());
    if (!defaults.contains(it.key())) throw ConfigError("unknown key", child);
    const Json& dv = defaults.at(it.key());
    const Json& uv = it.value();
    if (dv.is_object()) {
      out[it.key()] = merge_config(dv, uv, child);
      continue;
    }
    if (dv.is_null()) {  // optional numeric field
      if (!(uv.is_null() || uv.is_number()))
        throw ConfigError("expected a number or null", child);
    } else if (dv.is_number() && !uv.is_number()) {
      throw ConfigError("expected a number", child);
    } else if (dv.is_string() && !uv.is_string()) {
      throw ConfigError("expected a string", child);
    } else if (dv.is_boolean() && !uv.is_boolean()) {
      throw ConfigError("expected a boolean", child);
    } else if (dv.is_array() && !uv.is_array()) {
      throw ConfigError("expected an array", child);
    }
    out[it.key()] = uv;
  }
  return out;
}

inline std::vector<double> number_list(const Json& j, const std::string& path) {
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError("expected numeric array elements", path);
    v.push_back(e.get<double>());
  }
  return v;
}

inline std::vector<int> int_list(const Json& j, const std::string& path) {
  std::vector<int> v;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw ConfigError("expected integer array elements", path);
    v.push_back(e.get<int>());
  }
  return v;
}

}  // namespace detail

inline FigureConfig resolve_config(const std::string& figure, const Json& user) {
  const Json defaults = default_config(figure);
  Json merged = detail::merge_config(defaults, user, "");

  if (merged.at("schema_version").get<int>() != 1)
    throw ConfigError("unsupported schema_version", "schema_version");
  if (merged.at("figure").get<std::string>() != figure)
    throw ConfigError("config file targets figure '" +
                          merged.at("figure").get<std::string>() +
                          "' but the subcommand is '" + figure + "'",
                      "figure");

  FigureConfig cfg;
  cfg.figure = figure;
  cfg.seed = merged.at("seed").get<std::uint64_t>();
  cfg.workers = merged.at("workers").get<int>();
  if (cfg.workers < 0) throw ConfigError("workers must be >= 0", "workers");

  const Json& phys = merged.at("physical");
  cfg.physical.carrier_frequency_hz = phys.at("carrier_frequency_hz").get<double>();
  cfg.physical.noise_power_dbm = phys.at("noise_power_dbm").get<double>();
  cfg.physical.waveguide_height_m = phys.at("waveguide_height_m").get<double>();
  cfg.physical.refractive_index = phys.at("refractive_index").get<double>();
  if (!phys.at("guard_distance_m").is_null())
    cfg.physical.guard_distance_m = phys.at("guard_distance_m").get<double>();
  try {
    (void)derive_constants(cfg.physical);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what(), "physical");
  }

  if (merged.contains("out")) cfg.out = merged.at("out").get<std::string>();
  if (merged.contains("trials")) {
    cfg.trials = merged.at("trials").get<std::int64_t>();
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1", "trials");
  }
  if (merged.contains("sweep_dbm")) {
    cfg.sweep_dbm = detail::number_list(merged.at("sweep_dbm"), "sweep_dbm");
    if (cfg.sweep_dbm.empty()) throw ConfigError("sweep must be nonempty", "sweep_dbm");
    for (std::size_t i = 1; i < cfg.sweep_dbm.size(); ++i)
      if (!(cfg.sweep_dbm[i] > cfg.sweep_dbm[i - 1]))
        throw ConfigError("sweep must be strictly increasing", "sweep_dbm");
  }

  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw ConfigError("value must be positive", key);
    return v;
  };

  if (figure == "fig4") {
    cfg.sides_m = detail::number_list(merged.at("sides_m"), "sides_m");
    if (cfg.sides_m.empty()) throw ConfigError("need at least one side", "sides_m");
    for (double s : cfg.sides_m) positive(s, "sides_m");
    cfg.analytical = merged.at("analytical").get<bool>();
  } else if (figure == "fig5") {
    cfg.width_m = positive(merged.at("width_m").get<double>(), "width_m");
    cfg.long_sides_m = detail::number_list(merged.at("long_sides_m"), "long_sides_m");
    if (cfg.long_sides_m.empty()) throw ConfigError("need at least one side", "long_sides_m");
    for (double s : cfg.long_sides_m) positive(s, "long_sides_m");
    cfg.analytical = merged.at("analytical").get<bool>();
  } else if (figure == "fig6") {
    cfg.side_m = positive(merged.at("side_m").get<double>(), "side_m");
    cfg.antenna_counts = detail::int_list(merged.at("antenna_counts"), "antenna_counts");
    if (cfg.antenna_counts.empty())
      throw ConfigError("need at least one antenna count", "antenna_counts");
    for (int n : cfg.antenna_counts)
      if (n < 1) throw ConfigError("antenna counts must be >= 1", "antenna_counts");
  } else if (figure == "fig7") {
    cfg.side_m = positive(merged.at("side_m").get<double>(), "side_m");
    cfg.user_counts = detail::int_list(merged.at("user_counts"), "user_counts");
    for (int m : cfg.user_counts)
      if (m < 1) throw ConfigError("user counts must be >= 1", "user_counts");
    cfg.area_step_m = positive(merged.at("area_step_m").get<double>(), "area_step_m");
    const auto c = detail::number_list(merged.at("strong_area_center_m"), "strong_area_center_m");
    if (c.size() != 2) throw ConfigError("expected [x, y]", "strong_area_center_m");
    cfg.strong_area_center_m = {c[0], c[1]};
    cfg.analytical = merged.at("analytical").get<bool>();
  } else if (figure == "fig8" || figure == "gap") {
    cfg.side_m = positive(merged.at("side_m").get<double>(), "side_m");
    cfg.d2_m = positive(merged.at("d2_m").get<double>(), "d2_m");
    cfg.alphas = detail::number_list(merged.at("alphas"), "alphas");
    if (cfg.alphas.size() != 2) throw ConfigError("expected two coefficients", "alphas");
    if (figure == "fig8") {
      cfg.d1_m = positive(merged.at("d1_m").get<double>(), "d1_m");
    } else {
      cfg.d1_list_m = detail::number_list(merged.at("d1_list_m"), "d1_list_m");
      if (cfg.d1_list_m.empty()) throw ConfigError("need at least one D1", "d1_list_m");
      for (double s : cfg.d1_list_m) positive(s, "d1_list_m");
      cfg.analytical = merged.at("analytical").get<bool>();
    }
  } else if (figure == "fig9") {
    cfg.side_m = positive(merged.at("side_m").get<double>(), "side_m");
    cfg.search_domain = merged.at("search_domain").get<std::string>();
    if (cfg.search_domain != "D1" && cfg.search_domain != "D2")
      throw ConfigError("search_domain must be 'D1' or 'D2'", "search_domain");
    cfg.window_wavelengths =
        positive(merged.at("window_wavelengths").get<double>(), "window_wavelengths");
    cfg.step_wavelengths =
        positive(merged.at("step_wavelengths").get<double>(), "step_wavelengths");
    cfg.coarse_step_wavelengths =
        positive(merged.at("coarse_step_wavelengths").get<double>(), "coarse_step_wavelengths");
    cfg.fine_step_wavelengths =
        positive(merged.at("fine_step_wavelengths").get<double>(), "fine_step_wavelengths");
    cfg.fine_window_wavelengths =
        positive(merged.at("fine_window_wavelengths").get<double>(), "fine_window_wavelengths");
  } else if (figure == "fig10" || figure == "table1") {
    cfg.side_m = positive(merged.at("side_m").get<double>(), "side_m");
    cfg.power_dbm = merged.at("power_dbm").get<double>();
    cfg.window_wavelengths =
        positive(merged.at("window_wavelengths").get<double>(), "window_wavelengths");
    cfg.step_wavelengths =
        positive(merged.at("step_wavelengths").get<double>(), "step_wavelengths");
    if (figure == "fig10") {
      cfg.cases = merged.at("cases").get<int>();
      if (cfg.cases < 1) throw ConfigError("cases must be >= 1", "cases");
    } else {
      cfg.realizations = merged.at("realizations").get<int>();
      if (cfg.realizations < 1) throw ConfigError("realizations must be >= 1", "realizations");
    }
  } else if (figure == "validate") {
    cfg.mc_trials = merged.at("mc_trials").get<std::int64_t>();
    if (cfg.mc_trials < 2) throw ConfigError("mc_trials must be >= 2", "mc_trials");
  }

  cfg.resolved = std::move(merged);
  return cfg;
}

// CLI overrides land both in the typed fields and in the resolved document so
// provenance always reflects what actually ran.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::string> out;
};

inline void apply_overrides(FigureConfig& cfg, const ConfigOverrides& ov) {
  if (ov.seed) {
    cfg.seed = *ov.seed;
    cfg.resolved["seed"] = *ov.seed;
  }
  if (ov.trials) {
    if (*ov.trials < 1) throw ConfigError("trial override must be >= 1", "trials");
    if (cfg.figure == "fig10") {
      cfg.cases = static_cast<int>(*ov.trials);
      cfg.resolved["cases"] = cfg.cases;
    } else if (cfg.figure == "table1") {
      cfg.realizations = static_cast<int>(*ov.trials);
      cfg.resolved["realizations"] = cfg.realizations;
    } else if (cfg.figure == "validate") {
      cfg.mc_trials = *ov.trials;
      cfg.resolved["mc_trials"] = cfg.mc_trials;
    } else {
      cfg.trials = *ov.trials;
      cfg.resolved["trials"] = cfg.trials;
    }
  }
  if (ov.out) {
    cfg.out = *ov.out;
    if (cfg.resolved.contains("out")) cfg.resolved["out"] = *ov.out;
  }
}

}  // namespace pinchsim
