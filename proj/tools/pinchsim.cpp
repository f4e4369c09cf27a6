// pinchsim: reproduces the reference figures and tables for pinching-antenna
// downlink systems and runs the numerical self-checks.
//
// Exit codes: 0 success, 2 configuration error, 3 validation failure,
// 4 infeasible geometry or placement.

#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pinchsim/config.hpp"
#include "pinchsim/errors.hpp"
#include "pinchsim/figures.hpp"
#include "pinchsim/validate.hpp"
#include "pinchsim/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInfeasible = 4;

struct SubcommandArgs {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
};

pinchsim::Json load_user_config(const std::string& path) {
  if (path.empty()) return pinchsim::Json::object();
  std::ifstream f(path);
  if (!f) throw pinchsim::ConfigError("cannot open config file: " + path);
  try {
    return pinchsim::Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw pinchsim::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

pinchsim::FigureConfig make_config(const std::string& figure, const SubcommandArgs& args) {
  pinchsim::FigureConfig cfg =
      pinchsim::resolve_config(figure, load_user_config(args.config_path));
  pinchsim::ConfigOverrides ov;
  ov.seed = args.seed;
  ov.trials = args.trials;
  if (!args.out_path.empty()) ov.out = args.out_path;
  pinchsim::apply_overrides(cfg, ov);
  return cfg;
}

int run_figure(const std::string& figure, const SubcommandArgs& args) {
  const pinchsim::FigureConfig cfg = make_config(figure, args);
  pinchsim::CsvDocument doc;
  if (figure == "fig4") doc = pinchsim::run_fig4(cfg);
  else if (figure == "fig5") doc = pinchsim::run_fig5(cfg);
  else if (figure == "fig6") doc = pinchsim::run_fig6(cfg);
  else if (figure == "fig7") doc = pinchsim::run_fig7(cfg);
  else if (figure == "fig8") doc = pinchsim::run_fig8(cfg);
  else if (figure == "gap") doc = pinchsim::run_gap(cfg);
  else if (figure == "fig9") doc = pinchsim::run_fig9(cfg);
  else if (figure == "fig10") doc = pinchsim::run_fig10(cfg);
  else throw pinchsim::ConfigError("unknown figure: " + figure);
  doc.write(cfg.out);
  std::printf("wrote %s (%zu rows)\n", cfg.out.c_str(), doc.rows.size());
  return kExitOk;
}

int run_table1_cmd(const SubcommandArgs& args) {
  const pinchsim::FigureConfig cfg = make_config("table1", args);
  const pinchsim::Table1Result res = pinchsim::run_table1(cfg);
  res.doc.write(cfg.out);
  std::printf("wrote %s (%zu rows)\n", cfg.out.c_str(), res.doc.rows.size());
  if (res.ordering_violations > 0) {
    std::fprintf(stderr, "min-rate ordering violated in %d realization(s): %s\n",
                 res.ordering_violations, res.detail.c_str());
    return kExitValidation;
  }
  return kExitOk;
}

int run_validate_cmd(const SubcommandArgs& args) {
  const pinchsim::FigureConfig cfg = make_config("validate", args);
  const pinchsim::ValidationReport rep = pinchsim::run_validation(cfg);
  for (const auto& c : rep.checks) {
    std::printf("%-28s %s  residual=%.3e  tolerance=%.3e%s%s\n", c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.residual, c.tolerance,
                c.note.empty() ? "" : "  ", c.note.c_str());
  }
  if (!rep.all_pass()) {
    std::fprintf(stderr, "validation failed\n");
    return kExitValidation;
  }
  std::printf("all checks passed\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinching-antenna downlink simulation toolkit"};
  app.set_version_flag("--version", std::string(pinchsim::kVersion));
  app.require_subcommand(1);

  const std::vector<std::string> figures = {"fig4", "fig5", "fig6", "fig7", "fig8",
                                            "gap",  "fig9", "fig10"};
  std::map<std::string, SubcommandArgs> args;

  auto add_common = [&](CLI::App* sub, const std::string& name) {
    SubcommandArgs& a = args[name];
    sub->add_option("--config", a.config_path, "scenario config (JSON)");
    sub->add_option("--out", a.out_path, "output CSV path");
    sub->add_option("--seed", a.seed, "override the RNG seed");
    sub->add_option("--trials", a.trials, "override the trial/realization count");
  };

  for (const auto& f : figures)
    add_common(app.add_subcommand(f, "emit the " + f + " curve family as CSV"), f);
  add_common(app.add_subcommand("table1", "per-realization beamformer comparison table"),
             "table1");
  add_common(app.add_subcommand("validate", "run the numerical self-check suite"),
             "validate");

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "table1") return run_table1_cmd(args[name]);
    if (name == "validate") return run_validate_cmd(args[name]);
    return run_figure(name, args[name]);
  } catch (const pinchsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const pinchsim::CapacityError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const pinchsim::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s (achievable range [%g, %g])\n", e.what(),
                 e.achievable_lo, e.achievable_hi);
    return kExitInfeasible;
  } catch (const pinchsim::ParameterError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const pinchsim::GeometryError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
