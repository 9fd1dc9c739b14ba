#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qent/errors.hpp"
#include "qent/export.hpp"
#include "qent/scenario.hpp"
#include "qent/validation.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw qent::IoError("cannot create directory " + dir.string());
}

std::map<std::string, std::string> parse_params(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    start = comma == std::string::npos ? text.size() : comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw qent::ConfigError("parameter '" + item + "' is not of the form key=value");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

void print_written(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("qent");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Concurrence dynamics of bipartite qudits under local decoherence"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress");

  // evolve
  auto* evolve = app.add_subcommand("evolve", "Run one scenario from a key-value config file");
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::vector<std::string> overrides;
  std::string seed_text;
  evolve->add_option("--config", config_path, "Scenario file")->required();
  evolve->add_option("--out", out_dir, "Output directory");
  evolve->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  evolve->add_option("--seed", seed_text, "Override the scenario seed");
  evolve->add_option("--set", overrides, "Override a config key (key=value), repeatable");

  // fig1 / fig2
  auto* fig1 = app.add_subcommand("fig1", "Qudit zero-temperature bundle, d = 3..7");
  auto* fig2 = app.add_subcommand("fig2", "Finite-temperature bundle, qubits and d = 8");
  std::string bundle_out = "out";
  std::string bundle_format = "csv";
  int bundle_points = 200;
  std::uint64_t bundle_seed = 1;
  for (auto* sub : {fig1, fig2}) {
    sub->add_option("--out", bundle_out, "Output directory");
    sub->add_option("--format", bundle_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--points", bundle_points, "Grid points per run")
        ->check(CLI::Range(2, 1000000));
    sub->add_option("--seed", bundle_seed, "Seed for the optimizers");
  }

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Evaluate a closed-form curve on a time grid");
  std::string formula;
  std::string params;
  double tmax = 1.0;
  int points = 200;
  std::string oracle_out;
  oracle->add_option("--formula", formula, "Oracle id")->required();
  oracle->add_option("--params", params, "k=v,... (kind, gamma, nbar, a, b, m, m1, m2, n1, n2)");
  oracle->add_option("--tmax", tmax, "Grid end")->check(CLI::NonNegativeNumber);
  oracle->add_option("--points", points, "Grid points")->check(CLI::Range(1, 10000000));
  oracle->add_option("--out", oracle_out, "Write CSV here instead of stdout");

  // validate
  auto* validate = app.add_subcommand("validate", "Randomized invariant suites");
  int samples = 500;
  std::uint64_t validate_seed = qent::PropertySuiteConfig{}.seed;
  validate->add_option("--samples", samples, "Samples per suite")->check(CLI::Range(1, 100000000));
  validate->add_option("--seed", validate_seed, "Suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*evolve) {
      qent::KeyValueConfig cfg = qent::KeyValueConfig::load(config_path);
      for (const auto& o : overrides) cfg.set_assignment(o);
      if (!seed_text.empty()) cfg.set("seed", seed_text);
      const qent::Scenario sc = qent::Scenario::from_config(cfg);
      const auto fmt = qent::parse_format(format);
      const qent::TimeSeries series = qent::run_scenario(sc);
      ensure_dir(out_dir);
      const fs::path path = fs::path(out_dir) / (sc.name + qent::extension(fmt));
      qent::export_series(series, fmt, path);
      print_written({path});
    } else if (*fig1 || *fig2) {
      qent::Bundle bundle;
      if (*fig1) {
        qent::Fig1Options opts;
        opts.points = bundle_points;
        opts.seed = bundle_seed;
        bundle = qent::scenario_fig1(opts);
      } else {
        qent::Fig2Options opts;
        opts.points = bundle_points;
        opts.seed = bundle_seed;
        bundle = qent::scenario_fig2(opts);
      }
      print_written(qent::write_bundle(bundle, bundle_out, qent::parse_format(bundle_format)));
    } else if (*oracle) {
      const qent::OracleSpec spec = qent::make_oracle(formula, parse_params(params));
      const qent::TimeGrid grid{tmax, tmax == 0.0 ? 1 : points};
      if (tmax > 0.0 && points < 2) throw qent::ConfigError("--points must be >= 2");
      std::string csv = "t,c_" + formula + "\n";
      for (const double t : grid.times()) {
        csv += qent::format_real(t) + "," + qent::format_real(spec.evaluate(t)) + "\n";
      }
      if (oracle_out.empty()) {
        std::cout << csv;
      } else {
        qent::write_file_atomic(oracle_out, csv);
        print_written({oracle_out});
      }
    } else if (*validate) {
      qent::PropertySuiteConfig cfg;
      cfg.samples = samples;
      cfg.seed = validate_seed;
      bool all = true;
      for (const auto& r : qent::run_property_suites(cfg)) {
        std::printf("%-28s %s  samples=%d failures=%d worst=%.3e tol=%.0e\n", r.name.c_str(),
                    r.passed() ? "PASS" : "FAIL", r.samples, r.failures, r.worst, r.tolerance);
        all = all && r.passed();
      }
      return all ? kOk : kNumeric;
    }
  } catch (const qent::ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kConfig;
  } catch (const qent::DomainError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kConfig;
  } catch (const qent::ValidationError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kConfig;
  } catch (const qent::IoError& e) {
    spdlog::error("I/O error: {}", e.what());
    return kIo;
  } catch (const qent::NumericError& e) {
    spdlog::error("numeric error: {}", e.what());
    return kNumeric;
  } catch (const qent::IntegrityError& e) {
    spdlog::error("integrity error: {}", e.what());
    return kNumeric;
  }
  return kOk;
}
