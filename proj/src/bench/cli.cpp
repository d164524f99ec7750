#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "dpc/bench.hpp"
#include "dpc/sampler.hpp"

namespace dpc::bench {

namespace {

void append_number(std::string& out, double v) {
  if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
    return;
  }
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[64];
  std::to_chars_result r{};
  if (v == std::trunc(v) && std::abs(v) < 1e15) {
    r = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
  } else {
    r = std::to_chars(buf, buf + sizeof buf, v);
  }
  out.append(buf, r.ptr);
}

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  try {
    return nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string CsvTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      append_number(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("no column " + name);
}

nlohmann::json metadata(const std::string& command, const CommandResult& result) {
  return {{"command", command},
          {"artifact_version", kArtifactVersion},
          {"prng", std::string(kPrngIdentity)},
          {"seed", result.resolved.contains("seed") ? result.resolved["seed"] : nlohmann::json(nullptr)},
          {"config", result.resolved},
          {"columns", result.table.header},
          {"rows", result.table.rows.size()}};
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Phase estimation with displaced photon counting: Fisher information curves, "
               "simulated experiments and likelihood self-checks."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  long trials = 0;
  RunOverrides overrides;

  const auto add_common = [&](CLI::App* sub, bool stochastic) {
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "CSV output path (a .meta.json sidecar is written next to it)");
    sub->add_option("--threads", overrides.threads, "worker threads")->check(CLI::PositiveNumber);
    if (stochastic) {
      sub->add_option("--seed", seed, "global seed (overrides the config)");
      sub->add_option("--trials", trials, "number of trials (overrides the config)")->check(CLI::PositiveNumber);
      sub->add_flag("--full-scale", overrides.full_scale, "use the 9e5-pulse experiment size");
    } else {
      sub->add_option("--seed", seed, "accepted for uniformity; unused");
      sub->add_option("--trials", trials, "accepted for uniformity; unused");
    }
  };

  auto* fi_curve = app.add_subcommand("fi-curve", "Fisher information versus phase for each receiver");
  auto* simulate = app.add_subcommand("simulate", "Bayesian estimates versus number of pulses");
  auto* saturate = app.add_subcommand("saturate", "1/(m Var) versus phase against the Fisher information");
  auto* povm = app.add_subcommand("povm-check", "likelihood versus brute-force Fock-space oracle");
  add_common(fi_curve, false);
  add_common(simulate, true);
  add_common(saturate, true);
  add_common(povm, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (app.got_subcommand(simulate) || app.got_subcommand(saturate)) {
    if (simulate->count("--seed") + saturate->count("--seed")) overrides.seed = seed;
    if (simulate->count("--trials") + saturate->count("--trials")) overrides.trials = trials;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto doc = load_config(config_path);
    CommandResult result;
    if (command == "fi-curve") {
      result = cmd_fi_curve(doc, overrides);
    } else if (command == "simulate") {
      result = cmd_simulate(doc, overrides);
    } else if (command == "saturate") {
      result = cmd_saturate(doc, overrides);
    } else {
      result = cmd_povm_check(doc, overrides);
    }

    const std::string csv = result.table.to_csv();
    if (out_path.empty()) {
      std::cout << csv;
      std::cerr << result.report;
    } else {
      std::filesystem::path path(out_path);
      write_file(path, csv);
      auto sidecar = path;
      sidecar.replace_extension(".meta.json");
      write_file(sidecar, metadata(command, result).dump(2) + "\n");
      std::cout << result.report;
    }
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "dpc-bench " << command << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ModelMismatchError& e) {
    std::cerr << "dpc-bench " << command << ": model mismatch: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dpc-bench " << command << ": invalid parameter: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TruncationError& e) {
    std::cerr << "dpc-bench " << command << ": truncation error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "dpc-bench " << command << ": numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace dpc::bench
