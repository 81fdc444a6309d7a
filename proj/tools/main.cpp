#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vqs/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ground-state solvers for lattice spin Hamiltonians"};
  app.set_version_flag("--version", std::string(vqs::kBuildId));

  std::string config_path;
  std::string table_name;
  std::string out_dir;
  int jobs = 1;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run one experiment from a config");
  run->add_option("config", config_path, "Flat key=value config file")
      ->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_dir, "Override the output directory");

  auto* table = app.add_subcommand(
      "table", "Reproduce a published table (table1..table6)");
  table->add_option("name", table_name, "table1..table6")->required();
  table->add_option("--out", out_dir, "Output directory");
  table->add_option("--jobs", jobs, "Concurrent cells");
  table->add_option("--seed", seed, "Base seed for stochastic cells");

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  if (out_dir.empty())
    if (const char* env = std::getenv("VQS_OUTPUT_DIR")) out_dir = env;

  try {
    if (run->parsed()) {
      vqs::ExperimentConfig cfg = vqs::parse_config_file(config_path);
      if (seed != 0) cfg.seed = seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto record = vqs::run_and_write(cfg);
      std::cout << record.label << ": energy "
                << vqs::format_g17(record.energy) << " (per site "
                << vqs::format_g17(record.energy_per_site) << ") in "
                << vqs::format_g17(record.wall_time_s) << " s\n";
      return 0;
    }
    const std::string dir = out_dir.empty() ? "." : out_dir;
    const auto result = vqs::run_table(table_name, jobs, seed);
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / (table_name + ".csv");
    std::ofstream os(path);
    vqs::write_table_csv(os, result);
    vqs::write_table_csv(std::cout, result);
    if (!result.all_ok) {
      std::cerr << "table " << table_name << ": some cells failed\n";
      return 1;
    }
    std::cout << "wrote " << path.string() << "\n";
    return 0;
  } catch (const vqs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
