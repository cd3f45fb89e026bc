// Command-line front-end over the C interface.

#include "sublab/sublab.h"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> format;
};

bool write_file(const fs::path& path, const char* text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

int fail(sublab_status st) {
  std::cerr << "error (" << sublab_status_name(st) << "): " << sublab_last_error() << "\n";
  return sublab_status_exit_code(st);
}

int run(const std::string& command, const Options& opt) {
  sublab_config* cfg = nullptr;
  sublab_status st = sublab_config_load(opt.config.c_str(), &cfg);
  if (st != SUBLAB_OK) return fail(st);
  if (opt.seed) sublab_config_set_seed(cfg, *opt.seed);
  if (opt.jobs && (st = sublab_config_set_jobs(cfg, *opt.jobs)) != SUBLAB_OK) {
    sublab_config_free(cfg);
    return fail(st);
  }
  const fs::path out = opt.out.value_or(sublab_config_out_dir(cfg));
  const std::string format = opt.format.value_or(sublab_config_format(cfg));

  sublab_result* res = nullptr;
  st = sublab_run(cfg, command.c_str(), &res);
  sublab_config_free(cfg);
  if (st != SUBLAB_OK) return fail(st);

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out << ": " << ec.message() << "\n";
    sublab_result_free(res);
    return 2;
  }
  const std::string stem = command;
  std::vector<fs::path> written;
  bool ok = true;
  if (format == "csv" && sublab_result_table_count(res) > 0) {
    for (size_t i = 0; i < sublab_result_table_count(res); ++i) {
      const fs::path p = out / (stem + "_" + sublab_result_table_name(res, i) + ".csv");
      ok = write_file(p, sublab_result_table_csv(res, i)) && ok;
      written.push_back(p);
    }
  } else {
    const fs::path p = out / (stem + ".json");
    ok = write_file(p, sublab_result_json(res));
    written.push_back(p);
  }
  const int code = sublab_result_exit_code(res);
  std::cout << command << ": " << sublab_result_summary(res) << " [exit " << code << "]\n";
  for (const auto& p : written) std::cout << "  wrote " << p.string() << "\n";
  sublab_result_free(res);
  if (!ok) {
    std::cerr << "error: failed writing output files\n";
    return 2;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hoermander-condition and subellipticity checks for vector field systems"};
  app.set_version_flag("--version", std::string(sublab_version()));
  app.require_subcommand(1);

  Options opt;
  std::string chosen;
  std::vector<std::string> names;
  for (size_t i = 0; i < sublab_command_count(); ++i) names.emplace_back(sublab_command_name(i));
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name, "run the " + name + " command");
    sub->add_option("--config", opt.config, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (default: [run] out)");
    sub->add_option("--seed", opt.seed, "override [run] seed");
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return run(chosen, opt);
}
