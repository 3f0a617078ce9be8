#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mixfrac_cli/config.hpp"
#include "mixfrac_cli/runner.hpp"

namespace {

constexpr int kConfigError = 2;

int execute(mixfrac::cli::Command command, const std::string& path,
            mixfrac::cli::RunOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config " << path << "\n";
    return kConfigError;
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    const auto config = mixfrac::cli::parse_config(text.str());
    if (command == mixfrac::cli::Command::oracle_compare && !config.build_measure().all_multinomial()) {
      std::cerr << "error: oracle-compare needs multinomial measures\n";
      return kConfigError;
    }
    options.command = command;
    const auto report = mixfrac::cli::run(config, options);
    for (const auto& t : report.tasks)
      std::cout << t.name << ": " << t.status << (t.error.empty() ? "" : " (" + t.error + ")") << "\n";
    for (const auto& c : report.checks)
      std::cout << "  " << c.name << ": " << c.status << " statistic=" << c.statistic
                << " threshold=" << c.threshold << "\n";
    return mixfrac::cli::exit_code(report);
  } catch (const mixfrac::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == mixfrac::ErrorCode::SchemaError || e.code() == mixfrac::ErrorCode::IoError
               ? kConfigError
               : 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed multifractal analysis of vector-valued measures"};
  app.require_subcommand(1);

  mixfrac::cli::RunOptions options;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::string config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", options.threads, "worker threads (0 = all cores)");
    sub->add_option("--seed", seed, "overrides the config seed");
  };
  auto* analyze = app.add_subcommand("analyze", "run the configured tasks");
  auto* verify = app.add_subcommand("verify", "run the configured tasks plus the property checks");
  auto* oracle = app.add_subcommand("oracle-compare", "compare estimators with the multinomial closed form");
  for (auto* sub : {analyze, verify, oracle}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  options.out_dir = out_dir;
  for (auto* sub : {analyze, verify, oracle})
    if (sub->get_option("--seed")->count() > 0) options.seed = seed;

  using mixfrac::cli::Command;
  const Command command = analyze->parsed()  ? Command::analyze
                          : verify->parsed() ? Command::verify
                                             : Command::oracle_compare;
  return execute(command, config_path, options);
}
