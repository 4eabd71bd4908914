#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "ergolab/cli.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Multiple ergodic averages on finite grids: experiment runner"};
  std::string command, config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool check_only = false;
  app.add_option("command", command, "rank | reduce | average | maximal | weaktype | converge | extend | "
                                     "sharpness | geometry-decompose | geometry-ball | geometry-measure");
  app.add_option("--config", config_path, "experiment JSON")->required();
  app.add_option("--out", out_dir, "output directory for report.json / report.csv");
  app.add_option("--seed", seed, "seed override");
  app.add_flag("--validate", check_only, "only run static validation");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : ergolab::cli::validation;
  }

  nlohmann::json cfg;
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "config: cannot open '" << config_path << "'\n";
    return ergolab::cli::validation;
  }
  try {
    in >> cfg;
  } catch (const std::exception &e) {
    std::cerr << "config: " << e.what() << "\n";
    return ergolab::cli::validation;
  }
  if (!command.empty()) {
    if (cfg.contains("command") && cfg["command"] != command) {
      std::cerr << "command: '" << command << "' does not match config command " << cfg["command"] << "\n";
      return ergolab::cli::validation;
    }
    cfg["command"] = command;
  }
  auto base = std::filesystem::path(config_path).parent_path();

  if (check_only) {
    auto diag = ergolab::cli::validate(cfg, seed, base);
    for (const auto &d : diag)
      std::cout << d << "\n";
    return diag.empty() ? 0 : ergolab::cli::validation;
  }
  auto result = ergolab::cli::run(cfg, out_dir, seed, base);
  (result.exit == 0 ? std::cout : std::cerr) << result.summary << "\n";
  return result.exit;
}
