#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracmono/cli/commands.hpp"

int main(int argc, char** argv) {
    namespace cli = fracmono::cli;

    CLI::App app{"Time-fractional monotone evolution solver"};
    app.set_version_flag("--version", std::string(cli::version()));
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out;
    std::size_t threads = 1;
    auto* seed_opt = app.add_option("--seed", seed, "Seed override (u64)");
    auto* out_opt = app.add_option("--out", out, "Output directory");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Solve the problem described by a config file");
    run->add_option("config", config_path, "JSON config")->required();

    std::string suite;
    auto* verify = app.add_subcommand("verify", "Run a property suite");
    verify->add_option("suite", suite, "kernels, operators, stepper, stochastic, yosida or all")->required();

    std::string axis;
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "Run a config once per parameter value");
    sweep->add_option("config", config_path, "JSON config")->required();
    sweep->add_option("--axis", axis, "beta, gamma, dt, p or alpha_frac")->required();
    sweep->add_option_function<std::string>(
              "--values",
              [&](const std::string& list) {
                  std::size_t pos = 0;
                  while (pos <= list.size()) {
                      const auto comma = std::min(list.find(',', pos), list.size());
                      const auto item = list.substr(pos, comma - pos);
                      if (!item.empty()) {
                          std::size_t used = 0;
                          double v = 0.0;
                          try {
                              v = std::stod(item, &used);
                          } catch (const std::exception&) {
                              throw CLI::ValidationError("--values", "bad number '" + item + "'");
                          }
                          if (used != item.size()) throw CLI::ValidationError("--values", "bad number '" + item + "'");
                          values.push_back(v);
                      }
                      pos = comma + 1;
                  }
              },
              "Comma-separated values")
        ->required();

    for (auto* sub : {run, verify, sweep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitValidation;
    }

    cli::CommandOptions options;
    if (*seed_opt) options.seed = seed;
    if (*out_opt) options.out = out;
    options.threads = threads;

    if (*run) return cli::run_command(config_path, options, std::cout, std::cerr);
    if (*verify) return cli::verify_command(suite, options, std::cout, std::cerr);
    return cli::sweep_command(config_path, axis, values, options, std::cout, std::cerr);
}
