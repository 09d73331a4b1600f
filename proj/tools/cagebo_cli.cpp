/*
 * Copyright 2026 The cagebo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cagebo/experiment.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string method;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment config JSON")->required();
  cmd->add_option("--seed", c.seed, "run a single seed instead of the config list");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--method", c.method, "cagebo, bo, sa or vae-bo");
}

cagebo::ExperimentConfig resolve(const Common& c) {
  auto cfg = cagebo::load_experiment_config(c.config);
  if (c.seed) cfg.seeds = {*c.seed};
  if (!c.out.empty()) cfg.output = c.out;
  if (!c.method.empty()) cfg.method = cagebo::parse_method(c.method);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained black-box optimization in a conditional generative latent space"};
  app.require_subcommand(1);

  Common gen, trn, opt;
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a feasibility-labeled dataset");
  add_common(gen_cmd, gen);
  auto* trn_cmd = app.add_subcommand("train-cvae", "train the latent model on the dataset");
  add_common(trn_cmd, trn);
  auto* opt_cmd = app.add_subcommand("optimize", "run an optimizer for every seed");
  add_common(opt_cmd, opt);

  std::vector<std::string> plot_dirs;
  std::string plot_out = "convergence.svg", plot_instance, plot_plan;
  auto* plot_cmd = app.add_subcommand("plot", "convergence figure or district map");
  plot_cmd->add_option("dirs", plot_dirs, "run directories");
  plot_cmd->add_option("--out", plot_out, "output SVG");
  plot_cmd->add_option("--instance", plot_instance, "instance JSON for a district map");
  plot_cmd->add_option("--plan", plot_plan, "plan JSON for a district map");

  std::string eval_instance, eval_plan;
  auto* eval_cmd = app.add_subcommand("eval-plan", "report zone workloads of a plan");
  eval_cmd->add_option("instance", eval_instance, "instance JSON")->required();
  eval_cmd->add_option("plan", eval_plan, "plan JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) {
      cagebo::cmd_gen_data(resolve(gen), std::cout);
    } else if (*trn_cmd) {
      cagebo::cmd_train_cvae(resolve(trn), std::cout);
    } else if (*opt_cmd) {
      cagebo::cmd_optimize(resolve(opt), std::cout);
    } else if (*plot_cmd) {
      if (!plot_instance.empty() || !plot_plan.empty()) {
        if (plot_instance.empty() || plot_plan.empty()) {
          std::cerr << "error: --instance and --plan go together\n";
          return 2;
        }
        cagebo::cmd_plot_plan(plot_instance, plot_plan, plot_out, std::cout);
      } else {
        std::vector<std::filesystem::path> dirs(plot_dirs.begin(), plot_dirs.end());
        cagebo::cmd_plot(dirs, plot_out, std::cout);
      }
    } else if (*eval_cmd) {
      cagebo::cmd_eval_plan(eval_instance, eval_plan, std::cout);
    }
  } catch (const cagebo::Error& e) {
    std::cerr << "error [" << cagebo::errc_name(e.code()) << "]: " << e.what() << '\n';
    return cagebo::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
