/*
 * Copyright 2026 The MiNet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minet/commands.hpp"
#include "minet/config.hpp"
#include "minet/errors.hpp"

namespace {

std::string config_help() {
  std::string s = "Configuration keys (--set key=value):\n";
  for (const minet::ConfigKey& k : minet::RunConfig::keys()) {
    s += "  " + k.name + " (default '" + k.default_value + "'): " + k.help +
         "\n";
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-domain CTR model with item and interest attention"};
  app.require_subcommand(1);
  app.footer(config_help());

  std::string config_file;
  long long seed = -1;
  std::vector<std::string> overrides;
  app.add_option("--config", config_file, "key=value configuration file");
  app.add_option("--seed", seed, "seed (same as --set seed=N)");
  app.add_option("--set", overrides, "override a configuration key")
      ->type_name("KEY=VALUE");

  std::string out_path, data_path, checkpoint_path;
  long long n = 10;

  auto* generate = app.add_subcommand("generate", "write a synthetic data set");
  generate->add_option("--out", out_path, "output directory")->required();

  auto* train = app.add_subcommand("train", "train and write a checkpoint");
  train->add_option("--data", data_path, "data directory")->required();
  train->add_option("--out", checkpoint_path, "checkpoint path")->required();

  auto* evaluate = app.add_subcommand("evaluate", "score a data file");
  evaluate->add_option("--checkpoint", checkpoint_path)->required();
  evaluate->add_option("--data", data_path,
                       "instance file, or directory (uses test.tsv)")
      ->required();

  auto* ablate =
      app.add_subcommand("ablate", "compare variants over several seeds");
  ablate->add_option("--data", data_path, "data directory")->required();

  auto* inspect = app.add_subcommand("inspect-attention",
                                     "print attention weights per instance");
  inspect->add_option("--checkpoint", checkpoint_path)->required();
  inspect->add_option("--data", data_path,
                      "instance file, or directory (uses test.tsv)")
      ->required();
  inspect->add_option("--n", n, "number of instances");

  for (auto* sub : {generate, train, evaluate, ablate, inspect}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return minet::kExitUsage;
  }

  try {
    minet::RunConfig config;
    if (!config_file.empty()) config.load_file(config_file);
    for (const std::string& kv : overrides) config.set_assignment(kv);
    if (seed >= 0) config.set("seed", std::to_string(seed));

    if (*generate) {
      minet::cmd_generate(config, out_path, std::cout);
    } else if (*train) {
      minet::cmd_train(config, data_path, checkpoint_path, std::cout);
    } else if (*evaluate) {
      minet::cmd_evaluate(checkpoint_path, data_path, std::cout);
    } else if (*ablate) {
      minet::cmd_ablate(config, data_path, std::cout);
    } else if (*inspect) {
      minet::cmd_inspect_attention(checkpoint_path, data_path, n, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return minet::exit_code_for(e);
  }
  return minet::kExitOk;
}
