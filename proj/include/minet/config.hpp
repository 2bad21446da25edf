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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "minet/model.hpp"
#include "minet/synthetic.hpp"
#include "minet/training.hpp"

namespace minet {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

// Flat key=value configuration covering model, training and generator
// settings. Precedence: explicit set() > file > default.
class RunConfig {
 public:
  RunConfig();

  static const std::vector<ConfigKey>& keys();

  // Lines of `key=value`; blank lines and lines starting with '#' are
  // ignored. Unknown keys are rejected.
  void load_file(const std::filesystem::path& path);
  void load_stream(std::istream& in, const std::string& origin);
  void set(std::string_view key, std::string_view value);
  // Parses `key=value`.
  void set_assignment(std::string_view assignment);

  const std::string& get(std::string_view key) const;

  MiNetConfig model_config() const;
  TrainConfig train_config() const;
  SynthConfig synth_config() const;
  std::size_t repeats() const;

  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace minet
