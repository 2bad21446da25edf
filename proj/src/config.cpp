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

#include "minet/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "minet/errors.hpp"

namespace minet {

const std::vector<ConfigKey>& RunConfig::keys() {
  static const std::vector<ConfigKey> k = {
      // Model.
      {"model", "minet", "model kind: minet, lr or dnn"},
      {"embedding_dim", "10", "embedding dimension D per feature"},
      {"transfer_rank", "10", "inner dimension C of the transfer factors"},
      {"attention_dim", "64", "attention hidden width D_h"},
      {"fc_dims", "256,128", "comma-separated hidden widths of each tower"},
      {"interest_activation", "exp", "interest gate activation: exp|sigmoid"},
      {"ablation", "full",
       "full|no_attention|item_only|interest_only|long_term_only|"
       "short_src_only|short_tgt_only"},
      {"max_source_seq", "25", "clicked-news sequence cap (most recent kept)"},
      {"max_target_seq", "5", "clicked-ad sequence cap (most recent kept)"},
      // Training.
      {"batch_source", "64", "source-domain batch size"},
      {"batch_target", "32", "target-domain batch size"},
      {"epochs", "10", "number of passes over the target training set"},
      {"learning_rate", "0.05", "Adagrad learning rate"},
      {"epsilon", "1e-8", "Adagrad denominator epsilon"},
      {"gamma", "0.5", "weight of the source loss in the joint objective"},
      {"seed", "1", "seed for initialization, shuffling and generation"},
      {"early_stop_patience", "0",
       "stop after this many epochs without validation gain (0 disables)"},
      {"log_unweighted_source_loss", "true",
       "with gamma=0, evaluate loss_s for the report instead of logging 0"},
      {"report_file", "", "optional path for the per-epoch report"},
      {"repeats", "5", "seeds per variant for ablate"},
      // Synthetic generator.
      {"kappa", "0.8", "source-affinity to target-click correlation [0,1]"},
      {"synth_users", "2000", "number of users"},
      {"synth_user_segments", "16", "distinct user segment values"},
      {"synth_source_categories", "8", "news categories"},
      {"synth_target_categories", "8", "ad categories"},
      {"synth_news_per_category", "30", "news items per category"},
      {"synth_tags_per_category", "4", "tag vocabulary per news category"},
      {"synth_ads_per_category", "20", "ads per category"},
      {"synth_ads_per_campaign", "5", "ads grouped into one campaign"},
      {"synth_signal_scale", "3", "log-odds scale of the affinity signal"},
      {"synth_affinity_sharpness", "1.5",
       "sharpness of behavior sampling from the affinity"},
      {"synth_behavior_focus", "0.7",
       "probability a clicked item follows the affinity"},
      {"synth_short_term_bonus", "1",
       "log-odds bonus when a clicked ad shares the ad category"},
      {"synth_item_effect", "0.5", "std of per-ad-category log-odds bias"},
      {"synth_target_base_rate", "0.25", "mean target click probability"},
      {"synth_source_base_rate", "0.3", "mean source click probability"},
      {"synth_source_per_user", "10", "source impressions per user"},
      {"synth_target_per_user", "8", "target impressions per user"},
      {"synth_validation_per_user", "1", "target impressions held out"},
      {"synth_test_per_user", "2", "target impressions for test"},
      {"synth_source_seq_max", "12", "clicked news per impression ~ U[0,max]"},
      {"synth_target_seq_max", "4", "clicked ads per impression ~ U[0,max]"},
  };
  return k;
}

RunConfig::RunConfig() {
  for (const ConfigKey& k : keys()) values_[k.name] = k.default_value;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
  it->second = std::string(value);
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) +
                      "'");
  }
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
      s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                          s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  };
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::load_stream(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      set_assignment(line);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  load_stream(in, path.string());
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
  return it->second;
}

namespace {

std::size_t as_size(const RunConfig& c, std::string_view key) {
  const std::string& v = c.get(key);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + std::string(key) +
                      "' needs a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t as_u64(const RunConfig& c, std::string_view key) {
  const std::string& v = c.get(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + std::string(key) +
                      "' needs a non-negative integer, got '" + v + "'");
  }
  return out;
}

double as_double(const RunConfig& c, std::string_view key) {
  const std::string& v = c.get(key);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + std::string(key) +
                      "' needs a number, got '" + v + "'");
  }
}

bool as_bool(const RunConfig& c, std::string_view key) {
  const std::string& v = c.get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + std::string(key) +
                    "' needs true or false, got '" + v + "'");
}

std::vector<std::size_t> as_size_list(const RunConfig& c,
                                      std::string_view key) {
  std::vector<std::size_t> out;
  std::stringstream ss(c.get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    const auto [ptr, ec] =
        std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v == 0) {
      throw ConfigError("config key '" + std::string(key) +
                        "' needs comma-separated positive integers, got '" +
                        c.get(key) + "'");
    }
    out.push_back(v);
  }
  return out;
}

template <typename F>
auto rethrow_as_config(std::string_view key, F&& f) {
  try {
    return f();
  } catch (const ArgumentError& e) {
    throw ConfigError("config key '" + std::string(key) + "': " + e.what());
  }
}

}  // namespace

MiNetConfig RunConfig::model_config() const {
  MiNetConfig m;
  m.kind = rethrow_as_config("model",
                             [&] { return parse_model_kind(get("model")); });
  m.embedding_dim = as_size(*this, "embedding_dim");
  m.transfer_rank = as_size(*this, "transfer_rank");
  m.attention_dim = as_size(*this, "attention_dim");
  m.fc_dims = as_size_list(*this, "fc_dims");
  m.interest_activation = rethrow_as_config("interest_activation", [&] {
    return parse_interest_activation(get("interest_activation"));
  });
  m.ablation = rethrow_as_config(
      "ablation", [&] { return parse_ablation(get("ablation")); });
  m.max_source_seq = as_size(*this, "max_source_seq");
  m.max_target_seq = as_size(*this, "max_target_seq");
  m.validate();
  return m;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.batch_source = as_size(*this, "batch_source");
  t.batch_target = as_size(*this, "batch_target");
  t.epochs = as_size(*this, "epochs");
  t.learning_rate = as_double(*this, "learning_rate");
  t.epsilon = as_double(*this, "epsilon");
  t.gamma = as_double(*this, "gamma");
  t.seed = as_u64(*this, "seed");
  t.early_stop_patience = as_size(*this, "early_stop_patience");
  t.log_unweighted_source_loss = as_bool(*this, "log_unweighted_source_loss");
  t.validate();
  return t;
}

SynthConfig RunConfig::synth_config() const {
  SynthConfig s;
  s.users = as_size(*this, "synth_users");
  s.user_segments = as_size(*this, "synth_user_segments");
  s.source_categories = as_size(*this, "synth_source_categories");
  s.target_categories = as_size(*this, "synth_target_categories");
  s.news_per_category = as_size(*this, "synth_news_per_category");
  s.tags_per_category = as_size(*this, "synth_tags_per_category");
  s.ads_per_category = as_size(*this, "synth_ads_per_category");
  s.ads_per_campaign = as_size(*this, "synth_ads_per_campaign");
  s.kappa = as_double(*this, "kappa");
  s.signal_scale = as_double(*this, "synth_signal_scale");
  s.affinity_sharpness = as_double(*this, "synth_affinity_sharpness");
  s.behavior_focus = as_double(*this, "synth_behavior_focus");
  s.short_term_bonus = as_double(*this, "synth_short_term_bonus");
  s.item_effect = as_double(*this, "synth_item_effect");
  s.target_base_rate = as_double(*this, "synth_target_base_rate");
  s.source_base_rate = as_double(*this, "synth_source_base_rate");
  s.source_per_user = as_size(*this, "synth_source_per_user");
  s.target_per_user = as_size(*this, "synth_target_per_user");
  s.validation_per_user = as_size(*this, "synth_validation_per_user");
  s.test_per_user = as_size(*this, "synth_test_per_user");
  s.source_seq_max = as_size(*this, "synth_source_seq_max");
  s.target_seq_max = as_size(*this, "synth_target_seq_max");
  rethrow_as_config("synth_*", [&] {
    s.validate();
    return 0;
  });
  return s;
}

std::size_t RunConfig::repeats() const {
  const std::size_t r = as_size(*this, "repeats");
  if (r == 0) throw ConfigError("repeats must be positive");
  return r;
}

void RunConfig::write(std::ostream& out) const {
  for (const ConfigKey& k : keys()) {
    out << k.name << '=' << values_.at(k.name) << '\n';
  }
}

}  // namespace minet
