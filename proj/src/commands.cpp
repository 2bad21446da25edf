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

#include "minet/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "minet/checkpoint.hpp"
#include "minet/errors.hpp"
#include "minet/metrics.hpp"
#include "minet/synthetic.hpp"
#include "minet/training.hpp"

namespace minet {
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const MetricUndefinedError*>(&e)) {
    return kExitMetricUndefined;
  }
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const ArgumentError*>(&e)) {
    return kExitUsage;
  }
  return kExitData;
}

namespace {

std::string fmt(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

fs::path resolve_data_file(const fs::path& data) {
  if (fs::is_directory(data)) return data / "test.tsv";
  return data;
}

Dataset load_for_checkpoint(const Checkpoint& ckp, const fs::path& data) {
  return load_dataset(resolve_data_file(data), ckp.schema, ckp.vocabulary,
                      ckp.model.config().load_options());
}

}  // namespace

Splits load_splits(const fs::path& dir, const LoadOptions& options,
                   bool require_test) {
  if (!fs::is_directory(dir)) {
    throw ConfigError("data directory " + dir.string() + " does not exist");
  }
  for (const char* name : {"schema.tsv", "train.tsv", "validation.tsv"}) {
    if (!fs::exists(dir / name)) {
      throw ConfigError("data directory " + dir.string() + " has no " + name);
    }
  }
  const bool has_test = fs::exists(dir / "test.tsv");
  if (require_test && !has_test) {
    throw ConfigError("data directory " + dir.string() + " has no test.tsv");
  }
  Splits s;
  s.schema = load_schema(dir / "schema.tsv");
  {
    std::ifstream in(dir / "train.tsv");
    if (!in) throw IoError("cannot open " + (dir / "train.tsv").string());
    s.vocabulary = build_vocabulary(in);
  }
  s.train = load_dataset(dir / "train.tsv", s.schema, s.vocabulary, options);
  s.validation =
      load_dataset(dir / "validation.tsv", s.schema, s.vocabulary, options);
  if (has_test) {
    s.test = load_dataset(dir / "test.tsv", s.schema, s.vocabulary, options);
  }
  return s;
}

std::vector<Variant> ablation_variants(const MiNetConfig& base) {
  auto with = [&](Ablation a, Activation gate = Activation::exp) {
    MiNetConfig c = base;
    c.kind = ModelKind::minet;
    c.ablation = a;
    c.interest_activation = gate;
    return c;
  };
  MiNetConfig lr = base;
  lr.kind = ModelKind::lr;
  MiNetConfig dnn = base;
  dnn.kind = ModelKind::dnn;
  return {
      {"full", with(Ablation::full)},
      {"no_attention", with(Ablation::no_attention)},
      {"item_only", with(Ablation::item_only)},
      {"interest_only(exp)", with(Ablation::interest_only)},
      {"interest_only(sigmoid)",
       with(Ablation::interest_only, Activation::sigmoid)},
      {"long_term_only", with(Ablation::long_term_only)},
      {"short_src_only", with(Ablation::short_src_only)},
      {"short_tgt_only", with(Ablation::short_tgt_only)},
      {"lr", lr},
      {"dnn", dnn},
  };
}

void cmd_generate(const RunConfig& config, const fs::path& out_dir,
                  std::ostream& out) {
  const MiNetConfig model = config.model_config();
  const SynthConfig synth = config.synth_config();
  const std::uint64_t seed = config.train_config().seed;
  const SynthData data =
      generate_synthetic(synth, seed, model.load_options());
  write_synthetic(data, out_dir);
  out << "wrote " << out_dir.string() << ": train="
      << data.train_records.size()
      << " validation=" << data.validation_records.size()
      << " test=" << data.test_records.size() << '\n';
}

void cmd_train(const RunConfig& config, const fs::path& data_dir,
               const fs::path& checkpoint, std::ostream& out) {
  const MiNetConfig mc = config.model_config();
  const TrainConfig tc = config.train_config();
  const Splits splits = load_splits(data_dir, mc.load_options(), false);

  const TrainResult result = train(splits.train,
                                   splits.validation.target_instances, mc, tc);

  out << "epoch\tloss_t\tloss_s\tcombined\tval_auc\tval_logloss\n";
  result.report.write(out);
  const std::string& report_file = config.get("report_file");
  if (!report_file.empty()) {
    std::ofstream rf(report_file);
    if (!rf) throw IoError("cannot open " + report_file + " for writing");
    result.report.write(rf);
  }

  const EvalReport tr = evaluate(result.model, splits.train.target_instances);
  const EpochRecord& best = result.report.epochs.at(result.report.best_epoch);
  out << "best_epoch=" << best.epoch << '\n';
  out << "best_val_auc=" << fmt(best.val_auc) << '\n';
  out << "train_logloss=" << fmt(tr.logloss) << '\n';
  out << "train_auc=" << fmt(tr.auc) << '\n';
  if (splits.test && !splits.test->target_instances.empty()) {
    const EvalReport te = evaluate(result.model, splits.test->target_instances);
    out << "test_auc=" << fmt(te.auc) << '\n';
  }

  save_checkpoint(checkpoint, result.model, splits.schema, splits.vocabulary,
                  tc.seed);
  out << "checkpoint=" << checkpoint.string() << '\n';
}

void cmd_evaluate(const fs::path& checkpoint, const fs::path& data,
                  std::ostream& out) {
  const Checkpoint ckp = load_checkpoint(checkpoint);
  const Dataset ds = load_for_checkpoint(ckp, data);
  const EvalReport r = evaluate(ckp.model, ds.target_instances);
  out << "auc=" << fmt(r.auc) << '\n';
  out << "logloss=" << fmt(r.logloss) << '\n';
  out << "n_pos=" << r.n_pos << '\n';
  out << "n_neg=" << r.n_neg << '\n';
}

void cmd_ablate(const RunConfig& config, const fs::path& data_dir,
                std::ostream& out) {
  const MiNetConfig base = config.model_config();
  const TrainConfig tc = config.train_config();
  const std::size_t repeats = config.repeats();
  const Splits splits = load_splits(data_dir, base.load_options(), true);
  if (splits.test->target_instances.empty()) {
    throw ConfigError("test.tsv has no target-domain instances");
  }

  std::size_t width = 7;
  const auto variants = ablation_variants(base);
  for (const Variant& v : variants) width = std::max(width, v.name.size());

  out << std::left << std::setw(static_cast<int>(width)) << "variant"
      << "  mean_auc  std\n";
  for (const Variant& v : variants) {
    const RepeatSummary s =
        repeat_over_seeds(repeats, tc.seed, [&](std::uint64_t seed) {
          TrainConfig run = tc;
          run.seed = seed;
          const TrainResult r = train(
              splits.train, splits.validation.target_instances, v.config, run);
          return evaluate(r.model, splits.test->target_instances).auc;
        });
    char row[96];
    std::snprintf(row, sizeof row, "  %.4f    %.4f", s.mean, s.stddev);
    out << std::left << std::setw(static_cast<int>(width)) << v.name << row
        << '\n'
        << std::flush;
  }
}

void cmd_inspect_attention(const fs::path& checkpoint, const fs::path& data,
                           long long n, std::ostream& out) {
  if (n <= 0) throw ArgumentError("--n must be positive");
  const Checkpoint ckp = load_checkpoint(checkpoint);
  const Dataset ds = load_for_checkpoint(ckp, data);
  const auto& instances = ds.target_instances;
  const std::size_t count =
      std::min(static_cast<std::size_t>(n), instances.size());
  auto list = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += fmt(v[i], 4);
    }
    return s + "]";
  };
  for (std::size_t i = 0; i < count; ++i) {
    const AttentionTrace t = ckp.model.trace_attention(instances[i]);
    out << i << ", alpha=" << list(t.alpha) << ", beta=" << list(t.beta)
        << ", v_u=" << fmt(t.v_user, 4) << ", v_s=" << fmt(t.v_source, 4)
        << ", v_t=" << fmt(t.v_target, 4) << '\n';
  }
}

}  // namespace minet
