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

#include "minet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "minet/errors.hpp"
#include "minet/random.hpp"

namespace minet {

void SynthConfig::validate() const {
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw ArgumentError("kappa must lie in [0, 1], got " +
                        std::to_string(kappa));
  }
  if (users == 0 || user_segments == 0 || source_categories == 0 ||
      target_categories == 0 || news_per_category == 0 ||
      tags_per_category == 0 || ads_per_category == 0 ||
      ads_per_campaign == 0) {
    throw ArgumentError("synthetic counts must be positive");
  }
  if (target_per_user <= validation_per_user + test_per_user) {
    throw ArgumentError(
        "target_per_user must exceed validation_per_user + test_per_user");
  }
  if (!(target_base_rate > 0.0 && target_base_rate < 1.0) ||
      !(source_base_rate > 0.0 && source_base_rate < 1.0)) {
    throw ArgumentError("base rates must lie in (0, 1)");
  }
  if (!(behavior_focus >= 0.0 && behavior_focus <= 1.0)) {
    throw ArgumentError("behavior_focus must lie in [0, 1]");
  }
}

std::string synth_user_feature(std::size_t user) {
  return "user" + std::to_string(user);
}
std::string synth_target_category_feature(std::size_t category) {
  return "adcat" + std::to_string(category);
}
std::string synth_source_category_feature(std::size_t category) {
  return "ncat" + std::to_string(category);
}

namespace {

double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

// Offset b with mean(logistic(b + s_i)) == rate; the mean is monotone in b.
double calibrate_offset(const std::vector<double>& signals, double rate) {
  if (signals.empty()) return std::log(rate / (1.0 - rate));
  double lo = -50.0;
  double hi = 50.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    double mean = 0.0;
    for (double s : signals) mean += logistic(mid + s);
    mean /= static_cast<double>(signals.size());
    (mean < rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct NewsItem {
  std::size_t category;
  RawRecord::RawItem features;
};

struct AdItem {
  std::size_t category;
  RawRecord::RawItem features;
};

struct Impression {
  std::size_t user;
  Domain domain;
  RawRecord record;  // label filled after calibration
  double signal;
  int split;  // 0 train, 1 validation, 2 test
};

}  // namespace

SynthData generate_synthetic(const SynthConfig& cfg, std::uint64_t seed,
                             const LoadOptions& options) {
  cfg.validate();
  Rng rng(seed);
  SynthData out;
  out.config = cfg;
  out.schema = Schema({
      {FieldGroup::user, "user_id", FieldKind::single_valued},
      {FieldGroup::user, "user_segment", FieldKind::single_valued},
      {FieldGroup::source, "news_id", FieldKind::single_valued},
      {FieldGroup::source, "news_category", FieldKind::single_valued},
      {FieldGroup::source, "news_tags", FieldKind::multi_valued},
      {FieldGroup::target, "ad_id", FieldKind::single_valued},
      {FieldGroup::target, "ad_category", FieldKind::single_valued},
      {FieldGroup::target, "ad_campaign", FieldKind::single_valued},
  });

  SynthGroundTruth& truth = out.truth;
  truth.seed = seed;
  truth.kappa = cfg.kappa;
  truth.signal_scale = cfg.signal_scale;
  truth.short_term_bonus = cfg.short_term_bonus;

  // Item catalogs.
  std::vector<NewsItem> news;
  for (std::size_t c = 0; c < cfg.source_categories; ++c) {
    for (std::size_t j = 0; j < cfg.news_per_category; ++j) {
      std::vector<std::size_t> tags(cfg.tags_per_category);
      std::iota(tags.begin(), tags.end(), 0);
      rng.shuffle(std::span<std::size_t>(tags));
      const std::size_t n_tags =
          1 + rng.below(std::min<std::size_t>(3, cfg.tags_per_category));
      std::vector<std::string> tag_features;
      for (std::size_t t = 0; t < n_tags; ++t) {
        tag_features.push_back("tag" + std::to_string(c) + "_" +
                               std::to_string(tags[t]));
      }
      news.push_back({c,
                      {{"news" + std::to_string(c) + "_" + std::to_string(j)},
                       {synth_source_category_feature(c)},
                       tag_features}});
    }
  }
  std::vector<AdItem> ads;
  for (std::size_t k = 0; k < cfg.target_categories; ++k) {
    for (std::size_t j = 0; j < cfg.ads_per_category; ++j) {
      ads.push_back({k,
                     {{"ad" + std::to_string(k) + "_" + std::to_string(j)},
                      {synth_target_category_feature(k)},
                      {"camp" + std::to_string(k) + "_" +
                       std::to_string(j / cfg.ads_per_campaign)}}});
    }
  }

  std::vector<std::size_t> perm(cfg.source_categories);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<std::size_t>(perm));
  truth.category_link.resize(cfg.target_categories);
  truth.target_category_bias.resize(cfg.target_categories);
  for (std::size_t k = 0; k < cfg.target_categories; ++k) {
    truth.category_link[k] = perm[k % cfg.source_categories];
    truth.target_category_bias[k] = cfg.item_effect * rng.normal();
  }

  truth.affinity.assign(cfg.users,
                        std::vector<double>(cfg.source_categories, 0.0));
  for (auto& row : truth.affinity) {
    for (double& g : row) g = rng.normal();
  }

  std::vector<Impression> impressions;
  std::vector<double> source_prefs(cfg.source_categories);
  std::vector<double> target_prefs(cfg.target_categories);
  for (std::size_t u = 0; u < cfg.users; ++u) {
    const auto& g = truth.affinity[u];
    for (std::size_t c = 0; c < cfg.source_categories; ++c) {
      source_prefs[c] = std::exp(cfg.affinity_sharpness * g[c]);
    }
    for (std::size_t k = 0; k < cfg.target_categories; ++k) {
      target_prefs[k] =
          std::exp(cfg.affinity_sharpness * g[truth.category_link[k]]);
    }
    const RawRecord::RawItem user = {
        {synth_user_feature(u)},
        {"seg" + std::to_string(u % cfg.user_segments)}};

    auto sample_news = [&]() -> const NewsItem& {
      const std::size_t c = rng.bernoulli(cfg.behavior_focus)
                                ? rng.categorical(source_prefs)
                                : rng.below(cfg.source_categories);
      return news[c * cfg.news_per_category + rng.below(cfg.news_per_category)];
    };
    auto sample_ad = [&]() -> const AdItem& {
      const std::size_t k = rng.bernoulli(cfg.behavior_focus)
                                ? rng.categorical(target_prefs)
                                : rng.below(cfg.target_categories);
      return ads[k * cfg.ads_per_category + rng.below(cfg.ads_per_category)];
    };
    auto behavior = [&](RawRecord& r, std::vector<std::size_t>& ad_cats) {
      const std::size_t n_src = rng.below(cfg.source_seq_max + 1);
      for (std::size_t i = 0; i < n_src; ++i) {
        r.clicked_source.push_back(sample_news().features);
      }
      const std::size_t n_tgt = rng.below(cfg.target_seq_max + 1);
      for (std::size_t i = 0; i < n_tgt; ++i) {
        const AdItem& ad = sample_ad();
        r.clicked_target.push_back(ad.features);
        ad_cats.push_back(ad.category);
      }
      // Truncate the way the loader does so the planted bonus only uses
      // behavior visible to the model.
      if (r.clicked_source.size() > options.max_source_seq) {
        r.clicked_source.erase(
            r.clicked_source.begin(),
            r.clicked_source.end() - options.max_source_seq);
      }
      if (r.clicked_target.size() > options.max_target_seq) {
        const std::size_t drop =
            r.clicked_target.size() - options.max_target_seq;
        r.clicked_target.erase(r.clicked_target.begin(),
                               r.clicked_target.begin() + drop);
        ad_cats.erase(ad_cats.begin(), ad_cats.begin() + drop);
      }
    };

    for (std::size_t i = 0; i < cfg.source_per_user; ++i) {
      Impression imp{u, Domain::source, {}, 0.0, 0};
      imp.record.domain = Domain::source;
      imp.record.user = user;
      const NewsItem& item =
          news[rng.below(cfg.source_categories) * cfg.news_per_category +
               rng.below(cfg.news_per_category)];
      imp.record.item = item.features;
      std::vector<std::size_t> ad_cats;
      behavior(imp.record, ad_cats);
      imp.signal = cfg.signal_scale * g[item.category];
      impressions.push_back(std::move(imp));
    }
    const std::size_t n_train =
        cfg.target_per_user - cfg.validation_per_user - cfg.test_per_user;
    for (std::size_t i = 0; i < cfg.target_per_user; ++i) {
      Impression imp{u, Domain::target, {}, 0.0, 0};
      imp.split = i < n_train ? 0
                  : i < n_train + cfg.validation_per_user ? 1
                                                          : 2;
      imp.record.domain = Domain::target;
      imp.record.user = user;
      const AdItem& ad =
          ads[rng.below(cfg.target_categories) * cfg.ads_per_category +
              rng.below(cfg.ads_per_category)];
      imp.record.item = ad.features;
      std::vector<std::size_t> ad_cats;
      behavior(imp.record, ad_cats);
      const bool repeat =
          std::find(ad_cats.begin(), ad_cats.end(), ad.category) !=
          ad_cats.end();
      imp.signal = truth.target_category_bias[ad.category] +
                   cfg.kappa * cfg.signal_scale *
                       g[truth.category_link[ad.category]] +
                   (repeat ? cfg.short_term_bonus : 0.0);
      impressions.push_back(std::move(imp));
    }
  }

  std::vector<double> source_signals;
  std::vector<double> target_signals;
  for (const Impression& imp : impressions) {
    (imp.domain == Domain::source ? source_signals : target_signals)
        .push_back(imp.signal);
  }
  truth.source_offset = calibrate_offset(source_signals, cfg.source_base_rate);
  truth.target_offset = calibrate_offset(target_signals, cfg.target_base_rate);

  for (Impression& imp : impressions) {
    const double offset = imp.domain == Domain::source ? truth.source_offset
                                                       : truth.target_offset;
    imp.record.label = rng.bernoulli(logistic(offset + imp.signal)) ? 1 : 0;
    auto& bucket = imp.split == 0   ? out.train_records
                   : imp.split == 1 ? out.validation_records
                                    : out.test_records;
    bucket.push_back(std::move(imp.record));
  }

  out.vocabulary = build_vocabulary(out.train_records);
  auto encode = [&](const std::vector<RawRecord>& records) {
    Dataset ds;
    ds.schema = out.schema;
    ds.vocabulary = out.vocabulary;
    for (std::size_t i = 0; i < records.size(); ++i) {
      Instance inst =
          encode_record(records[i], out.schema, out.vocabulary, options, i + 1);
      (inst.domain == Domain::source ? ds.source_instances
                                     : ds.target_instances)
          .push_back(std::move(inst));
    }
    return ds;
  };
  out.train = encode(out.train_records);
  out.validation = encode(out.validation_records);
  out.test = encode(out.test_records);
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += fmt(values[i]);
  }
  return s;
}

void write_records(const std::filesystem::path& path,
                   const std::vector<RawRecord>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  for (const RawRecord& r : records) write_record(f, r);
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace

void write_synthetic(const SynthData& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  write_records(dir / "train.tsv", data.train_records);
  write_records(dir / "validation.tsv", data.validation_records);
  write_records(dir / "test.tsv", data.test_records);
  save_schema(dir / "schema.tsv", data.schema);

  const SynthGroundTruth& t = data.truth;
  const SynthConfig& c = data.config;
  std::ofstream meta(dir / "metadata.txt", std::ios::binary);
  if (!meta) throw IoError("cannot write metadata in " + dir.string());
  meta << "seed=" << t.seed << '\n'
       << "kappa=" << format_double(t.kappa) << '\n'
       << "users=" << c.users << '\n'
       << "source_categories=" << c.source_categories << '\n'
       << "target_categories=" << c.target_categories << '\n'
       << "signal_scale=" << format_double(t.signal_scale) << '\n'
       << "short_term_bonus=" << format_double(t.short_term_bonus) << '\n'
       << "target_base_rate=" << format_double(c.target_base_rate) << '\n'
       << "source_base_rate=" << format_double(c.source_base_rate) << '\n'
       << "target_offset=" << format_double(t.target_offset) << '\n'
       << "source_offset=" << format_double(t.source_offset) << '\n'
       << "category_link="
       << join(t.category_link, [](std::size_t v) { return std::to_string(v); })
       << '\n'
       << "target_category_bias="
       << join(t.target_category_bias, format_double) << '\n';
  if (!meta) throw IoError("failed writing metadata in " + dir.string());

  std::ofstream aff(dir / "affinities.tsv", std::ios::binary);
  if (!aff) throw IoError("cannot write affinities in " + dir.string());
  for (std::size_t u = 0; u < t.affinity.size(); ++u) {
    aff << synth_user_feature(u) << '\t'
        << join(t.affinity[u], format_double) << '\n';
  }
  if (!aff) throw IoError("failed writing affinities in " + dir.string());
}

}  // namespace minet
