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

#include "minet/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "minet/errors.hpp"

namespace minet {
namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic = {'M', 'I', 'N', 'E',
                                        'T', 'C', 'K', 'P'};

template <typename U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw CheckpointError("truncated checkpoint");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(bytes[i]) << (8 * i);
  }
  return v;
}

std::string get_bytes(std::istream& in, std::uint64_t n) {
  constexpr std::uint64_t kLimit = 1ull << 32;
  if (n > kLimit) throw CheckpointError("implausible block length");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw CheckpointError("truncated checkpoint");
  return s;
}

json config_to_json(const MiNetConfig& c) {
  return {
      {"model", std::string(to_string(c.kind))},
      {"embedding_dim", c.embedding_dim},
      {"transfer_rank", c.transfer_rank},
      {"attention_dim", c.attention_dim},
      {"fc_dims", c.fc_dims},
      {"interest_activation",
       c.interest_activation == Activation::sigmoid ? "sigmoid" : "exp"},
      {"ablation", std::string(to_string(c.ablation))},
      {"max_source_seq", c.max_source_seq},
      {"max_target_seq", c.max_target_seq},
  };
}

MiNetConfig config_from_json(const json& j) {
  MiNetConfig c;
  c.kind = parse_model_kind(j.at("model").get<std::string>());
  c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  c.transfer_rank = j.at("transfer_rank").get<std::size_t>();
  c.attention_dim = j.at("attention_dim").get<std::size_t>();
  c.fc_dims = j.at("fc_dims").get<std::vector<std::size_t>>();
  c.interest_activation =
      parse_interest_activation(j.at("interest_activation").get<std::string>());
  c.ablation = parse_ablation(j.at("ablation").get<std::string>());
  c.max_source_seq = j.at("max_source_seq").get<std::size_t>();
  c.max_target_seq = j.at("max_target_seq").get<std::size_t>();
  c.validate();
  return c;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Model& model,
                     const Schema& schema, const Vocabulary& vocabulary,
                     std::uint64_t seed) {
  if (vocabulary.size() != model.vocabulary_size()) {
    throw ArgumentError("vocabulary size does not match the model");
  }
  const auto params = model.named_parameters();
  std::ostringstream schema_text;
  schema.write(schema_text);

  json directory = json::array();
  for (const auto& [name, t] : params) {
    directory.push_back({{"name", name}, {"shape", t.shape()}});
  }
  const json header = {
      {"schema", schema_text.str()},
      {"vocabulary", vocabulary.tokens()},
      {"model_config", config_to_json(model.config())},
      {"seed", seed},
      {"tensors", directory},
  };
  const std::string header_text = header.dump();

  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, header_text.size());
  out.write(header_text.data(),
            static_cast<std::streamsize>(header_text.size()));
  for (const auto& [name, t] : params) {
    put_le<std::uint64_t>(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape().size()));
    for (std::size_t d : t.shape()) put_le<std::uint64_t>(out, d);
    for (double v : t.values()) {
      put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    }
  }
  if (!out) throw IoError("failed to write checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const Schema& schema, const Vocabulary& vocabulary,
                     std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_checkpoint(out, model, schema, vocabulary, seed);
}

Checkpoint load_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw CheckpointError("not a checkpoint file");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  const std::string header_text = get_bytes(in, get_le<std::uint64_t>(in));

  json header;
  Schema schema;
  Vocabulary vocabulary;
  MiNetConfig config;
  std::uint64_t seed = 0;
  try {
    header = json::parse(header_text);
    std::istringstream schema_text(header.at("schema").get<std::string>());
    schema = Schema::read(schema_text);
    vocabulary = Vocabulary::from_tokens(
        header.at("vocabulary").get<std::vector<std::string>>());
    config = config_from_json(header.at("model_config"));
    seed = header.at("seed").get<std::uint64_t>();
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") +
                          e.what());
  }

  Model model(config, ReprSpec::from_schema(schema, config.embedding_dim),
              vocabulary.size(), seed);
  auto params = model.named_parameters();
  const json& directory = header.at("tensors");
  if (directory.size() != params.size()) {
    throw CheckpointError("tensor directory does not match the model");
  }
  for (auto& [name, t] : params) {
    const std::string stored = get_bytes(in, get_le<std::uint64_t>(in));
    if (stored != name) {
      throw CheckpointError("expected tensor '" + name + "', found '" +
                            stored + "'");
    }
    const auto rank = get_le<std::uint32_t>(in);
    Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) {
      shape.push_back(get_le<std::uint64_t>(in));
    }
    if (shape != t.shape()) {
      throw CheckpointError("tensor '" + name + "' has shape " +
                            shape_to_string(shape) + ", model expects " +
                            shape_to_string(t.shape()));
    }
    auto values = t.mutable_values();
    for (double& v : values) {
      v = std::bit_cast<double>(get_le<std::uint64_t>(in));
    }
  }
  return Checkpoint{std::move(model), std::move(schema), std::move(vocabulary),
                    seed};
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace minet
