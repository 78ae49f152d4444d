//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/checkpoint.h"

#include <bit>
#include <cstring>
#include <map>

#include "moltext/digest.h"

namespace moltext {

namespace {

constexpr std::string_view kMagic = "moltext-checkpoint\n";

void append_double(std::string &out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

double read_double(const char *p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i]))
            << (8 * i);
  return std::bit_cast<double>(bits);
}

struct Split {
  nlohmann::json header;
  std::string_view payload;
};

Split split(std::string_view bytes) {
  if (!bytes.starts_with(kMagic))
    throw CheckpointError("checkpoint: bad magic");
  bytes.remove_prefix(kMagic.size());
  const std::size_t nl = bytes.find('\n');
  if (nl == std::string_view::npos || nl == 0 || nl > 20)
    throw CheckpointError("checkpoint: bad header length");
  std::size_t len = 0;
  for (char c : bytes.substr(0, nl)) {
    if (c < '0' || c > '9')
      throw CheckpointError("checkpoint: bad header length");
    len = len * 10 + static_cast<std::size_t>(c - '0');
  }
  bytes.remove_prefix(nl + 1);
  if (len > bytes.size())
    throw CheckpointError("checkpoint: truncated header");
  Split s;
  try {
    s.header = nlohmann::json::parse(bytes.substr(0, len));
  } catch (const nlohmann::json::exception &) {
    throw CheckpointError("checkpoint: header is not valid JSON");
  }
  s.payload = bytes.substr(len);
  return s;
}

}  // namespace

std::string serialize_checkpoint(const Model &model,
                                 const TrainConfig &train_config,
                                 const MotifVocab &motif_vocab,
                                 const WordVocab &word_vocab,
                                 const RngState &rng) {
  nlohmann::json tensors = nlohmann::json::array();
  std::string payload;
  std::size_t offset = 0;
  for (const Parameter &p : model.parameters()) {
    tensors.push_back({{"name", p.name},
                       {"group", param_group_name(p.group)},
                       {"rows", p.value.rows()},
                       {"cols", p.value.cols()},
                       {"offset", offset}});
    for (double v : p.value.values())
      append_double(payload, v);
    offset += p.value.size();
  }
  nlohmann::json header = {
      {"format_version", kCheckpointFormatVersion},
      {"model", model.config()},
      {"train", train_config},
      {"vocab_digests",
       {{"motif", sha256_hex(motif_vocab.serialize())},
        {"word", sha256_hex(word_vocab.serialize())}}},
      {"rng",
       {{"seed", rng.seed},
        {"epochs_completed", rng.epochs_completed},
        {"steps", rng.steps}}},
      {"tensors", tensors},
  };
  const std::string h = header.dump();
  std::string out(kMagic);
  out += std::to_string(h.size());
  out += '\n';
  out += h;
  out += payload;
  return out;
}

nlohmann::json checkpoint_header(std::string_view bytes) {
  return split(bytes).header;
}

Checkpoint parse_checkpoint(std::string_view bytes,
                            const MotifVocab &motif_vocab,
                            const WordVocab &word_vocab) {
  Split s = split(bytes);
  const nlohmann::json &h = s.header;
  try {
    if (!h.contains("format_version") ||
        h.at("format_version").get<std::string>() != kCheckpointFormatVersion)
      throw CheckpointError("checkpoint: unsupported format version");
    const auto &dig = h.at("vocab_digests");
    if (dig.at("motif").get<std::string>() !=
        sha256_hex(motif_vocab.serialize()))
      throw CheckpointError("checkpoint: motif vocabulary digest mismatch");
    if (dig.at("word").get<std::string>() != sha256_hex(word_vocab.serialize()))
      throw CheckpointError("checkpoint: word vocabulary digest mismatch");

    ModelConfig mc;
    from_json(h.at("model"), mc);
    TrainConfig tc;
    from_json(h.at("train"), tc);
    Checkpoint cp{Model(mc, 0), tc, dig.at("motif").get<std::string>(),
                  dig.at("word").get<std::string>(), {}};
    cp.rng.seed = h.at("rng").at("seed").get<std::uint64_t>();
    cp.rng.epochs_completed = h.at("rng").at("epochs_completed").get<int>();
    cp.rng.steps = h.at("rng").at("steps").get<int>();

    std::map<std::string, nlohmann::json> table;
    for (const auto &t : h.at("tensors"))
      table[t.at("name").get<std::string>()] = t;
    for (Parameter &p : cp.model.parameters()) {
      auto it = table.find(p.name);
      if (it == table.end())
        throw CheckpointError("checkpoint: missing tensor \"" + p.name + "\"");
      const auto &t = it->second;
      if (t.at("rows").get<int>() != p.value.rows() ||
          t.at("cols").get<int>() != p.value.cols())
        throw CheckpointError("checkpoint: shape mismatch for tensor \"" +
                              p.name + "\"");
      const std::size_t off = t.at("offset").get<std::size_t>();
      if ((off + p.value.size()) * 8 > s.payload.size())
        throw CheckpointError("checkpoint: truncated data for tensor \"" +
                              p.name + "\"");
      const char *src = s.payload.data() + off * 8;
      for (double &v : p.value.values()) {
        v = read_double(src);
        src += 8;
      }
      table.erase(it);
    }
    if (!table.empty())
      throw CheckpointError("checkpoint: unexpected tensor \"" +
                            table.begin()->first + "\"");
    return cp;
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError(std::string("checkpoint: malformed header: ") +
                          e.what());
  } catch (const std::invalid_argument &e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string &path, const Model &model,
                     const TrainConfig &train_config,
                     const MotifVocab &motif_vocab, const WordVocab &word_vocab,
                     const RngState &rng) {
  write_file(path, serialize_checkpoint(model, train_config, motif_vocab,
                                        word_vocab, rng));
}

Checkpoint load_checkpoint(const std::string &path,
                           const MotifVocab &motif_vocab,
                           const WordVocab &word_vocab) {
  return parse_checkpoint(read_file(path), motif_vocab, word_vocab);
}

}  // namespace moltext
