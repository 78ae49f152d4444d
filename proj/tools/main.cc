//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "moltext/checkpoint.h"
#include "moltext/corpus.h"
#include "moltext/digest.h"
#include "moltext/evaluation.h"
#include "moltext/json_util.h"
#include "moltext/training.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace moltext {

void to_json(json &j, const PropertyConfig &c) {
  j = {{"finetune", c.finetune},
       {"test_fraction", c.test_fraction},
       {"epochs", c.epochs},
       {"head_learning_rate", c.head_learning_rate},
       {"backbone_learning_rate", c.backbone_learning_rate},
       {"batch_size", c.batch_size},
       {"seed", c.seed}};
}

void from_json(const json &j, PropertyConfig &c) {
  check_keys(j, "property config",
             {"finetune", "test_fraction", "epochs", "head_learning_rate",
              "backbone_learning_rate", "batch_size", "seed"});
  read_field(j, "finetune", c.finetune);
  read_field(j, "test_fraction", c.test_fraction);
  read_field(j, "epochs", c.epochs);
  read_field(j, "head_learning_rate", c.head_learning_rate);
  read_field(j, "backbone_learning_rate", c.backbone_learning_rate);
  read_field(j, "batch_size", c.batch_size);
  read_field(j, "seed", c.seed);
}

void to_json(json &j, const AlignConfig &c) {
  j = {{"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"learning_rate", c.learning_rate},
       {"temperature", c.temperature},
       {"seed", c.seed}};
}

void from_json(const json &j, AlignConfig &c) {
  check_keys(j, "align config",
             {"epochs", "batch_size", "learning_rate", "temperature", "seed"});
  read_field(j, "epochs", c.epochs);
  read_field(j, "batch_size", c.batch_size);
  read_field(j, "learning_rate", c.learning_rate);
  read_field(j, "temperature", c.temperature);
  read_field(j, "seed", c.seed);
}

void to_json(json &j, const EditConfig &c) {
  j = {{"anchor_weight", c.anchor_weight},
       {"steps", c.steps},
       {"step_size", c.step_size},
       {"temperature", c.temperature}};
}

void from_json(const json &j, EditConfig &c) {
  check_keys(j, "edit config",
             {"anchor_weight", "steps", "step_size", "temperature"});
  read_field(j, "anchor_weight", c.anchor_weight);
  read_field(j, "steps", c.steps);
  read_field(j, "step_size", c.step_size);
  read_field(j, "temperature", c.temperature);
}

void to_json(json &j, const AttributionConfig &c) {
  j = {{"samples", c.samples},
       {"kernel_width", c.kernel_width},
       {"seed", c.seed}};
}

void from_json(const json &j, AttributionConfig &c) {
  check_keys(j, "attribution config", {"samples", "kernel_width", "seed"});
  read_field(j, "samples", c.samples);
  read_field(j, "kernel_width", c.kernel_width);
  read_field(j, "seed", c.seed);
}

namespace {

constexpr const char *kMotifVocabFile = "motifs.vocab";
constexpr const char *kWordVocabFile = "words.vocab";
constexpr const char *kCheckpointFile = "model.ckpt";
constexpr const char *kManifestFile = "manifest.json";

// Input problems that the command line should report as usage errors.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out;
};

// Collects what the manifest records while a subcommand runs.
class Run {
public:
  Run(std::string subcommand, const Common &common)
      : subcommand_(std::move(subcommand)), common_(common),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(common_.out);
    if (!common_.config_path.empty())
      input(common_.config_path);
  }

  json file_config() const {
    if (common_.config_path.empty())
      return json::object();
    try {
      return json::parse(read_file(common_.config_path));
    } catch (const json::parse_error &e) {
      throw std::invalid_argument("config: " + std::string(e.what()));
    }
  }

  void input(const std::string &path) {
    inputs_[path] = sha256_file(path);
  }

  fs::path output(const std::string &name, std::string_view bytes) {
    const fs::path p = fs::path(common_.out) / name;
    write_file(p, bytes);
    outputs_.push_back(p.string());
    return p;
  }

  void finish(const json &config, const json &arguments) {
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
    json manifest = {
        {"subcommand", subcommand_},
        {"seed", common_.seed},
        {"config", config},
        {"config_digest", sha256_hex(config.dump())},
        {"arguments", arguments},
        {"inputs", inputs_},
        {"outputs", outputs_},
        {"wall_time_seconds", wall},
    };
    const fs::path p = fs::path(common_.out) / kManifestFile;
    write_file(p, manifest.dump(2) + "\n");
  }

private:
  std::string subcommand_;
  Common common_;
  std::chrono::steady_clock::time_point start_;
  json inputs_ = json::object();
  std::vector<std::string> outputs_;
};

void print(const json &j) { std::cout << j.dump() << "\n"; }

TrainConfig train_config_from(const Run &run) {
  TrainConfig cfg;
  from_json(run.file_config(), cfg);
  return cfg;
}

struct LoadedModel {
  MotifVocab motifs;
  WordVocab words;
  std::optional<Checkpoint> checkpoint;
};

LoadedModel load_model(Run &run, const std::string &checkpoint,
                       std::string vocab_dir) {
  if (checkpoint.empty())
    throw std::invalid_argument("--checkpoint is required");
  if (!fs::is_regular_file(checkpoint))
    throw std::runtime_error("checkpoint not found: " + checkpoint);
  if (vocab_dir.empty())
    vocab_dir = fs::path(checkpoint).parent_path().string();
  const fs::path mv = fs::path(vocab_dir) / kMotifVocabFile;
  const fs::path wv = fs::path(vocab_dir) / kWordVocabFile;
  LoadedModel out;
  out.motifs = MotifVocab::parse(read_file(mv));
  out.words = WordVocab::parse(read_file(wv));
  run.input(mv.string());
  run.input(wv.string());
  out.checkpoint.emplace(load_checkpoint(checkpoint, out.motifs, out.words));
  run.input(checkpoint);
  return out;
}

std::vector<PairExample> read_pairs(Run &run, const std::string &path) {
  auto pairs = parse_pairs_jsonl(read_file(path));
  run.input(path);
  return pairs;
}

struct LabeledMolecule {
  std::string id;
  std::string smiles;
  int label = 0;
};

// {"id","smiles"} records; "label" is read when `labeled`.
std::vector<LabeledMolecule> read_molecules(Run &run, const std::string &path,
                                            bool labeled) {
  const std::string content = read_file(path);
  run.input(path);
  std::vector<LabeledMolecule> out;
  std::size_t start = 0;
  int line = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos)
      end = content.size();
    ++line;
    const std::string text = content.substr(start, end - start);
    start = end + 1;
    if (text.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      const json j = json::parse(text);
      LabeledMolecule m;
      m.id = j.at("id").get<std::string>();
      m.smiles = j.at("smiles").get<std::string>();
      if (labeled)
        m.label = j.at("label").get<int>();
      out.push_back(std::move(m));
    } catch (const json::exception &e) {
      throw std::runtime_error(path + ": line " + std::to_string(line) + ": " +
                               e.what());
    }
  }
  return out;
}

json vocab_report(const Vocabularies &v) {
  json motifs = json::array();
  for (int id = 0; id < v.motifs.size(); ++id) {
    const MotifEntry &e = v.motifs.entry(id);
    motifs.push_back(
        {{"id", id}, {"key", e.key}, {"count", e.count}, {"maskable", e.maskable}});
  }
  return {{"molecules", v.report.molecules},
          {"skipped", v.report.skipped},
          {"errors", v.report.errors},
          {"motif_vocab_size", v.motifs.size()},
          {"maskable_motifs", v.motifs.maskable_count()},
          {"word_vocab_size", v.words.size()},
          {"motifs", motifs}};
}

// ---- Subcommands -----------------------------------------------------------

struct BuildVocabArgs {
  std::string corpus;
  std::optional<std::int64_t> min_count, max_count;
  std::optional<int> min_word_frequency;
};

int cmd_build_vocab(const Common &common, const BuildVocabArgs &args) {
  Run run("build-vocab", common);
  TrainConfig cfg = train_config_from(run);
  cfg.seed = common.seed;
  if (args.min_count)
    cfg.mask_min_count = *args.min_count;
  if (args.max_count)
    cfg.mask_max_count = *args.max_count;
  if (args.min_word_frequency)
    cfg.min_word_frequency = *args.min_word_frequency;
  std::vector<PairExample> pairs;
  try {
    pairs = read_pairs(run, args.corpus);
  } catch (const std::exception &e) {
    throw UsageError("corpus: " + std::string(e.what()));
  }
  if (pairs.empty())
    throw UsageError("corpus: no records in " + args.corpus);
  const Vocabularies v = build_vocabularies(pairs, cfg);
  run.output(kMotifVocabFile, v.motifs.serialize());
  run.output(kWordVocabFile, v.words.serialize());
  const json report = vocab_report(v);
  run.output("vocab_report.json", report.dump(2) + "\n");
  run.finish(cfg, {{"corpus", args.corpus}});
  print({{"motif_vocab_size", v.motifs.size()},
         {"maskable_motifs", v.motifs.maskable_count()},
         {"word_vocab_size", v.words.size()},
         {"skipped", v.report.skipped}});
  return 0;
}

struct GenDataArgs {
  std::optional<int> count, test_size;
};

int cmd_gen_data(const Common &common, const GenDataArgs &args) {
  Run run("gen-data", common);
  json cfg = {{"count", 700},
              {"test_size", 0},
              {"min_motifs", 2},
              {"max_motifs", 4},
              {"name_probability", 0.75},
              {"filler_words", 3},
              {"label_motif", "benzene"}};
  const json file = run.file_config();
  check_keys(file, "gen-data config",
             {"count", "test_size", "min_motifs", "max_motifs",
              "name_probability", "filler_words", "label_motif"});
  cfg.update(file);
  if (args.count)
    cfg["count"] = *args.count;
  if (args.test_size)
    cfg["test_size"] = *args.test_size;

  SyntheticCorpusOptions opts;
  int count = 0, test_size = 0;
  std::string label_motif;
  try {
    count = cfg.at("count").get<int>();
    test_size = cfg.at("test_size").get<int>();
    opts.min_motifs = cfg.at("min_motifs").get<int>();
    opts.max_motifs = cfg.at("max_motifs").get<int>();
    opts.name_probability = cfg.at("name_probability").get<double>();
    opts.filler_words = cfg.at("filler_words").get<int>();
    label_motif = cfg.at("label_motif").get<std::string>();
  } catch (const json::exception &e) {
    throw std::invalid_argument("gen-data config: " + std::string(e.what()));
  }
  if (test_size < 0 || test_size >= count)
    throw std::invalid_argument("test_size must be in [0, count)");

  const MotifLibrary lib = MotifLibrary::standard();
  const int label_id = lib.find(label_motif);
  if (label_id < 0)
    throw std::invalid_argument("unknown label motif \"" + label_motif + "\"");
  auto corpus = generate_synthetic_corpus(count, lib, common.seed, opts);
  run.output("motifs.jsonl", format_alignment_jsonl(corpus, lib));

  std::string labels;
  for (const SyntheticExample &e : corpus) {
    const bool has = std::find(e.motifs.begin(), e.motifs.end(), label_id) !=
                     e.motifs.end();
    labels += json{{"id", e.pair.id}, {"smiles", e.pair.smiles},
                   {"label", has ? 1 : 0}}
                  .dump() +
              "\n";
  }
  run.output("labels.jsonl", labels);

  json summary = {{"examples", count}};
  if (test_size > 0) {
    CorpusSplit split =
        split_by_combination(std::move(corpus), test_size, common.seed);
    run.output("train.jsonl", format_pairs_jsonl(pairs_of(split.train)));
    run.output("test.jsonl", format_pairs_jsonl(pairs_of(split.test)));
    summary["train"] = split.train.size();
    summary["test"] = split.test.size();
  } else {
    run.output("train.jsonl", format_pairs_jsonl(pairs_of(corpus)));
    summary["train"] = count;
    summary["test"] = 0;
  }
  run.finish(cfg, json::object());
  print(summary);
  return 0;
}

struct PretrainArgs {
  std::string corpus, vocab_dir, ablation;
  std::optional<int> epochs, batch_size;
};

int cmd_pretrain(const Common &common, const PretrainArgs &args) {
  Run run("pretrain", common);
  TrainConfig cfg = train_config_from(run);
  cfg.seed = common.seed;
  if (args.epochs)
    cfg.epochs = *args.epochs;
  if (args.batch_size)
    cfg.batch_size = *args.batch_size;
  if (!args.ablation.empty())
    cfg = build_ablation_variant(cfg, parse_ablation(args.ablation));
  cfg.validate();

  const auto pairs = read_pairs(run, args.corpus);
  Vocabularies v;
  if (args.vocab_dir.empty()) {
    v = build_vocabularies(pairs, cfg);
  } else {
    const fs::path mv = fs::path(args.vocab_dir) / kMotifVocabFile;
    const fs::path wv = fs::path(args.vocab_dir) / kWordVocabFile;
    v.motifs = MotifVocab::parse(read_file(mv));
    v.words = WordVocab::parse(read_file(wv));
    run.input(mv.string());
    run.input(wv.string());
  }
  run.output(kMotifVocabFile, v.motifs.serialize());
  run.output(kWordVocabFile, v.words.serialize());

  const auto data =
      encode_examples(pairs, v.motifs, v.words, cfg.model.max_positions);
  std::string metrics;
  TrainResult r = train(data, v.motifs, v.words, cfg,
                        [&](const EpochMetrics &m) {
                          metrics += json(m).dump() + "\n";
                        });
  run.output("metrics.jsonl", metrics);
  const std::string ckpt = serialize_checkpoint(
      r.model, cfg, v.motifs, v.words, {cfg.seed, cfg.epochs, r.steps});
  run.output(kCheckpointFile, ckpt);

  json resolved = cfg;
  resolved["model"] = r.model.config();
  run.finish(resolved, {{"corpus", args.corpus},
                        {"vocab_dir", args.vocab_dir},
                        {"ablation", args.ablation}});
  json summary = {{"epochs", cfg.epochs},
                  {"steps", r.steps},
                  {"parameters", r.model.scalar_count()}};
  if (!r.metrics.empty())
    summary["final"] = r.metrics.back();
  print(summary);
  return 0;
}

struct ModelArgs {
  std::string checkpoint, vocab_dir;
};

struct EvalRetrievalArgs {
  ModelArgs model;
  std::string corpus;
  int candidates = 4;
};

int cmd_eval_retrieval(const Common &common, const EvalRetrievalArgs &args) {
  Run run("eval-retrieval", common);
  json cfg = {{"candidates", args.candidates}};
  const json file = run.file_config();
  check_keys(file, "eval-retrieval config", {"candidates"});
  if (file.contains("candidates") && args.candidates == 4)
    cfg["candidates"] = file.at("candidates");
  const int t = cfg.at("candidates").get<int>();

  LoadedModel m = load_model(run, args.model.checkpoint, args.model.vocab_dir);
  const Model &model = m.checkpoint->model;
  const auto pairs = read_pairs(run, args.corpus);
  const auto data = encode_examples(pairs, m.motifs, m.words,
                                    model.config().max_positions);
  const PairEmbeddings emb = embed_pairs(model, data);
  json result = {
      {"candidates", t},
      {"pairs", data.size()},
      {"graph_to_text",
       retrieval_accuracy(emb, t, RetrievalDirection::kGraphToText,
                          common.seed)},
      {"text_to_graph",
       retrieval_accuracy(emb, t, RetrievalDirection::kTextToGraph,
                          common.seed)},
      {"chance", 1.0 / t},
  };
  run.output("retrieval.json", result.dump(2) + "\n");
  run.finish(cfg, {{"checkpoint", args.model.checkpoint},
                   {"vocab_dir", args.model.vocab_dir},
                   {"corpus", args.corpus}});
  print(result);
  return 0;
}

struct EvalPropertyArgs {
  ModelArgs model;
  std::string data;
  bool finetune = false;
  std::optional<int> epochs;
  std::optional<double> test_fraction;
};

int cmd_eval_property(const Common &common, const EvalPropertyArgs &args) {
  Run run("eval-property", common);
  PropertyConfig cfg;
  from_json(run.file_config(), cfg);
  cfg.seed = common.seed;
  if (args.finetune)
    cfg.finetune = true;
  if (args.epochs)
    cfg.epochs = *args.epochs;
  if (args.test_fraction)
    cfg.test_fraction = *args.test_fraction;

  LoadedModel m = load_model(run, args.model.checkpoint, args.model.vocab_dir);
  const auto records = read_molecules(run, args.data, true);
  std::vector<MotifSequence> molecules;
  std::vector<int> labels;
  for (const LabeledMolecule &r : records) {
    molecules.push_back(tokenize_molecule(parse_smiles(r.smiles), m.motifs));
    labels.push_back(r.label);
  }
  const PropertyResult r =
      property_finetune(molecules, labels, m.checkpoint->model, cfg);
  json result = {{"auc", r.auc},
                 {"train_size", r.train_size},
                 {"test_size", r.test_size},
                 {"finetune", cfg.finetune}};
  run.output("property.json", result.dump(2) + "\n");
  run.finish(cfg, {{"checkpoint", args.model.checkpoint},
                   {"vocab_dir", args.model.vocab_dir},
                   {"data", args.data}});
  print(result);
  return 0;
}

struct EditArgs {
  ModelArgs model;
  std::string corpus, input, prompt, target;
  std::optional<double> anchor_weight;
  std::optional<int> steps;
};

int cmd_edit(const Common &common, const EditArgs &args) {
  Run run("edit", common);
  AlignConfig align;
  EditConfig edit;
  int latent_width = 0, max_motifs = 4;
  const json file = run.file_config();
  check_keys(file, "edit config",
             {"align", "edit", "latent_width", "max_motifs"});
  if (file.contains("align"))
    from_json(file.at("align"), align);
  if (file.contains("edit"))
    from_json(file.at("edit"), edit);
  read_field(file, "latent_width", latent_width);
  read_field(file, "max_motifs", max_motifs);
  align.seed = common.seed;
  if (args.anchor_weight)
    edit.anchor_weight = *args.anchor_weight;
  if (args.steps)
    edit.steps = *args.steps;

  LoadedModel m = load_model(run, args.model.checkpoint, args.model.vocab_dir);
  const Model &model = m.checkpoint->model;
  const MotifLibrary lib = MotifLibrary::standard();

  std::vector<MolecularGraph> fit_set;
  for (const LabeledMolecule &r : read_molecules(run, args.corpus, false))
    fit_set.push_back(parse_smiles(r.smiles));
  const auto generator =
      MotifCountAutoencoder::fit(lib, fit_set, latent_width, max_motifs);
  const AlignResult aligned =
      align_to_model(model, m.motifs, generator, fit_set, align);

  const auto inputs = read_molecules(
      run, args.input.empty() ? args.corpus : args.input, false);
  const auto prompt =
      embed_pairless(model, tokenize_text(args.prompt, m.words));
  std::optional<MolecularGraph> target;
  if (!args.target.empty())
    target = parse_smiles(args.target);

  std::string lines;
  std::vector<MolecularGraph> before, after;
  double initial_cos = 0, final_cos = 0;
  for (const LabeledMolecule &r : inputs) {
    MolecularGraph g = parse_smiles(r.smiles);
    EditResult e = edit_molecule(g, prompt, generator, aligned.projectors, edit);
    json line = {{"id", r.id},
                 {"input", r.smiles},
                 {"output", write_smiles(e.molecule)},
                 {"initial_cosine", e.initial_cosine},
                 {"final_cosine", e.final_cosine}};
    if (target)
      line["hit"] = contains_motif(e.molecule, *target);
    lines += line.dump() + "\n";
    initial_cos += e.initial_cosine;
    final_cos += e.final_cosine;
    before.push_back(std::move(g));
    after.push_back(std::move(e.molecule));
  }
  run.output("edits.jsonl", lines);
  json summary = {{"molecules", inputs.size()},
                  {"latent_width", generator.latent_width()},
                  {"alignment_loss", aligned.epoch_losses.empty()
                                         ? 0.0
                                         : aligned.epoch_losses.back()}};
  if (!inputs.empty()) {
    summary["mean_initial_cosine"] = initial_cos / inputs.size();
    summary["mean_final_cosine"] = final_cos / inputs.size();
    if (target) {
      summary["hit_ratio_before"] = hit_ratio(before, *target);
      summary["hit_ratio_after"] = hit_ratio(after, *target);
    }
  }
  run.output("edit_summary.json", summary.dump(2) + "\n");
  json cfg = {{"align", align},
              {"edit", edit},
              {"latent_width", latent_width},
              {"max_motifs", max_motifs}};
  run.finish(cfg, {{"checkpoint", args.model.checkpoint},
                   {"vocab_dir", args.model.vocab_dir},
                   {"corpus", args.corpus},
                   {"input", args.input},
                   {"prompt", args.prompt},
                   {"target", args.target}});
  print(summary);
  return 0;
}

struct ExplainArgs {
  ModelArgs model;
  std::string smiles, text;
  int slot = 1;
  bool exhaustive = false;
  std::optional<int> samples;
};

int cmd_explain(const Common &common, const ExplainArgs &args) {
  Run run("explain", common);
  AttributionConfig cfg;
  from_json(run.file_config(), cfg);
  cfg.seed = common.seed;
  if (args.samples)
    cfg.samples = *args.samples;

  LoadedModel m = load_model(run, args.model.checkpoint, args.model.vocab_dir);
  const Model &model = m.checkpoint->model;
  const MotifSequence motifs = tokenize_molecule(parse_smiles(args.smiles), m.motifs);
  const TextSequence text = tokenize_text(args.text, m.words);
  if (args.slot < 1 || args.slot >= motifs.length())
    throw std::out_of_range("--slot must name a motif slot in [1, " +
                            std::to_string(motifs.length() - 1) + "]");
  const WordImportance w =
      args.exhaustive
          ? word_importance_exhaustive(model, m.motifs, motifs, text, args.slot,
                                       cfg.kernel_width)
          : word_importance(model, m.motifs, motifs, text, args.slot, cfg);
  json words = json::array();
  for (std::size_t i = 0; i < w.weights.size(); ++i)
    words.push_back({{"slot", i + 1},
                     {"word", text.words.at(i + 1)},
                     {"weight", w.weights[i]}});
  json result = {{"motif", m.motifs.entry(motifs.labels[args.slot]).key},
                 {"slot", args.slot},
                 {"base_probability", w.base_probability},
                 {"intercept", w.intercept},
                 {"exhaustive", args.exhaustive},
                 {"words", words}};
  run.output("explanation.json", result.dump(2) + "\n");
  json resolved = cfg;
  resolved["exhaustive"] = args.exhaustive;
  run.finish(resolved, {{"checkpoint", args.model.checkpoint},
                        {"vocab_dir", args.model.vocab_dir},
                        {"smiles", args.smiles},
                        {"text", args.text},
                        {"slot", args.slot}});
  print(result);
  return 0;
}

struct EmbedArgs {
  ModelArgs model;
  std::string corpus;
};

int cmd_embed(const Common &common, const EmbedArgs &args) {
  Run run("embed", common);
  const json file = run.file_config();
  check_keys(file, "embed config", {});
  LoadedModel m = load_model(run, args.model.checkpoint, args.model.vocab_dir);
  const Model &model = m.checkpoint->model;
  const auto pairs = read_pairs(run, args.corpus);
  const auto data = encode_examples(pairs, m.motifs, m.words,
                                    model.config().max_positions);
  const PairEmbeddings emb = embed_pairs(model, data);
  std::string lines;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto g = emb.graph.row(static_cast<int>(i));
    const auto t = emb.text.row(static_cast<int>(i));
    lines += json{{"id", data[i].id},
                  {"graph", std::vector<double>(g.begin(), g.end())},
                  {"text", std::vector<double>(t.begin(), t.end())}}
                 .dump() +
             "\n";
  }
  run.output("embeddings.jsonl", lines);
  run.finish(json::object(), {{"checkpoint", args.model.checkpoint},
                              {"vocab_dir", args.model.vocab_dir},
                              {"corpus", args.corpus}});
  print({{"embedded", data.size()}, {"width", emb.graph.cols()}});
  return 0;
}

void add_common(CLI::App *cmd, Common &common) {
  cmd->add_option("--seed", common.seed,
                  "Base seed for every random choice (default 0)");
  cmd->add_option("--config", common.config_path,
                  "JSON file overriding defaults; flags override the file");
  cmd->add_option("--out", common.out,
                  "Output directory; created if missing. Receives every "
                  "output file and manifest.json")
      ->required();
}

void add_model(CLI::App *cmd, ModelArgs &m) {
  cmd->add_option("--checkpoint", m.checkpoint, "Checkpoint written by pretrain")
      ->required();
  cmd->add_option("--vocab-dir", m.vocab_dir,
                  "Directory holding motifs.vocab and words.vocab (default: "
                  "the checkpoint's directory)");
}

void report_error(const std::string &subcommand, const char *kind,
                  const std::string &message) {
  std::cerr << json{{"error",
                     {{"subcommand", subcommand},
                      {"kind", kind},
                      {"message", message}}}}
                   .dump()
            << "\n";
}

}  // namespace

int run_cli(int argc, char **argv) {
  CLI::App app{"Molecular graph and text pre-training toolkit. Every "
               "subcommand prints a JSON summary on standard output and "
               "writes manifest.json beside its outputs."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Common common;
  BuildVocabArgs bv;
  GenDataArgs gd;
  PretrainArgs pt;
  EvalRetrievalArgs er;
  EvalPropertyArgs ep;
  EditArgs ed;
  ExplainArgs ex;
  EmbedArgs em;

  auto *build_vocab = app.add_subcommand(
      "build-vocab", "Fragment a JSONL corpus and write motif and word "
                     "vocabularies plus a frequency report");
  add_common(build_vocab, common);
  build_vocab->add_option("--corpus", bv.corpus,
                          "JSONL records {\"id\",\"smiles\",\"text\"}")
      ->required();
  build_vocab->add_option("--min-count", bv.min_count,
                          "Smallest corpus count for a maskable motif");
  build_vocab->add_option("--max-count", bv.max_count,
                          "Largest corpus count for a maskable motif");
  build_vocab->add_option("--min-word-frequency", bv.min_word_frequency,
                          "Words rarer than this map to <UNK>");

  auto *gen_data = app.add_subcommand(
      "gen-data", "Generate a synthetic paired corpus from the motif library");
  add_common(gen_data, common);
  gen_data->add_option("--count", gd.count, "Number of pairs (default 700)");
  gen_data->add_option("--test-size", gd.test_size,
                       "Held-out pairs with unseen motif combinations "
                       "(default 0)");

  auto *pretrain = app.add_subcommand(
      "pretrain", "Pre-train a model and write model.ckpt and metrics.jsonl");
  add_common(pretrain, common);
  pretrain->add_option("--corpus", pt.corpus, "JSONL training pairs")->required();
  pretrain->add_option("--vocab-dir", pt.vocab_dir,
                       "Reuse vocabularies from build-vocab instead of "
                       "building them from the corpus");
  pretrain->add_option("--epochs", pt.epochs, "Training epochs");
  pretrain->add_option("--batch-size", pt.batch_size, "Pairs per batch");
  pretrain->add_option("--ablation", pt.ablation,
                       "full, w/o-mmm, motif-mask-only, word-mask-only or "
                       "w/o-cross-attention");

  auto *eval_retrieval = app.add_subcommand(
      "eval-retrieval", "Zero-shot graph/text retrieval accuracy");
  add_common(eval_retrieval, common);
  add_model(eval_retrieval, er.model);
  eval_retrieval->add_option("--corpus", er.corpus, "JSONL evaluation pairs")
      ->required();
  eval_retrieval->add_option("--candidates", er.candidates,
                             "Candidates per query, T >= 2 (default 4)");

  auto *eval_property = app.add_subcommand(
      "eval-property", "Binary property prediction ROC-AUC");
  add_common(eval_property, common);
  add_model(eval_property, ep.model);
  eval_property->add_option("--data", ep.data,
                            "JSONL records {\"id\",\"smiles\",\"label\"}")
      ->required();
  eval_property->add_flag("--finetune", ep.finetune,
                          "Update the backbone as well as the head");
  eval_property->add_option("--epochs", ep.epochs, "Head training epochs");
  eval_property->add_option("--test-fraction", ep.test_fraction,
                            "Fraction of records held out for the AUC");

  auto *edit = app.add_subcommand(
      "edit", "Steer molecules toward a text prompt through a motif-count "
              "generator");
  add_common(edit, common);
  add_model(edit, ed.model);
  edit->add_option("--corpus", ed.corpus,
                   "JSONL molecules {\"id\",\"smiles\"} for fitting the "
                   "generator and aligning projectors")
      ->required();
  edit->add_option("--input", ed.input,
                   "JSONL molecules to edit (default: --corpus)");
  edit->add_option("--prompt", ed.prompt, "Text prompt")->required();
  edit->add_option("--target", ed.target,
                   "Motif SMILES; adds hit ratios before and after editing");
  edit->add_option("--anchor-weight", ed.anchor_weight,
                   "Weight of the squared distance to the input latent");
  edit->add_option("--steps", ed.steps, "Optimization steps per molecule");

  auto *explain = app.add_subcommand(
      "explain", "Word importance for predicting one masked motif");
  add_common(explain, common);
  add_model(explain, ex.model);
  explain->add_option("--smiles", ex.smiles, "Molecule")->required();
  explain->add_option("--text", ex.text, "Description")->required();
  explain->add_option("--slot", ex.slot,
                      "Motif slot to mask, 1-based (default 1)");
  explain->add_option("--samples", ex.samples, "Perturbation samples");
  explain->add_flag("--exhaustive", ex.exhaustive,
                    "Enumerate all keep/drop patterns (at most 16 words)");

  auto *embed = app.add_subcommand(
      "embed", "Write pairless graph and text embeddings as JSONL");
  add_common(embed, common);
  add_model(embed, em.model);
  embed->add_option("--corpus", em.corpus, "JSONL pairs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    report_error("", "usage", e.what());
    return 2;
  }

  CLI::App *cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    if (name == "build-vocab")
      return cmd_build_vocab(common, bv);
    if (name == "gen-data")
      return cmd_gen_data(common, gd);
    if (name == "pretrain")
      return cmd_pretrain(common, pt);
    if (name == "eval-retrieval")
      return cmd_eval_retrieval(common, er);
    if (name == "eval-property")
      return cmd_eval_property(common, ep);
    if (name == "edit")
      return cmd_edit(common, ed);
    if (name == "explain")
      return cmd_explain(common, ex);
    return cmd_embed(common, em);
  } catch (const UsageError &e) {
    report_error(name, "usage", e.what());
    return 2;
  } catch (const std::exception &e) {
    report_error(name, "runtime", e.what());
    return 1;
  }
}

}  // namespace moltext

int main(int argc, char **argv) { return moltext::run_cli(argc, argv); }
