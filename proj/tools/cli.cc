// Copyright 2026 The ctcasr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "ctcasr/error.h"
#include "ctcasr/evaluation.h"
#include "ctcasr/lm.h"
#include "ctcasr/manifest.h"
#include "ctcasr/parallel.h"
#include "ctcasr/wav.h"

namespace ctcasr::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Setter = std::function<void(const json&)>;

template <typename T>
Setter Set(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

Setter SetPath(fs::path& field, const fs::path& base) {
  return [&field, base](const json& v) {
    fs::path p = v.get<std::string>();
    field = p.is_relative() && !p.empty() ? base / p : p;
  };
}

void ApplySection(const json& section, const std::string& name, const std::map<std::string, Setter>& keys) {
  if (!section.is_object()) throw UsageError("config: section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    auto it = keys.find(key);
    if (it == keys.end()) throw UsageError("config: unknown key '" + name + "." + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw UsageError("config: bad value for '" + name + "." + key + "': " + e.what());
    }
  }
}

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse number list '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

// Loads or computes the features of one manifest record.
FeatureMatrix FeaturesOf(const Utterance& u, const FeatureConfig& config) {
  if (!u.feature_path.empty()) return LoadFeatures(u.feature_path);
  return ComputeFeatures(ReadWav(u.audio_path), config);
}

void ReportFailures(const std::string& command, std::size_t total,
                    const std::vector<std::pair<std::string, std::string>>& failures) {
  std::cerr << command << ": " << failures.size() << " of " << total << " utterances failed\n";
  for (const auto& [id, why] : failures) std::cerr << "  " << id << ": " << why << "\n";
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void Validate(const RunConfig& config) {
  try {
    config.network.Validate();
    config.train.Validate();
    config.decode.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (config.lm != "none" && config.lm != "dict" && config.lm != "ngram") {
    throw UsageError("lm must be none, dict or ngram");
  }
}

std::unique_ptr<LanguageModel> MakeLanguageModel(const RunConfig& config) {
  if (config.lm == "dict") {
    if (config.lexicon.empty()) throw UsageError("--lm dict needs --lexicon");
    return std::make_unique<DictionaryLanguageModel>(std::make_shared<Lexicon>(Lexicon::Load(config.lexicon)));
  }
  if (config.lm == "ngram") {
    if (config.arpa.empty()) throw UsageError("--lm ngram needs --arpa");
    return std::make_unique<NGramLanguageModel>(std::make_shared<NGramModel>(NGramModel::Load(config.arpa)));
  }
  return nullptr;
}

// Options shared by every subcommand that reads a RunConfig.
struct CommonFlags {
  fs::path config_path;
  std::optional<int> workers;
};

struct TrainFlags {
  std::optional<std::string> arch;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr;
  std::optional<std::string> layers;
};

struct DecodeFlags {
  std::optional<int> beam;
  std::optional<double> alpha, beta;
  std::optional<std::string> lm;
  std::optional<fs::path> lexicon, arpa;
  bool greedy = false;
  bool end_of_utterance = false;
};

RunConfig Resolve(const CommonFlags& common, const TrainFlags& tf, const DecodeFlags& df) {
  RunConfig c = common.config_path.empty() ? RunConfig{} : LoadRunConfig(common.config_path);
  if (common.workers) c.train.workers = *common.workers;
  if (tf.arch) {
    try {
      c.network.architecture = ParseArchitecture(*tf.arch);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (tf.epochs) c.train.epochs = *tf.epochs;
  if (tf.seed) c.train.seed = *tf.seed;
  if (tf.lr) c.train.initial_lr = *tf.lr;
  if (tf.layers) {
    c.network.layer_sizes.clear();
    for (double w : ParseList(*tf.layers)) c.network.layer_sizes.push_back(static_cast<int>(w));
    if (c.network.recurrent_layer >= static_cast<int>(c.network.layer_sizes.size())) {
      c.network.recurrent_layer = static_cast<int>(c.network.layer_sizes.size()) / 2;
    }
  }
  if (df.beam) c.decode.beam_width = *df.beam;
  if (df.alpha) c.decode.alpha = *df.alpha;
  if (df.beta) c.decode.beta = *df.beta;
  if (df.lm) c.lm = *df.lm;
  if (df.lexicon) c.lexicon = fs::absolute(*df.lexicon);
  if (df.arpa) c.arpa = fs::absolute(*df.arpa);
  if (df.greedy) c.greedy = true;
  if (df.end_of_utterance) c.decode.end_of_utterance = true;
  Validate(c);
  return c;
}

std::string TranscriptText(const RunConfig& config, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ostringstream out;
  out << StampLine(config) << "\n";
  WriteTranscripts(out, rows);
  return out.str();
}

// ---- featurize -----------------------------------------------------------

int Featurize(const RunConfig& config, const fs::path& manifest, const fs::path& out_dir) {
  const auto utts = ReadManifest(manifest);
  fs::create_directories(out_dir);
  std::vector<std::optional<Utterance>> done(utts.size());
  std::vector<std::string> errors(utts.size());
  ParallelFor(utts.size(), config.train.workers, [&](std::size_t i) {
    try {
      if (utts[i].audio_path.empty()) throw Error("no audio_path");
      Utterance u = utts[i];
      u.feature_path = fs::absolute(out_dir / (u.id + ".feat"));
      SaveFeatures(u.feature_path, ComputeFeatures(ReadWav(u.audio_path), config.features));
      done[i] = std::move(u);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  std::vector<Utterance> ok;
  std::vector<std::pair<std::string, std::string>> failures;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    if (done[i]) ok.push_back(*done[i]);
    else failures.emplace_back(utts[i].id, errors[i]);
  }
  WriteManifest(out_dir / "manifest.jsonl", ok,
                {{"ctcasr_version", CTCASR_VERSION}, {"config_hash", ConfigHash(config)}});
  std::cerr << "featurize: wrote " << ok.size() << " feature files to " << out_dir.string() << "\n";
  if (!failures.empty()) {
    ReportFailures("featurize", utts.size(), failures);
    return kDataFailure;
  }
  return kOk;
}

// ---- train ---------------------------------------------------------------

int TrainCommand(RunConfig config, const fs::path& manifest, const fs::path& out_dir,
                 const std::optional<fs::path>& resume) {
  const Alphabet alphabet = Alphabet::Default();
  const auto utts = ReadManifest(manifest);
  std::vector<TrainingExample> examples(utts.size());
  std::vector<std::string> errors(utts.size());
  ParallelFor(utts.size(), config.train.workers, [&](std::size_t i) {
    try {
      examples[i].id = utts[i].id;
      examples[i].features = FeaturesOf(utts[i], config.features);
      examples[i].transcript = utts[i].transcript;
      examples[i].labels = alphabet.Encode(utts[i].transcript);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  std::vector<std::pair<std::string, std::string>> failures;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    if (!errors[i].empty()) failures.emplace_back(utts[i].id, errors[i]);
  }
  if (!failures.empty()) {
    ReportFailures("train", utts.size(), failures);
    return kDataFailure;
  }
  if (examples.empty()) throw Error("train: manifest has no utterances");

  const int dim = static_cast<int>(examples.front().features.dim());
  for (const auto& ex : examples) {
    if (ex.features.dim() != dim) throw Error("train: utterance " + ex.id + " has a different feature width");
  }
  if (config.input_dim && *config.input_dim != dim) {
    throw Error("train: config input_dim " + std::to_string(*config.input_dim) + " but features have " +
                std::to_string(dim));
  }

  NetworkParams params;
  std::optional<OptimizerState> state;
  NetworkConfig net = config.network;
  if (resume) {
    Checkpoint ck = LoadCheckpoint(*resume);
    net = ck.config;
    params = std::move(ck.params);
    state = std::move(ck.state);
    std::cerr << "train: resuming from " << resume->string() << " after epoch " << state->epoch << "\n";
  } else {
    net.input_dim = dim;
    net.output_dim = static_cast<int>(alphabet.size());
    params = InitParams(net, config.train.seed);
  }
  if (net.input_dim != dim) throw Error("train: checkpoint expects input width " + std::to_string(net.input_dim));
  config.network = net;
  config.input_dim = net.input_dim;

  fs::create_directories(out_dir);
  WriteTextFile(out_dir / "config.json", ToJson(config).dump(2) + "\n");
  std::cerr << "train: " << ArchitectureName(net.architecture) << ", " << NumParameters(net) << " parameters, "
            << examples.size() << " utterances\n";

  TrainOptions options;
  options.checkpoint_dir = out_dir;
  options.log = [](const std::string& line) { std::cerr << "train: " << line << "\n"; };
  const TrainResult result = Train(examples, net, config.train, alphabet, std::move(params), state, options);

  std::ostringstream csv;
  csv << StampLine(config) << "\n";
  WriteMetricsCsv(csv, result.metrics);
  WriteTextFile(out_dir / "metrics.csv", csv.str());
  SaveNetwork(out_dir / "model.netp", net, result.params);
  return kOk;
}

// ---- decode --------------------------------------------------------------

struct DecodeInput {
  std::string id;
  PosteriorGrid grid;
  std::shared_ptr<const Alphabet> alphabet;
};

std::vector<DecodeInput> LoadDecodeInputs(const RunConfig& config, const std::vector<fs::path>& grids,
                                          const std::optional<fs::path>& model,
                                          const std::optional<fs::path>& manifest,
                                          std::vector<std::pair<std::string, std::string>>& failures) {
  std::vector<DecodeInput> inputs;
  if (!grids.empty()) {
    for (const auto& path : grids) {
      try {
        auto [grid, abc] = LoadPosteriorGrid(path);
        inputs.push_back({path.stem().string(), std::move(grid), std::make_shared<Alphabet>(std::move(abc))});
      } catch (const std::exception& e) {
        failures.emplace_back(path.stem().string(), e.what());
      }
    }
    return inputs;
  }
  const auto [net, params] = LoadModel(*model);
  auto alphabet = std::make_shared<const Alphabet>(Alphabet::Default());
  if (net.output_dim != static_cast<int>(alphabet->size())) {
    throw Error("decode: model has " + std::to_string(net.output_dim) + " outputs, alphabet has " +
                std::to_string(alphabet->size()));
  }
  const auto utts = ReadManifest(*manifest);
  std::vector<std::optional<PosteriorGrid>> out(utts.size());
  std::vector<std::string> errors(utts.size());
  ParallelFor(utts.size(), config.train.workers, [&](std::size_t i) {
    try {
      out[i] = Forward(params, net, FeaturesOf(utts[i], config.features)).grid;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < utts.size(); ++i) {
    if (out[i]) inputs.push_back({utts[i].id, std::move(*out[i]), alphabet});
    else failures.emplace_back(utts[i].id, errors[i]);
  }
  return inputs;
}

std::vector<std::pair<std::string, std::string>> DecodeAll(const RunConfig& config,
                                                           const std::vector<DecodeInput>& inputs,
                                                           const LanguageModel* lm) {
  std::vector<std::pair<std::string, std::string>> rows(inputs.size());
  ParallelFor(inputs.size(), config.train.workers, [&](std::size_t i) {
    const auto& in = inputs[i];
    rows[i].first = in.id;
    rows[i].second = config.greedy ? GreedyDecode(in.grid, *in.alphabet)
                                   : PrefixBeamSearch(in.grid, lm, config.decode, *in.alphabet).text();
  });
  return rows;
}

CorpusScore ScoreRows(const std::vector<std::pair<std::string, std::string>>& refs,
                      const std::vector<std::pair<std::string, std::string>>& hyps,
                      std::vector<ScoredUtterance>* per_utt,
                      std::vector<std::pair<std::string, std::string>>& failures) {
  std::map<std::string, std::string> by_id(hyps.begin(), hyps.end());
  CorpusScore total;
  for (const auto& [id, ref] : refs) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      failures.emplace_back(id, "no hypothesis");
      continue;
    }
    try {
      ScoredUtterance row{id, CharErrors(ref, it->second), WordErrors(ref, it->second)};
      total.chars += row.chars;
      total.words += row.words;
      ++total.utterances;
      if (per_utt) per_utt->push_back(std::move(row));
    } catch (const std::exception& e) {
      failures.emplace_back(id, e.what());
    }
  }
  return total;
}

int DecodeCommand(RunConfig config, const std::vector<fs::path>& grids, const std::optional<fs::path>& model,
                  const std::optional<fs::path>& manifest, const std::optional<fs::path>& out,
                  const std::optional<std::string>& sweep_alpha, const std::optional<std::string>& sweep_beta,
                  const std::optional<fs::path>& refs_path) {
  if (grids.empty() == !model.has_value()) throw UsageError("decode: give either --grids or --model");
  if (model && !manifest) throw UsageError("decode: --model needs --manifest");
  const bool sweep = sweep_alpha || sweep_beta;
  if (sweep && !out) throw UsageError("decode: sweeps need --out");
  if (sweep && config.greedy) throw UsageError("decode: --greedy cannot be swept");

  std::vector<std::pair<std::string, std::string>> failures;
  const auto inputs = LoadDecodeInputs(config, grids, model, manifest, failures);
  const auto lm = MakeLanguageModel(config);
  const std::vector<std::pair<std::string, std::string>> refs =
      refs_path ? ReadTranscripts(*refs_path) : std::vector<std::pair<std::string, std::string>>{};

  if (!sweep) {
    const std::string text = TranscriptText(config, DecodeAll(config, inputs, lm.get()));
    if (out) WriteTextFile(*out, text);
    else std::cout << text;
  } else {
    const std::vector<double> alphas = sweep_alpha ? ParseList(*sweep_alpha) : std::vector<double>{config.decode.alpha};
    const std::vector<double> betas = sweep_beta ? ParseList(*sweep_beta) : std::vector<double>{config.decode.beta};
    std::ostringstream table;
    table << StampLine(config) << "\nalpha,beta,cer,wer,file\n";
    for (double a : alphas) {
      for (double b : betas) {
        RunConfig point = config;
        point.decode.alpha = a;
        point.decode.beta = b;
        Validate(point);
        const auto rows = DecodeAll(point, inputs, lm.get());
        const fs::path file = out->parent_path() / (out->stem().string() + ".a" + FormatNumber(a) + ".b" +
                                                    FormatNumber(b) + out->extension().string());
        WriteTextFile(file, TranscriptText(point, rows));
        table << FormatNumber(a) << ',' << FormatNumber(b) << ',';
        if (!refs.empty()) {
          std::vector<std::pair<std::string, std::string>> score_failures;
          const CorpusScore s = ScoreRows(refs, rows, nullptr, score_failures);
          table << s.chars.rate() << ',' << s.words.rate();
        } else {
          table << ',';
        }
        table << ',' << file.string() << '\n';
      }
    }
    WriteTextFile(out->parent_path() / (out->stem().string() + ".sweep.csv"), table.str());
    std::cout << table.str();
  }
  if (!failures.empty()) {
    ReportFailures("decode", inputs.size() + failures.size(), failures);
    return kDataFailure;
  }
  return kOk;
}

// ---- score ---------------------------------------------------------------

int ScoreCommand(const RunConfig& config, const fs::path& ref, const fs::path& hyp,
                 const std::optional<fs::path>& csv) {
  std::vector<std::pair<std::string, std::string>> failures;
  std::vector<ScoredUtterance> rows;
  const CorpusScore total = ScoreRows(ReadTranscripts(ref), ReadTranscripts(hyp), &rows, failures);
  std::cout << StampLine(config) << "\n";
  if (total.utterances > 0) WriteScoreSummary(std::cout, total);
  if (csv) {
    std::ostringstream text;
    text << StampLine(config) << "\n";
    WriteScoreCsv(text, rows, total);
    WriteTextFile(*csv, text.str());
  }
  if (!failures.empty()) {
    ReportFailures("score", failures.size() + rows.size(), failures);
    return kDataFailure;
  }
  return kOk;
}

// ---- lm ------------------------------------------------------------------

std::vector<std::string> Split(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

int LmCommand(const RunConfig& config, const std::vector<std::string>& queries,
              const std::vector<std::string>& sentences) {
  std::cout << StampLine(config) << "\n";
  if (!config.arpa.empty()) {
    const NGramModel model = NGramModel::Load(config.arpa);
    std::cout << "order " << model.order() << "\n";
    for (int n = 1; n <= model.order(); ++n) std::cout << "ngram " << n << "=" << model.count(n) << "\n";
    for (const auto& q : queries) {
      const auto words = Split(q);
      if (words.empty()) throw UsageError("lm: empty query");
      const std::vector<std::string> ctx(words.begin(), words.end() - 1);
      std::cout << "log10 p(" << words.back() << " | " << (ctx.empty() ? "" : q.substr(0, q.rfind(' ')))
                << ") = " << model.Log10Prob(words.back(), ctx) << "\n";
    }
    const NGramLanguageModel lm(std::make_shared<NGramModel>(model));
    for (const auto& s : sentences) {
      const auto words = Split(s);
      double total = 0.0;
      for (std::size_t i = 0; i < words.size(); ++i) {
        total += lm.WordLogProb(std::span(words).first(i), words[i]);
      }
      total += lm.EndLogProb(words);
      const double log10_total = total / std::log(10.0);
      std::cout << "sentence \"" << s << "\" log10 p = " << log10_total
                << " perplexity = " << std::pow(10.0, -log10_total / static_cast<double>(words.size() + 1)) << "\n";
    }
    return kOk;
  }
  if (!config.lexicon.empty()) {
    const Lexicon lexicon = Lexicon::Load(config.lexicon);
    std::cout << "lexicon " << lexicon.size() << " words\n";
    for (const auto& q : queries) std::cout << "p(" << q << ") = " << DictionaryProb(lexicon, q) << "\n";
    return kOk;
  }
  throw UsageError("lm: give --arpa or --lexicon");
}

}  // namespace

void ApplyJson(RunConfig& c, const json& j, const fs::path& base) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  for (const auto& [section, value] : j.items()) {
    if (section == "features") {
      auto& f = c.features;
      ApplySection(value, section,
                   {{"num_bins", Set(f.num_bins)}, {"window_s", Set(f.window_s)}, {"hop_s", Set(f.hop_s)},
                    {"low_freq_hz", Set(f.low_freq_hz)}, {"high_freq_hz", Set(f.high_freq_hz)},
                    {"log_floor", Set(f.log_floor)}, {"context_radius", Set(f.context_radius)},
                    {"normalize", Set(f.normalize)}});
    } else if (section == "network") {
      auto& n = c.network;
      ApplySection(value, section,
                   {{"architecture",
                     [&n](const json& v) {
                       try {
                         n.architecture = ParseArchitecture(v.get<std::string>());
                       } catch (const Error& e) {
                         throw UsageError(e.what());
                       }
                     }},
                    {"input_dim", [&c](const json& v) { c.input_dim = v.get<int>(); }},
                    {"layer_sizes", Set(n.layer_sizes)},
                    {"recurrent_layer", Set(n.recurrent_layer)},
                    {"activation_clip", Set(n.activation_clip)}});
    } else if (section == "train") {
      auto& t = c.train;
      ApplySection(value, section,
                   {{"initial_lr", Set(t.initial_lr)}, {"max_momentum", Set(t.max_momentum)},
                    {"lr_decay_divisor", Set(t.lr_decay_divisor)}, {"epochs", Set(t.epochs)},
                    {"seed", Set(t.seed)}, {"batch_size", Set(t.batch_size)},
                    {"momentum_warmup_steps", Set(t.momentum_warmup_steps)}, {"workers", Set(t.workers)}});
    } else if (section == "decode") {
      auto& d = c.decode;
      ApplySection(value, section,
                   {{"alpha", Set(d.alpha)}, {"beta", Set(d.beta)}, {"beam_width", Set(d.beam_width)},
                    {"prune_threshold", Set(d.prune_threshold)}, {"end_of_utterance", Set(d.end_of_utterance)},
                    {"lm", Set(c.lm)}, {"lexicon", SetPath(c.lexicon, base)}, {"arpa", SetPath(c.arpa, base)},
                    {"greedy", Set(c.greedy)}});
    } else {
      throw UsageError("config: unknown section '" + section + "'");
    }
  }
  if (c.input_dim) c.network.input_dim = *c.input_dim;
}

RunConfig LoadRunConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  RunConfig c;
  ApplyJson(c, j, fs::absolute(path).parent_path());
  return c;
}

json ToJson(const RunConfig& c) {
  json j;
  const auto& f = c.features;
  j["features"] = {{"num_bins", f.num_bins},       {"window_s", f.window_s},
                   {"hop_s", f.hop_s},             {"low_freq_hz", f.low_freq_hz},
                   {"high_freq_hz", f.high_freq_hz}, {"log_floor", f.log_floor},
                   {"context_radius", f.context_radius}, {"normalize", f.normalize}};
  const auto& n = c.network;
  j["network"] = {{"architecture", std::string(ArchitectureName(n.architecture))},
                  {"layer_sizes", n.layer_sizes},
                  {"recurrent_layer", n.recurrent_layer},
                  {"activation_clip", n.activation_clip}};
  if (c.input_dim) j["network"]["input_dim"] = *c.input_dim;
  const auto& t = c.train;
  j["train"] = {{"initial_lr", t.initial_lr}, {"max_momentum", t.max_momentum},
                {"lr_decay_divisor", t.lr_decay_divisor}, {"epochs", t.epochs},
                {"seed", t.seed}, {"batch_size", t.batch_size},
                {"momentum_warmup_steps", t.momentum_warmup_steps}, {"workers", t.workers}};
  const auto& d = c.decode;
  j["decode"] = {{"alpha", d.alpha}, {"beta", d.beta}, {"beam_width", d.beam_width},
                 {"prune_threshold", d.prune_threshold}, {"end_of_utterance", d.end_of_utterance},
                 {"lm", c.lm}, {"lexicon", c.lexicon.string()}, {"arpa", c.arpa.string()},
                 {"greedy", c.greedy}};
  return j;
}

std::string ConfigHash(const RunConfig& config) {
  json j = ToJson(config);
  // The worker count never changes results.
  j["train"].erase("workers");
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string StampLine(const RunConfig& config) {
  return std::string("# ctcasr ") + CTCASR_VERSION + " config " + ConfigHash(config);
}

int Run(int argc, const char* const* argv) {
  CLI::App app{"CTC speech recognition: features, training, prefix-search decoding, scoring"};
  app.set_version_flag("--version", std::string("ctcasr ") + CTCASR_VERSION);
  app.require_subcommand(1);

  CommonFlags common;
  TrainFlags tf;
  DecodeFlags df;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--workers", common.workers, "Parallel utterances")->check(CLI::PositiveNumber);
  };
  auto add_decode = [&](CLI::App* sub) {
    sub->add_option("--beam", df.beam, "Beam width")->check(CLI::PositiveNumber);
    sub->add_option("--alpha", df.alpha, "Language model weight");
    sub->add_option("--beta", df.beta, "Word count exponent");
    sub->add_option("--lm", df.lm, "none|dict|ngram")->check(CLI::IsMember({"none", "dict", "ngram"}));
    sub->add_option("--lexicon", df.lexicon, "Lexicon, one word per line")->check(CLI::ExistingFile);
    sub->add_option("--arpa", df.arpa, "ARPA n-gram model")->check(CLI::ExistingFile);
  };

  fs::path manifest, out_dir;
  auto* featurize = app.add_subcommand("featurize", "WAV manifest to log-mel feature files");
  add_common(featurize);
  featurize->add_option("--manifest", manifest, "JSONL manifest")->required()->check(CLI::ExistingFile);
  featurize->add_option("--out-dir", out_dir, "Output directory")->required();

  std::optional<fs::path> resume;
  auto* train = app.add_subcommand("train", "Train a network with CTC");
  add_common(train);
  train->add_option("--manifest", manifest, "JSONL manifest")->required()->check(CLI::ExistingFile);
  train->add_option("--out-dir", out_dir, "Checkpoint directory")->required();
  train->add_option("--arch", tf.arch, "dnn|rdnn|brdnn");
  train->add_option("--epochs", tf.epochs, "Total epochs")->check(CLI::NonNegativeNumber);
  train->add_option("--seed", tf.seed, "Initialization and shuffling seed");
  train->add_option("--lr", tf.lr, "Initial learning rate")->check(CLI::PositiveNumber);
  train->add_option("--layers", tf.layers, "Hidden widths, comma separated");
  train->add_option("--resume", resume, "Checkpoint to continue from")->check(CLI::ExistingFile);

  std::vector<fs::path> grids;
  std::optional<fs::path> model, decode_manifest, out, refs;
  std::optional<std::string> sweep_alpha, sweep_beta;
  auto* decode = app.add_subcommand("decode", "Decode posterior grids or a manifest");
  add_common(decode);
  add_decode(decode);
  decode->add_option("--grids", grids, "CTCP posterior grid files")->check(CLI::ExistingFile);
  decode->add_option("--model", model, "Checkpoint or NETP network")->check(CLI::ExistingFile);
  decode->add_option("--manifest", decode_manifest, "JSONL manifest (with --model)")->check(CLI::ExistingFile);
  decode->add_option("--out", out, "Transcript output (default stdout)");
  decode->add_flag("--greedy", df.greedy, "Best-path decoding instead of prefix search");
  decode->add_flag("--end-of-utterance", df.end_of_utterance, "Score the final word and sentence end");
  decode->add_option("--sweep-alpha", sweep_alpha, "Comma-separated alpha values");
  decode->add_option("--sweep-beta", sweep_beta, "Comma-separated beta values");
  decode->add_option("--refs", refs, "Reference transcripts for sweep scoring")->check(CLI::ExistingFile);

  fs::path ref, hyp;
  std::optional<fs::path> csv;
  auto* score = app.add_subcommand("score", "CER and WER of hypotheses against references");
  add_common(score);
  score->add_option("--ref", ref, "Reference transcripts")->required()->check(CLI::ExistingFile);
  score->add_option("--hyp", hyp, "Hypothesis transcripts")->required()->check(CLI::ExistingFile);
  score->add_option("--csv", csv, "Per-utterance CSV output");

  std::vector<std::string> queries, sentences;
  auto* lm = app.add_subcommand("lm", "Inspect an ARPA model or lexicon");
  add_common(lm);
  lm->add_option("--arpa", df.arpa, "ARPA n-gram model")->check(CLI::ExistingFile);
  lm->add_option("--lexicon", df.lexicon, "Lexicon")->check(CLI::ExistingFile);
  lm->add_option("--query", queries, "\"context... word\" to look up");
  lm->add_option("--sentence", sentences, "Sentence to score with <s> and </s>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    const RunConfig config = Resolve(common, tf, df);
    if (featurize->parsed()) return Featurize(config, manifest, out_dir);
    if (train->parsed()) return TrainCommand(config, manifest, out_dir, resume);
    if (decode->parsed()) {
      return DecodeCommand(config, grids, model, decode_manifest, out, sweep_alpha, sweep_beta, refs);
    }
    if (score->parsed()) return ScoreCommand(config, ref, hyp, csv);
    if (lm->parsed()) return LmCommand(config, queries, sentences);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataFailure;
  }
  return kUsage;
}

}  // namespace ctcasr::cli
