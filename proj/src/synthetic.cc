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

#include "ctcasr/synthetic.h"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ctcasr/error.h"

namespace ctcasr::synthetic {
namespace {

const std::vector<std::string> kDeterminer = {"the"};
const std::vector<std::string> kAdjective = {"big", "red", "old"};
const std::vector<std::string> kAnimal = {"cat", "bat", "dog"};
const std::vector<std::string> kVerb = {"sat", "ran", "hid"};
const std::vector<std::string> kPreposition = {"on", "in", "by"};
const std::vector<std::string> kObject = {"hat", "mat", "log", "box", "fog"};

// Characters sharing a cluster have nearby prototypes.
const std::vector<std::string> kClusters = {"cbhm", "dlf", "aoe", "sr", "tn", "iy", "gxw"};

const std::string& Pick(const std::vector<std::string>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int Duration(char c) { return 2 + (static_cast<unsigned char>(c) * 7 + 3) % 3; }

struct Prototypes {
  std::map<std::string, Eigen::VectorXd> by_symbol;
  Eigen::VectorXd silence;
};

Prototypes MakePrototypes(const TaskConfig& config, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](double scale) {
    Eigen::VectorXd v(config.feature_dim);
    for (auto& x : v) x = scale * normal(rng);
    return v;
  };
  Prototypes p;
  for (const std::string& cluster : kClusters) {
    const Eigen::VectorXd centre = draw(config.cluster_spread);
    for (char c : cluster) p.by_symbol[std::string(1, c)] = centre + draw(config.within_cluster);
  }
  for (char c = 'a'; c <= 'z'; ++c) {
    const std::string s(1, c);
    if (!p.by_symbol.contains(s)) p.by_symbol[s] = draw(config.cluster_spread);
  }
  p.by_symbol[" "] = draw(config.cluster_spread);
  p.silence = draw(config.cluster_spread);
  return p;
}

FeatureMatrix Render(const std::string& text, const Prototypes& protos, const TaskConfig& config,
                     std::mt19937_64& rng) {
  std::vector<const Eigen::VectorXd*> segments;
  std::vector<int> durations;
  segments.push_back(&protos.silence);
  durations.push_back(3);
  for (char c : text) {
    segments.push_back(&protos.by_symbol.at(std::string(1, c)));
    durations.push_back(c == ' ' ? 2 : Duration(c));
  }
  segments.push_back(&protos.silence);
  durations.push_back(3);

  int total = 0;
  for (int d : durations) total += d;
  FeatureMatrix raw;
  raw.values.resize(total, config.feature_dim);
  std::normal_distribution<double> noise(0.0, config.noise);
  int row = 0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (int k = 0; k < durations[s]; ++k, ++row) {
      Eigen::VectorXd frame = *segments[s];
      if (k == 0 && s > 0) {
        frame = (1 - config.coarticulation) * frame + config.coarticulation * *segments[s - 1];
      } else if (k == durations[s] - 1 && s + 1 < segments.size()) {
        frame = (1 - config.coarticulation) * frame + config.coarticulation * *segments[s + 1];
      }
      for (auto& x : frame) x += noise(rng);
      raw.values.row(row) = frame.transpose();
    }
  }
  return ContextWindow(raw, config.context_radius);
}

std::string Log10(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", p > 0 ? std::log10(p) : -99.0);
  return buf;
}

}  // namespace

const std::vector<std::string>& Vocabulary() {
  static const std::vector<std::string> vocab = [] {
    std::vector<std::string> v;
    for (const auto* group : {&kDeterminer, &kAdjective, &kAnimal, &kVerb, &kPreposition, &kObject}) {
      v.insert(v.end(), group->begin(), group->end());
    }
    v.push_back("a");
    v.push_back("now");
    return v;
  }();
  return vocab;
}

std::string SampleSentence(std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::string s = Pick(kDeterminer, rng);
  if (coin(rng)) s += " " + Pick(kAdjective, rng);
  s += " " + Pick(kAnimal, rng);
  s += " " + Pick(kVerb, rng);
  s += " " + Pick(kPreposition, rng);
  s += " a " + Pick(kObject, rng);
  if (coin(rng)) s += " now";
  return s;
}

Task MakeTask(const TaskConfig& config) {
  Task task;
  task.config = config;
  task.vocabulary = Vocabulary();
  std::mt19937_64 rng(config.data_seed);
  const Prototypes protos = MakePrototypes(config, rng);

  auto make = [&](int n, const std::string& prefix) {
    std::vector<TrainingExample> out;
    for (int i = 0; i < n; ++i) {
      TrainingExample ex;
      ex.id = prefix + std::to_string(i);
      ex.transcript = SampleSentence(rng);
      ex.labels = task.alphabet.Encode(ex.transcript);
      ex.features = Render(ex.transcript, protos, config, rng);
      out.push_back(std::move(ex));
    }
    return out;
  };
  task.train = make(config.num_train, "train_");
  task.dev = make(config.num_dev, "dev_");
  task.test = make(config.num_test, "test_");

  std::vector<std::string> sentences;
  for (const auto& ex : task.train) sentences.push_back(ex.transcript);
  task.bigram_arpa = EstimateBigramArpa(sentences);
  return task;
}

std::string EstimateBigramArpa(const std::vector<std::string>& sentences, double discount) {
  if (sentences.empty()) throw Error("synthetic: no sentences to estimate a bigram from");
  const std::string bos(kSentenceBegin), eos(kSentenceEnd);
  std::map<std::string, double> unigram;
  std::map<std::string, std::map<std::string, double>> bigram;
  double tokens = 0;
  for (const auto& s : sentences) {
    std::istringstream ss(s);
    std::string prev = bos, w;
    auto add = [&](const std::string& word) {
      unigram[word] += 1;
      bigram[prev][word] += 1;
      tokens += 1;
      prev = word;
    };
    while (ss >> w) add(w);
    add(eos);
  }
  unigram.emplace(bos, 0.0);

  std::map<std::string, double> backoff;
  for (const auto& [ctx, nexts] : bigram) {
    double ctx_count = 0, seen_unigram_mass = 0;
    for (const auto& [w, c] : nexts) {
      ctx_count += c;
      seen_unigram_mass += unigram[w] / tokens;
    }
    const double leftover = discount * static_cast<double>(nexts.size()) / ctx_count;
    const double denom = 1.0 - seen_unigram_mass;
    backoff[ctx] = denom > 1e-12 ? leftover / denom : 1e-99;
  }

  std::size_t num_bigrams = 0;
  for (const auto& [ctx, nexts] : bigram) num_bigrams += nexts.size();

  std::ostringstream out;
  out << "\\data\\\nngram 1=" << unigram.size() << "\nngram 2=" << num_bigrams << "\n\n\\1-grams:\n";
  for (const auto& [w, c] : unigram) {
    out << (w == bos ? std::string("-99.000000") : Log10(c / tokens)) << '\t' << w;
    if (backoff.contains(w)) out << '\t' << Log10(backoff[w]);
    out << '\n';
  }
  out << "\n\\2-grams:\n";
  for (const auto& [ctx, nexts] : bigram) {
    double ctx_count = 0;
    for (const auto& [w, c] : nexts) ctx_count += c;
    for (const auto& [w, c] : nexts) {
      out << Log10((c - discount) / ctx_count) << '\t' << ctx << ' ' << w << '\n';
    }
  }
  out << "\n\\end\\\n";
  return out.str();
}

}  // namespace ctcasr::synthetic
