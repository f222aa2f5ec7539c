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

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.h"
#include "ctcasr/decoder.h"
#include "ctcasr/manifest.h"
#include "ctcasr/synthetic.h"
#include "ctcasr/wav.h"
#include "oracles.h"

using namespace ctcasr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string Bin() {
  const char* bin = std::getenv("CTCASR_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "CTCASR_BIN must point at the ctcasr executable");
  return bin;
}

// Runs the executable with `args`, capturing stdout into `out` if given.
int Sh(const std::string& args, std::string* out = nullptr, const fs::path& dir = fs::temp_directory_path()) {
  const fs::path capture = dir / "stdout.txt";
  const std::string cmd = "\"" + Bin() + "\" " + args + " > \"" + capture.string() + "\" 2> \"" +
                          (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(capture);
    *out = std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string Q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("config keys are checked") {
  cli::RunConfig c;
  const auto ok = nlohmann::json::parse(R"({"network": {"architecture": "rdnn", "layer_sizes": [8, 8]},
                                            "decode": {"alpha": 0.5, "lexicon": "words.txt"}})");
  cli::ApplyJson(c, ok, "/base");
  CHECK(c.network.architecture == Architecture::kRdnn);
  CHECK(c.network.layer_sizes == std::vector<int>{8, 8});
  CHECK(c.decode.alpha == 0.5);
  CHECK(c.lexicon == fs::path("/base/words.txt"));

  CHECK_THROWS_AS(cli::ApplyJson(c, nlohmann::json::parse(R"({"network": {"depth": 3}})"), "/"), cli::UsageError);
  CHECK_THROWS_AS(cli::ApplyJson(c, nlohmann::json::parse(R"({"optimizer": {}})"), "/"), cli::UsageError);
  CHECK_THROWS_AS(cli::ApplyJson(c, nlohmann::json::parse(R"({"train": {"epochs": "many"}})"), "/"),
                  cli::UsageError);
  CHECK_THROWS_AS(cli::ApplyJson(c, nlohmann::json::parse(R"({"network": {"architecture": "lstm"}})"), "/"),
                  cli::UsageError);
}

TEST_CASE("config hash") {
  cli::RunConfig a, b;
  CHECK(cli::ConfigHash(a) == cli::ConfigHash(b));
  CHECK(cli::ConfigHash(a).size() == 16);
  b.train.workers = 8;
  CHECK(cli::ConfigHash(a) == cli::ConfigHash(b));
  b.decode.alpha = 2.0;
  CHECK(cli::ConfigHash(a) != cli::ConfigHash(b));
  CHECK(cli::StampLine(a).rfind("# ctcasr ", 0) == 0);
}

TEST_CASE("usage errors exit with 2") {
  std::string out;
  CHECK(Sh("--version", &out) == 0);
  CHECK(out.find("ctcasr") != std::string::npos);
  CHECK(Sh("") == 2);
  CHECK(Sh("frobnicate") == 2);
  TempDir dir("ctcasr_cli_usage");
  std::ofstream(dir.path / "m.jsonl") << "{\"id\":\"u\",\"feature_path\":\"u.feat\",\"transcript\":\"a\"}\n";
  CHECK(Sh("train --manifest " + Q(dir.path / "m.jsonl") + " --out-dir " + Q(dir.path / "o") + " --arch lstm") == 2);
  std::ofstream(dir.path / "bad.json") << "{\"decode\": {\"beam\": 3}}";
  CHECK(Sh("decode --config " + Q(dir.path / "bad.json") + " --grids " + Q(dir.path / "m.jsonl")) == 2);
}

TEST_CASE("decoding standalone grids") {
  TempDir dir("ctcasr_cli_decode");
  const Alphabet abc = Alphabet::Default();
  std::mt19937_64 rng(5);
  std::vector<std::string> expected;
  std::string grid_args;
  for (int i = 0; i < 3; ++i) {
    const PosteriorGrid g{testing::RandomGrid(12, 32, rng, 3.0)};
    const fs::path p = dir.path / ("utt" + std::to_string(i) + ".ctcp");
    SavePosteriorGrid(p, g, abc);
    expected.push_back("utt" + std::to_string(i) + "\t" + GreedyDecode(g, abc));
    grid_args += " " + Q(p);
  }
  std::string out;
  REQUIRE(Sh("decode --greedy --grids" + grid_args, &out) == 0);
  std::istringstream lines(out);
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("# ctcasr ", 0) == 0);
  for (const auto& e : expected) {
    std::getline(lines, line);
    CHECK(line == e);
  }

  // Same again with the beam and several workers: output order is fixed.
  std::string serial, parallel;
  REQUIRE(Sh("decode --beam 8 --grids" + grid_args, &serial) == 0);
  REQUIRE(Sh("decode --beam 8 --workers 3 --grids" + grid_args, &parallel) == 0);
  CHECK(serial == parallel);

  std::ofstream(dir.path / "words.txt") << "ab\nba\n";
  std::ofstream refs(dir.path / "refs.txt");
  for (int i = 0; i < 3; ++i) refs << "utt" << i << "\tab ba\n";
  refs.close();
  REQUIRE(Sh("decode --lm dict --lexicon " + Q(dir.path / "words.txt") + " --sweep-alpha 0,1 --sweep-beta 0,2 " +
                 "--refs " + Q(dir.path / "refs.txt") + " --out " + Q(dir.path / "hyp.txt") + " --grids" +
                 grid_args,
             &out) == 0);
  for (const char* name : {"hyp.a0.b0.txt", "hyp.a0.b2.txt", "hyp.a1.b0.txt", "hyp.a1.b2.txt", "hyp.sweep.csv"}) {
    CHECK(fs::exists(dir.path / name));
  }
  CHECK(ReadTranscripts(dir.path / "hyp.a1.b2.txt").size() == 3);

  CHECK(Sh("decode --lm dict --grids" + grid_args) == 2);
  std::ofstream(dir.path / "broken.ctcp") << "CTCP";
  CHECK(Sh("decode --greedy --grids " + Q(dir.path / "broken.ctcp")) == 1);
}

TEST_CASE("scoring") {
  TempDir dir("ctcasr_cli_score");
  std::ofstream(dir.path / "ref.txt") << "a\tthe cat\nb\tthe dog\n";
  std::ofstream(dir.path / "hyp.txt") << "# produced elsewhere\na\tthe cat\nb\tthe dig\n";
  std::string out;
  REQUIRE(Sh("score --ref " + Q(dir.path / "ref.txt") + " --hyp " + Q(dir.path / "hyp.txt") + " --csv " +
                 Q(dir.path / "s.csv"),
             &out) == 0);
  CHECK(out.find("WER: 25.00%") != std::string::npos);
  CHECK(Slurp(dir.path / "s.csv").find("TOTAL") != std::string::npos);
  std::ofstream(dir.path / "short.txt") << "a\tthe cat\n";
  CHECK(Sh("score --ref " + Q(dir.path / "ref.txt") + " --hyp " + Q(dir.path / "short.txt")) == 1);
}

TEST_CASE("featurize") {
  TempDir dir("ctcasr_cli_featurize");
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.1);
  std::ofstream manifest(dir.path / "m.jsonl");
  for (int i = 0; i < 3; ++i) {
    AudioBuffer a;
    a.sample_rate = 16000;
    for (int s = 0; s < 8000; ++s) a.samples.push_back(0.3 * std::sin(0.05 * (i + 1) * s) + n(rng));
    WriteWav(dir.path / ("u" + std::to_string(i) + ".wav"), a);
    manifest << "{\"audio_path\": \"u" << i << ".wav\", \"transcript\": \"x\"}\n";
  }
  manifest.close();
  REQUIRE(Sh("featurize --manifest " + Q(dir.path / "m.jsonl") + " --out-dir " + Q(dir.path / "f1")) == 0);
  REQUIRE(Sh("featurize --manifest " + Q(dir.path / "m.jsonl") + " --out-dir " + Q(dir.path / "f2")) == 0);
  for (int i = 0; i < 3; ++i) {
    const std::string name = "u" + std::to_string(i) + ".feat";
    REQUIRE(fs::exists(dir.path / "f1" / name));
    CHECK(Slurp(dir.path / "f1" / name) == Slurp(dir.path / "f2" / name));
  }
  const auto utts = ReadManifest(dir.path / "f1" / "manifest.jsonl");
  REQUIRE(utts.size() == 3);
  CHECK(utts[2].feature_path == dir.path / "f1" / "u2.feat");
  CHECK(Slurp(dir.path / "f1" / "manifest.jsonl").find("config_hash") != std::string::npos);

  std::ofstream(dir.path / "m.jsonl", std::ios::app) << "{\"audio_path\": \"gone.wav\", \"transcript\": \"x\"}\n";
  CHECK(Sh("featurize --manifest " + Q(dir.path / "m.jsonl") + " --out-dir " + Q(dir.path / "f3")) == 1);
  CHECK(fs::exists(dir.path / "f3" / "u0.feat"));
}

TEST_CASE("train, resume and decode a model") {
  TempDir dir("ctcasr_cli_train");
  synthetic::TaskConfig tc;
  tc.num_train = 6;
  tc.num_dev = 1;
  tc.num_test = 1;
  const synthetic::Task task = synthetic::MakeTask(tc);
  std::vector<Utterance> utts;
  for (const auto& ex : task.train) {
    const fs::path p = dir.path / (ex.id + ".feat");
    SaveFeatures(p, ex.features);
    utts.push_back({ex.id, "", p, ex.transcript});
  }
  WriteManifest(dir.path / "train.jsonl", utts);
  const std::string common = "train --manifest " + Q(dir.path / "train.jsonl") +
                             " --arch rdnn --layers 12,12 --lr 1e-4 --seed 4";

  REQUIRE(Sh(common + " --epochs 2 --out-dir " + Q(dir.path / "full")) == 0);
  REQUIRE(Sh(common + " --epochs 1 --out-dir " + Q(dir.path / "part")) == 0);
  REQUIRE(Sh(common + " --epochs 2 --resume " + Q(dir.path / "part" / "checkpoint_0001.ckpt") + " --out-dir " +
             Q(dir.path / "resumed")) == 0);
  CHECK(Slurp(dir.path / "full" / "checkpoint_0002.ckpt") == Slurp(dir.path / "resumed" / "checkpoint_0002.ckpt"));

  auto last_row = [](const fs::path& p) {
    std::istringstream in(Slurp(p));
    std::string line, last;
    while (std::getline(in, line)) last = line;
    return last;
  };
  CHECK(last_row(dir.path / "full" / "metrics.csv") == last_row(dir.path / "resumed" / "metrics.csv"));
  CHECK(last_row(dir.path / "full" / "metrics.csv").rfind("1,", 0) == 0);
  CHECK(Slurp(dir.path / "full" / "metrics.csv").rfind("# ctcasr ", 0) == 0);

  std::string out;
  REQUIRE(Sh("decode --greedy --model " + Q(dir.path / "full" / "model.netp") + " --manifest " +
                 Q(dir.path / "train.jsonl"),
             &out) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == 7);
}

TEST_CASE("language model inspection") {
  TempDir dir("ctcasr_cli_lm");
  std::ofstream(dir.path / "toy.arpa") << "\\data\\\nngram 1=4\nngram 2=1\n\n\\1-grams:\n-1 <s> -0.2\n"
                                          "-0.5 the -0.1\n-0.6 cat\n-0.7 </s>\n\n\\2-grams:\n-0.3 <s> the\n\n\\end\\\n";
  std::string out;
  REQUIRE(Sh("lm --arpa " + Q(dir.path / "toy.arpa") + " --query \"the cat\" --sentence \"the cat\"", &out) == 0);
  CHECK(out.find("ngram 2=1") != std::string::npos);
  CHECK(out.find("log10 p(cat | the) = -0.7") != std::string::npos);
  CHECK(out.find("log10 p = -1.7") != std::string::npos);
  CHECK(Sh("lm") == 2);
}
