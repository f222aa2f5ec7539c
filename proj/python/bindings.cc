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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

#include "ctcasr/alphabet.h"
#include "ctcasr/ctc.h"
#include "ctcasr/decoder.h"
#include "ctcasr/error.h"
#include "ctcasr/evaluation.h"
#include "ctcasr/features.h"
#include "ctcasr/lm.h"
#include "ctcasr/network.h"
#include "ctcasr/trainer.h"
#include "ctcasr/wav.h"

namespace py = pybind11;
using namespace ctcasr;

namespace {

struct Model {
  NetworkConfig config;
  NetworkParams params;

  Eigen::MatrixXd Posteriors(const Eigen::MatrixXd& features) const {
    FeatureMatrix fm;
    fm.values = features;
    return Forward(params, config, fm).grid.probs;
  }
};

std::shared_ptr<LanguageModel> MakeLm(const std::optional<std::vector<std::string>>& lexicon,
                                      const std::optional<std::string>& arpa_text) {
  if (lexicon && arpa_text) throw Error("give a lexicon or an ARPA model, not both");
  if (lexicon) return std::make_shared<DictionaryLanguageModel>(std::make_shared<Lexicon>(*lexicon));
  if (arpa_text) {
    std::istringstream in(*arpa_text);
    return std::make_shared<NGramLanguageModel>(std::make_shared<NGramModel>(NGramModel::Read(in)));
  }
  return nullptr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CTC speech recognition core.";
  m.attr("__version__") = CTCASR_VERSION;

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<Alphabet>(m, "Alphabet")
      .def_static("default", &Alphabet::Default)
      .def_static("build", &Alphabet::Build, py::arg("symbols"), py::arg("blank"), py::arg("space"))
      .def_property_readonly("symbols", &Alphabet::symbols)
      .def_property_readonly("blank_index", &Alphabet::blank_index)
      .def_property_readonly("space_index", &Alphabet::space_index)
      .def("__len__", &Alphabet::size)
      .def("encode", &Alphabet::Encode)
      .def("render", [](const Alphabet& a, const LabelSequence& l) { return a.Render(l); });

  m.def(
      "ctc_log_likelihood",
      [](const Eigen::MatrixXd& probs, const LabelSequence& labels, int blank) {
        return CtcLogLikelihood(PosteriorGrid{probs}, CtcTarget(labels, blank, static_cast<int>(probs.cols())));
      },
      py::arg("probs"), py::arg("labels"), py::arg("blank") = 0,
      "Natural-log probability of `labels` under a T x K posterior grid.");

  m.def(
      "ctc_loss_and_gradient",
      [](const Eigen::MatrixXd& log_probs, const LabelSequence& labels, int blank) {
        const auto r = CtcLossAndGradientFromLogProbs(
            log_probs, CtcTarget(labels, blank, static_cast<int>(log_probs.cols())));
        return py::make_tuple(-r.log_likelihood, r.grad_logits);
      },
      py::arg("log_probs"), py::arg("labels"), py::arg("blank") = 0,
      "(negative log-likelihood, gradient w.r.t. the logits) from T x K log-softmax outputs.");

  m.def(
      "greedy_decode",
      [](const Eigen::MatrixXd& probs, const std::optional<Alphabet>& alphabet) {
        return GreedyDecode(PosteriorGrid{probs}, alphabet.value_or(Alphabet::Default()));
      },
      py::arg("probs"), py::arg("alphabet") = py::none());

  m.def(
      "prefix_beam_search",
      [](const Eigen::MatrixXd& probs, double alpha, double beta, int beam_width,
         const std::optional<std::vector<std::string>>& lexicon, const std::optional<std::string>& arpa,
         bool end_of_utterance, const std::optional<Alphabet>& alphabet) {
        DecodeParams p;
        p.alpha = alpha;
        p.beta = beta;
        p.beam_width = beam_width;
        p.end_of_utterance = end_of_utterance;
        const auto lm = MakeLm(lexicon, arpa);
        BeamSearchResult r;
        {
          py::gil_scoped_release release;
          r = PrefixBeamSearch(PosteriorGrid{probs}, lm.get(), p, alphabet.value_or(Alphabet::Default()));
        }
        py::list out;
        for (const auto& h : r.hypotheses) out.append(py::make_tuple(h.text, h.score));
        return out;
      },
      py::arg("probs"), py::arg("alpha") = 1.0, py::arg("beta") = 0.0, py::arg("beam_width") = 200,
      py::arg("lexicon") = py::none(), py::arg("arpa") = py::none(), py::arg("end_of_utterance") = false,
      py::arg("alphabet") = py::none(),
      "Final beam as (text, log score) pairs, best first. `arpa` is the text of an ARPA model.");

  m.def(
      "compute_features",
      [](const std::vector<double>& samples, int sample_rate, int num_bins, int context_radius, bool normalize) {
        FeatureConfig c;
        c.num_bins = num_bins;
        c.context_radius = context_radius;
        c.normalize = normalize;
        return ComputeFeatures(AudioBuffer{samples, sample_rate}, c).values;
      },
      py::arg("samples"), py::arg("sample_rate") = 16000, py::arg("num_bins") = 23, py::arg("context_radius") = 10,
      py::arg("normalize") = false, "Log-mel features with context stacking, T x (2r+1)*bins.");

  m.def("read_wav", [](const std::filesystem::path& p) {
    const AudioBuffer a = ReadWav(p);
    return py::make_tuple(a.samples, a.sample_rate);
  });

  py::class_<Model>(m, "Model")
      .def_static("load",
                  [](const std::filesystem::path& path) {
                    auto [config, params] = LoadModel(path);
                    return Model{config, std::move(params)};
                  })
      .def_property_readonly("architecture",
                             [](const Model& model) { return std::string(ArchitectureName(model.config.architecture)); })
      .def_property_readonly("num_parameters", [](const Model& model) { return NumParameters(model.config); })
      .def("posteriors", &Model::Posteriors, py::arg("features"), "T x K posterior grid for T x D features.");

  m.def(
      "num_parameters",
      [](const std::string& arch, int input_dim, int output_dim, const std::vector<int>& layer_sizes,
         int recurrent_layer) {
        NetworkConfig c;
        c.architecture = ParseArchitecture(arch);
        c.input_dim = input_dim;
        c.output_dim = output_dim;
        c.layer_sizes = layer_sizes;
        c.recurrent_layer = recurrent_layer;
        c.Validate();
        return NumParameters(c);
      },
      py::arg("arch"), py::arg("input_dim") = 483, py::arg("output_dim") = 32,
      py::arg("layer_sizes") = std::vector<int>(5, 1824), py::arg("recurrent_layer") = 2);

  m.def(
      "lr_at_epoch",
      [](int epoch, double initial_lr, double divisor) {
        TrainConfig t;
        t.initial_lr = initial_lr;
        t.lr_decay_divisor = divisor;
        return LrAtEpoch(t, epoch);
      },
      py::arg("epoch"), py::arg("initial_lr") = 1e-5, py::arg("divisor") = 1.2);

  m.def("cer", [](const std::string& r, const std::string& h) { return Cer(r, h); }, py::arg("ref"), py::arg("hyp"));
  m.def("wer", [](const std::string& r, const std::string& h) { return Wer(r, h); }, py::arg("ref"), py::arg("hyp"));
}
