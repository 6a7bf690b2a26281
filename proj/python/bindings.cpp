// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "goalpred/datamodel.hpp"
#include "goalpred/ensemble.hpp"
#include "goalpred/error.hpp"
#include "goalpred/experiments.hpp"
#include "goalpred/features.hpp"
#include "goalpred/lstm.hpp"
#include "goalpred/metrics.hpp"
#include "goalpred/selection.hpp"
#include "goalpred/synthgen.hpp"

namespace py = pybind11;
using namespace goalpred;

namespace {

py::dict report_to_dict(const ExperimentReport& r) {
  py::dict methods;
  for (const MethodResult& m : r.methods) {
    py::dict entry;
    entry["auc"] = m.auc;
    entry["curve"] = m.curve;
    methods[py::str(m.name)] = entry;
  }
  py::dict fingerprint;
  for (const auto& [k, v] : r.fingerprint) fingerprint[py::str(k)] = v;
  py::dict reference;
  for (const ReferenceValue& v : r.reference) reference[py::str(v.name)] = v.auc;
  py::dict out;
  out["suite"] = r.suite;
  out["methods"] = methods;
  out["fingerprint"] = fingerprint;
  out["reference"] = reference;
  return out;
}

ExperimentConfig experiment_config(std::size_t epochs, std::size_t batch_size, double lr, std::uint64_t seed,
                                   std::size_t window_stride, const std::string& negatives, double window_s,
                                   std::size_t stride, double frame_rate) {
  ExperimentConfig c;
  c.train.epochs = epochs;
  c.train.batch_size = batch_size;
  c.train.learning_rate = lr;
  c.train.seed = seed;
  c.train.window_stride = window_stride;
  c.train.negative_sampling = negative_sampling_from_name(negatives);
  c.eval.window_s = window_s;
  c.eval.stride_frames = stride;
  c.eval.frame_rate_hz = frame_rate;
  c.validate();
  return c;
}

std::vector<FeatureChannel> channel_list(const std::vector<std::string>& names) {
  std::vector<FeatureChannel> out;
  for (const std::string& n : names) out.push_back(channel_from_name(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_goalpred, m) {
  m.doc() = "Goal prediction from body and gaze cues";

  // The module attribute keeps the type alive.
  static PyObject* error_type = py::exception<Error>(m, "GoalpredError", PyExc_RuntimeError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type)(std::string(error_kind_name(e.kind())) + ": " + e.what());
      exc.attr("kind") = std::string(error_kind_name(e.kind()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<Goal>(m, "Goal")
      .def_readonly("id", &Goal::id)
      .def_readonly("macro_id", &Goal::macro_id)
      .def_property_readonly("position", [](const Goal& g) { return Eigen::Vector3d(g.position); });

  py::class_<Segment>(m, "Segment")
      .def_readonly("picked_goal", &Segment::picked_goal)
      .def_readonly("subject_id", &Segment::subject_id)
      .def_readonly("frame_rate_hz", &Segment::frame_rate_hz)
      .def("__len__", [](const Segment& s) { return s.frames.size(); })
      .def_property_readonly("times", [](const Segment& s) {
        std::vector<double> t;
        for (const Frame& f : s.frames) t.push_back(f.t);
        return t;
      });

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("goals", [](const Dataset& d) { return d.goal_set.goals(); })
      .def_readonly("segments", &Dataset::segments)
      .def("__len__", [](const Dataset& d) { return d.segments.size(); })
      .def("hash", [](const Dataset& d) { return dataset_hash(d); })
      .def("validate", [](const Dataset& d) { validate_dataset(d); })
      .def(
          "split_by_subject",
          [](const Dataset& d, const std::vector<std::string>& train, const std::vector<std::string>& test) {
            return split_by_subject(d, {train.begin(), train.end()}, {test.begin(), test.end()});
          },
          py::arg("train_subjects"), py::arg("test_subjects"));

  m.def("load_dataset", &load_dataset, py::arg("path"));
  m.def("save_dataset", &save_dataset, py::arg("path"), py::arg("dataset"));

  m.def(
      "generate",
      [](std::uint64_t seed, std::size_t segments, std::size_t goals, std::size_t macros, double gaze_prob,
         double gaze_cone, double gaze_dwell, const std::vector<std::string>& subjects) {
        GenConfig g;
        g.seed = seed;
        g.segments = segments;
        g.n_goals = goals;
        g.n_macros = macros;
        g.gaze_fixation_prob = gaze_prob;
        g.gaze_wander_cone_rad = gaze_cone;
        g.gaze_dwell_s = gaze_dwell;
        if (!subjects.empty()) g.subjects = subjects;
        return generate(g);
      },
      py::arg("seed") = 0, py::arg("segments") = 100, py::arg("goals") = 10, py::arg("macros") = 3,
      py::arg("gaze_prob") = 0.7, py::arg("gaze_cone") = 0.1,
      py::arg("gaze_dwell") = 0.5, py::arg("subjects") = std::vector<std::string>{});

  m.def("channel_names", [] {
    std::vector<std::string> out;
    for (FeatureChannel c : all_channels()) out.emplace_back(channel_name(c));
    return out;
  });

  m.def(
      "extract_features",
      [](const Dataset& d, std::size_t segment, const std::string& goal_id, const std::vector<std::string>& channels) {
        if (segment >= d.segments.size()) throw Error(ErrorKind::usage, "segment index out of range");
        FeatureConfig fc;
        fc.channels = channel_list(channels);
        fc.validate();
        return extract_features(d.segments[segment], d.goal_set[d.goal_set.require_index(goal_id)], fc).values;
      },
      py::arg("dataset"), py::arg("segment"), py::arg("goal_id"), py::arg("channels"));

  m.def(
      "correlation_matrix",
      [](const Dataset& d, const std::vector<std::string>& channels) {
        FeatureConfig fc;
        fc.channels = channel_list(channels);
        fc.validate();
        return correlation_matrix(d, fc).r;
      },
      py::arg("dataset"), py::arg("channels"));

  m.def("auc", [](const std::vector<double>& curve) { return auc(curve); }, py::arg("curve"));

  py::class_<TrainedModel>(m, "Model")
      .def_readonly("variant", &TrainedModel::variant)
      .def_property_readonly("channels",
                             [](const TrainedModel& t) {
                               std::vector<std::string> out;
                               for (FeatureChannel c : t.features.channels) out.emplace_back(channel_name(c));
                               return out;
                             })
      .def_readonly("buffer_len", &TrainedModel::buffer_len)
      .def_property_readonly("hidden_units", [](const TrainedModel& t) { return t.network().hidden_units; })
      .def_property_readonly("enhanced_thresholds",
                             [](const TrainedModel& t) -> std::optional<std::pair<double, double>> {
                               if (!t.enhanced) return std::nullopt;
                               return std::make_pair(t.enhanced->score_threshold, t.enhanced->gaze_threshold);
                             })
      .def("to_bytes", [](const TrainedModel& t) { return py::bytes(serialize_model(t)); })
      .def_static("from_bytes", [](const py::bytes& b) { return deserialize_model(std::string(b)); });

  m.def(
      "train",
      [](const Dataset& d, const std::string& variant, std::size_t epochs, std::size_t batch_size, double lr,
         std::uint64_t seed, std::size_t window_stride, const std::string& negatives) {
        const ExperimentConfig cfg =
            experiment_config(epochs, batch_size, lr, seed, window_stride, negatives, 3.0, 10, 120.0);
        return train_variant(d, VariantSpec::preset(variant_from_name(variant)), cfg);
      },
      py::arg("dataset"), py::arg("variant") = "lstm_buff", py::arg("epochs") = 5, py::arg("batch_size") = 5,
      py::arg("lr") = 1e-3, py::arg("seed") = 0, py::arg("window_stride") = 10, py::arg("negatives") = "all",
      py::call_guard<py::gil_scoped_release>());

  m.def("save_model", &save_model, py::arg("path"), py::arg("model"));
  m.def("load_model", &load_model, py::arg("path"));

  m.def(
      "predict_scores",
      [](const Dataset& d, std::size_t segment, std::size_t n_frames, const TrainedModel& model) {
        if (segment >= d.segments.size()) throw Error(ErrorKind::usage, "segment index out of range");
        VariantSpec spec = VariantSpec::preset(variant_from_name(model.variant));
        spec.channels = model.features.channels;
        spec.buffer_len = model.buffer_len;
        spec.hidden_units = model.network().hidden_units;
        return predict_scores(prefix(d.segments[segment], n_frames), d.goal_set, model, spec);
      },
      py::arg("dataset"), py::arg("segment"), py::arg("n_frames"), py::arg("model"));

  m.def(
      "run_baselines",
      [](const Dataset& test, const std::vector<std::string>& channels, double window_s, std::size_t stride,
         double frame_rate) {
        const ExperimentConfig cfg = experiment_config(5, 5, 1e-3, 0, 10, "all", window_s, stride, frame_rate);
        const auto list = channels.empty() ? default_baseline_channels() : channel_list(channels);
        return report_to_dict(run_baselines(test, cfg, list));
      },
      py::arg("test"), py::arg("channels") = std::vector<std::string>{}, py::arg("window_s") = 3.0,
      py::arg("stride") = 10, py::arg("frame_rate") = 120.0);

  m.def(
      "run_suite",
      [](const std::string& suite, const Dataset& train_set, const Dataset& test,
         const std::vector<std::string>& variants, std::size_t epochs, std::uint64_t seed, std::size_t window_stride) {
        const ExperimentConfig cfg = experiment_config(epochs, 5, 1e-3, seed, window_stride, "all", 3.0, 10, 120.0);
        ExperimentReport r;
        if (suite == "variants") {
          std::vector<VariantSpec> roster;
          for (const std::string& v : variants) roster.push_back(VariantSpec::preset(variant_from_name(v)));
          r = run_variants(train_set, test, roster, cfg);
        } else if (suite == "macro") {
          r = run_macro_suite(train_set, test, cfg);
        } else if (suite == "nogaze") {
          r = run_nogaze(train_set, test, cfg);
        } else if (suite == "baselines") {
          r = run_baselines(test, cfg, default_baseline_channels());
        } else {
          throw Error(ErrorKind::usage, "unknown suite '" + suite + "'");
        }
        return report_to_dict(r);
      },
      py::arg("suite"), py::arg("train"), py::arg("test"),
      py::arg("variants") = std::vector<std::string>{"lstm", "lstm_select", "lstm_buff", "enhanced"},
      py::arg("epochs") = 5, py::arg("seed") = 0, py::arg("window_stride") = 10);
}
