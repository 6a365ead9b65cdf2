#include "locstruct/error.hpp"
#include "locstruct/experiment.hpp"
#include "locstruct/features.hpp"
#include "locstruct/inference.hpp"
#include "locstruct/io.hpp"
#include "locstruct/loss.hpp"
#include "locstruct/synthetic.hpp"
#include "locstruct/trainer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace locstruct;

namespace {

// Outputs cross the boundary as an int (taxonomy leaf) or a list of ints (label sequence).
py::object to_py(const StructuredOutput& y) {
  if (const auto* leaf = std::get_if<TaxonomyLeaf>(&y)) return py::int_(leaf->leaf);
  return py::cast(std::get<LabelSequence>(y).labels);
}

StructuredOutput from_py(const OutputSpace& space, const py::handle& obj) {
  if (py::isinstance<py::str>(obj)) return space.parse(obj.cast<std::string>());
  StructuredOutput y = space.is_taxonomy() ? StructuredOutput{TaxonomyLeaf{obj.cast<int>()}}
                                           : StructuredOutput{LabelSequence{obj.cast<std::vector<int>>()}};
  space.check(y);
  return y;
}

InferenceConfig inference_config(const std::string& backend) { return {parse_backend(backend), kDefaultEnumerationCap}; }

LossSpec loss_or_default(const std::optional<std::string>& name, const OutputSpace& space) {
  return name ? parse_loss(*name) : default_loss(space);
}

Dataset make_dataset(const OutputSpace& space, const std::vector<Input>& inputs, const py::list& truths) {
  if (truths.size() > inputs.size()) throw ValidationError("more truth outputs than inputs");
  Dataset ds;
  ds.output_space = space;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    DataPoint p{inputs[i], std::nullopt};
    if (i < truths.size() && !truths[i].is_none()) p.truth = from_py(space, truths[i]);
    ds.points.push_back(std::move(p));
  }
  std::size_t labeled = 0;
  while (labeled < ds.points.size() && ds.points[labeled].truth) ++labeled;
  ds.labeled_count = labeled;
  require_valid(ds);
  return ds;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Local structured output predictors trained with unlabeled data.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<InvalidOutputError>(m, "InvalidOutputError", base);
  py::register_exception<CapacityError>(m, "CapacityError", base);
  py::register_exception<ContractViolation>(m, "ContractViolation", base);
  py::register_exception<NumericError>(m, "NumericError", base);

  py::class_<Taxonomy>(m, "Taxonomy")
      .def(py::init([](const std::vector<std::pair<std::string, std::string>>& edges) {
             std::vector<Taxonomy::NodeSpec> nodes;
             for (const auto& [id, parent] : edges) nodes.push_back({id, parent, {}});
             return Taxonomy(std::move(nodes));
           }),
           py::arg("nodes"), "Build from (id, parent) pairs; the root has parent ''.")
      .def_static("balanced", &Taxonomy::balanced, py::arg("branching"), py::arg("depth"))
      .def_property_readonly("num_leaves", &Taxonomy::num_leaves)
      .def_property_readonly("code_dim", &Taxonomy::code_dim)
      .def("leaf_id", &Taxonomy::leaf_id, py::arg("leaf"))
      .def("find_leaf", &Taxonomy::find_leaf, py::arg("id"))
      .def("code", &Taxonomy::code, py::arg("leaf"))
      .def("lca_height", &Taxonomy::leaf_lca_height, py::arg("a"), py::arg("b"));

  py::class_<SequenceSpace>(m, "SequenceSpace")
      .def(py::init([](std::vector<std::string> alphabet, int length) { return SequenceSpace{std::move(alphabet), length}; }),
           py::arg("alphabet"), py::arg("length"))
      .def_readonly("alphabet", &SequenceSpace::alphabet)
      .def_readonly("length", &SequenceSpace::length);

  py::class_<OutputSpace>(m, "OutputSpace")
      .def(py::init([](const Taxonomy& t) {
        OutputSpace s{t};
        validate_output_space(s);
        return s;
      }))
      .def(py::init([](const SequenceSpace& s) {
        OutputSpace o{s};
        validate_output_space(o);
        return o;
      }))
      .def_property_readonly("is_taxonomy", &OutputSpace::is_taxonomy)
      .def_property_readonly("is_sequence", &OutputSpace::is_sequence)
      .def_property_readonly("cardinality", &OutputSpace::cardinality)
      .def("format", [](const OutputSpace& s, const py::handle& y) { return s.format(from_py(s, y)); })
      .def("parse", [](const OutputSpace& s, const std::string& text) { return to_py(s.parse(text)); })
      .def("outputs", [](const OutputSpace& s) {
        py::list out;
        for (const auto& y : enumerate_outputs(s)) out.append(to_py(y));
        return out;
      });

  m.def("feature_dimension", [](const OutputSpace& s, int input_dim) {
    return feature_dimension(feature_spec(s, input_dim));
  }, py::arg("space"), py::arg("input_dim"));
  m.def("joint_feature", [](const Input& x, const py::handle& y, const OutputSpace& s) {
    return joint_feature(x, from_py(s, y), s);
  }, py::arg("x"), py::arg("y"), py::arg("space"));
  m.def("loss", [](const std::string& name, const py::handle& y, const py::handle& y2, const OutputSpace& s) {
    return loss(parse_loss(name), from_py(s, y), from_py(s, y2), s);
  }, py::arg("loss"), py::arg("y"), py::arg("y2"), py::arg("space"));

  m.def("predict", [](const Eigen::VectorXd& w, const Input& x, const OutputSpace& s, const std::string& backend) {
    auto r = predict_scored(w, x, s, inference_config(backend));
    return py::make_tuple(to_py(r.output), r.value);
  }, py::arg("w"), py::arg("x"), py::arg("space"), py::arg("backend") = "auto",
     "Highest-scoring output and its score.");
  m.def("loss_augmented_argmax",
        [](const Eigen::VectorXd& w, const Input& x, const py::handle& y_cur, const OutputSpace& s,
           const std::optional<std::string>& loss_name, const std::string& backend) {
          auto r = loss_augmented_argmax(w, x, from_py(s, y_cur), loss_or_default(loss_name, s), s,
                                         inference_config(backend));
          return py::make_tuple(to_py(r.z_star), r.bound_value);
        },
        py::arg("w"), py::arg("x"), py::arg("y_cur"), py::arg("space"), py::arg("loss") = py::none(),
        py::arg("backend") = "auto", "Maximiser z* and the value of the hinge bound.");
  m.def("impute",
        [](const std::vector<Eigen::VectorXd>& weights, const py::list& targets, int k, const Input& x,
           const OutputSpace& s, const std::optional<std::string>& loss_name, const std::string& backend) {
          if (targets.size() != weights.size()) throw ValidationError("one target per weight vector is required");
          std::vector<StructuredOutput> z;
          for (const auto& t : targets) z.push_back(from_py(s, t));
          std::vector<ImputationTerm> terms;
          for (std::size_t i = 0; i < weights.size(); ++i) terms.push_back({std::cref(weights[i]), z[i]});
          auto r = impute_scored(terms, k, x, loss_or_default(loss_name, s), s, inference_config(backend));
          return py::make_tuple(to_py(r.output), r.value);
        },
        py::arg("weights"), py::arg("targets"), py::arg("k"), py::arg("x"), py::arg("space"),
        py::arg("loss") = py::none(), py::arg("backend") = "auto");

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("space"), py::arg("inputs"), py::arg("truths"),
           "Labeled points first; pass None (or a shorter list) for unlabeled points.")
      .def("__len__", &Dataset::size)
      .def_readonly("labeled_count", &Dataset::labeled_count)
      .def_readonly("output_space", &Dataset::output_space)
      .def_property_readonly("inputs", [](const Dataset& ds) {
        std::vector<Input> xs;
        for (const auto& p : ds.points) xs.push_back(p.input);
        return xs;
      })
      .def_property_readonly("truths", [](const Dataset& ds) {
        py::list out;
        for (const auto& p : ds.points) out.append(p.truth ? to_py(*p.truth) : py::none());
        return out;
      });

  m.def("load_dataset", &load_dataset, py::arg("path"));
  m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("path"));

  m.def("generate_synthetic",
        [](int clusters, int points_per_cluster, int input_dim, std::optional<OutputSpace> space, double label_noise,
           double separation, double spread, bool opposed_rules, std::uint64_t seed) {
          SyntheticSpec spec;
          spec.clusters = clusters;
          spec.points_per_cluster = points_per_cluster;
          spec.input_dim = input_dim;
          if (space) spec.output_space = *space;
          spec.label_noise = label_noise;
          spec.separation = separation;
          spec.spread = spread;
          spec.opposed_rules = opposed_rules;
          spec.seed = seed;
          return generate_synthetic(spec);
        },
        py::arg("clusters") = 2, py::arg("points_per_cluster") = 100, py::arg("input_dim") = 5,
        py::arg("space") = py::none(), py::arg("label_noise") = 0.0, py::arg("separation") = 4.0,
        py::arg("spread") = 1.0, py::arg("opposed_rules") = true, py::arg("seed") = 0);

  py::class_<LocalModel>(m, "LocalModel")
      .def_readonly("weights", &LocalModel::weights)
      .def_readonly("output_space", &LocalModel::output_space)
      .def("nearest_anchor", &LocalModel::nearest_anchor, py::arg("x"))
      .def("predict", [](const LocalModel& model, const Input& x) { return to_py(model.predict(x)); }, py::arg("x"))
      .def("save", [](const LocalModel& model, const std::string& path) { save_model(model, path); }, py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("iterations_run", &TrainReport::iterations_run)
      .def_readonly("objective_trace", &TrainReport::objective_trace)
      .def_readonly("model", &TrainReport::model)
      .def_property_readonly("outputs", [](const TrainReport& r) {
        py::list out;
        for (const auto& y : r.state.outputs) out.append(to_py(y));
        return out;
      });

  m.def("fit",
        [](const Dataset& ds, int k, double C, double eta, double eta_decay, int iterations,
           const std::optional<std::string>& loss_name, const std::string& backend) {
          Hyperparameters hp;
          hp.k = k;
          hp.C = C;
          hp.eta = eta;
          hp.eta_decay = eta_decay;
          hp.iterations = iterations;
          py::gil_scoped_release release;
          return fit(ds, hp, loss_or_default(loss_name, ds.output_space), inference_config(backend));
        },
        py::arg("dataset"), py::arg("k") = 0, py::arg("C") = 1.0, py::arg("eta") = 0.01, py::arg("eta_decay") = 1.0,
        py::arg("iterations") = 50, py::arg("loss") = py::none(), py::arg("backend") = "auto",
        "Train one local predictor per point and impute the unlabeled outputs.");

  py::class_<FoldResult>(m, "FoldResult")
      .def_readonly("fold", &FoldResult::fold)
      .def_readonly("train_size", &FoldResult::train_size)
      .def_readonly("labeled_size", &FoldResult::labeled_size)
      .def_readonly("test_size", &FoldResult::test_size)
      .def_readonly("average_loss", &FoldResult::average_loss);

  py::class_<ResultsRecord>(m, "Results")
      .def_readonly("method", &ResultsRecord::method)
      .def_readonly("loss", &ResultsRecord::loss)
      .def_readonly("folds", &ResultsRecord::folds)
      .def_readonly("mean_loss", &ResultsRecord::mean_loss)
      .def_readonly("std_loss", &ResultsRecord::std_loss)
      .def_readonly("standard_error", &ResultsRecord::standard_error)
      .def_readonly("wall_seconds", &ResultsRecord::wall_seconds)
      .def("to_json", [](const ResultsRecord& r) { return format_results(r, ResultsFormat::Json); })
      .def("to_csv", [](const ResultsRecord& r) { return format_results(r, ResultsFormat::Csv); });

  m.def("run_experiment",
        [](const std::string& config_path, std::optional<bool> baseline) {
          auto cfg = load_experiment_config(config_path);
          if (baseline) cfg.baseline = *baseline;
          py::gil_scoped_release release;
          return run_experiment(cfg);
        },
        py::arg("config"), py::arg("baseline") = py::none(),
        "Cross-validated run described by an experiment config file.");
}
