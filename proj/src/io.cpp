#include "locstruct/io.hpp"

#include "locstruct/error.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace locstruct {

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

template <class T>
T as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return as<T>(*it, where + "." + key);
}

std::vector<double> as_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(where + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json input_json(const Input& x, bool sequence) {
  if (!sequence) return vector_json(x.row(0).transpose());
  json rows = json::array();
  for (Eigen::Index t = 0; t < x.rows(); ++t) rows.push_back(vector_json(x.row(t).transpose()));
  return rows;
}

Input input_from_json(const json& j, bool sequence, const std::string& where) {
  if (!sequence) {
    auto v = as_vector(j, where);
    Input x(1, static_cast<Eigen::Index>(v.size()));
    for (std::size_t c = 0; c < v.size(); ++c) x(0, static_cast<Eigen::Index>(c)) = v[c];
    return x;
  }
  if (!j.is_array()) throw ParseError(where + ": expected an array of per-position vectors");
  std::vector<std::vector<double>> rows;
  for (std::size_t t = 0; t < j.size(); ++t) rows.push_back(as_vector(j[t], where + "[" + std::to_string(t) + "]"));
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Input x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != cols)
      throw ParseError(where + "[" + std::to_string(t) + "]: position vectors have differing lengths");
    for (std::size_t c = 0; c < cols; ++c) x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = rows[t][c];
  }
  return x;
}

json output_json(const StructuredOutput& y, const OutputSpace& space) {
  if (space.is_taxonomy()) return space.taxonomy().leaf_id(std::get<TaxonomyLeaf>(y).leaf);
  json labels = json::array();
  for (int l : std::get<LabelSequence>(y).labels) labels.push_back(space.sequence().alphabet[static_cast<std::size_t>(l)]);
  return labels;
}

StructuredOutput output_from_json(const json& j, const OutputSpace& space, const std::string& where) {
  try {
    if (space.is_taxonomy()) return space.parse(as<std::string>(j, where));
    if (!j.is_array()) throw ParseError(where + ": expected an array of label names");
    LabelSequence seq;
    for (std::size_t t = 0; t < j.size(); ++t) {
      const auto name = as<std::string>(j[t], where + "[" + std::to_string(t) + "]");
      auto label = space.sequence().find_label(name);
      if (!label) throw InvalidOutputError("unknown label '" + name + "'");
      seq.labels.push_back(*label);
    }
    return seq;
  } catch (const InvalidOutputError& e) {
    throw InvalidOutputError(where + ": " + e.what());
  }
}

void append_taxonomy_node(const Taxonomy& tax, std::size_t node, json& out) {
  out["id"] = tax.node_id(node);
  const auto& kids = tax.children(node);
  if (kids.empty()) {
    if (!tax.has_default_codes()) out["code"] = tax.specs()[node].code;
    return;
  }
  out["children"] = json::array();
  for (std::size_t c : kids) {
    json child;
    append_taxonomy_node(tax, c, child);
    out["children"].push_back(std::move(child));
  }
}

void collect_taxonomy_nodes(const json& j, const std::string& parent, const std::string& where,
                            std::vector<Taxonomy::NodeSpec>& out) {
  Taxonomy::NodeSpec spec;
  spec.id = as<std::string>(field(j, "id", where), where + ".id");
  spec.parent = parent;
  if (auto it = j.find("code"); it != j.end()) spec.code = as_vector(*it, where + ".code");
  out.push_back(spec);
  if (auto it = j.find("children"); it != j.end()) {
    if (!it->is_array()) throw ParseError(where + ".children: expected an array");
    for (std::size_t c = 0; c < it->size(); ++c)
      collect_taxonomy_nodes((*it)[c], spec.id, where + ".children[" + std::to_string(c) + "]", out);
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_canonical(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        write_canonical(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write_canonical(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

json read_json_file(const std::string& path) {
  const std::string text = slurp(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) line += text[i] == '\n';
    throw ParseError(path + ":" + std::to_string(line) + ": " + e.what());
  }
}

json output_space_to_json(const OutputSpace& space) {
  if (space.is_taxonomy()) {
    const auto& tax = space.taxonomy();
    json root;
    append_taxonomy_node(tax, tax.root(), root);
    return {{"type", "taxonomy"}, {"root", root}};
  }
  const auto& s = space.sequence();
  return {{"type", "sequence"}, {"alphabet", s.alphabet}, {"length", s.length}};
}

OutputSpace output_space_from_json(const json& j, const std::string& where) {
  const auto type = as<std::string>(field(j, "type", where), where + ".type");
  if (type == "taxonomy") {
    std::vector<Taxonomy::NodeSpec> nodes;
    collect_taxonomy_nodes(field(j, "root", where), "", where + ".root", nodes);
    return OutputSpace{Taxonomy(std::move(nodes))};
  }
  if (type == "sequence") {
    SequenceSpace s;
    s.alphabet = as<std::vector<std::string>>(field(j, "alphabet", where), where + ".alphabet");
    s.length = as<int>(field(j, "length", where), where + ".length");
    OutputSpace space{std::move(s)};
    validate_output_space(space);
    return space;
  }
  throw ParseError(where + ".type: expected 'taxonomy' or 'sequence', got '" + type + "'");
}

json dataset_to_json(const Dataset& ds) {
  json points = json::array();
  for (const auto& p : ds.points) {
    json jp;
    jp["x"] = input_json(p.input, ds.output_space.is_sequence());
    if (p.truth) jp["y"] = output_json(*p.truth, ds.output_space);
    points.push_back(std::move(jp));
  }
  return {{"output_space", output_space_to_json(ds.output_space)}, {"points", points}};
}

Dataset dataset_from_json(const json& j) {
  Dataset ds;
  ds.output_space = output_space_from_json(field(j, "output_space", "dataset"));
  const auto& points = field(j, "points", "dataset");
  if (!points.is_array()) throw ParseError("dataset.points: expected an array");
  const bool sequence = ds.output_space.is_sequence();
  bool seen_unlabeled = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string where = "points[" + std::to_string(i) + "]";
    DataPoint p;
    p.input = input_from_json(field(points[i], "x", where), sequence, where + ".x");
    if (auto it = points[i].find("y"); it != points[i].end() && !it->is_null()) {
      p.truth = output_from_json(*it, ds.output_space, where + ".y");
      if (seen_unlabeled) throw ParseError(where + ": labeled points must precede unlabeled points");
    } else {
      seen_unlabeled = true;
    }
    if (p.truth) ++ds.labeled_count;
    ds.points.push_back(std::move(p));
  }
  return ds;
}

Dataset load_dataset(const std::string& path) {
  Dataset ds;
  try {
    ds = dataset_from_json(read_json_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  } catch (const InvalidOutputError& e) {
    throw InvalidOutputError(path + ": " + e.what());
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ParseError(path + ": " + msg);
  }
  require_valid(ds);
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) { write_file(path, dataset_to_json(ds).dump(1) + "\n"); }

json model_to_json(const LocalModel& model) {
  const bool sequence = model.output_space.is_sequence();
  json anchors = json::array();
  for (std::size_t i = 0; i < model.anchors.size(); ++i)
    anchors.push_back({{"x", input_json(model.anchors[i], sequence)}, {"w", vector_json(model.weights[i])}});
  const auto& hp = model.hyperparameters;
  return {{"format", "locstruct-model"},
          {"version", 1},
          {"output_space", output_space_to_json(model.output_space)},
          {"loss", loss_name(model.loss)},
          {"backend", backend_name(model.inference.backend)},
          {"enumeration_cap", model.inference.enumeration_cap},
          {"hyperparameters",
           {{"k", hp.k}, {"C", hp.C}, {"eta", hp.eta}, {"eta_decay", hp.eta_decay}, {"iterations", hp.iterations}}},
          {"anchors", anchors}};
}

LocalModel model_from_json(const json& j) {
  if (as<std::string>(field(j, "format", "model"), "model.format") != "locstruct-model")
    throw ParseError("model.format: not a locstruct model file");
  LocalModel m;
  m.output_space = output_space_from_json(field(j, "output_space", "model"), "model.output_space");
  try {
    m.loss = parse_loss(as<std::string>(field(j, "loss", "model"), "model.loss"));
    m.inference.backend = parse_backend(get_or<std::string>(j, "backend", "auto", "model"));
  } catch (const ValidationError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  m.inference.enumeration_cap = get_or<std::uint64_t>(j, "enumeration_cap", kDefaultEnumerationCap, "model");
  const auto& hp = field(j, "hyperparameters", "model");
  m.hyperparameters.k = get_or<int>(hp, "k", 0, "model.hyperparameters");
  m.hyperparameters.C = get_or<double>(hp, "C", 1.0, "model.hyperparameters");
  m.hyperparameters.eta = get_or<double>(hp, "eta", 0.01, "model.hyperparameters");
  m.hyperparameters.eta_decay = get_or<double>(hp, "eta_decay", 1.0, "model.hyperparameters");
  m.hyperparameters.iterations = get_or<int>(hp, "iterations", 50, "model.hyperparameters");
  const auto& anchors = field(j, "anchors", "model");
  if (!anchors.is_array() || anchors.empty()) throw ParseError("model.anchors: expected a non-empty array");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const std::string where = "model.anchors[" + std::to_string(i) + "]";
    m.anchors.push_back(input_from_json(field(anchors[i], "x", where), m.output_space.is_sequence(), where + ".x"));
    auto w = as_vector(field(anchors[i], "w", where), where + ".w");
    m.weights.push_back(Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
  }
  return m;
}

void save_model(const LocalModel& model, const std::string& path) { write_file(path, model_to_json(model).dump(1) + "\n"); }

LocalModel load_model(const std::string& path) {
  try {
    return model_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ParseError(path + ": " + msg);
  }
}

json synthetic_to_json(const SyntheticSpec& spec) {
  return {{"clusters", spec.clusters},
          {"points_per_cluster", spec.points_per_cluster},
          {"input_dim", spec.input_dim},
          {"output_space", output_space_to_json(spec.output_space)},
          {"label_noise", spec.label_noise},
          {"separation", spec.separation},
          {"spread", spec.spread},
          {"opposed_rules", spec.opposed_rules},
          {"seed", spec.seed}};
}

SyntheticSpec synthetic_from_json(const json& j) {
  const std::string where = "synthetic";
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  SyntheticSpec s;
  s.clusters = get_or<int>(j, "clusters", s.clusters, where);
  s.points_per_cluster = get_or<int>(j, "points_per_cluster", s.points_per_cluster, where);
  s.input_dim = get_or<int>(j, "input_dim", s.input_dim, where);
  if (auto it = j.find("output_space"); it != j.end()) s.output_space = output_space_from_json(*it, where + ".output_space");
  s.label_noise = get_or<double>(j, "label_noise", s.label_noise, where);
  s.separation = get_or<double>(j, "separation", s.separation, where);
  s.spread = get_or<double>(j, "spread", s.spread, where);
  s.opposed_rules = get_or<bool>(j, "opposed_rules", s.opposed_rules, where);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed, where);
  return s;
}

SyntheticSpec load_synthetic_spec(const std::string& path) { return synthetic_from_json(read_json_file(path)); }

json config_to_json(const ExperimentConfig& cfg) {
  json j = {{"k", cfg.hp.k},
            {"C", cfg.hp.C},
            {"eta", cfg.hp.eta},
            {"eta_decay", cfg.hp.eta_decay},
            {"iterations", cfg.hp.iterations},
            {"backend", backend_name(cfg.backend)},
            {"folds", cfg.folds},
            {"labeled_fraction", cfg.labeled_fraction},
            {"seed", cfg.seed},
            {"baseline", cfg.baseline}};
  if (cfg.loss) j["loss"] = loss_name(*cfg.loss);
  if (cfg.synthetic)
    j["synthetic"] = synthetic_to_json(*cfg.synthetic);
  else
    j["dataset"] = cfg.dataset_path;
  return j;
}

ExperimentConfig config_from_json(const json& j, const std::string& base_dir) {
  const std::string where = "config";
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  ExperimentConfig cfg;
  if (auto it = j.find("synthetic"); it != j.end()) {
    cfg.synthetic = synthetic_from_json(*it);
  } else {
    cfg.dataset_path = as<std::string>(field(j, "dataset", where), where + ".dataset");
    if (!base_dir.empty() && std::filesystem::path(cfg.dataset_path).is_relative())
      cfg.dataset_path = (std::filesystem::path(base_dir) / cfg.dataset_path).string();
  }
  cfg.hp.k = get_or<int>(j, "k", cfg.hp.k, where);
  cfg.hp.C = get_or<double>(j, "C", cfg.hp.C, where);
  cfg.hp.eta = get_or<double>(j, "eta", cfg.hp.eta, where);
  cfg.hp.eta_decay = get_or<double>(j, "eta_decay", cfg.hp.eta_decay, where);
  cfg.hp.iterations = get_or<int>(j, "iterations", cfg.hp.iterations, where);
  cfg.folds = get_or<int>(j, "folds", cfg.folds, where);
  cfg.labeled_fraction = get_or<double>(j, "labeled_fraction", cfg.labeled_fraction, where);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, where);
  cfg.baseline = get_or<bool>(j, "baseline", cfg.baseline, where);
  try {
    if (auto it = j.find("loss"); it != j.end()) cfg.loss = parse_loss(as<std::string>(*it, where + ".loss"));
    cfg.backend = parse_backend(get_or<std::string>(j, "backend", "auto", where));
  } catch (const ValidationError& e) {
    throw ParseError(where + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return config_from_json(read_json_file(path), std::filesystem::path(path).parent_path().string());
}

ResultsFormat results_format_for(const std::string& path) {
  return std::filesystem::path(path).extension() == ".csv" ? ResultsFormat::Csv : ResultsFormat::Json;
}

json results_to_json(const ResultsRecord& rec) {
  json folds = json::array();
  for (const auto& f : rec.folds)
    folds.push_back({{"fold", f.fold},
                     {"train_size", f.train_size},
                     {"labeled_size", f.labeled_size},
                     {"test_size", f.test_size},
                     {"average_loss", f.average_loss}});
  return {{"method", rec.method},         {"loss", rec.loss},
          {"folds", folds},               {"mean_loss", rec.mean_loss},
          {"std_loss", rec.std_loss},     {"standard_error", rec.standard_error},
          {"wall_seconds", rec.wall_seconds}, {"config", config_to_json(rec.config)}};
}

ResultsRecord results_from_json(const json& j) {
  const std::string where = "results";
  ResultsRecord rec;
  rec.method = as<std::string>(field(j, "method", where), where + ".method");
  rec.loss = as<std::string>(field(j, "loss", where), where + ".loss");
  const auto& folds = field(j, "folds", where);
  if (!folds.is_array()) throw ParseError(where + ".folds: expected an array");
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const std::string fw = where + ".folds[" + std::to_string(i) + "]";
    FoldResult f;
    f.fold = as<int>(field(folds[i], "fold", fw), fw);
    f.train_size = as<std::size_t>(field(folds[i], "train_size", fw), fw);
    f.labeled_size = as<std::size_t>(field(folds[i], "labeled_size", fw), fw);
    f.test_size = as<std::size_t>(field(folds[i], "test_size", fw), fw);
    f.average_loss = as<double>(field(folds[i], "average_loss", fw), fw);
    rec.folds.push_back(f);
  }
  rec.mean_loss = as<double>(field(j, "mean_loss", where), where);
  rec.std_loss = as<double>(field(j, "std_loss", where), where);
  rec.standard_error = as<double>(field(j, "standard_error", where), where);
  rec.wall_seconds = get_or<double>(j, "wall_seconds", 0.0, where);
  rec.config = config_from_json(field(j, "config", where));
  return rec;
}

std::string canonical_json(const json& j) {
  std::string out;
  write_canonical(j, out, 0);
  out += "\n";
  return out;
}

std::string format_results(const ResultsRecord& rec, ResultsFormat format) {
  if (format == ResultsFormat::Json) return canonical_json(results_to_json(rec));
  std::string out = "fold,train_size,labeled_size,test_size,average_loss\n";
  for (const auto& f : rec.folds)
    out += std::to_string(f.fold) + "," + std::to_string(f.train_size) + "," + std::to_string(f.labeled_size) + "," +
           std::to_string(f.test_size) + "," + format_double(f.average_loss) + "\n";
  return out;
}

void emit_results(const ResultsRecord& rec, const std::string& path, ResultsFormat format) {
  write_file(path, format_results(rec, format));
}

}  // namespace locstruct
