#include "aca/io.hpp"

#include "aca/subspace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace aca::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

Table read_csv(std::istream& in, std::string_view source) {
  Table table;
  std::vector<double> values;
  std::size_t cols = 0;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    std::vector<double> parsed(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) numeric = parse_double(fields[i], parsed[i]);
    if (first) {
      first = false;
      cols = fields.size();
      if (!numeric) {
        for (auto f : fields) table.names.emplace_back(f);
        continue;
      }
    }
    if (fields.size() != cols) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                      " fields, found " + std::to_string(fields.size()));
    }
    if (!numeric) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    for (double v : parsed) {
      if (!std::isfinite(v)) {
        throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": non-finite value");
      }
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  table.data.resize(rows, static_cast<Index>(cols));
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < static_cast<Index>(cols); ++j)
      table.data(i, j) = values[static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)];
  return table;
}

Table read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_csv(in, path.string());
}

VectorXd parse_numeric_row(std::string_view line) {
  const auto fields = split_fields(trim(line));
  VectorXd out(static_cast<Index>(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    double v = 0;
    if (!parse_double(fields[i], v) || !std::isfinite(v)) {
      throw DataError("invalid number '" + std::string(fields[i]) + "' in row '" + std::string(line) + "'");
    }
    out[static_cast<Index>(i)] = v;
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const MatrixXd& data, const std::vector<std::string>& header) {
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  if (!header.empty()) out << '\n';
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << format_number(data(i, j));
    out << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, const MatrixXd& data, const std::vector<std::string>& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(out, data, header);
}

std::vector<std::string> variable_names(const std::vector<std::string>& names, Index d) {
  if (static_cast<Index>(names.size()) == d) return names;
  std::vector<std::string> out;
  for (Index j = 0; j < d; ++j) out.push_back("V" + std::to_string(j + 1));
  return out;
}

std::string to_string(Optimizer algorithm) {
  return algorithm == Optimizer::nelder_mead_sphere ? "nelder_mead_sphere" : "refined_random_search";
}

Optimizer optimizer_from_string(std::string_view name) {
  if (name == "nelder_mead_sphere" || name == "nm") return Optimizer::nelder_mead_sphere;
  if (name == "refined_random_search" || name == "rrs") return Optimizer::refined_random_search;
  throw InvalidInput("unknown optimizer '" + std::string(name) + "'");
}

nlohmann::json model_to_json(const AcaModel<double>& model) {
  using nlohmann::json;
  json components = json::array();
  for (Index i = 0; i < model.size(); ++i) {
    json col = json::array();
    for (Index k = 0; k < model.ambient_dim; ++k) col.push_back(model.components(k, i));
    components.push_back(std::move(col));
  }
  json depths = json::array();
  for (Index i = 0; i < model.min_depths.size(); ++i) depths.push_back(model.min_depths[i]);
  json anchors = json::array();
  for (Index a : model.anchor_rows) anchors.push_back(a);
  const OptimizerConfig& c = model.config;
  json config = {
      {"algorithm", to_string(c.algorithm)},
      {"budget_k", c.budget_k},
      {"restarts", c.restarts},
      {"beta", c.beta},
      {"alpha", c.alpha},
      {"gamma", c.gamma},
      {"rho", c.rho},
      {"sigma", c.sigma},
      {"tol", c.tol},
      {"start", c.start == StartRule::mean ? "Mn" : "Rn"},
  };
  return json{{"format_version", kModelFormatVersion},
              {"ambient_dim", model.ambient_dim},
              {"depth_notion", std::string(aca::to_string(model.notion))},
              {"components", std::move(components)},
              {"min_depths", std::move(depths)},
              {"anchor_rows", std::move(anchors)},
              {"config", std::move(config)},
              {"seed", c.seed}};
}

namespace {

void require_keys(const nlohmann::json& j, const std::set<std::string>& keys, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": expected a JSON object");
  for (const auto& k : keys) {
    if (!j.contains(k)) throw DataError(where + ": missing key '" + k + "'");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!keys.contains(it.key())) throw DataError(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

AcaModel<double> model_from_json(const nlohmann::json& j) {
  require_keys(j, {"format_version", "ambient_dim", "depth_notion", "components", "min_depths", "anchor_rows", "config",
                   "seed"},
               "model file");
  if (field<int>(j, "format_version") != kModelFormatVersion) throw DataError("model file: unsupported format_version");
  AcaModel<double> model;
  model.ambient_dim = field<Index>(j, "ambient_dim");
  if (model.ambient_dim < 1) throw DataError("model file: ambient_dim must be >= 1");
  try {
    model.notion = depth_notion_from_string(field<std::string>(j, "depth_notion"));
  } catch (const InvalidInput& e) {
    throw DataError(std::string("model file: ") + e.what());
  }

  const auto comps = field<std::vector<std::vector<double>>>(j, "components");
  const auto p = static_cast<Index>(comps.size());
  if (p < 1 || p > model.ambient_dim) throw DataError("model file: component count must lie in [1, ambient_dim]");
  model.components.resize(model.ambient_dim, p);
  for (Index i = 0; i < p; ++i) {
    const auto& col = comps[static_cast<std::size_t>(i)];
    if (static_cast<Index>(col.size()) != model.ambient_dim) {
      throw DataError("model file: component " + std::to_string(i + 1) + " has wrong length");
    }
    for (Index k = 0; k < model.ambient_dim; ++k) model.components(k, i) = col[static_cast<std::size_t>(k)];
    if (std::abs(model.components.col(i).norm() - 1.0) > 1e-8) {
      throw DataError("model file: component " + std::to_string(i + 1) + " is not unit-norm");
    }
  }
  if (gram_deviation(model.components) > 1e-8) throw DataError("model file: components are not orthogonal");

  const auto depths = field<std::vector<double>>(j, "min_depths");
  const auto anchors = field<std::vector<Index>>(j, "anchor_rows");
  if (static_cast<Index>(depths.size()) != p || static_cast<Index>(anchors.size()) != p) {
    throw DataError("model file: min_depths and anchor_rows must have one entry per component");
  }
  model.min_depths = Eigen::Map<const VectorXd>(depths.data(), p);
  model.anchor_rows = anchors;

  const nlohmann::json& c = j.at("config");
  require_keys(c, {"algorithm", "budget_k", "restarts", "beta", "alpha", "gamma", "rho", "sigma", "tol", "start"},
               "model file config");
  OptimizerConfig& cfg = model.config;
  try {
    cfg.algorithm = optimizer_from_string(field<std::string>(c, "algorithm"));
  } catch (const InvalidInput& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  cfg.budget_k = field<std::int64_t>(c, "budget_k");
  cfg.restarts = field<std::int64_t>(c, "restarts");
  cfg.beta = field<double>(c, "beta");
  cfg.alpha = field<double>(c, "alpha");
  cfg.gamma = field<double>(c, "gamma");
  cfg.rho = field<double>(c, "rho");
  cfg.sigma = field<double>(c, "sigma");
  cfg.tol = field<double>(c, "tol");
  const auto start = field<std::string>(c, "start");
  if (start != "Mn" && start != "Rn") throw DataError("model file: start must be Mn or Rn");
  cfg.start = start == "Mn" ? StartRule::mean : StartRule::random;
  cfg.seed = field<std::uint64_t>(j, "seed");
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  return model;
}

std::string dump_model(const AcaModel<double>& model) { return model_to_json(model).dump(2) + "\n"; }

AcaModel<double> load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("model file '" + path.string() + "': " + e.what());
  }
  return model_from_json(j);
}

void save_model_file(const std::filesystem::path& path, const AcaModel<double>& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << dump_model(model);
}

}  // namespace aca::io
