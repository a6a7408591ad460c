// aca_cli: fit, apply and inspect abnormal components from the command line.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.

#include "aca/aca.hpp"
#include "aca/benchmark.hpp"
#include "aca/datagen.hpp"
#include "aca/explain.hpp"
#include "aca/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using aca::Index;
using aca::MatrixXd;
using aca::VectorXd;
using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct SearchFlags {
  std::string depth = "pd";
  std::int64_t budget = 1000;
  std::int64_t restarts = 10;
  std::string algorithm = "nelder_mead_sphere";
  double beta = 6.0;
  double tol = 1e-6;
  std::string start = "Mn";
  std::uint64_t seed = 0;
};

enum class SeedFlag { required, optional, absent };

void add_search_flags(CLI::App* cmd, SearchFlags& f, SeedFlag seed_flag) {
  cmd->add_option("--depth", f.depth, "Depth notion")->check(CLI::IsMember({"pd", "apd"}))->capture_default_str();
  cmd->add_option("--budget", f.budget, "Objective evaluations per depth query")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--restarts", f.restarts, "Independent restarts per query")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--algorithm", f.algorithm, "Sphere optimizer")
      ->check(CLI::IsMember({"nelder_mead_sphere", "refined_random_search", "nm", "rrs"}))
      ->capture_default_str();
  cmd->add_option("--beta", f.beta, "Initial simplex cap is (pi/2)/beta")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--tol", f.tol, "Simplex convergence tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--start", f.start, "Start rule: Mn (direction to the mean) or Rn (random)")
      ->check(CLI::IsMember({"Mn", "Rn"}))
      ->capture_default_str();
  if (seed_flag == SeedFlag::absent) return;
  auto* seed = cmd->add_option("--seed", f.seed, "Random seed");
  if (seed_flag == SeedFlag::required) {
    seed->required();
  } else {
    seed->capture_default_str();
  }
}

aca::OptimizerConfig to_config(const SearchFlags& f) {
  aca::OptimizerConfig cfg;
  cfg.algorithm = aca::io::optimizer_from_string(f.algorithm);
  cfg.budget_k = f.budget;
  cfg.restarts = f.restarts;
  cfg.beta = f.beta;
  cfg.tol = f.tol;
  cfg.start = f.start == "Mn" ? aca::StartRule::mean : aca::StartRule::random;
  cfg.seed = f.seed;
  cfg.validate();
  return cfg;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

/// Writes through `fn` to `path`, or to stdout when the path is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw aca::io::DataError("cannot write '" + path + "'");
  fn(out);
  if (!out) throw aca::io::DataError("write to '" + path + "' failed");
}

void print_fit_summary(const aca::AcaModel<double>& model, const std::vector<std::string>& names) {
  std::cout << std::left << std::setw(6) << "AC" << std::setw(24) << "min_depth"
            << "anchor_row\n";
  for (Index i = 0; i < model.size(); ++i) {
    std::cout << std::setw(6) << ("AC" + std::to_string(i + 1)) << std::setw(24)
              << aca::io::format_number(model.min_depths[i]) << model.anchor_rows[static_cast<std::size_t>(i)] + 1
              << "\n";
  }
  const Index top = std::min<Index>(3, model.ambient_dim);
  std::cout << "\nContributions of the " << top << " most important variables\n";
  for (Index i = 0; i < model.size(); ++i) {
    const auto report = aca::component_loadings(model, i);
    std::cout << std::setw(6) << ("AC" + std::to_string(i + 1));
    for (Index k = 0; k < top; ++k) {
      const auto& e = report.entries[static_cast<std::size_t>(k)];
      std::cout << "  " << names[static_cast<std::size_t>(e.variable)] << " (" << fixed(100.0 * e.share, 1) << "%)";
    }
    std::cout << "\n";
  }
}

int cmd_fit(const std::string& input, Index p, const SearchFlags& flags, const std::string& output) {
  const aca::io::Table table = aca::io::read_csv_file(input);
  const Index d = table.data.cols();
  if (p > d) throw aca::InvalidInput("--components " + std::to_string(p) + " exceeds the data dimension " +
                                     std::to_string(d));
  const auto model = aca::fit<double>(table.data, p, aca::depth_notion_from_string(flags.depth), to_config(flags));
  aca::io::save_model_file(output, model);
  print_fit_summary(model, aca::io::variable_names(table.names, d));
  return 0;
}

int cmd_transform(const std::string& model_path, const std::string& input, const std::string& output) {
  const auto model = aca::io::load_model_file(model_path);
  aca::io::Table table = aca::io::read_csv_file(input);
  // An empty file has no columns at all.
  if (table.data.size() == 0 && table.names.empty()) table.data.resize(0, model.ambient_dim);
  const MatrixXd scores = aca::transform(model, table.data);
  std::vector<std::string> header;
  for (Index i = 0; i < model.size(); ++i) header.push_back("AC" + std::to_string(i + 1));
  emit(output, [&](std::ostream& out) { aca::io::write_csv(out, scores, header); });
  return 0;
}

int cmd_depth(const std::string& input, const SearchFlags& flags, const std::string& output) {
  const aca::io::Table table = aca::io::read_csv_file(input);
  const Index d = table.data.cols();
  const MatrixXd full = MatrixXd::Identity(d, d);
  const auto results =
      aca::row_depths<double>(table.data, full, aca::depth_notion_from_string(flags.depth), to_config(flags));
  MatrixXd out(table.data.rows(), d + 1);
  for (Index i = 0; i < table.data.rows(); ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    out(i, 0) = r.depth;
    out.row(i).tail(d) = r.direction.transpose();
  }
  std::vector<std::string> header{"depth"};
  for (Index k = 0; k < d; ++k) header.push_back("u" + std::to_string(k + 1));
  emit(output, [&](std::ostream& os) { aca::io::write_csv(os, out, header); });
  return 0;
}

struct ExplainFlags {
  std::string model;
  Index component = 1;
  Index top = 0;
  std::string point;
  std::string input;
  bool as_json = false;
  std::string output;
};

int cmd_explain(const ExplainFlags& f) {
  const auto model = aca::io::load_model_file(f.model);
  const Index d = model.ambient_dim;
  if (f.component > model.size()) {
    throw aca::InvalidInput("--component " + std::to_string(f.component) + " exceeds the model's " +
                            std::to_string(model.size()) + " components");
  }
  if (!f.point.empty() && f.input.empty()) throw aca::InvalidInput("--point requires --input");

  std::optional<aca::io::Table> table;
  if (!f.input.empty()) {
    table = aca::io::read_csv_file(f.input);
    if (table->data.cols() != d) {
      throw aca::InvalidInput("input has " + std::to_string(table->data.cols()) + " columns, model expects " +
                              std::to_string(d));
    }
  }
  const auto names = aca::io::variable_names(table ? table->names : std::vector<std::string>{}, d);
  const Index top = f.top > 0 ? std::min(f.top, d) : d;
  const auto report = aca::component_loadings(model, f.component - 1);

  std::optional<aca::CellScores<double>> cells;
  VectorXd point;
  if (!f.point.empty()) {
    point = aca::io::parse_numeric_row(f.point);
    if (point.size() != d) {
      throw aca::InvalidInput("--point has " + std::to_string(point.size()) + " values, model expects " +
                              std::to_string(d));
    }
    cells = aca::cell_scores<double>(point, table->data, model.config);
  }

  if (f.as_json) {
    json ranking = json::array();
    for (Index k = 0; k < top; ++k) {
      const auto& e = report.entries[static_cast<std::size_t>(k)];
      ranking.push_back({{"rank", k + 1},
                         {"variable", names[static_cast<std::size_t>(e.variable)]},
                         {"index", e.variable + 1},
                         {"loading", e.loading},
                         {"share", e.share}});
    }
    json doc = {{"component", f.component}, {"ranking", std::move(ranking)}};
    if (cells) {
      json scores = json::array();
      for (Index k = 0; k < d; ++k) {
        scores.push_back({{"variable", names[static_cast<std::size_t>(k)]}, {"score", cells->scores[k]}});
      }
      doc["cell_scores"] = {{"apd", cells->apd}, {"scores", std::move(scores)}};
    }
    emit(f.output, [&](std::ostream& os) { os << doc.dump(2) << "\n"; });
    return 0;
  }

  emit(f.output, [&](std::ostream& os) {
    os << "Variable ranking for AC" << f.component << "\n";
    os << std::left << std::setw(6) << "rank" << std::setw(16) << "variable" << std::setw(14) << "loading"
       << "share\n";
    for (Index k = 0; k < top; ++k) {
      const auto& e = report.entries[static_cast<std::size_t>(k)];
      os << std::setw(6) << k + 1 << std::setw(16) << names[static_cast<std::size_t>(e.variable)] << std::setw(14)
         << fixed(e.loading, 6) << fixed(100.0 * e.share, 4) << "%\n";
    }
    if (cells) {
      os << "\nCell scores (asymmetric depth " << fixed(cells->apd, 6) << ")\n";
      for (Index k = 0; k < d; ++k) {
        os << std::setw(16) << names[static_cast<std::size_t>(k)] << fixed(cells->scores[k], 6) << "\n";
      }
    }
  });
  return 0;
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct SimulateFlags {
  std::string setting = "mvn_a09";
  Index n = 1000;
  Index d = 10;
  double eps = 0.05;
  std::uint64_t seed = 0;
  int df = 5;
  bool unsigned_toeplitz = false;
  std::string output;
  std::string labels;
  std::string meta;
};

aca::datagen::SimulationSpec to_spec(const SimulateFlags& f) {
  aca::datagen::SimulationSpec spec;
  spec.setting = aca::datagen::setting_from_string(f.setting);
  spec.n = f.n;
  spec.d = f.d;
  spec.eps = f.eps;
  spec.seed = f.seed;
  spec.df = f.df;
  spec.unsigned_toeplitz = f.unsigned_toeplitz;
  spec.validate();
  return spec;
}

int cmd_simulate(const SimulateFlags& f) {
  const auto spec = to_spec(f);
  const auto ds = aca::datagen::simulate(spec);
  aca::io::write_csv_file(f.output, ds.data, aca::io::variable_names({}, spec.d));
  if (!f.labels.empty()) {
    MatrixXd labels(spec.n, 1);
    for (Index i = 0; i < spec.n; ++i) labels(i, 0) = ds.labels[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    aca::io::write_csv_file(f.labels, labels, {"anomaly"});
  }
  if (!f.meta.empty()) {
    json mu = json::array();
    for (Index k = 0; k < ds.anomaly_center.size(); ++k) mu.push_back(ds.anomaly_center[k]);
    const json meta = {{"setting", std::string(aca::datagen::to_string(spec.setting))},
                       {"mu_tilde", std::move(mu)},
                       {"cov", matrix_json(ds.normal_cov)},
                       {"n", spec.n},
                       {"d", spec.d},
                       {"eps", spec.eps},
                       {"seed", spec.seed},
                       {"n_anomalies", spec.anomaly_count()}};
    emit(f.meta, [&](std::ostream& os) { os << meta.dump(2) << "\n"; });
  }
  return 0;
}

double median_of(const std::vector<double>& v) {
  return aca::median<double>(v);
}

json alignment_json(const aca::MethodAlignment& a) {
  return {{"j_hat", a.j_hat}, {"alpha_hat", a.alpha_hat}, {"certified", a.certified}};
}

int cmd_benchmark(const SimulateFlags& sim, std::int64_t runs, Index p, const SearchFlags& flags,
                  const std::string& output) {
  aca::BenchmarkConfig cfg;
  cfg.spec = to_spec(sim);
  if (p > cfg.spec.d) throw aca::InvalidInput("--components exceeds --d");
  cfg.components = p;
  cfg.notion = aca::depth_notion_from_string(flags.depth);
  cfg.optimizer = to_config(flags);
  cfg.runs = runs;
  cfg.seed = sim.seed;

  json records = json::array();
  std::vector<double> aca_j, aca_alpha, pca_j, pca_alpha, aucs;
  for (std::int64_t r = 0; r < runs; ++r) {
    const aca::BenchmarkRecord rec = aca::benchmark_run(cfg, r);
    records.push_back({{"run", r + 1},
                       {"data_seed", rec.data_seed},
                       {"fit_seed", rec.fit_seed},
                       {"aca", alignment_json(rec.aca)},
                       {"aca_auc", rec.aca_auc},
                       {"pca", alignment_json(rec.pca)}});
    aca_j.push_back(static_cast<double>(rec.aca.j_hat));
    aca_alpha.push_back(rec.aca.alpha_hat);
    pca_j.push_back(static_cast<double>(rec.pca.j_hat));
    pca_alpha.push_back(rec.pca.alpha_hat);
    aucs.push_back(rec.aca_auc);
  }
  const json doc = {{"setting", std::string(aca::datagen::to_string(cfg.spec.setting))},
                    {"n", cfg.spec.n},
                    {"d", cfg.spec.d},
                    {"eps", cfg.spec.eps},
                    {"seed", cfg.seed},
                    {"components", p},
                    {"depth_notion", flags.depth},
                    {"budget_k", flags.budget},
                    {"restarts", flags.restarts},
                    {"runs", std::move(records)},
                    {"median",
                     {{"aca_j_hat", median_of(aca_j)},
                      {"aca_alpha_hat", median_of(aca_alpha)},
                      {"aca_auc", median_of(aucs)},
                      {"pca_j_hat", median_of(pca_j)},
                      {"pca_alpha_hat", median_of(pca_alpha)}}}};
  emit(output, [&](std::ostream& os) { os << doc.dump(2) << "\n"; });
  return 0;
}

void add_simulation_flags(CLI::App* cmd, SimulateFlags& f) {
  cmd->add_option("--setting", f.setting, "Normal-data setting")
      ->check(CLI::IsMember({"mvn_a09", "mvn_hcn", "ell_t", "exp", "mv_sk"}))
      ->capture_default_str();
  cmd->add_option("--n", f.n, "Observations")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--d", f.d, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--eps", f.eps, "Contamination fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--seed", f.seed, "Random seed")->required();
  cmd->add_option("--df", f.df, "Degrees of freedom for ell_t")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--unsigned-toeplitz", f.unsigned_toeplitz, "Use 0.9^|i-j| instead of (-0.9)^|i-j|");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abnormal component analysis"};
  app.require_subcommand(1);

  SearchFlags fit_flags;
  std::string fit_input, fit_output;
  Index fit_p = 1;
  auto* fit = app.add_subcommand("fit", "Extract abnormal components and save a model file");
  fit->add_option("--input", fit_input, "Data CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--components", fit_p, "Number of components")->required()->check(CLI::PositiveNumber);
  fit->add_option("--output", fit_output, "Model JSON to write")->required();
  add_search_flags(fit, fit_flags, SeedFlag::required);

  std::string tr_model, tr_input, tr_output;
  auto* tr = app.add_subcommand("transform", "Project data onto the components of a model");
  tr->add_option("--model", tr_model, "Model JSON")->required()->check(CLI::ExistingFile);
  tr->add_option("--input", tr_input, "Data CSV")->required()->check(CLI::ExistingFile);
  tr->add_option("--output", tr_output, "Scores CSV (default: stdout)");

  SearchFlags depth_flags;
  std::string depth_input, depth_output;
  auto* depth = app.add_subcommand("depth", "Depth of every row with its minimizing direction");
  depth->add_option("--input", depth_input, "Data CSV")->required()->check(CLI::ExistingFile);
  depth->add_option("--output", depth_output, "Depth CSV (default: stdout)");
  add_search_flags(depth, depth_flags, SeedFlag::optional);

  ExplainFlags ex;
  auto* explain = app.add_subcommand("explain", "Variable ranking and cell scores");
  explain->add_option("--model", ex.model, "Model JSON")->required()->check(CLI::ExistingFile);
  explain->add_option("--component", ex.component, "Component to rank (1-based)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  explain->add_option("--top", ex.top, "Show only the top m variables (default: all)")->check(CLI::PositiveNumber);
  explain->add_option("--point", ex.point, "Comma-separated point for cell scores");
  explain->add_option("--input", ex.input, "Reference data CSV (required with --point; supplies names)")
      ->check(CLI::ExistingFile);
  explain->add_flag("--json", ex.as_json, "Emit JSON instead of text");
  explain->add_option("--output", ex.output, "Report file (default: stdout)");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a contaminated benchmark dataset");
  add_simulation_flags(simulate, sim);
  simulate->add_option("--output", sim.output, "Data CSV")->required();
  simulate->add_option("--labels", sim.labels, "Labels CSV (1 = anomaly)");
  simulate->add_option("--meta", sim.meta, "Metadata JSON");

  SimulateFlags bench_sim;
  SearchFlags bench_flags;
  std::int64_t bench_runs = 50;
  Index bench_p = 2;
  std::string bench_output;
  auto* bench = app.add_subcommand("benchmark", "Alignment of ACA and PCA with the oracle direction");
  add_simulation_flags(bench, bench_sim);
  bench->add_option("--runs", bench_runs, "Independent draws")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--components", bench_p, "ACA components fitted per draw")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--output", bench_output, "Result JSON (default: stdout)");
  add_search_flags(bench, bench_flags, SeedFlag::absent);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fit) return cmd_fit(fit_input, fit_p, fit_flags, fit_output);
    if (*tr) return cmd_transform(tr_model, tr_input, tr_output);
    if (*depth) return cmd_depth(depth_input, depth_flags, depth_output);
    if (*explain) return cmd_explain(ex);
    if (*simulate) return cmd_simulate(sim);
    if (*bench) return cmd_benchmark(bench_sim, bench_runs, bench_p, bench_flags, bench_output);
  } catch (const aca::io::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const aca::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const aca::NumericFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
