// penclr: penalized conditional logistic regression for matched case-control
// data. Subcommands: fit, stabsel, adapt-pf, find-lambda, simulate, validate.
// Exit codes: 0 success, 2 usage error, 3 data validation error, 4 numerical
// failure.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "penclr/errors.hpp"
#include "penclr/io.hpp"
#include "penclr/likelihood.hpp"
#include "penclr/simulation.hpp"
#include "penclr/solver.hpp"
#include "penclr/stability.hpp"
#include "penclr/tuning.hpp"
#include "penclr/types.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace penclr;

namespace {

struct CommonArgs {
  std::string data_path;
  std::vector<Index> blocks;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  SolverOptions solver;
};

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw UsageError("cannot parse '" + token + "' in " + what);
    }
  }
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

std::vector<Eigen::VectorXd> parse_lambda_grid(const std::string& inline_text,
                                               const std::string& file_path,
                                               Index n_blocks) {
  std::vector<std::vector<double>> rows;
  if (!inline_text.empty()) {
    std::stringstream stream(inline_text);
    std::string vec_text;
    while (std::getline(stream, vec_text, ';')) {
      rows.push_back(parse_number_list(vec_text, "--lambda-grid"));
    }
  } else if (!file_path.empty()) {
    std::ifstream in(file_path);
    if (!in) throw UsageError("cannot open lambda grid file '" + file_path + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      rows.push_back(parse_number_list(line, "lambda grid file"));
    }
  } else {
    throw UsageError("stabsel needs --lambda-grid or --lambda-grid-file");
  }

  std::vector<Eigen::VectorXd> out;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != n_blocks) {
      throw UsageError("each penalty vector needs one entry per block (" +
                       std::to_string(n_blocks) + ")");
    }
    Eigen::VectorXd v(n_blocks);
    for (Index j = 0; j < n_blocks; ++j) v[j] = row[static_cast<std::size_t>(j)];
    out.push_back(std::move(v));
  }
  return out;
}

MatchedDataset load_dataset(const CommonArgs& args) {
  if (args.data_path.empty()) throw UsageError("--data is required");
  return read_dataset_csv(args.data_path, args.blocks);
}

json solver_json(const SolverOptions& opts) {
  return json{{"max_iterations", opts.max_iterations},
              {"tolerance", opts.objective_tol},
              {"coef_tolerance", opts.coef_tol},
              {"standardize", opts.standardize}};
}

// manifest path for an output file: result.csv -> result.manifest.json
fs::path manifest_path_for(const fs::path& out) {
  fs::path p = out;
  p.replace_extension();
  p += ".manifest.json";
  return p;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json base_manifest(const std::string& command, const CommonArgs& args) {
  json blocks = json::array();
  for (Index b : args.blocks) blocks.push_back(b);
  return json{{"command", command},
              {"version", kVersion},
              {"inputs", {{"data", args.data_path}, {"blocks", blocks}}},
              {"seed", args.seed},
              {"parameters",
               {{"alpha", args.alpha},
                {"workers", args.workers},
                {"solver", solver_json(args.solver)}}}};
}

// Reads --config from the raw arguments, removes it, and appends the file's
// key=value pairs as flags. Values already present on the command line win;
// unknown keys fail the normal flag parse afterwards.
void apply_config_file(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
      if (!path.empty()) throw UsageError("--config given more than once");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      if (!path.empty()) throw UsageError("--config given more than once");
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  if (path.empty()) return;

  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       " is not key=value: '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw UsageError("config line " + std::to_string(line_no) +
                       " has an empty key");
    }
    const std::string flag = "--" + key;
    bool overridden = false;
    for (const auto& arg : args) {
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
        overridden = true;
        break;
      }
    }
    if (!overridden) args.push_back(flag + "=" + value);
  }
}

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_data = true) {
  static std::string config_path_help_sink;
  cmd->add_option("--config", config_path_help_sink,
                  "flat key=value config file; flags override it");
  if (needs_data) {
    cmd->add_option("--data", args.data_path,
                    "dataset CSV (stratum,case,covariates)");
    cmd->add_option("--blocks", args.blocks,
                    "comma-separated block sizes, e.g. 50,50")
        ->delimiter(',');
  }
  cmd->add_option("--alpha", args.alpha, "elastic-net mixing, L1 share in (0,1]")
      ->capture_default_str();
  cmd->add_option("--seed", args.seed, "seed for every stochastic step")
      ->capture_default_str();
  cmd->add_option("--workers", args.workers, "parallel worker hint")
      ->capture_default_str();
  cmd->add_option("--out", args.out, "output path");
  cmd->add_option("--max-iterations", args.solver.max_iterations,
                  "solver iteration cap")
      ->capture_default_str();
  cmd->add_option("--tolerance", args.solver.objective_tol,
                  "relative objective tolerance")
      ->capture_default_str();
  cmd->add_flag("--standardize,!--no-standardize", args.solver.standardize,
                "center and scale covariates inside the solver");
}

int run_fit(const CommonArgs& args, const std::string& lambda_text) {
  Stopwatch timer;
  const MatchedDataset data = load_dataset(args);
  const auto levels = parse_number_list(lambda_text, "--lambda");
  if (static_cast<Index>(levels.size()) != data.n_blocks()) {
    throw UsageError("--lambda needs one level per block");
  }
  PenaltySpec spec;
  spec.lambda = Eigen::Map<const Eigen::VectorXd>(
      levels.data(), static_cast<Index>(levels.size()));
  spec.alpha = args.alpha;

  const FitResult fit = fit_penalized(data, spec, args.solver);
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
  if (!fit.converged) {
    throw NumericalError("fit did not converge: " + fit.diagnostic);
  }

  std::ostringstream csv;
  csv << "variable,block,coefficient\n";
  const auto block = data.block_of_column();
  for (Index j = 0; j < data.n_covariates(); ++j) {
    csv << data.column_names()[static_cast<std::size_t>(j)] << ','
        << block[static_cast<std::size_t>(j)] + 1 << ','
        << format_double(fit.beta[j]) << '\n';
  }

  json manifest = base_manifest("fit", args);
  manifest["parameters"]["lambda"] = levels;
  manifest["results"] = {{"objective", fit.objective},
                         {"iterations", fit.iterations},
                         {"nonzero", fit.nonzero.size()},
                         {"converged", fit.converged}};
  manifest["timing_seconds"] = timer.seconds();
  manifest["outputs"] = {args.out};

  AtomicOutputSet outputs;
  outputs.stage(args.out, csv.str());
  outputs.stage(manifest_path_for(args.out), manifest.dump(2) + "\n");
  outputs.commit();

  std::cout << "fit: objective " << format_double(fit.objective) << ", "
            << fit.nonzero.size() << " nonzero coefficients -> " << args.out
            << "\n";
  return 0;
}

int run_validate(const CommonArgs& args) {
  if (args.data_path.empty()) throw UsageError("--data is required");
  const MatchedDataset data = read_dataset_csv(args.data_path, args.blocks);
  std::cout << "ok: " << data.n_strata() << " strata, " << data.n_covariates()
            << " covariates, " << data.n_blocks() << " block(s)\n";
  return 0;
}

int run_find_lambda(const CommonArgs& args, const std::string& pf_text,
                    const std::string& grid_text, int folds) {
  Stopwatch timer;
  const MatchedDataset data = load_dataset(args);

  PenaltyFactors pf{Eigen::VectorXd::Ones(data.n_blocks())};
  if (!pf_text.empty()) {
    const auto values = parse_number_list(pf_text, "--pf");
    if (static_cast<Index>(values.size()) != data.n_blocks()) {
      throw UsageError("--pf needs one factor per block");
    }
    pf.pf = Eigen::Map<const Eigen::VectorXd>(
        values.data(), static_cast<Index>(values.size()));
  }

  const CvPlan plan = make_cv_plan(data, folds, args.seed);
  const std::vector<double> grid =
      grid_text.empty()
          ? default_lambda_grid(data, pf, args.alpha, args.solver.standardize)
          : parse_number_list(grid_text, "--grid");
  const LambdaSearch search = find_default_lambda(
      data, pf, args.alpha, grid, plan, args.solver, args.workers);

  std::ostringstream csv;
  csv << "lambda1,cv_deviance\n";
  for (std::size_t i = 0; i < search.grid.size(); ++i) {
    csv << format_double(search.grid[i]) << ','
        << format_double(search.deviance[i]) << '\n';
  }

  json manifest = base_manifest("find-lambda", args);
  manifest["parameters"]["folds"] = folds;
  manifest["parameters"]["pf"] =
      std::vector<double>(pf.pf.data(), pf.pf.data() + pf.pf.size());
  manifest["parameters"]["grid"] = search.grid;
  manifest["results"] = {{"lambda1", search.lambda1}};
  manifest["timing_seconds"] = timer.seconds();
  manifest["outputs"] = {args.out};

  AtomicOutputSet outputs;
  outputs.stage(args.out, csv.str());
  outputs.stage(manifest_path_for(args.out), manifest.dump(2) + "\n");
  outputs.commit();

  std::cout << "find-lambda: lambda1 = " << format_double(search.lambda1)
            << " -> " << args.out << "\n";
  return 0;
}

int run_adapt_pf(const CommonArgs& args, const std::string& type_step1,
                 int folds, double pf_cap) {
  Stopwatch timer;
  const MatchedDataset data = load_dataset(args);
  TentativeModel type;
  if (type_step1 == "separate") {
    type = TentativeModel::separate;
  } else if (type_step1 == "combined") {
    type = TentativeModel::combined;
  } else {
    throw UsageError("--type-step1 must be 'separate' or 'combined'");
  }

  const CvPlan plan = make_cv_plan(data, folds, args.seed);
  const PenaltyFactorsResult result = default_pf(
      data, args.alpha, type, plan, args.solver, pf_cap, args.workers);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  std::ostringstream csv;
  csv << "block,penalty_factor,mean_abs_coefficient\n";
  for (Index b = 0; b < data.n_blocks(); ++b) {
    csv << (b + 1) << ',' << format_double(result.pf.pf[b]) << ','
        << format_double(result.mean_abs_coef[b]) << '\n';
  }

  json manifest = base_manifest("adapt-pf", args);
  manifest["parameters"]["folds"] = folds;
  manifest["parameters"]["type_step1"] = type_step1;
  manifest["parameters"]["pf_cap"] = pf_cap;
  manifest["results"] = {
      {"pf", std::vector<double>(result.pf.pf.data(),
                                 result.pf.pf.data() + result.pf.pf.size())},
      {"lambda1", result.lambda1},
      {"warnings", result.warnings}};
  manifest["timing_seconds"] = timer.seconds();
  manifest["outputs"] = {args.out};

  AtomicOutputSet outputs;
  outputs.stage(args.out, csv.str());
  outputs.stage(manifest_path_for(args.out), manifest.dump(2) + "\n");
  outputs.commit();

  std::cout << "adapt-pf: pf = (";
  for (Index b = 0; b < result.pf.pf.size(); ++b) {
    std::cout << (b ? ", " : "") << format_double(result.pf.pf[b]);
  }
  std::cout << ") -> " << args.out << "\n";
  return 0;
}

int run_stabsel(const CommonArgs& args, const std::string& grid_text,
                const std::string& grid_file, int B, double threshold) {
  Stopwatch timer;
  const MatchedDataset data = load_dataset(args);

  StabilityConfig config;
  config.lambda_list = parse_lambda_grid(grid_text, grid_file, data.n_blocks());
  config.alpha = args.alpha;
  config.B = B;
  config.seed = args.seed;
  config.workers = args.workers;
  config.solver = args.solver;

  const StabilityResult result = stability_selection(data, config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  const std::vector<int> selected = select_variables(result, threshold);
  std::vector<std::uint8_t> selected_mask(
      static_cast<std::size_t>(data.n_covariates()), 0);
  for (int j : selected) selected_mask[static_cast<std::size_t>(j)] = 1;

  std::ostringstream csv;
  csv << "variable,block";
  for (std::size_t v = 0; v < config.lambda_list.size(); ++v) {
    csv << ",freq_" << (v + 1);
  }
  csv << ",selection_probability,selected\n";
  const auto block = data.block_of_column();
  for (Index j = 0; j < data.n_covariates(); ++j) {
    csv << data.column_names()[static_cast<std::size_t>(j)] << ','
        << block[static_cast<std::size_t>(j)] + 1;
    for (Index v = 0; v < result.per_grid_frequency.rows(); ++v) {
      csv << ',' << format_double(result.per_grid_frequency(v, j));
    }
    csv << ',' << format_double(result.selection_probability[j]) << ','
        << int(selected_mask[static_cast<std::size_t>(j)]) << '\n';
  }

  json lambda_rows = json::array();
  for (const auto& v : config.lambda_list) {
    lambda_rows.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  }
  json manifest = base_manifest("stabsel", args);
  manifest["parameters"]["B"] = B;
  manifest["parameters"]["threshold"] = threshold;
  manifest["parameters"]["lambda_list"] = lambda_rows;
  manifest["results"] = {{"fits_executed", result.total_fits},
                         {"fit_failures", result.total_failures},
                         {"selected", selected.size()},
                         {"warnings", result.warnings}};
  manifest["timing_seconds"] = timer.seconds();
  manifest["outputs"] = {args.out};

  AtomicOutputSet outputs;
  outputs.stage(args.out, csv.str());
  outputs.stage(manifest_path_for(args.out), manifest.dump(2) + "\n");
  outputs.commit();

  std::cout << "stabsel: " << result.total_fits << " fits, " << selected.size()
            << " variables at threshold " << format_double(threshold) << " -> "
            << args.out << "\n";
  return 0;
}

int run_simulate(const CommonArgs& args, std::vector<int> setting_ids,
                 int replicates, int B, double threshold,
                 const std::string& thresholds_text, int folds,
                 const std::string& type_step1) {
  Stopwatch timer;
  if (setting_ids.empty()) setting_ids = {1, 2, 3, 4, 5, 6};
  std::vector<SimulationSetting> settings;
  for (int id : setting_ids) settings.push_back(builtin_setting(id));

  StudyConfig config;
  config.B = B;
  config.alpha = args.alpha;
  config.n_folds = folds;
  config.threshold = threshold;
  config.workers = args.workers;
  config.solver = args.solver;
  if (type_step1 == "separate") {
    config.type_step1 = TentativeModel::separate;
  } else if (type_step1 != "combined") {
    throw UsageError("--type-step1 must be 'separate' or 'combined'");
  }

  const std::vector<double> thresholds =
      thresholds_text.empty()
          ? default_threshold_grid()
          : parse_number_list(thresholds_text, "--thresholds");

  const StudyReport report =
      run_study(settings, replicates, thresholds, config, args.seed);

  std::ostringstream table;
  table << "setting,power,fdr,replicates\n";
  for (const auto& s : report.settings) {
    table << setting_ids[static_cast<std::size_t>(s.setting - 1)] << ','
          << format_double(s.power) << ',' << format_double(s.fdr) << ','
          << s.replicates << '\n';
  }

  std::ostringstream sweep;
  sweep << "setting,threshold,power,fdr\n";
  for (const auto& s : report.settings) {
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      sweep << setting_ids[static_cast<std::size_t>(s.setting - 1)] << ','
            << format_double(thresholds[t]) << ','
            << format_double(s.sweep_power[t]) << ','
            << format_double(s.sweep_fdr[t]) << '\n';
    }
  }

  const fs::path out_dir = args.out.empty() ? fs::path(".") : fs::path(args.out);
  fs::create_directories(out_dir);

  int failures = 0;
  for (const auto& r : report.replicates) failures += r.failed ? 1 : 0;

  json manifest = base_manifest("simulate", args);
  manifest["parameters"]["settings"] = setting_ids;
  manifest["parameters"]["replicates"] = replicates;
  manifest["parameters"]["B"] = B;
  manifest["parameters"]["threshold"] = threshold;
  manifest["parameters"]["thresholds"] = thresholds;
  manifest["parameters"]["folds"] = folds;
  manifest["parameters"]["type_step1"] = type_step1;
  manifest["results"] = {{"replicate_failures", failures}};
  manifest["timing_seconds"] = timer.seconds();
  manifest["outputs"] = {(out_dir / "table1.csv").string(),
                         (out_dir / "sweep.csv").string()};

  AtomicOutputSet outputs;
  outputs.stage(out_dir / "table1.csv", table.str());
  outputs.stage(out_dir / "sweep.csv", sweep.str());
  outputs.stage(out_dir / "manifest.json", manifest.dump(2) + "\n");
  outputs.commit();

  std::cout << "simulate: " << settings.size() << " setting(s) x " << replicates
            << " replicate(s), " << failures << " failure(s) -> "
            << (out_dir / "table1.csv").string() << ", "
            << (out_dir / "sweep.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "penalized conditional logistic regression for matched case-control "
      "data: block elastic-net fitting, penalty tuning, stability selection "
      "and a simulation harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonArgs args;

  auto* fit = app.add_subcommand("fit", "fit one penalized model");
  add_common(fit, args);
  std::string lambda_text;
  fit->add_option("--lambda", lambda_text, "per-block penalty levels, e.g. 5,10")
      ->required();

  auto* validate_cmd = app.add_subcommand("validate", "check a dataset file");
  add_common(validate_cmd, args);

  auto* find_lambda = app.add_subcommand(
      "find-lambda", "choose the overall penalty level by cross-validation");
  add_common(find_lambda, args);
  std::string pf_text, grid_text;
  int folds = 5;
  find_lambda->add_option("--pf", pf_text, "penalty factors (default: all 1)");
  find_lambda->add_option("--grid", grid_text,
                          "lambda1 grid (default: 20-point geometric)");
  find_lambda->add_option("--folds", folds, "cross-validation folds")
      ->capture_default_str();

  auto* adapt_pf = app.add_subcommand(
      "adapt-pf", "data-adaptive penalty factors from tentative models");
  add_common(adapt_pf, args);
  std::string type_step1 = "combined";
  double pf_cap = 100.0;
  adapt_pf->add_option("--type-step1", type_step1, "separate | combined")
      ->capture_default_str();
  adapt_pf->add_option("--folds", folds, "cross-validation folds")
      ->capture_default_str();
  adapt_pf->add_option("--pf-cap", pf_cap, "cap for penalty factors")
      ->capture_default_str();

  auto* stabsel = app.add_subcommand(
      "stabsel", "stability selection over a grid of penalty vectors");
  add_common(stabsel, args);
  std::string stab_grid_text, stab_grid_file;
  int B = 100;
  double threshold = 0.55;
  stabsel->add_option("--lambda-grid", stab_grid_text,
                      "semicolon-separated penalty vectors, e.g. \"5,1;5,2\"");
  stabsel->add_option("--lambda-grid-file", stab_grid_file,
                      "CSV with one penalty vector per row");
  stabsel->add_option("--B", B, "complementary pairs per penalty vector")
      ->capture_default_str();
  stabsel->add_option("--threshold", threshold, "selection threshold")
      ->capture_default_str();

  auto* simulate = app.add_subcommand(
      "simulate", "run the built-in synthetic selection study");
  add_common(simulate, args, /*needs_data=*/false);
  std::vector<int> setting_ids;
  int replicates = 20;
  int sim_B = 50;
  double sim_threshold = 0.55;
  std::string thresholds_text, sim_type_step1 = "combined";
  int sim_folds = 5;
  simulate->add_option("--setting", setting_ids,
                       "setting numbers 1..6 (default: all)")
      ->delimiter(',');
  simulate->add_option("--replicates", replicates, "replicates per setting")
      ->capture_default_str();
  simulate->add_option("--B", sim_B, "complementary pairs per penalty vector")
      ->capture_default_str();
  simulate->add_option("--threshold", sim_threshold, "headline threshold")
      ->capture_default_str();
  simulate->add_option("--thresholds", thresholds_text,
                       "sweep grid (default 0.55..0.90 step 0.05)");
  simulate->add_option("--folds", sim_folds, "cross-validation folds")
      ->capture_default_str();
  simulate->add_option("--type-step1", sim_type_step1, "separate | combined")
      ->capture_default_str();

  try {
    std::vector<std::string> cli_args(argv + 1, argv + argc);
    apply_config_file(cli_args);
    std::reverse(cli_args.begin(), cli_args.end());
    app.parse(std::move(cli_args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(fit)) {
      if (args.out.empty()) args.out = "coefficients.csv";
      return run_fit(args, lambda_text);
    }
    if (app.got_subcommand(validate_cmd)) {
      return run_validate(args);
    }
    if (app.got_subcommand(find_lambda)) {
      if (args.out.empty()) args.out = "cv_deviance.csv";
      return run_find_lambda(args, pf_text, grid_text, folds);
    }
    if (app.got_subcommand(adapt_pf)) {
      if (args.out.empty()) args.out = "penalty_factors.csv";
      return run_adapt_pf(args, type_step1, folds, pf_cap);
    }
    if (app.got_subcommand(stabsel)) {
      if (args.out.empty()) args.out = "stability.csv";
      return run_stabsel(args, stab_grid_text, stab_grid_file, B, threshold);
    }
    if (app.got_subcommand(simulate)) {
      return run_simulate(args, setting_ids, replicates, sim_B, sim_threshold,
                          thresholds_text, sim_folds, sim_type_step1);
    }
    throw UsageError("no subcommand selected");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
