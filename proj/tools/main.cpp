// Command-line front end: scenario runner, parameter sweeps, measurement
// operator spectra, and the cross-formalism validator.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <filesystem>

#include "CLI11.hpp"
#include "json.hpp"
#include "tpdsim/analytic.hpp"
#include "tpdsim/bridge.hpp"
#include "tpdsim/csvio.hpp"
#include "tpdsim/povm.hpp"
#include "tpdsim/scenarios.hpp"
#include "tpdsim/sweep.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tpdsim::ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join_path(const std::string& dir, const std::string& file) {
  if (dir.empty()) return file;
  if (dir.back() == '/') return dir + file;
  return dir + "/" + file;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

tpdsim::Scenario load_scenario(const std::string& target) {
  if (tpdsim::is_named_scenario(target)) return tpdsim::named_scenario(target);
  return tpdsim::scenario_from_json(read_file(target));
}

int cmd_run(const std::string& target, const std::string& out_dir) {
  const tpdsim::Scenario sc = load_scenario(target);
  const tpdsim::RunResult res = tpdsim::run_scenario(sc, out_dir);
  std::printf("scenario %s\n", res.name.c_str());
  for (const auto& [key, value] : res.values)
    std::printf("  %-28s %s\n", key.c_str(),
                tpdsim::format_number(value).c_str());
  if (res.flux) {
    std::printf("  flux residuals: %s %s %s %s (%s)\n",
                tpdsim::format_number(res.flux->residual[0]).c_str(),
                tpdsim::format_number(res.flux->residual[1]).c_str(),
                tpdsim::format_number(res.flux->residual[2]).c_str(),
                tpdsim::format_number(res.flux->residual[3]).c_str(),
                res.flux->pass ? "ok" : "VIOLATED");
  }
  if (res.equivalence) {
    std::printf("  formalism deviation: %s (label %s, t = %s)\n",
                tpdsim::format_number(res.equivalence->worst).c_str(),
                res.equivalence->worst_label.c_str(),
                tpdsim::format_number(res.equivalence->worst_time).c_str());
  }
  for (const std::string& n : res.notes) std::printf("  note: %s\n", n.c_str());
  for (const std::string& f : res.files) std::printf("  wrote %s\n", f.c_str());
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& out_dir) {
  const tpdsim::SweepConfig cfg = tpdsim::sweep_from_json(read_file(path));
  const std::vector<tpdsim::SweepRow> rows = tpdsim::run_sweep(cfg);
  const std::string out = join_path(out_dir, "sweep.csv");
  write_text(out, tpdsim::sweep_csv(cfg, rows));
  int failures = 0;
  for (const tpdsim::SweepRow& r : rows)
    if (!r.error.empty()) ++failures;
  std::printf("sweep: %zu points, %d failed\n", rows.size(), failures);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_povm(const std::string& path, const std::string& out_dir) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw tpdsim::ConfigError(std::string("json: ") + e.what());
  }
  if (!j.is_object()) throw tpdsim::ConfigError("config: expected a JSON object");

  tpdsim::MoleculeParams params;
  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_object()) throw tpdsim::ConfigError("params: expected an object");
    params.gamma1 = p.value("gamma1", 1.0);
    params.gamma2 = p.value("gamma2", 1.0);
    params.gamma3 = p.value("gamma3", 1.0);
    params.gamma4 = p.value("gamma4", 1.0);
    try {
      params.validate();
    } catch (const std::exception& e) {
      throw tpdsim::ConfigError(std::string("params: ") + e.what());
    }
  }
  if (!j.contains("window") || !j.at("window").is_object())
    throw tpdsim::ConfigError("window: missing required object");
  const json& w = j.at("window");
  const double t0 = w.value("t0", 0.0);
  if (!w.contains("t_end"))
    throw tpdsim::ConfigError("window.t_end: missing required field");
  const double t_end = w.at("t_end").get<double>();
  if (!w.contains("n") || !w.at("n").is_number_integer())
    throw tpdsim::ConfigError("window.n: missing required integer");
  const int n = w.at("n").get<int>();
  const int order = j.value("order", 1);
  if (order != 1 && order != 2)
    throw tpdsim::ConfigError("order: must be 1 or 2");
  if (order == 2 && n > 64)
    throw tpdsim::ConfigError("window.n: dense two-photon spectra need n <= 64");

  tpdsim::TimeGrid grid;
  try {
    grid = tpdsim::TimeGrid::make(t0, t_end, n);
  } catch (const std::invalid_argument& e) {
    throw tpdsim::ConfigError(std::string("window: ") + e.what());
  }

  Eigen::MatrixXd op;
  if (order == 1) {
    const tpdsim::Povm1 pi1 = tpdsim::build_pi1(grid, params);
    const double closed = tpdsim::trace_pi1_closed_form(
        t_end - t0, params.gamma1, params.gamma2);
    std::printf("one-photon operator on %d samples, dt = %s\n", grid.n,
                tpdsim::format_number(grid.dt).c_str());
    std::printf("  trace          %s\n",
                tpdsim::format_number(pi1.trace()).c_str());
    std::printf("  trace (closed) %s\n", tpdsim::format_number(closed).c_str());
    op = pi1.op();
  } else {
    const tpdsim::Povm2 pi2 = tpdsim::build_pi2(grid, params);
    std::printf("two-photon operator on %d samples, %zu ordered-pair terms\n",
                grid.n, pi2.terms.size());
    op = tpdsim::dense_pi2_operator(pi2);  // grid size capped upstream
  }

  const tpdsim::EigenDecomposition eig = tpdsim::eigendecompose(op);
  std::printf("  lambda_max     %s\n",
              tpdsim::format_number(eig.values(0)).c_str());
  tpdsim::CsvWriter csv({"index", "eigenvalue"});
  for (int i = 0; i < eig.values.size(); ++i)
    csv.add_numeric_row({static_cast<double>(i), eig.values(i)});
  const std::string out = join_path(
      out_dir, order == 1 ? "povm1_eigenvalues.csv" : "povm2_eigenvalues.csv");
  csv.write(out);
  std::printf("wrote %s\n", out.c_str());

  // Amplitudes of the best-detected input state on the sampling grid.
  tpdsim::CsvWriter amp({"t", "amplitude"});
  for (int i = 0; i < grid.n && order == 1; ++i)
    amp.add_numeric_row({grid.s[i], eig.vectors(i, 0)});
  if (order == 1) {
    const std::string state_out = join_path(out_dir, "povm1_best_state.csv");
    amp.write(state_out);
    std::printf("wrote %s\n", state_out.c_str());
  }
  return 0;
}

int cmd_validate(const std::string& target) {
  const tpdsim::Scenario sc = load_scenario(target);
  const tpdsim::PulsePair pulses = tpdsim::representative_pulses(sc);
  const tpdsim::EquivalenceReport rep = tpdsim::run_equivalence(
      *pulses.alpha, *pulses.beta, sc.params, sc.t_end, sc.dt);
  std::printf("cross-formalism check for %s (%d sampled times)\n",
              sc.name.c_str(), rep.samples);
  std::printf("  initial trace check: %s\n",
              rep.trace_check_passed ? "ok" : "FAILED");
  for (int k = 0; k < tpdsim::kGdmLabels; ++k)
    std::printf("  label %-6s max deviation %s\n", tpdsim::kGdmLabelNames[k],
                tpdsim::format_number(rep.per_label_max[k]).c_str());
  std::printf("  worst %s at label %s, t = %s\n",
              tpdsim::format_number(rep.worst).c_str(),
              rep.worst_label.c_str(),
              tpdsim::format_number(rep.worst_time).c_str());
  const bool ok = rep.trace_check_passed && rep.worst < 1e-5;
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  if (!ok) throw std::runtime_error("formalism deviation exceeds 1e-5");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"five-level single-molecule two-photon detector simulator"};
  app.require_subcommand(1);

  std::string run_target, sweep_path, povm_path, validate_target;
  std::string out_dir = ".";

  CLI::App* run = app.add_subcommand(
      "run", "run a named scenario (fig2, fig3, fig5, fig6_7, fig8, fig9) or "
             "a JSON scenario config");
  run->add_option("target", run_target, "scenario name or config path")
      ->required();
  run->add_option("--out", out_dir, "directory for CSV artifacts");

  CLI::App* sweep =
      app.add_subcommand("sweep", "evaluate a two-axis x delay parameter sweep");
  sweep->add_option("config", sweep_path, "sweep config path")->required();
  sweep->add_option("--out", out_dir, "directory for CSV artifacts");

  CLI::App* povm = app.add_subcommand(
      "povm", "build a detection operator and write its spectrum");
  povm->add_option("config", povm_path, "operator config path")->required();
  povm->add_option("--out", out_dir, "directory for CSV artifacts");

  CLI::App* validate = app.add_subcommand(
      "validate", "cross-check the two formalisms on a scenario");
  validate->add_option("target", validate_target, "scenario name or config path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are config errors
  }

  try {
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    if (run->parsed()) return cmd_run(run_target, out_dir);
    if (sweep->parsed()) return cmd_sweep(sweep_path, out_dir);
    if (povm->parsed()) return cmd_povm(povm_path, out_dir);
    if (validate->parsed()) return cmd_validate(validate_target);
  } catch (const tpdsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
