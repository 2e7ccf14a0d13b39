#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpdsim/bridge.hpp"
#include "tpdsim/gdm.hpp"
#include "tpdsim/liouvillian.hpp"
#include "tpdsim/model.hpp"
#include "tpdsim/pulses.hpp"

namespace tpdsim {

enum class Engine { kGdm, kLiouvillian, kAnalytic, kAll };
Engine engine_from_string(const std::string& s);  // throws on unknown

// A runnable configuration: molecule, the two pulses, engine selection and
// integration overrides. Named figure scenarios (fig2, fig3, fig5, fig6_7,
// fig8, fig9) are built in and immutable; `kind` tags the ones that expand
// into parameter tables rather than a single trajectory.
struct Scenario {
  std::string name = "custom";
  std::string kind = "single";  // single | delay_table | width_table |
                                // mixed_table | kappa2_curves
  MoleculeParams params;
  std::unique_ptr<Pulse> pulse_alpha;
  std::unique_ptr<Pulse> pulse_beta;
  Engine engine = Engine::kGdm;
  double dt = 0.0;
  double t_end = 0.0;
  bool write_trajectory = true;
  bool write_gnuplot = false;

  // table-scenario payloads
  std::vector<double> delays;            // fig5, fig8, fig9
  std::vector<double> sigmas;            // fig8 grid (both axes)
  std::vector<double> sigma_alpha;       // fig9 first axis
  std::vector<double> inv_kappa_beta;    // fig9 second axis
  std::vector<double> kappa2_values;     // fig6_7 curves

  Scenario clone() const;
};

bool is_named_scenario(const std::string& name);
Scenario named_scenario(const std::string& name);  // throws on unknown name

// A concrete pulse pair standing in for the scenario when one trajectory is
// needed (formalism cross-validation, flux accounting): single scenarios use
// their own pulses, table scenarios pick the median grid point.
struct PulsePair {
  std::unique_ptr<Pulse> alpha;
  std::unique_ptr<Pulse> beta;
};
PulsePair representative_pulses(const Scenario& sc);

// Parse a scenario config (JSON text; schema documented in the README).
// Throws ConfigError with a field path on schema violations.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};
Scenario scenario_from_json(const std::string& json_text);

struct RunResult {
  std::string name;
  std::map<std::string, double> values;      // steady quantities
  std::vector<std::string> notes;            // documented caveats
  std::vector<std::string> files;            // CSVs written
  std::optional<EquivalenceReport> equivalence;   // engine == all
  std::optional<FluxBalanceReport> flux;          // engines with liouvillian
};

// Executes the scenario, writing CSV artifacts into out_dir (empty = no
// files). Throws std::runtime_error on numerical failure.
RunResult run_scenario(const Scenario& sc, const std::string& out_dir);

}  // namespace tpdsim
