#include "tpdsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <memory>
#include <thread>

#include "json.hpp"
#include "tpdsim/analytic.hpp"
#include "tpdsim/csvio.hpp"

namespace tpdsim {

namespace {

using nlohmann::json;

struct Knob {
  bool targets_alpha;
  bool inverse;       // value is 1/kappa
  bool is_sigma;      // Gaussian width vs exponential rate
};

Knob parse_knob(const std::string& param, const std::string& path) {
  if (param == "sigma_alpha") return {true, false, true};
  if (param == "sigma_beta") return {false, false, true};
  if (param == "kappa_alpha") return {true, false, false};
  if (param == "kappa_beta") return {false, false, false};
  if (param == "inv_kappa_beta") return {false, true, false};
  throw ConfigError(path + ": unknown sweep parameter '" + param + "'");
}

void check_shape(const Knob& k, const std::string& shape,
                 const std::string& path) {
  if (shape != "gaussian" && shape != "exponential")
    throw ConfigError(path + ": unknown pulse shape '" + shape + "'");
  if (k.is_sigma != (shape == "gaussian"))
    throw ConfigError(path + ": parameter does not match the pulse shape '" +
                      shape + "'");
}

std::unique_ptr<Pulse> make_pulse(const std::string& shape, double knob,
                                  bool inverse, double ref) {
  if (shape == "gaussian") return std::make_unique<GaussianPulse>(knob, ref);
  return std::make_unique<ExponentialPulse>(inverse ? 1.0 / knob : knob, ref);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

SweepRow eval_point(const SweepConfig& cfg, const Knob& k1, const Knob& k2,
                    double p1, double p2, double delay) {
  SweepRow row;
  row.p1 = p1;
  row.p2 = p2;
  row.delay = delay;
  try {
    const double alpha_knob = k1.targets_alpha ? p1 : p2;
    const double beta_knob = k1.targets_alpha ? p2 : p1;
    const bool beta_inverse = k1.targets_alpha ? k2.inverse : k1.inverse;
    const auto pa = make_pulse(cfg.alpha_shape, alpha_knob, false, 0.0);
    const auto pb = make_pulse(cfg.beta_shape, beta_knob, beta_inverse, delay);
    const OverlapResult r = p_overlap(*pa, *pb, cfg.params);
    row.pa = r.pa;
    row.pb = r.pb;
    row.overlap = r.overlap;
    row.rho2424 = r.rho2424;
  } catch (const std::exception& e) {
    row.error = sanitize(e.what());
  }
  return row;
}

unsigned worker_count(std::size_t points) {
  unsigned n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("TPDSIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  n = std::max(1u, n);
  return static_cast<unsigned>(
      std::min<std::size_t>(n, std::max<std::size_t>(1, points)));
}

double get_number(const json& j, const std::string& path, double fallback,
                  bool required = false) {
  if (!j.contains(path)) {
    if (required) throw ConfigError(path + ": missing required field");
    return fallback;
  }
  if (!j.at(path).is_number())
    throw ConfigError(path + ": expected a number");
  return j.at(path).get<double>();
}

}  // namespace

SweepConfig sweep_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("json: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");

  SweepConfig cfg;
  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_object()) throw ConfigError("params: expected an object");
    cfg.params.gamma1 = get_number(p, "gamma1", 1.0);
    cfg.params.gamma2 = get_number(p, "gamma2", 1.0);
    cfg.params.gamma3 = get_number(p, "gamma3", 1.0);
    cfg.params.gamma4 = get_number(p, "gamma4", 1.0);
    try {
      cfg.params.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("params: ") + e.what());
    }
  }
  if (j.contains("alpha_shape")) cfg.alpha_shape = j.at("alpha_shape").get<std::string>();
  if (j.contains("beta_shape")) cfg.beta_shape = j.at("beta_shape").get<std::string>();

  auto parse_axis = [&](const std::string& key) {
    if (!j.contains(key)) throw ConfigError(key + ": missing required field");
    const json& a = j.at(key);
    if (!a.is_object() || !a.contains("param") || !a.contains("values"))
      throw ConfigError(key + ": expected {param, values}");
    SweepAxis axis;
    axis.param = a.at("param").get<std::string>();
    if (!a.at("values").is_array() || a.at("values").empty())
      throw ConfigError(key + ".values: must be a nonempty array");
    for (const json& v : a.at("values")) {
      if (!v.is_number()) throw ConfigError(key + ".values: expected numbers");
      axis.values.push_back(v.get<double>());
    }
    return axis;
  };
  cfg.axis1 = parse_axis("axis1");
  cfg.axis2 = parse_axis("axis2");

  if (!j.contains("delays") || !j.at("delays").is_array() ||
      j.at("delays").empty())
    throw ConfigError("delays: must be a nonempty array");
  for (const json& v : j.at("delays")) {
    if (!v.is_number()) throw ConfigError("delays: expected numbers");
    cfg.delays.push_back(v.get<double>());
  }
  if (j.contains("quantity")) cfg.quantity = j.at("quantity").get<std::string>();
  static const char* kQuantities[] = {"p_alpha",      "p_beta", "p_overlap",
                                      "rho2424_inf",  "F2_inf", "F4_inf"};
  if (std::find_if(std::begin(kQuantities), std::end(kQuantities),
                   [&](const char* q) { return cfg.quantity == q; }) ==
      std::end(kQuantities))
    throw ConfigError("quantity: unknown value '" + cfg.quantity + "'");

  // Surface knob/shape mismatches at parse time.
  const Knob k1 = parse_knob(cfg.axis1.param, "axis1.param");
  const Knob k2 = parse_knob(cfg.axis2.param, "axis2.param");
  if (k1.targets_alpha == k2.targets_alpha)
    throw ConfigError("axis2.param: both axes address the same pulse");
  check_shape(k1, k1.targets_alpha ? cfg.alpha_shape : cfg.beta_shape,
              "axis1.param");
  check_shape(k2, k2.targets_alpha ? cfg.alpha_shape : cfg.beta_shape,
              "axis2.param");
  return cfg;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  const Knob k1 = parse_knob(cfg.axis1.param, "axis1.param");
  const Knob k2 = parse_knob(cfg.axis2.param, "axis2.param");
  if (k1.targets_alpha == k2.targets_alpha)
    throw ConfigError("axis2.param: both axes address the same pulse");
  check_shape(k1, k1.targets_alpha ? cfg.alpha_shape : cfg.beta_shape,
              "axis1.param");
  check_shape(k2, k2.targets_alpha ? cfg.alpha_shape : cfg.beta_shape,
              "axis2.param");
  if (cfg.axis1.values.empty() || cfg.axis2.values.empty() ||
      cfg.delays.empty())
    throw ConfigError("axes and delays must be nonempty");
  cfg.params.validate();

  struct Point {
    double p1, p2, d;
  };
  std::vector<Point> points;
  points.reserve(cfg.axis1.values.size() * cfg.axis2.values.size() *
                 cfg.delays.size());
  for (double p1 : cfg.axis1.values)
    for (double p2 : cfg.axis2.values)
      for (double d : cfg.delays) points.push_back({p1, p2, d});

  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      rows[i] = eval_point(cfg, k1, k2, points[i].p1, points[i].p2, points[i].d);
    }
  };
  const unsigned nthreads = worker_count(points.size());
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  return rows;
}

std::string sweep_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  const std::size_t expected = cfg.axis1.values.size() *
                               cfg.axis2.values.size() * cfg.delays.size();
  if (rows.size() != expected)
    throw std::invalid_argument("sweep row count does not match the config");
  CsvWriter w({"param1", "param2", "delay", "p_alpha", "p_beta", "p_overlap",
               "rho2424_inf", "error"});
  for (const SweepRow& r : rows) {
    w.add_row({format_number(r.p1), format_number(r.p2), format_number(r.delay),
               format_number(r.pa), format_number(r.pb),
               format_number(r.overlap), format_number(r.rho2424), r.error});
  }
  return w.str();
}

double sweep_quantity(const SweepRow& row, const std::string& quantity) {
  if (quantity == "p_alpha") return row.pa;
  if (quantity == "p_beta") return row.pb;
  if (quantity == "p_overlap") return row.overlap;
  if (quantity == "rho2424_inf" || quantity == "F4_inf") return row.rho2424;
  if (quantity == "F2_inf") return row.pa - row.rho2424;
  throw ConfigError("quantity: unknown value '" + quantity + "'");
}

}  // namespace tpdsim
