#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "qheng/cycles.hpp"
#include "qheng/demon.hpp"
#include "qheng/errors.hpp"
#include "qheng/limits.hpp"

namespace qheng::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kCommands = {"carnot", "otto",  "compare", "limit-carnot", "limit-otto",
                                            "demon",  "swap", "sweep",   "entropy-balance"};

const std::map<std::string, std::vector<std::string>> kSweepKeys = {
    {"carnot", {"th", "tl", "za", "zb", "param", "lambda"}},
    {"otto", {"th", "tl", "dh", "dl"}},
    {"compare", {"th", "tl", "ph", "pl"}},
    {"demon", {"ds", "dd", "ts", "td", "theta"}},
    {"swap", {"ds", "dd", "ts", "td"}},
    {"entropy-balance", {"gap", "t-start", "t-end"}},
};

double* numeric_field(RunConfig& c, const std::string& key) {
  static const std::map<std::string, double RunConfig::*> fields = {
      {"th", &RunConfig::th},     {"tl", &RunConfig::tl},       {"za", &RunConfig::za},
      {"zb", &RunConfig::zb},     {"param", &RunConfig::param}, {"dh", &RunConfig::dh},
      {"dl", &RunConfig::dl},     {"ph", &RunConfig::ph},       {"pl", &RunConfig::pl},
      {"ds", &RunConfig::ds},     {"dd", &RunConfig::dd},       {"ts", &RunConfig::ts},
      {"td", &RunConfig::td},     {"theta", &RunConfig::theta}, {"gap", &RunConfig::gap},
      {"t-start", &RunConfig::t_start}, {"t-end", &RunConfig::t_end},
  };
  const auto it = fields.find(key);
  return it == fields.end() ? nullptr : &(c.*(it->second));
}

void set_numeric(RunConfig& c, const std::string& key, double v) {
  if (key == "lambda") {
    c.lambda = v;
    return;
  }
  double* f = numeric_field(c, key);
  if (!f) throw UsageError("--grid: unknown key '" + key + "'");
  *f = v;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char ch) { return std::isspace(ch) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

GridAxis parse_grid_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--grid: expected key=start:stop:count, got '" + text + "'");
  GridAxis axis;
  axis.key = trim(text.substr(0, eq));
  std::string rest = text.substr(eq + 1);
  std::vector<std::string> parts;
  std::stringstream ss(rest);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(trim(part));
  if (parts.size() != 3) throw UsageError("--grid: expected key=start:stop:count, got '" + text + "'");
  try {
    std::size_t used = 0;
    axis.start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("start");
    axis.stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("stop");
    const long long count = std::stoll(parts[2], &used);
    if (used != parts[2].size() || count < 0) throw std::invalid_argument("count");
    axis.count = static_cast<std::size_t>(count);
  } catch (const std::exception&) {
    throw UsageError("--grid: malformed axis '" + text + "'");
  }
  if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) throw UsageError("--grid: non-finite bounds in '" + text + "'");
  return axis;
}

// --- validation ---------------------------------------------------------------

std::optional<std::string> positive(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) return std::string("--") + key + " must be positive and finite (got " + format_double(v) + ")";
  return std::nullopt;
}

template <class... Checks>
std::optional<std::string> first_of(Checks... checks) {
  std::optional<std::string> out;
  ((out = out ? out : checks), ...);
  return out;
}

std::optional<std::string> validate_substance(const RunConfig& c) {
  const auto family = parse_family(c.substance);
  if (!family) return "--substance must be one of tls, ho, isw, custom (got '" + c.substance + "')";
  if (*family == Family::Custom) {
    if (c.custom_levels.size() < 2) return std::string("--custom-levels needs at least 2 levels for --substance custom");
    if (c.custom_levels.front() != 0.0) return std::string("--custom-levels must start at 0");
    for (std::size_t i = 1; i < c.custom_levels.size(); ++i)
      if (!(c.custom_levels[i] >= c.custom_levels[i - 1])) return std::string("--custom-levels must be nondecreasing");
  }
  if (c.levels == 1) return std::string("--levels must be 0 (adaptive) or >= 2");
  return std::nullopt;
}

std::optional<std::string> validate_probabilities(const RunConfig& c) {
  if (!(c.pl > 0.0 && c.pl < 0.5)) return "--pl must lie in (0, 0.5) (got " + format_double(c.pl) + ")";
  if (!(c.ph > 0.0 && c.ph < 0.5)) return "--ph must lie in (0, 0.5) (got " + format_double(c.ph) + ")";
  if (c.pl > c.ph) return std::string("--pl must not exceed --ph");
  if (!(c.th > c.tl)) return std::string("--th must exceed --tl");
  return std::nullopt;
}

std::optional<std::string> validate_command(const RunConfig& c, const std::string& command) {
  if (command == "carnot") {
    if (auto e = first_of(validate_substance(c), positive(c.th, "th"), positive(c.tl, "tl"), positive(c.za, "za"),
                          positive(c.zb, "zb"), positive(c.param, "param")))
      return e;
    if (c.za == c.zb) return std::string("--za and --zb must differ (degenerate cycle)");
    if (c.za < c.zb) return std::string("--za must exceed --zb (the hot isotherm lowers the gaps)");
    if (c.lambda && !(*c.lambda > 0.0)) return std::string("--lambda must be positive");
    if (c.steps == 0) return std::string("--steps must be >= 1");
    return std::nullopt;
  }
  if (command == "otto") {
    if (auto e = first_of(validate_substance(c), positive(c.th, "th"), positive(c.tl, "tl"), positive(c.dh, "dh"),
                          positive(c.dl, "dl")))
      return e;
    return std::nullopt;
  }
  if (command == "compare" || command == "limit-carnot") {
    if (auto e = first_of(positive(c.th, "th"), positive(c.tl, "tl"), validate_probabilities(c))) return e;
    if (command == "limit-carnot" && (c.n.empty() || std::count(c.n.begin(), c.n.end(), std::size_t{0})))
      return std::string("--n entries must be >= 1");
    if (command == "compare" && c.steps == 0) return std::string("--steps must be >= 1");
    return std::nullopt;
  }
  if (command == "limit-otto") {
    if (auto e = first_of(positive(c.th, "th"), positive(c.tl, "tl"), positive(c.dh, "dh"), positive(c.dl, "dl")))
      return e;
    if (c.dh < c.dl) return std::string("--dh must be >= --dl");
    if (c.n.empty() || std::count(c.n.begin(), c.n.end(), std::size_t{0})) return std::string("--n entries must be >= 1");
    return std::nullopt;
  }
  if (command == "demon" || command == "swap") {
    if (auto e = first_of(positive(c.ds, "ds"), positive(c.dd, "dd"), positive(c.ts, "ts"), positive(c.td, "td"))) return e;
    if (command == "demon" && !(c.theta >= 0.0 && c.theta <= std::numbers::pi))
      return "--theta must lie in [0, pi] (got " + format_double(c.theta) + ")";
    return std::nullopt;
  }
  if (command == "entropy-balance") {
    if (auto e = first_of(positive(c.gap, "gap"), positive(c.t_start, "t-start"), positive(c.t_end, "t-end"),
                          positive(c.tol, "tol")))
      return e;
    if (c.t_end < c.t_start) return std::string("--t-end must be >= --t-start");
    return std::nullopt;
  }
  return "unknown command '" + command + "'";
}

// --- single-run tables ----------------------------------------------------------

Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

Substance make_substance(const RunConfig& c, double param) {
  Substance s;
  s.family = *parse_family(c.substance);
  s.param = param;
  s.n_levels = c.levels;
  s.custom_levels = c.custom_levels;
  return s;
}

const std::vector<std::string> kCarnotColumns = {
    "substance", "param", "T_h", "T_l", "zeta_a", "zeta_b", "lambda", "steps", "n_levels", "W_net", "Q_in",
    "Q_out", "efficiency", "carnot_efficiency", "gap_ratio_efficiency", "positive_work", "pwc", "reversibility_ok",
    "closed_form_W", "closed_form_gap", "closed_form_W_gaussian", "closure_error", "max_quadrature_error",
    "truncation_capped"};

Row carnot_row(const RunConfig& c) {
  const CarnotSpec spec{make_substance(c, c.param), c.th, c.tl, c.za, c.zb};
  const double lambda = c.lambda.value_or(c.tl / c.th);
  const CycleReport r = c.lambda ? run_carnot_diagnostic(spec, lambda, c.steps) : run_carnot(spec, c.steps);
  double qerr = 0.0;
  for (const StrokeRecord& s : r.strokes)
    if (s.quadrature_error) qerr = std::max(qerr, *s.quadrature_error);
  return {c.substance, c.param, c.th, c.tl, c.za, c.zb, lambda, static_cast<std::int64_t>(c.steps),
          static_cast<std::int64_t>(r.n_levels), r.W_net, r.Q_in, r.Q_out, opt(r.efficiency), 1.0 - c.tl / c.th,
          opt(r.gap_ratio_efficiency), r.positive_work, positive_work_condition(spec), r.reversibility_ok.value_or(false),
          opt(r.closed_form_W), opt(r.closed_form_gap), opt(r.closed_form_W_gaussian), r.closure_error, qerr,
          r.truncation_capped};
}

const std::vector<std::string> kOttoColumns = {
    "substance", "param_h", "param_l", "alpha", "T_h", "T_l", "n_levels", "W_net", "Q_in", "Q_out", "efficiency",
    "otto_efficiency", "positive_work", "pwc", "closed_form_W", "closed_form_gap", "closed_form_W_gaussian", "T_A",
    "T_B", "T_C", "T_D", "closure_error", "truncation_capped"};

Row otto_row(const RunConfig& c) {
  const double alpha = c.dh / c.dl;
  const OttoSpec spec{make_substance(c, c.dl), c.th, c.tl, alpha};
  const CycleReport r = run_otto(spec);
  Row row{c.substance, c.dh, c.dl, alpha, c.th, c.tl, static_cast<std::int64_t>(r.n_levels), r.W_net, r.Q_in, r.Q_out,
          opt(r.efficiency), 1.0 - 1.0 / alpha, r.positive_work, positive_work_condition(spec), opt(r.closed_form_W),
          opt(r.closed_form_gap), opt(r.closed_form_W_gaussian)};
  for (int i = 0; i < 4; ++i) row.push_back(r.effective_temperatures ? Cell{(*r.effective_temperatures)[i]} : Cell{});
  row.push_back(r.closure_error);
  row.push_back(r.truncation_capped);
  return row;
}

const std::vector<std::string> kCompareColumns = {"T_h", "T_l", "p_h", "p_l", "delta_h", "delta_l", "W_C",
                                                  "W_C_quadrature", "W_O", "eta_C", "eta_O", "carnot_dominates"};

Row compare_row(const RunConfig& c) {
  const ComparisonReport r = compare_carnot_otto(c.th, c.tl, c.ph, c.pl, c.steps);
  return {c.th, c.tl, c.ph, c.pl, r.delta_h, r.delta_l, r.W_C, r.W_C_quadrature, r.W_O, r.eta_C, r.eta_O,
          r.carnot_dominates};
}

const std::vector<std::string> kLimitColumns = {"N",          "Q_in",        "Q_out",         "W",
                                                "eta",        "target_Q_in", "target_Q_out",  "target_W",
                                                "target_eta", "err_Q_in",    "err_Q_out",     "err_W",
                                                "err_eta",    "min_strip_eta", "max_strip_eta"};

Row limit_row(const DecompositionResult& r) {
  const bool strips = std::isfinite(r.min_strip_eta) && std::isfinite(r.max_strip_eta) && r.aggregate.Q_in > 0.0;
  return {static_cast<std::int64_t>(r.N), r.aggregate.Q_in, r.aggregate.Q_out, r.aggregate.W, r.aggregate.eta,
          r.target.Q_in, r.target.Q_out, r.target.W, r.target.eta, r.error.Q_in, r.error.Q_out, r.error.W, r.error.eta,
          strips ? Cell{r.min_strip_eta} : Cell{}, strips ? Cell{r.max_strip_eta} : Cell{}};
}

const std::vector<std::string> kDemonColumns = {
    "Delta_S", "Delta_D", "T_S", "T_D", "theta", "W_D", "W_S", "Q_in", "Q_out", "W", "eta", "S1", "S2", "S3", "S_M",
    "pwc", "positive_work", "P00", "P01", "P10", "P11", "W_D_printed", "eta_printed"};

Row demon_row(const RunConfig& c) {
  const DemonCycleReport r = demon_cycle(QubitSpec(c.ds, Bath(c.ts)), QubitSpec(c.dd, Bath(c.td)), c.theta);
  return {c.ds, c.dd, c.ts, c.td, c.theta, r.W_D, r.W_S, r.Q_in, r.Q_out, r.W, opt(r.eta), r.S1, r.S2, r.S3, r.S_M,
          r.pwc, r.positive_work, r.P[0], r.P[1], r.P[2], r.P[3], r.W_D_printed, opt(r.eta_printed)};
}

const std::vector<std::string> kSwapColumns = {"Delta_S", "Delta_D", "T_S", "T_D", "Q_in",
                                               "Q_out",   "W",       "eta", "pwc", "positive_work"};

Row swap_row(const RunConfig& c) {
  const CycleReport r = swap_engine(QubitSpec(c.ds, Bath(c.ts)), QubitSpec(c.dd, Bath(c.td)));
  return {c.ds, c.dd, c.ts, c.td, r.Q_in, r.Q_out, r.W_net, opt(r.efficiency), c.ts > c.ds / c.dd * c.td,
          r.positive_work};
}

const std::vector<std::string> kBalanceColumns = {"Delta", "T_start", "T_end", "tol", "dS_substance",
                                                  "dS_bath", "residual", "intervals"};

Row balance_row(const RunConfig& c) {
  const EntropyBalance r = entropy_balance(c.gap, c.t_start, c.t_end, c.tol);
  return {c.gap, c.t_start, c.t_end, c.tol, r.dS_substance, r.dS_bath, r.residual,
          static_cast<std::int64_t>(r.quadrature.intervals)};
}

struct Engine {
  const std::vector<std::string>* columns;
  Row (*row)(const RunConfig&);
};

Engine engine_for(const std::string& name) {
  if (name == "carnot") return {&kCarnotColumns, carnot_row};
  if (name == "otto") return {&kOttoColumns, otto_row};
  if (name == "compare") return {&kCompareColumns, compare_row};
  if (name == "demon") return {&kDemonColumns, demon_row};
  if (name == "swap") return {&kSwapColumns, swap_row};
  if (name == "entropy-balance") return {&kBalanceColumns, balance_row};
  throw UsageError("--engine: unsupported engine '" + name + "'");
}

// --- sweep ------------------------------------------------------------------------

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1p-53; }

std::vector<std::vector<double>> sweep_points(const RunConfig& c) {
  std::vector<std::vector<double>> points;
  if (c.grid.empty()) return points;
  if (c.random > 0) {
    std::mt19937_64 rng(c.seed);
    for (std::size_t k = 0; k < c.random; ++k) {
      std::vector<double> p;
      for (const GridAxis& a : c.grid) p.push_back(a.start + (a.stop - a.start) * unit_uniform(rng()));
      points.push_back(std::move(p));
    }
    return points;
  }
  std::size_t total = 1;
  for (const GridAxis& a : c.grid) total *= a.count;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> p(c.grid.size());
    std::size_t rem = idx;
    // last axis varies fastest
    for (std::size_t j = c.grid.size(); j-- > 0;) {
      const GridAxis& a = c.grid[j];
      const std::size_t k = rem % a.count;
      rem /= a.count;
      p[j] = a.count == 1 ? a.start
                          : a.start + (a.stop - a.start) * (static_cast<double>(k) / static_cast<double>(a.count - 1));
      if (a.count > 1 && k == a.count - 1) p[j] = a.stop;
    }
    points.push_back(std::move(p));
  }
  return points;
}

Table run_sweep(const RunConfig& c) {
  const Engine engine = engine_for(c.engine);
  Table t;
  t.command = "sweep";
  t.columns.push_back("index");
  for (const GridAxis& a : c.grid) t.columns.push_back("grid_" + a.key);
  t.columns.push_back("status");
  t.columns.insert(t.columns.end(), engine.columns->begin(), engine.columns->end());

  const std::vector<std::vector<double>> points = sweep_points(c);
  t.rows.resize(points.size());
  const std::size_t width = engine.columns->size();

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      RunConfig point = c;
      point.command = c.engine;
      Row row{static_cast<std::int64_t>(i)};
      for (std::size_t j = 0; j < c.grid.size(); ++j) {
        set_numeric(point, c.grid[j].key, points[i][j]);
        row.push_back(points[i][j]);
      }
      Row result;
      std::string status = "ok";
      if (auto problem = validate_command(point, c.engine)) {
        status = "invalid: " + *problem;
      } else {
        try {
          result = engine.row(point);
        } catch (const std::exception& e) {
          status = std::string("error: ") + e.what();
          result.clear();
        }
      }
      result.resize(width);
      row.push_back(status);
      row.insert(row.end(), result.begin(), result.end());
      t.rows[i] = std::move(row);
    }
  };

  const std::size_t workers = worker_count(points.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  return t;
}

// --- parsing ----------------------------------------------------------------------

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

bool flag_given(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config: missing file name");
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

void add_substance_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--substance", c.substance, "tls | ho | isw | custom")->capture_default_str();
  sub->add_option("--levels", c.levels, "level count for ho/isw, 0 = adaptive")->capture_default_str();
  sub->add_option("--custom-levels", c.custom_levels, "explicit levels for --substance custom")->delimiter(',');
}

void add_output_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--out", c.out, "output path (default stdout)");
  sub->add_option("--config", "flat key = value file; flags take precedence");
}

void bind_command(CLI::App* sub, RunConfig& c, std::vector<std::string>& grid_text) {
  const std::string& cmd = c.command;
  const auto temps = [&](double th, double tl) {
    c.th = th;
    c.tl = tl;
    sub->add_option("--th", c.th, "hot bath temperature")->capture_default_str();
    sub->add_option("--tl", c.tl, "cold bath temperature")->capture_default_str();
  };
  const auto qubits = [&] {
    sub->add_option("--ds", c.ds, "system gap")->capture_default_str();
    sub->add_option("--dd", c.dd, "demon gap")->capture_default_str();
    sub->add_option("--ts", c.ts, "system bath temperature")->capture_default_str();
    sub->add_option("--td", c.td, "demon bath temperature")->capture_default_str();
  };
  const auto ns = [&] { sub->add_option("--n", c.n, "strip counts")->delimiter(',')->capture_default_str(); };

  if (cmd == "carnot" || cmd == "sweep") {
    if (cmd == "carnot") add_substance_options(sub, c);
    temps(2.0, 1.0);
    sub->add_option("--param", c.param, "family parameter at scale 1")->capture_default_str();
    sub->add_option("--za", c.za, "scale at the start of the hot isotherm")->capture_default_str();
    sub->add_option("--zb", c.zb, "scale at the end of the hot isotherm")->capture_default_str();
    sub->add_option("--steps", c.steps, "isotherm discretization steps")->capture_default_str();
    sub->add_option_function<double>("--lambda", [&c](double v) { c.lambda = v; }, "diagnostic adiabatic ratio");
  }
  if (cmd == "otto" || cmd == "sweep") {
    if (cmd == "otto") {
      add_substance_options(sub, c);
      temps(4.0, 1.0);
    }
    sub->add_option("--dh", c.dh, "hot family parameter")->capture_default_str();
    sub->add_option("--dl", c.dl, "cold family parameter")->capture_default_str();
  }
  if (cmd == "compare" || cmd == "limit-carnot" || cmd == "sweep") {
    if (cmd != "sweep") temps(2.0, 1.0);
    sub->add_option("--ph", c.ph, "excited population on the hot side")->capture_default_str();
    sub->add_option("--pl", c.pl, "excited population on the cold side")->capture_default_str();
    if (cmd == "compare") sub->add_option("--steps", c.steps, "isotherm discretization steps");
    if (cmd == "limit-carnot") ns();
    if (cmd == "compare") c.steps = 256;
  }
  if (cmd == "limit-otto") {
    temps(4.0, 1.0);
    sub->add_option("--dh", c.dh, "hot gap")->capture_default_str();
    sub->add_option("--dl", c.dl, "cold gap")->capture_default_str();
    ns();
  }
  if (cmd == "demon" || cmd == "swap" || cmd == "sweep") {
    qubits();
    if (cmd != "swap") sub->add_option("--theta", c.theta, "CEV angle in [0, pi]")->capture_default_str();
  }
  if (cmd == "entropy-balance" || cmd == "sweep") {
    sub->add_option("--gap", c.gap, "two-level gap")->capture_default_str();
    sub->add_option("--t-start", c.t_start, "initial bath temperature")->capture_default_str();
    sub->add_option("--t-end", c.t_end, "final bath temperature")->capture_default_str();
    if (cmd == "entropy-balance") sub->add_option("--tol", c.tol, "quadrature tolerance")->capture_default_str();
  }
  if (cmd == "sweep") {
    add_substance_options(sub, c);
    sub->add_option("--engine", c.engine, "carnot | otto | compare | demon | swap | entropy-balance")
        ->check(CLI::IsMember({"carnot", "otto", "compare", "demon", "swap", "entropy-balance"}))
        ->capture_default_str();
    sub->add_option("--grid", grid_text, "axis key=start:stop:count (repeatable)");
    sub->add_option("--random", c.random, "draw K uniform points inside the grid box instead");
    sub->add_option("--seed", c.seed, "seed for --random")->capture_default_str();
  }
  add_output_options(sub, c);
}

}  // namespace

std::optional<std::string> validate(const RunConfig& config) {
  if (config.command == "sweep") {
    const auto keys = kSweepKeys.find(config.engine);
    if (keys == kSweepKeys.end()) return "--engine: unsupported engine '" + config.engine + "'";
    for (const GridAxis& a : config.grid) {
      if (std::find(keys->second.begin(), keys->second.end(), a.key) == keys->second.end()) {
        return "--grid: key '" + a.key + "' is not sweepable for engine " + config.engine;
      }
    }
    if (config.random > 0 && config.grid.empty()) return std::string("--random needs at least one --grid axis");
    if (config.engine == "carnot" || config.engine == "otto") {
      if (auto e = validate_substance(config)) return e;
    }
    return std::nullopt;
  }
  return validate_command(config, config.command);
}

ParseOutcome parse_config(const std::vector<std::string>& args_in) {
  ParseOutcome outcome;
  std::vector<std::string> args = args_in;
  std::map<std::string, RunConfig> configs;
  std::map<std::string, std::vector<std::string>> grids;

  CLI::App app{"qheng: quantum heat engine cycles"};
  app.require_subcommand(1);
  std::map<std::string, CLI::App*> subs;
  for (const std::string& name : kCommands) {
    RunConfig& c = configs[name];
    c.command = name;
    CLI::App* sub = app.add_subcommand(name);
    bind_command(sub, c, grids[name]);
    subs[name] = sub;
  }

  try {
    // config-file keys are injected as flags right after the subcommand
    if (const auto path = config_path(args)) {
      const auto sub_pos = std::find_if(args.begin(), args.end(), [&](const std::string& a) { return subs.count(a) > 0; });
      if (sub_pos == args.end()) throw UsageError("--config needs a subcommand");
      CLI::App* sub = subs[*sub_pos];
      std::vector<std::string> injected;
      for (const auto& [key, value] : read_config_file(*path)) {
        if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr) {
          throw UsageError("config: unknown key '" + key + "' for " + *sub_pos);
        }
        if (flag_given(args, key)) continue;
        injected.push_back("--" + key);
        injected.push_back(value);
      }
      args.insert(std::next(sub_pos), injected.begin(), injected.end());
    }

    std::vector<std::string> argv_store{"qheng"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& s : argv_store) argv.push_back(s.data());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    CLI::App* shown = &app;
    for (auto& [name, sub] : subs)
      if (sub->parsed()) shown = sub;
    outcome.message = shown->help();
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.exit_code = kExitUsage;
    outcome.message = e.what();
    return outcome;
  } catch (const UsageError& e) {
    outcome.exit_code = kExitUsage;
    outcome.message = e.what();
    return outcome;
  } catch (const IoError& e) {
    outcome.exit_code = kExitIo;
    outcome.message = e.what();
    return outcome;
  }

  for (auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    RunConfig c = configs[name];
    try {
      for (const std::string& g : grids[name]) c.grid.push_back(parse_grid_axis(g));
    } catch (const UsageError& e) {
      outcome.exit_code = kExitUsage;
      outcome.message = e.what();
      return outcome;
    }
    if (auto problem = validate(c)) {
      outcome.exit_code = kExitUsage;
      outcome.message = *problem;
      return outcome;
    }
    outcome.config = std::move(c);
  }
  return outcome;
}

Table run(const RunConfig& c) {
  if (c.command == "sweep") return run_sweep(c);
  Table t;
  t.command = c.command;
  if (c.command == "limit-carnot" || c.command == "limit-otto") {
    t.columns = kLimitColumns;
    for (std::size_t n : c.n) {
      t.rows.push_back(limit_row(c.command == "limit-carnot" ? carnot_as_otto_limit(c.th, c.tl, c.pl, c.ph, n)
                                                             : otto_as_carnot_limit(c.dh, c.dl, c.th, c.tl, n)));
    }
    return t;
  }
  const Engine engine = engine_for(c.command);
  t.columns = *engine.columns;
  t.rows.push_back(engine.row(c));
  return t;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QHENG_THREADS")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const ParseOutcome parsed = parse_config(args);
  if (!parsed.config) {
    if (parsed.exit_code == kExitOk) {
      out << parsed.message;
    } else {
      err << "qheng: " << parsed.message << '\n';
    }
    return parsed.exit_code;
  }
  const RunConfig& c = *parsed.config;

  Table table;
  try {
    table = run(c);
  } catch (const DomainError& e) {
    err << "qheng: domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const UnsupportedError& e) {
    err << "qheng: unsupported: " << e.what() << '\n';
    return kExitDomain;
  } catch (const NumericalError& e) {
    err << "qheng: numerical error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const UsageError& e) {
    err << "qheng: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ostringstream body;
  if (c.format == "json") write_json(body, table);
  else write_csv(body, table);

  if (c.out.empty()) {
    out << body.str();
    out.flush();
    if (!out) {
      err << "qheng: failed writing to stdout\n";
      return kExitIo;
    }
    return kExitOk;
  }
  std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "qheng: cannot open '" << c.out << "' for writing\n";
    return kExitIo;
  }
  file << body.str();
  file.close();
  if (!file) {
    err << "qheng: failed writing '" << c.out << "'\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace qheng::cli
