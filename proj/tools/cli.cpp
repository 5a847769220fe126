#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dualrdm/checks.hpp"
#include "dualrdm/error.hpp"
#include "dualrdm/fci.hpp"
#include "dualrdm/hamiltonians.hpp"
#include "dualrdm/newton_dual.hpp"

namespace dualrdm::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

/// Quotes a free-text CSV field when it contains a separator, quote or newline.
std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// --- input ----------------------------------------------------------------

struct InputOptions {
  std::string fcidump;
  std::string toy;
  double t = 1.0;
  double u = 4.0;
  std::uint64_t seed = 7;
  int r = 6;
  int nelec = 2;
  double scale = 1.0;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--fcidump", in.fcidump, "FCIDUMP integral file");
  cmd->add_option("--toy", in.toy, "Toy model: hubbard-dimer | random");
  cmd->add_option("--t", in.t, "hubbard-dimer hopping t (> 0)");
  cmd->add_option("--U", in.u, "hubbard-dimer on-site repulsion U (>= 0)");
  cmd->add_option("--seed", in.seed, "random: generator seed");
  cmd->add_option("--r", in.r, "random: spin-orbital count (even)");
  cmd->add_option("--nelec", in.nelec, "random: electron count");
  cmd->add_option("--scale", in.scale, "random: integral magnitude bound");
}

IntegralSet make_toy(const std::string& name, const InputOptions& in) {
  if (name == "hubbard-dimer") return hubbard_dimer(in.t, in.u);
  if (name == "random") return random_two_body(in.seed, in.r, in.nelec, in.scale);
  throw DataError("unknown toy model '" + name + "' (expected hubbard-dimer or random)");
}

IntegralSet load_integrals(const InputOptions& in) {
  if (in.fcidump.empty() == in.toy.empty()) throw DataError("specify exactly one of --fcidump or --toy");
  if (!in.fcidump.empty()) return load_fcidump(std::filesystem::path(in.fcidump));
  return make_toy(in.toy, in);
}

// "toy:hubbard-dimer:t=1,U=4", "toy:random:seed=7,r=6,nelec=2" or a file path.
IntegralSet load_source(const std::string& source) {
  if (source.rfind("toy:", 0) != 0) return load_fcidump(std::filesystem::path(source));
  const std::string rest = source.substr(4);
  const auto colon = rest.find(':');
  const std::string name = rest.substr(0, colon);
  InputOptions in;
  if (colon != std::string::npos) {
    std::stringstream ss(rest.substr(colon + 1));
    for (std::string kv; std::getline(ss, kv, ',');) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw DataError("bad toy parameter '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      try {
        if (key == "t") in.t = std::stod(val);
        else if (key == "U") in.u = std::stod(val);
        else if (key == "seed") in.seed = std::stoull(val);
        else if (key == "r") in.r = std::stoi(val);
        else if (key == "nelec") in.nelec = std::stoi(val);
        else if (key == "scale") in.scale = std::stod(val);
        else throw DataError("unknown toy parameter '" + key + "'");
      } catch (const std::logic_error&) {
        throw DataError("bad value in toy parameter '" + kv + "'");
      }
    }
  }
  return make_toy(name, in);
}

// --- solver options ---------------------------------------------------------

struct SolverOptions {
  std::string conditions = "P,Q,G";
  std::optional<double> mu0;
  double damping = 0.8;
  double epsilon = 0.05;
  int max_outer = 50;
  bool no_confirm = false;
  std::optional<double> grad_tol;
  int max_inner = 20000;
  int memory = 3;
  double distance_floor = 1e-9;

  ProjectionOptions projection() const {
    ProjectionOptions p;
    p.conditions = parse_conditions(conditions);
    p.gradient_tolerance = grad_tol;
    p.max_iterations = max_inner;
    p.memory = memory;
    p.distance_floor = distance_floor;
    return p;
  }
  NewtonConfig newton() const {
    NewtonConfig c;
    c.mu0 = mu0;
    c.damping = damping;
    c.epsilon = epsilon;
    c.max_outer = max_outer;
    c.confirm = !no_confirm;
    c.projection = projection();
    return c;
  }
};

void add_projection_options(CLI::App* cmd, SolverOptions& s) {
  cmd->add_option("--conditions", s.conditions, "Condition set, e.g. P,Q,G");
  cmd->add_option("--grad-tol", s.grad_tol, "Projection gradient tolerance (max-norm)");
  cmd->add_option("--max-inner", s.max_inner, "Projection iteration limit");
  cmd->add_option("--memory", s.memory, "L-BFGS memory");
  cmd->add_option("--distance-floor", s.distance_floor, "Distances below this are reported as 0");
}

void add_newton_options(CLI::App* cmd, SolverOptions& s) {
  add_projection_options(cmd, s);
  cmd->add_option("--mu0", s.mu0, "Initial mu (default: Aufbau diagonal / N(N-1))");
  cmd->add_option("--damping", s.damping, "Newton damping fraction a in (0,1]");
  cmd->add_option("--epsilon", s.epsilon, "Slope-test tolerance");
  cmd->add_option("--max-outer", s.max_outer, "Newton iteration limit");
  cmd->add_flag("--no-confirm", s.no_confirm, "Skip the confirmation probe");
}

struct OutputOptions {
  std::string format = "csv";
  std::string output;
  bool no_timestamp = false;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output,-o", o.output, "Write results here instead of stdout");
  cmd->add_flag("--no-timestamp", o.no_timestamp, "Omit the run-info header (timestamp, wall time)");
}

class Sink {
 public:
  Sink(const OutputOptions& o, std::ostream& fallback) : to_file_(!o.output.empty()) {
    if (to_file_) {
      file_.open(o.output);
      if (!file_) throw ParseError("cannot open output file '" + o.output + "'");
    }
    os_ = to_file_ ? static_cast<std::ostream*>(&file_) : &fallback;
  }
  std::ostream& stream() { return *os_; }

 private:
  bool to_file_;
  std::ofstream file_;
  std::ostream* os_;
};

std::string run_info(double wall_seconds) {
  return std::string("# dualrdm ") + kVersion + " generated=" + utc_now() + " wall_time_s=" + num(wall_seconds);
}

int newton_exit_code(const NewtonError& e) {
  switch (e.kind()) {
    case NewtonError::Kind::InvalidBracket: return kInputError;
    case NewtonError::Kind::NotConverged:
    case NewtonError::Kind::Projection: return kNotConverged;
    case NewtonError::Kind::Numerical: return kNumericalError;
  }
  return kNumericalError;
}

std::string status_name(int code) {
  switch (code) {
    case kSuccess: return "converged";
    case kInputError: return "input-error";
    case kNotConverged: return "not-converged";
    default: return "numerical-error";
  }
}

// --- solve ------------------------------------------------------------------

struct SolveOptions {
  InputOptions input;
  SolverOptions solver;
  OutputOptions output;
  std::optional<double> e_hf;
  std::optional<double> e_fci;
  bool with_fci = false;
};

json trace_json(const NewtonTrace& tr) {
  json its = json::array();
  for (std::size_t n = 0; n < tr.iterations.size(); ++n) {
    const auto& it = tr.iterations[n];
    its.push_back({{"n", n},
                   {"mu", it.mu},
                   {"delta", it.delta},
                   {"derivative", it.derivative},
                   {"slope", it.slope ? json(*it.slope) : json(nullptr)},
                   {"inner_iterations", it.inner_iterations}});
  }
  return its;
}

int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const SpinOrbitalIntegrals ints = spinify(load_integrals(o.input));
  const ReducedHamiltonian k = build_reduced_hamiltonian(ints);
  const NewtonConfig cfg = o.solver.newton();
  cfg.validate();

  std::optional<double> e_fci = o.e_fci;
  if (o.with_fci) e_fci = solve_fci(ints).state.energy;

  NewtonTrace trace;
  int code = kSuccess;
  std::string message;
  try {
    trace = solve_dual(k, cfg);
  } catch (const NewtonError& e) {
    trace = e.trace();
    code = newton_exit_code(e);
    message = e.what();
    err << "dualrdm solve: " << e.what() << '\n';
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::optional<double> percent;
  if (code == kSuccess && o.e_hf && e_fci && *o.e_hf != *e_fci) {
    percent = (*o.e_hf - trace.energy) / (*o.e_hf - *e_fci) * 100.0;
  }

  Sink sink(o.output, out);
  std::ostream& os = sink.stream();
  if (o.output.format == "json") {
    json j;
    j["status"] = status_name(code);
    if (!message.empty()) j["message"] = message;
    if (code == kSuccess) {
      j["e_app"] = trace.energy;
      j["mu_star"] = trace.mu_star;
      j["termination"] = trace.termination;
      j["confirmed"] = trace.confirmed;
      if (trace.probe_above_delta) j["probe_above_delta"] = *trace.probe_above_delta;
      if (trace.probe_below_delta) j["probe_below_delta"] = *trace.probe_below_delta;
    }
    j["e_core"] = k.e_core;
    j["n_spin_orbitals"] = k.basis.n_spin_orbitals;
    j["n_electrons"] = k.basis.n_electrons;
    j["conditions"] = o.solver.conditions;
    j["outer_iterations"] = trace.iterations.size();
    j["total_inner_iterations"] = trace.total_inner_iterations;
    j["iterations"] = trace_json(trace);
    if (e_fci) j["e_fci"] = *e_fci;
    if (o.e_hf) j["e_hf"] = *o.e_hf;
    if (percent) j["correlation_percent"] = *percent;
    if (!o.output.no_timestamp) {
      j["generated"] = utc_now();
      j["wall_time_s"] = wall;
    }
    os << j.dump(2) << '\n';
  } else {
    if (!o.output.no_timestamp) os << run_info(wall) << '\n';
    os << "# status=" << status_name(code) << '\n';
    if (code == kSuccess) {
      os << "# e_app=" << num(trace.energy) << '\n';
      os << "# mu_star=" << num(trace.mu_star) << '\n';
      os << "# termination=" << trace.termination << '\n';
      os << "# confirmed=" << (trace.confirmed ? "true" : "false") << '\n';
    }
    os << "# e_core=" << num(k.e_core) << '\n';
    os << "# outer_iterations=" << trace.iterations.size() << '\n';
    os << "# total_inner_iterations=" << trace.total_inner_iterations << '\n';
    if (e_fci) os << "# e_fci=" << num(*e_fci) << '\n';
    if (o.e_hf) os << "# e_hf=" << num(*o.e_hf) << '\n';
    if (percent) os << "# correlation_percent=" << num(*percent) << '\n';
    os << "n,mu,delta,derivative,slope,inner_iterations\n";
    for (std::size_t n = 0; n < trace.iterations.size(); ++n) {
      const auto& it = trace.iterations[n];
      os << n << ',' << num(it.mu) << ',' << num(it.delta) << ',' << num(it.derivative) << ','
         << (it.slope ? num(*it.slope) : "") << ',' << it.inner_iterations << '\n';
    }
  }
  return code;
}

// --- curve ------------------------------------------------------------------

struct CurveOptions {
  InputOptions input;
  SolverOptions solver;
  OutputOptions output;
  double mu_min = 0.0;
  double mu_max = 0.0;
  int points = 0;
  unsigned threads = 0;
};

int cmd_curve(const CurveOptions& o, std::ostream& out) {
  if (!(o.mu_min < o.mu_max)) throw DataError("curve requires mu_min < mu_max");
  if (o.points < 2) throw DataError("curve requires at least 2 points");
  const auto t0 = std::chrono::steady_clock::now();
  const ReducedHamiltonian k = build_reduced_hamiltonian(spinify(load_integrals(o.input)));
  std::vector<double> grid(static_cast<std::size_t>(o.points));
  for (int i = 0; i < o.points; ++i) grid[static_cast<std::size_t>(i)] = o.mu_min + (o.mu_max - o.mu_min) * i / (o.points - 1);
  const std::vector<CurvePoint> pts = sample_delta_curve(k, grid, o.solver.projection(), o.threads);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Sink sink(o.output, out);
  std::ostream& os = sink.stream();
  if (o.output.format == "json") {
    json rows = json::array();
    for (const auto& p : pts) {
      rows.push_back({{"mu", p.mu},
                      {"delta", p.delta},
                      {"derivative", p.derivative},
                      {"inner_iterations", p.inner_iterations},
                      {"error", p.error ? json(*p.error) : json(nullptr)}});
    }
    json j{{"points", rows}};
    if (!o.output.no_timestamp) {
      j["generated"] = utc_now();
      j["wall_time_s"] = wall;
    }
    os << j.dump(2) << '\n';
  } else {
    if (!o.output.no_timestamp) os << run_info(wall) << '\n';
    os << "mu,delta,derivative,inner_iterations,error\n";
    for (const auto& p : pts) {
      std::string e = p.error.value_or("");
      std::replace(e.begin(), e.end(), ',', ';');
      os << num(p.mu) << ',' << num(p.delta) << ',' << num(p.derivative) << ',' << p.inner_iterations << ',' << e
         << '\n';
    }
  }
  const bool any_ok = std::any_of(pts.begin(), pts.end(), [](const CurvePoint& p) { return !p.error; });
  return any_ok ? kSuccess : kNotConverged;
}

// --- dissociate -------------------------------------------------------------

struct DissociateOptions {
  std::vector<std::string> geometries;
  SolverOptions solver;
  OutputOptions output;
  bool no_fci = false;
  unsigned threads = 0;
};

struct DissociateRow {
  std::string label;
  std::optional<double> e_app;
  std::optional<double> e_fci;
  std::string status = "ok";
};

DissociateRow solve_geometry(const std::string& spec, const SolverOptions& solver, bool with_fci) {
  DissociateRow row;
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    row.label = spec;
    row.status = "input-error: expected LABEL=SOURCE";
    return row;
  }
  row.label = spec.substr(0, eq);
  try {
    const SpinOrbitalIntegrals ints = spinify(load_source(spec.substr(eq + 1)));
    const ReducedHamiltonian k = build_reduced_hamiltonian(ints);
    if (with_fci) {
      try {
        row.e_fci = solve_fci(ints).state.energy;
      } catch (const DataError&) {
        // determinant cap exceeded: leave the FCI column empty
      }
    }
    row.e_app = solve_dual(k, solver.newton()).energy;
  } catch (const NewtonError& e) {
    row.status = status_name(newton_exit_code(e)) + ": " + e.what();
  } catch (const std::exception& e) {
    row.status = std::string("input-error: ") + e.what();
  }
  return row;
}

int cmd_dissociate(const DissociateOptions& o, std::ostream& out) {
  if (o.geometries.empty()) throw DataError("dissociate requires at least one --geometry LABEL=SOURCE");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<DissociateRow> rows(o.geometries.size());
  {
    const unsigned workers = std::min<unsigned>(o.threads ? o.threads : default_thread_count(),
                                                static_cast<unsigned>(rows.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) rows[i] = solve_geometry(o.geometries[i], o.solver, !o.no_fci);
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Sink sink(o.output, out);
  std::ostream& os = sink.stream();
  if (o.output.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json j{{"label", r.label}, {"status", r.status}};
      j["e_app"] = r.e_app ? json(*r.e_app) : json(nullptr);
      j["e_fci"] = r.e_fci ? json(*r.e_fci) : json(nullptr);
      j["gap"] = r.e_app && r.e_fci ? json(*r.e_app - *r.e_fci) : json(nullptr);
      arr.push_back(j);
    }
    json j{{"geometries", arr}};
    if (!o.output.no_timestamp) {
      j["generated"] = utc_now();
      j["wall_time_s"] = wall;
    }
    os << j.dump(2) << '\n';
  } else {
    if (!o.output.no_timestamp) os << run_info(wall) << '\n';
    os << "label,e_app,e_fci,gap,status\n";
    for (const auto& r : rows) {
      os << csv_text(r.label) << ',' << (r.e_app ? num(*r.e_app) : "") << ',' << (r.e_fci ? num(*r.e_fci) : "") << ','
         << (r.e_app && r.e_fci ? num(*r.e_app - *r.e_fci) : "") << ',' << csv_text(r.status) << '\n';
    }
  }
  const bool any_ok = std::any_of(rows.begin(), rows.end(), [](const DissociateRow& r) { return r.e_app.has_value(); });
  return any_ok ? kSuccess : kNotConverged;
}

// --- fci --------------------------------------------------------------------

struct FciOptions {
  InputOptions input;
  OutputOptions output;
  std::string rdm_out;
  std::size_t cap = kDefaultDeterminantCap;
};

int cmd_fci(const FciOptions& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const SpinOrbitalIntegrals ints = spinify(load_integrals(o.input));
  const FciResult fci = solve_fci(ints, o.cap);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string solver =
      static_cast<Eigen::Index>(fci.basis.size()) <= kDenseEigenThreshold ? "dense" : "lanczos";

  if (!o.rdm_out.empty()) {
    std::ofstream rdm(o.rdm_out);
    if (!rdm) throw ParseError("cannot open 2-RDM output file '" + o.rdm_out + "'");
    const TwoBodyOperator g = contract_2rdm(fci.basis, fci.state.coefficients);
    const PairTable pt(g.r());
    rdm << "p,q,r,s,value\n";
    for (int a = 0; a < pt.dim(); ++a)
      for (int b = 0; b < pt.dim(); ++b) {
        const double v = g.matrix()(a, b);
        if (std::abs(v) < 1e-14) continue;
        const auto [p, q] = pt.pair(a);
        const auto [r, s] = pt.pair(b);
        rdm << p << ',' << q << ',' << r << ',' << s << ',' << num(v) << '\n';
      }
  }

  Sink sink(o.output, out);
  std::ostream& os = sink.stream();
  if (o.output.format == "json") {
    json j{{"e_fci", fci.state.energy},
           {"dimension", fci.basis.size()},
           {"solver", solver},
           {"e_core", ints.e_core},
           {"n_spin_orbitals", ints.basis.n_spin_orbitals},
           {"n_electrons", ints.basis.n_electrons}};
    if (!o.output.no_timestamp) {
      j["generated"] = utc_now();
      j["wall_time_s"] = wall;
    }
    os << j.dump(2) << '\n';
  } else {
    if (!o.output.no_timestamp) os << run_info(wall) << '\n';
    os << "e_fci,dimension,solver,e_core\n"
       << num(fci.state.energy) << ',' << fci.basis.size() << ',' << solver << ',' << num(ints.e_core) << '\n';
  }
  return kSuccess;
}

// --- check ------------------------------------------------------------------

struct CheckCliOptions {
  std::uint64_t seed = CheckOptions{}.seed;
  bool corrupt_adjoint = false;
  OutputOptions output;
};

int cmd_check(const CheckCliOptions& o, std::ostream& out) {
  const std::vector<SuiteResult> results = run_checks(CheckOptions{o.seed, o.corrupt_adjoint});
  Sink sink(o.output, out);
  std::ostream& os = sink.stream();
  bool all = true;
  if (o.output.format == "json") {
    json arr = json::array();
    for (const auto& r : results) {
      arr.push_back({{"suite", r.name}, {"passed", r.passed}, {"worst", r.worst}, {"tolerance", r.tolerance},
                     {"detail", r.detail}});
      all = all && r.passed;
    }
    os << json{{"seed", o.seed}, {"suites", arr}, {"passed", all}}.dump(2) << '\n';
  } else {
    os << "suite,result,worst,tolerance,detail\n";
    for (const auto& r : results) {
      os << r.name << ',' << (r.passed ? "PASS" : "FAIL") << ',' << num(r.worst) << ',' << num(r.tolerance) << ','
         << csv_text(r.detail) << '\n';
      all = all && r.passed;
    }
  }
  return all ? kSuccess : kCheckFailed;
}

// --- config file ------------------------------------------------------------

// Reads `key = value` lines ('#' comments) into flag tokens. Boolean values
// become bare flags.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config entries must be 'key = value'", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty()) throw ParseError("empty config key", line_no);
    if (value == "true") {
      tokens.push_back("--" + key);
    } else if (value != "false") {
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
  }
  return tokens;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
        args.erase(args.begin() + static_cast<long>(i));
      } else {
        continue;
      }
      const auto tokens = config_tokens(path);
      // Config values go right after the subcommand so command-line flags win.
      const auto at = args.empty() ? args.begin() : args.begin() + 1;
      args.insert(at, tokens.begin(), tokens.end());
      break;
    }
  } catch (const Error& e) {
    err << "dualrdm: " << e.what() << '\n';
    return kInputError;
  }

  CLI::App app{"Dual reduced-density-matrix lower bounds for two-body fermionic Hamiltonians", "dualrdm"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SolveOptions solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Lower bound E_app by Newton iteration on delta(mu)");
  add_input_options(solve_cmd, solve.input);
  add_newton_options(solve_cmd, solve.solver);
  add_output_options(solve_cmd, solve.output);
  solve_cmd->add_option("--e-hf", solve.e_hf, "Reference Hartree-Fock energy (enables correlation %)");
  solve_cmd->add_option("--e-fci", solve.e_fci, "Reference FCI energy");
  solve_cmd->add_flag("--with-fci", solve.with_fci, "Compute the FCI reference with the built-in oracle");

  CurveOptions curve;
  CLI::App* curve_cmd = app.add_subcommand("curve", "Sample delta(mu) and delta'(mu) on a uniform grid");
  add_input_options(curve_cmd, curve.input);
  add_projection_options(curve_cmd, curve.solver);
  add_output_options(curve_cmd, curve.output);
  curve_cmd->add_option("--mu-min", curve.mu_min, "Grid start")->required();
  curve_cmd->add_option("--mu-max", curve.mu_max, "Grid end")->required();
  curve_cmd->add_option("--points", curve.points, "Number of grid points (>= 2)")->required();
  curve_cmd->add_option("--threads", curve.threads, "Worker threads (default DUALRDM_THREADS or all cores)");

  DissociateOptions diss;
  CLI::App* diss_cmd = app.add_subcommand("dissociate", "Batch of independent solves, one row per geometry");
  diss_cmd->add_option("--geometry,-g", diss.geometries,
                       "LABEL=SOURCE, SOURCE an FCIDUMP path or toy:NAME:key=val,...")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_newton_options(diss_cmd, diss.solver);
  add_output_options(diss_cmd, diss.output);
  diss_cmd->add_flag("--no-fci", diss.no_fci, "Skip the FCI reference column");
  diss_cmd->add_option("--threads", diss.threads, "Worker threads");

  FciOptions fci;
  CLI::App* fci_cmd = app.add_subcommand("fci", "Full CI ground-state energy (oracle)");
  add_input_options(fci_cmd, fci.input);
  add_output_options(fci_cmd, fci.output);
  fci_cmd->add_option("--rdm-out", fci.rdm_out, "Write the ground-state 2-RDM (pair basis) as CSV");
  fci_cmd->add_option("--cap", fci.cap, "Maximum determinant count");

  CheckCliOptions check;
  CLI::App* check_cmd = app.add_subcommand("check", "Run the invariant suites");
  check_cmd->add_option("--seed", check.seed, "Base seed");
  check_cmd->add_flag("--corrupt-adjoint", check.corrupt_adjoint)->group("");  // test hook
  add_output_options(check_cmd, check.output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve, out, err);
    if (*curve_cmd) return cmd_curve(curve, out);
    if (*diss_cmd) return cmd_dissociate(diss, out);
    if (*fci_cmd) return cmd_fci(fci, out);
    if (*check_cmd) return cmd_check(check, out);
  } catch (const ParseError& e) {
    err << "dualrdm: " << e.what() << '\n';
    return kInputError;
  } catch (const DataError& e) {
    err << "dualrdm: " << e.what() << '\n';
    return kInputError;
  } catch (const IndexError& e) {
    err << "dualrdm: " << e.what() << '\n';
    return kInputError;
  } catch (const NonConvergenceError& e) {
    err << "dualrdm: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    err << "dualrdm: " << e.what() << '\n';
    return kNumericalError;
  }
  return kInputError;
}

}  // namespace dualrdm::cli
