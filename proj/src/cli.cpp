#include "jmech/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "jmech/dynamics.hpp"
#include "jmech/error.hpp"
#include "jmech/hilbert.hpp"
#include "jmech/parser.hpp"
#include "jmech/poisson.hpp"
#include "jmech/symcalc.hpp"
#include "jmech/system.hpp"

namespace jmech {

namespace {

using nlohmann::json;

// Top-level `key = value` lines belong to the subcommand being run.
class SubcommandConfig : public CLI::ConfigTOML {
 public:
  explicit SubcommandConfig(const CLI::App& app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigTOML::from_config(input);
    const auto chosen = app_.get_subcommands();
    if (chosen.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty() && item.name != "++" && item.name != "--") item.parents = {chosen.front()->get_name()};
    }
    return items;
  }

 private:
  const CLI::App& app_;
};

struct SimulateConfig {
  std::string system;
  std::vector<double> q0, p0, qd0, pd0;
  double t0 = 0.0;
  double t_end = 0.0;
  double dt = 1e-3;
  std::string scheme = "rk4";
  std::string out = "-";
  std::string sweep;
};

struct JacobiConfig {
  std::string system;
  std::vector<double> q0, p0, c0, s0;
  double t0 = 0.0;
  double t_end = 0.0;
  double dt = 1e-3;
  double eps = 1e-6;
  int factors = 0;
  std::string scheme = "rk4";
  std::string out = "-";
  std::string report;
};

struct QuantizeConfig {
  std::string system;
  int modes = 32;
  int dim = 1;
  double hbar = 1.0;
  double t = 0.0;
  std::vector<double> a, b, alpha, beta;
  double dt_fd = 1e-5;
  double omega = 1.0;
  std::string out = "-";
  bool demo = false;
  bool strict = false;
};

struct BracketConfig {
  std::string kind = "all";
  int trials = 100;
  std::uint64_t seed = 1;
  int dim = 2;
  std::string out = "-";
};

// Writes to the file at `path`, or to `fallback` for "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw Error("cannot write " + path);
    stream_ = file_.get();
  }

  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::vector<double> sized(std::vector<double> v, int m, const char* flag, bool required) {
  if (v.empty() && !required) return std::vector<double>(static_cast<std::size_t>(m), 0.0);
  if (v.size() != static_cast<std::size_t>(m)) {
    throw DomainError(std::string(flag) + " needs " + std::to_string(m) + " value(s)");
  }
  return v;
}

// A parse error located as path:line:column.
class SystemFileError : public ParseError {
 public:
  SystemFileError(const std::string& path, const ParseError& e)
      : ParseError(e.bare_message(), e.line(), e.column()),
        text_(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.bare_message()) {}

  const char* what() const noexcept override { return text_.c_str(); }

 private:
  std::string text_;
};

HamiltonianSystem load(const std::string& path) {
  try {
    return load_system(path);
  } catch (const ParseError& e) {
    throw SystemFileError(path, e);
  }
}

void require_span(double t0, double t_end, double dt) {
  if (!(dt > 0)) throw DomainError("--dt must be positive");
  if (t_end < t0) throw DomainError("--t-end must not precede --t0");
}

unsigned thread_budget() {
  unsigned budget = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("JMECH_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) budget = std::min(budget, static_cast<unsigned>(cap));
  }
  return budget;
}

// Rows of initial points; columns named q1.., p1.. and optionally qd1.., pd1...
std::vector<PhasePoint> read_sweep(const std::string& path, int m, double t0) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sweep file " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty sweep file", 1, 1);
  std::vector<std::string> header;
  {
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) header.push_back(cell);
  }
  std::vector<PhasePoint> points;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    PhasePoint x;
    x.t = t0;
    x.q.assign(static_cast<std::size_t>(m), 0.0);
    x.p.assign(static_cast<std::size_t>(m), 0.0);
    std::stringstream cells(line);
    std::string cell;
    std::size_t column = 0;
    while (std::getline(cells, cell, ',')) {
      if (column >= header.size()) throw ParseError("too many columns", line_no, static_cast<int>(column) + 1);
      double value = 0.0;
      try {
        value = std::stod(cell);
      } catch (const std::exception&) {
        throw ParseError("malformed number '" + cell + "'", line_no, static_cast<int>(column) + 1);
      }
      const std::string& name = header[column];
      const auto kind_end = name.find_first_of("0123456789");
      const std::string kind = name.substr(0, kind_end);
      const int k = kind_end == std::string::npos ? 0 : std::atoi(name.c_str() + kind_end);
      if (k < 1 || k > m) throw ParseError("bad column '" + name + "'", 1, static_cast<int>(column) + 1);
      const auto slot = static_cast<std::size_t>(k - 1);
      if (kind == "q") {
        x.q[slot] = value;
      } else if (kind == "p") {
        x.p[slot] = value;
      } else if (kind == "qd" || kind == "pd") {
        x.qd.resize(static_cast<std::size_t>(m), 0.0);
        x.pd.resize(static_cast<std::size_t>(m), 0.0);
        (kind == "qd" ? x.qd : x.pd)[slot] = value;
      } else {
        throw ParseError("bad column '" + name + "'", 1, static_cast<int>(column) + 1);
      }
      ++column;
    }
    points.push_back(std::move(x));
  }
  return points;
}

std::string sweep_path(const std::string& out, std::size_t index) {
  const std::filesystem::path base(out == "-" ? "sweep.csv" : out);
  std::filesystem::path path = base;
  path.replace_filename(base.stem().string() + "_" + std::to_string(index) + base.extension().string());
  return path.string();
}

int cmd_simulate(const SimulateConfig& cfg, std::ostream& out, std::ostream& err) {
  const HamiltonianSystem system = load(cfg.system);
  const int m = system.dim();
  const Scheme scheme = parse_scheme(cfg.scheme);
  require_span(cfg.t0, cfg.t_end, cfg.dt);

  if (!cfg.sweep.empty()) {
    const auto points = read_sweep(cfg.sweep, m, cfg.t0);
    std::vector<std::string> failures(points.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
      for (std::size_t i = next++; i < points.size(); i = next++) {
        try {
          const Trajectory traj = integrate(system, points[i], cfg.t_end, cfg.dt, scheme);
          std::ofstream file(sweep_path(cfg.out, i));
          if (!file) throw Error("cannot write " + sweep_path(cfg.out, i));
          write_csv(file, traj);
        } catch (const std::exception& e) {
          failures[i] = e.what();
        }
      }
    };
    const unsigned count = std::min<unsigned>(thread_budget(), static_cast<unsigned>(std::max<std::size_t>(1, points.size())));
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < count; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();
    int code = kExitOk;
    for (std::size_t i = 0; i < failures.size(); ++i) {
      if (failures[i].empty()) continue;
      err << "sweep point " << i << ": " << failures[i] << '\n';
      code = kExitNumeric;
    }
    return code;
  }

  PhasePoint x0;
  x0.t = cfg.t0;
  x0.q = sized(cfg.q0, m, "--q0", false);
  x0.p = sized(cfg.p0, m, "--p0", false);
  if (!cfg.qd0.empty() || !cfg.pd0.empty()) {
    x0.qd = sized(cfg.qd0, m, "--qd0", false);
    x0.pd = sized(cfg.pd0, m, "--pd0", false);
  }
  const Trajectory traj = integrate(system, x0, cfg.t_end, cfg.dt, scheme);
  Sink sink(cfg.out, out);
  write_csv(sink.get(), traj);
  return kExitOk;
}

double max_abs_difference(const PhasePoint& a, const std::vector<double>& qd, const std::vector<double>& pd) {
  double worst = 0.0;
  for (std::size_t k = 0; k < qd.size(); ++k) {
    worst = std::max({worst, std::abs(a.qd[k] - qd[k]), std::abs(a.pd[k] - pd[k])});
  }
  return worst;
}

int cmd_jacobi(const JacobiConfig& cfg, std::ostream& out, std::ostream&) {
  const HamiltonianSystem system = load(cfg.system);
  const int m = system.dim();
  const Scheme scheme = parse_scheme(cfg.scheme);
  require_span(cfg.t0, cfg.t_end, cfg.dt);
  if (!(cfg.eps > 0)) throw DomainError("--eps must be positive");

  PhasePoint x0;
  x0.t = cfg.t0;
  x0.q = sized(cfg.q0, m, "--q0", true);
  x0.p = sized(cfg.p0, m, "--p0", true);
  std::vector<double> c0 = cfg.c0;
  if (c0.empty()) {
    c0.assign(static_cast<std::size_t>(m), 0.0);
    c0[0] = 1.0;
  }
  c0 = sized(c0, m, "--c0", true);
  const std::vector<double> s0 = sized(cfg.s0, m, "--s0", false);

  const Trajectory base = integrate(system, x0, cfg.t_end, cfg.dt, scheme);
  const Trajectory field = jacobi_integrate(system, base, c0, s0);
  const Trajectory oracle = jacobi_fd_oracle(system, x0, c0, s0, cfg.eps, cfg.t_end, cfg.dt, scheme);
  const bool quadratic = system.is_quadratic();

  Eigen::RowVectorXd j0(2 * m);
  for (int k = 0; k < m; ++k) {
    j0(k) = c0[static_cast<std::size_t>(k)];
    j0(m + k) = s0[static_cast<std::size_t>(k)];
  }
  std::vector<Eigen::MatrixXd> series;
  if (quadratic) series = time_ordered_exp_series(system, base);

  json samples = json::array();
  double max_fd = 0.0;
  double max_texp = 0.0;
  for (std::size_t i = 0; i < field.samples.size(); ++i) {
    const PhasePoint& at = field.samples[i];
    json row{{"t", at.t}};
    const double fd = max_abs_difference(at, oracle.samples[i].qd, oracle.samples[i].pd);
    row["fd_oracle"] = fd;
    max_fd = std::max(max_fd, fd);
    if (quadratic) {
      const Eigen::RowVectorXd v = j0 * series[i];
      const std::vector<double> qd(v.data(), v.data() + m);
      const std::vector<double> pd(v.data() + m, v.data() + 2 * m);
      const double te = max_abs_difference(at, qd, pd);
      row["time_ordered_exp"] = te;
      max_texp = std::max(max_texp, te);
    }
    samples.push_back(std::move(row));
  }

  json report{{"system_hash", system.hash()},
              {"scheme", std::string(to_string(scheme))},
              {"dt", base.dt},
              {"eps", cfg.eps},
              {"c0", c0},
              {"s0", s0},
              {"max_fd_oracle_deviation", max_fd}};
  if (quadratic) {
    const Eigen::MatrixXd e = time_ordered_exp(system, base, base.end_time(), cfg.factors);
    const Eigen::RowVectorXd v = j0 * e;
    const std::vector<double> qd(v.data(), v.data() + m);
    const std::vector<double> pd(v.data() + m, v.data() + 2 * m);
    report["max_time_ordered_exp_deviation"] = max_texp;
    report["final_time_ordered_exp"] = matrix_to_json(base.end_time(), e);
    report["final_time_ordered_exp_deviation"] = max_abs_difference(field.samples.back(), qd, pd);
  } else {
    report["note"] = "time-ordered exponent skipped: Hamiltonian is not quadratic";
  }
  report["samples"] = std::move(samples);

  Sink sink(cfg.out, out);
  write_csv(sink.get(), field);
  if (!cfg.report.empty()) {
    Sink report_sink(cfg.report, out);
    report_sink.get() << report.dump(2) << '\n';
  }
  return kExitOk;
}

double eigen_residual(const OperatorMatrix& op, const StateVector& v, double value) {
  const Eigen::VectorXcd r = op.matrix * v.coefficients - value * v.coefficients;
  const double scale = v.coefficients.norm() * (value == 0.0 ? 1.0 : std::abs(value));
  return r.norm() / scale;
}

std::vector<std::string> numbered(const char* prefix, int m) {
  std::vector<std::string> names;
  for (int k = 1; k <= m; ++k) names.push_back(std::string(prefix) + std::to_string(k));
  return names;
}

struct DemoRow {
  std::string name;
  double value;
  double tolerance;
  bool pass() const { return std::isfinite(value) && value < tolerance; }
};

HamiltonianSystem oscillator(double omega) {
  return HamiltonianSystem(1, parse("0.5*(p1^2 + omega^2*q1^2)", 1, {"omega"}), {{"omega", omega}});
}

std::vector<DemoRow> oscillator_demo(const QuantizeConfig& cfg) {
  const double w = cfg.omega;
  const double hbar = cfg.hbar;
  const HamiltonianSystem system = oscillator(w);
  std::vector<DemoRow> rows;

  const HamiltonEquations eq = derive_hamilton_equations(system);
  const Expr q = Expr::coordinate(Coord::q(1));
  const Expr p = Expr::coordinate(Coord::p(1));
  const Expr qd = Expr::coordinate(Coord::qd(1));
  const Expr pd = Expr::coordinate(Coord::pd(1));
  const auto mismatch = [](const Expr& a, const Expr& b) { return equivalent(a, b) ? 0.0 : 1.0; };
  rows.push_back({"d_t q = p", mismatch(jmech::bind(eq.dq[0], system.params()), p), 0.5});
  rows.push_back({"d_t p = -w^2 q", mismatch(jmech::bind(eq.dp[0], system.params()), -w * w * q), 0.5});

  const double q0 = 0.3;
  const double p0 = -0.7;
  const Trajectory traj = integrate(system, {0.0, {q0}, {p0}, {}, {}}, 10.0, 1e-3);
  double traj_err = 0.0;
  for (const auto& at : traj.samples) {
    const double qt = q0 * std::cos(w * at.t) + p0 / w * std::sin(w * at.t);
    const double pt = -q0 * w * std::sin(w * at.t) + p0 * std::cos(w * at.t);
    traj_err = std::max({traj_err, std::abs(at.q[0] - qt), std::abs(at.p[0] - pt)});
  }
  rows.push_back({"q(t) = q0 cos wt + p0 sin wt / w", traj_err, 1e-8});

  const double c = 1.0;
  const double s = 0.5;
  const std::vector<double> cv{c};
  const std::vector<double> sv{s};
  const Trajectory jac = jacobi_integrate(system, traj, cv, sv);
  double jac_err = 0.0;
  for (const auto& at : jac.samples) {
    const double qt = c * std::cos(w * at.t) + s / w * std::sin(w * at.t);
    const double pt = -c * w * std::sin(w * at.t) + s * std::cos(w * at.t);
    jac_err = std::max({jac_err, std::abs(at.qd[0] - qt), std::abs(at.pd[0] - pt)});
  }
  rows.push_back({"qdot(t) = qdot0 cos wt + pdot0 sin wt / w", jac_err, 1e-8});

  const double tq = std::numbers::pi / 2;
  const Trajectory short_base = integrate(system, {0.0, {q0}, {p0}, {}, {}}, tq, 1e-3);
  const Eigen::MatrixXd e = time_ordered_exp(system, short_base, tq, 200);
  Eigen::Matrix2d closed;
  closed << std::cos(w * tq), -w * std::sin(w * tq), std::sin(w * tq) / w, std::cos(w * tq);
  rows.push_back({"T-exponent = fundamental matrix", (e - closed).cwiseAbs().maxCoeff(), 1e-6});

  const Expr h2 = in_deviation_coordinates(split_h1_h2(system).deviation);
  const Expr want = 0.5 * (pd * pd + w * w * qd * qd);
  rows.push_back({"H2 = (P^2 + w^2 Q^2) / 2", mismatch(jmech::bind(h2, system.params()), want), 0.5});

  const HermiteBasis basis(cfg.modes, 1, hbar);
  const Generators g = build_generators(basis);
  const auto max_entry = [](const OperatorMatrix& op) {
    double worst = 0.0;
    for (Eigen::Index col = 0; col < op.matrix.outerSize(); ++col) {
      for (SparseOperator::InnerIterator it(op.matrix, col); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
  };
  const double a = 0.5;
  const double b = 0.3;
  const std::vector<double> av{a};
  const std::vector<double> bv{b};
  std::optional<StateVector> v;
  try {
    v = project_eigenstate(basis, av, bv);
  } catch (const CaptureError&) {
    rows.push_back({"f_ab captured by the basis", std::nan(""), 1.0});
  }

  double q_op = 0.0;
  double p_op = 0.0;
  double ccr = 0.0;
  double q_eig = 0.0;
  double p_eig = 0.0;
  double evolution = 0.0;
  for (double t : {0.0, 0.5, 1.0}) {
    const InstantOperators ops = instant_operators(system, basis, t);
    const OperatorMatrix q_closed = Complex(std::cos(w * t)) * g.phi[0] + Complex(std::sin(w * t) / w) * g.pi[0];
    const OperatorMatrix p_closed = Complex(-w * std::sin(w * t)) * g.phi[0] + Complex(std::cos(w * t)) * g.pi[0];
    q_op = std::max(q_op, max_entry(ops.r[0] - q_closed));
    p_op = std::max(p_op, max_entry(ops.r[1] - p_closed));
    ccr = std::max(ccr, clean_deviation(commutator(ops.rdot[1], ops.r[0]), Complex(0.0, -hbar)));
    if (v) {
      q_eig = std::max(q_eig, eigen_residual(ops.r[0], *v, a * std::cos(w * t) + b / w * std::sin(w * t)));
      p_eig = std::max(p_eig, eigen_residual(ops.r[1], *v, -a * w * std::sin(w * t) + b * std::cos(w * t)));
    }
    evolution = std::max(evolution, evolution_residual(system, basis, t, cfg.dt_fd).max_residual);
  }
  rows.push_back({"q(t) = phi cos wt + pi sin wt / w", q_op, 1e-9});
  rows.push_back({"p(t) = -w phi sin wt + pi cos wt", p_op, 1e-9});
  rows.push_back({"[pdot(t), q(t)] = -i hbar I", ccr, 1e-8});
  if (v) {
    rows.push_back({"q(t) f_ab = q(t; a, b) f_ab", q_eig, 1e-5});
    rows.push_back({"p(t) f_ab = p(t; a, b) f_ab", p_eig, 1e-5});
  }
  rows.push_back({"i hbar d_t r = [r, H_V]", evolution, 1e-6});
  return rows;
}

int cmd_demo(const QuantizeConfig& cfg, std::ostream& out) {
  const auto rows = oscillator_demo(cfg);
  json table = json::array();
  bool all = true;
  std::ostringstream text;
  for (const auto& row : rows) {
    all = all && row.pass();
    table.push_back({{"check", row.name}, {"value", row.value}, {"tolerance", row.tolerance}, {"pass", row.pass()}});
    text << std::left << std::setw(46) << row.name << ' ' << std::setw(14) << std::setprecision(6) << row.value << ' '
         << (row.pass() ? "PASS" : "FAIL") << '\n';
  }
  const json report{{"omega", cfg.omega}, {"N", cfg.modes}, {"hbar", cfg.hbar}, {"t", {0.0, 0.5, 1.0}}, {"checks", table},
                    {"all_pass", all}};
  if (cfg.out == "-") {
    out << text.str();
  } else {
    out << text.str();
    Sink sink(cfg.out, out);
    sink.get() << report.dump(2) << '\n';
  }
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_quantize(const QuantizeConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.demo) return cmd_demo(cfg, out);

  std::optional<HamiltonianSystem> system;
  if (!cfg.system.empty()) system.emplace(load(cfg.system));
  const int m = system ? system->dim() : cfg.dim;
  const HermiteBasis basis(cfg.modes, m, cfg.hbar);
  const auto a = sized(cfg.a, m, "--a", false);
  const auto b = sized(cfg.b, m, "--b", false);
  const auto alpha = sized(cfg.alpha, m, "--alpha", false);
  const auto beta = sized(cfg.beta, m, "--beta", false);
  const bool quadratic = system && system->is_quadratic();
  if (cfg.t != 0.0 && !quadratic) throw DomainError("--t other than 0 needs a system of degree at most two");

  json report{{"basis", to_json(basis)}, {"t", cfg.t}, {"gram_defect", gram_defect(basis)}};
  report["commutators"] = to_json(commutator_check(basis));

  const Generators g = build_generators(basis);
  bool capture_failed = false;
  json eigen{{"a", a}, {"b", b}};
  try {
    const StateVector v = project_eigenstate(basis, a, b);
    eigen["captured"] = v.captured;
    json residuals = json::object();
    for (int k = 0; k < m; ++k) {
      const auto i = static_cast<std::size_t>(k);
      residuals["phi" + std::to_string(k + 1)] = eigen_residual(g.phi[i], v, a[i]);
      residuals["pi" + std::to_string(k + 1)] = eigen_residual(g.pi[i], v, b[i]);
    }
    eigen["relative_residuals"] = std::move(residuals);

    json weyl{{"alpha", alpha}, {"beta", beta}};
    for (const Shift which : {Shift::a, Shift::b}) {
      const auto& amount = which == Shift::a ? alpha : beta;
      std::vector<double> moved_a = a;
      std::vector<double> moved_b = b;
      auto& moved = which == Shift::a ? moved_a : moved_b;
      for (std::size_t k = 0; k < moved.size(); ++k) moved[k] += amount[k];
      const OperatorMatrix r = system ? weyl_operator(*system, basis, which, amount, 0.0) : weyl_operator(basis, which, amount);
      const StateVector target = project_eigenstate(basis, moved_a, moved_b);
      const Complex overlap = weyl_function_overlap(basis, a, b, which, amount);
      weyl[which == Shift::a ? "shift_a" : "shift_b"] = {
          {"cosine_similarity", cosine_similarity(r * v, target)},
          {"function_overlap", {overlap.real(), overlap.imag()}}};
    }
    eigen["weyl"] = std::move(weyl);

    if (quadratic) {
      const InstantOperators ops = instant_operators(*system, basis, cfg.t);
      const AffineFlow flow = affine_flow(*system, cfg.t);
      Eigen::RowVectorXd x0(2 * m);
      for (int k = 0; k < m; ++k) {
        x0(k) = a[static_cast<std::size_t>(k)];
        x0(m + k) = b[static_cast<std::size_t>(k)];
      }
      const Eigen::RowVectorXd xt = x0 * flow.linear + flow.offset.transpose();
      json values = json::object();
      const auto names = numbered("q", m);
      const auto pnames = numbered("p", m);
      for (int k = 0; k < 2 * m; ++k) {
        const auto i = static_cast<std::size_t>(k);
        const std::string name = k < m ? names[i] : pnames[i - static_cast<std::size_t>(m)];
        values[name] = {{"classical", xt(k)}, {"relative_residual", eigen_residual(ops.r[i], v, xt(k))}};
      }
      eigen["instant_eigenvalues"] = std::move(values);
    }
  } catch (const CaptureError& e) {
    capture_failed = true;
    eigen["error"] = e.what();
    eigen["captured"] = e.captured();
    err << "warning: " << e.what() << '\n';
  }
  report["eigenstate"] = std::move(eigen);

  json herm = json::object();
  for (int k = 0; k < m; ++k) {
    const auto i = static_cast<std::size_t>(k);
    herm["phi" + std::to_string(k + 1)] = hermiticity_defect(g.phi[i]);
    herm["pi" + std::to_string(k + 1)] = hermiticity_defect(g.pi[i]);
    herm["phidot" + std::to_string(k + 1)] = hermiticity_defect(g.phidot[i]);
    herm["pidot" + std::to_string(k + 1)] = hermiticity_defect(g.pidot[i]);
  }

  if (quadratic) {
    report["instant_commutators"] = to_json(instant_commutator_check(*system, basis, cfg.t));
    report["evolution"] = to_json(evolution_residual(*system, basis, cfg.t, cfg.dt_fd));
    const InstantOperators ops = instant_operators(*system, basis, cfg.t);
    herm["H_V"] = hermiticity_defect(quantize_vertical_hamiltonian(*system, ops));
  } else if (system) {
    report["note"] = "instant operators skipped: Hamiltonian is not quadratic";
  }
  report["hermiticity"] = std::move(herm);
  report["capture_failed"] = capture_failed;

  Sink sink(cfg.out, out);
  sink.get() << report.dump(2) << '\n';
  return capture_failed && cfg.strict ? kExitNumeric : kExitOk;
}

int cmd_check_brackets(const BracketConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.trials < 1) throw DomainError("--trials must be at least 1");
  if (cfg.dim < 1) throw DomainError("-m must be positive");
  std::vector<BracketKind> kinds;
  if (cfg.kind == "all") {
    kinds = {BracketKind::base, BracketKind::vertical, BracketKind::alt, BracketKind::second};
  } else {
    kinds = {parse_bracket_kind(cfg.kind)};
  }
  json reports = json::array();
  bool ok = true;
  for (BracketKind kind : kinds) {
    const AxiomReport report = check_axioms(kind, cfg.trials, cfg.seed, cfg.dim);
    ok = ok && report.ok();
    if (!report.ok()) err << to_string(kind) << ": " << report.failures.size() << " axiom failure(s)\n";
    reports.push_back(to_json(report));
  }
  Sink sink(cfg.out, out);
  sink.get() << json{{"seed", cfg.seed}, {"trials", cfg.trials}, {"dim", cfg.dim}, {"reports", reports}}.dump(2) << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vertical-extended Hamiltonian mechanics toolkit", "jmech"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file with option defaults");
  app.config_formatter(std::make_shared<SubcommandConfig>(app));

  SimulateConfig sim;
  auto* simulate = app.add_subcommand("simulate", "integrate the Hamilton equations and write a CSV trajectory");
  simulate->add_option("--system", sim.system, "system file")->required();
  simulate->add_option("--q0", sim.q0, "initial positions")->delimiter(',');
  simulate->add_option("--p0", sim.p0, "initial momenta")->delimiter(',');
  simulate->add_option("--qd0", sim.qd0, "initial Jacobi positions")->delimiter(',');
  simulate->add_option("--pd0", sim.pd0, "initial Jacobi momenta")->delimiter(',');
  simulate->add_option("--t0", sim.t0, "start time");
  simulate->add_option("--t-end", sim.t_end, "end time")->required();
  simulate->add_option("--dt", sim.dt, "step");
  simulate->add_option("--scheme", sim.scheme, "rk4 or leapfrog");
  simulate->add_option("--out", sim.out, "output CSV, - for stdout");
  simulate->add_option("--sweep", sim.sweep, "CSV of initial points, one output per row");

  JacobiConfig jac;
  auto* jacobi = app.add_subcommand("jacobi", "Jacobi field by three routes with a deviation report");
  jacobi->add_option("--system", jac.system, "system file")->required();
  jacobi->add_option("--q0", jac.q0, "initial positions")->delimiter(',')->required();
  jacobi->add_option("--p0", jac.p0, "initial momenta")->delimiter(',')->required();
  jacobi->add_option("--c0", jac.c0, "initial Jacobi positions (default e1)")->delimiter(',');
  jacobi->add_option("--s0", jac.s0, "initial Jacobi momenta (default 0)")->delimiter(',');
  jacobi->add_option("--t0", jac.t0, "start time");
  jacobi->add_option("--t-end", jac.t_end, "end time")->required();
  jacobi->add_option("--dt", jac.dt, "step");
  jacobi->add_option("--eps", jac.eps, "finite-difference displacement");
  jacobi->add_option("--n", jac.factors, "factors of the final time-ordered exponent (0: one per step)");
  jacobi->add_option("--scheme", jac.scheme, "rk4 or leapfrog");
  jacobi->add_option("--out", jac.out, "Jacobi trajectory CSV, - for stdout");
  jacobi->add_option("--report", jac.report, "deviation report JSON");

  QuantizeConfig qc;
  auto* quantize = app.add_subcommand("quantize", "truncated Hermite representation and its checks");
  quantize->add_option("--system", qc.system, "system file (enables instant operators)");
  quantize->add_option("-N", qc.modes, "modes per axis");
  quantize->add_option("--dim", qc.dim, "fiber dimension without a system file");
  quantize->add_option("--hbar", qc.hbar, "Planck constant");
  quantize->add_option("--t", qc.t, "time of the instant operators");
  quantize->add_option("--a", qc.a, "eigenstate label a")->delimiter(',');
  quantize->add_option("--b", qc.b, "eigenstate label b")->delimiter(',');
  quantize->add_option("--alpha", qc.alpha, "Weyl shift of a")->delimiter(',');
  quantize->add_option("--beta", qc.beta, "Weyl shift of b")->delimiter(',');
  quantize->add_option("--dt-fd", qc.dt_fd, "central-difference step");
  quantize->add_option("--omega", qc.omega, "oscillator frequency of the demo");
  quantize->add_option("--out", qc.out, "report JSON, - for stdout");
  quantize->add_flag("--demo-oscillator", qc.demo, "reproduce the harmonic oscillator example");
  quantize->add_flag("--strict", qc.strict, "exit 3 when an eigenstate is not captured");

  BracketConfig bc;
  auto* brackets = app.add_subcommand("check-brackets", "symbolic Poisson axiom checks on random polynomials");
  brackets->add_option("--kind", bc.kind, "all, base, vertical, alt or second");
  brackets->add_option("--trials", bc.trials, "random triples per kind");
  brackets->add_option("--seed", bc.seed, "random seed");
  brackets->add_option("-m", bc.dim, "fiber dimension");
  brackets->add_option("--out", bc.out, "report JSON, - for stdout");

  for (auto* sub : {simulate, jacobi, quantize, brackets}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    if (jacobi->parsed()) return cmd_jacobi(jac, out, err);
    if (quantize->parsed()) return cmd_quantize(qc, out, err);
    return cmd_check_brackets(bc, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BlowUpError& e) {
    err << "error: " << e.what() << " (last good t = " << e.last_good_time() << ")\n";
    return kExitNumeric;
  } catch (const CaptureError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace jmech
