#include "jmech/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "jmech/error.hpp"
#include "jmech/symcalc.hpp"

namespace jmech {

namespace {

constexpr double kBlowUpBound = 1e12;

// The bound Hamilton vector field on (q, p) or, extended, on (q, p, qd, pd).
class PhaseField {
 public:
  PhaseField(const HamiltonianSystem& system, bool extended) : system_(system), m_(system.dim()), extended_(extended) {
    for (int k = 1; k <= m_; ++k) rates_.push_back(system.dh_dp(k));
    for (int k = 1; k <= m_; ++k) rates_.push_back(-system.dh_dq(k));
    if (extended_) {
      for (int k = 1; k <= m_; ++k) rates_.push_back(vertical_prolong(system.dh_dp(k)));
      for (int k = 1; k <= m_; ++k) rates_.push_back(-vertical_prolong(system.dh_dq(k)));
    }
  }

  std::size_t size() const noexcept { return rates_.size(); }

  Valuation at(double t, const Eigen::VectorXd& x) const {
    const auto m = static_cast<std::size_t>(m_);
    Valuation v;
    v.t = t;
    v.q = std::span<const double>(x.data(), m);
    v.p = std::span<const double>(x.data() + m, m);
    if (static_cast<std::size_t>(x.size()) >= 4 * m) {
      v.qd = std::span<const double>(x.data() + 2 * m, m);
      v.pd = std::span<const double>(x.data() + 3 * m, m);
    }
    return v;
  }

  Eigen::VectorXd operator()(double t, const Eigen::VectorXd& x) const {
    const Valuation v = at(t, x);
    Eigen::VectorXd out(static_cast<Eigen::Index>(rates_.size()));
    for (std::size_t i = 0; i < rates_.size(); ++i) out(static_cast<Eigen::Index>(i)) = evaluate(rates_[i], v);
    return out;
  }

  // v' = v M, row convention, on the first 2m entries of x.
  Eigen::MatrixXd transition(double t, const Eigen::VectorXd& x) const {
    const Valuation v = at(t, x);
    const Eigen::Index m = m_;
    Eigen::MatrixXd out(2 * m, 2 * m);
    for (int j = 1; j <= m_; ++j) {
      for (int k = 1; k <= m_; ++k) {
        const double a = evaluate(system_.hessian(Coord::q(j), Coord::p(k)), v);
        const double b = evaluate(system_.hessian(Coord::q(j), Coord::q(k)), v);
        const double c = evaluate(system_.hessian(Coord::p(j), Coord::p(k)), v);
        out(j - 1, k - 1) = a;
        out(j - 1, m + k - 1) = -b;
        out(m + j - 1, k - 1) = c;
        out(m + k - 1, m + j - 1) = -a;
      }
    }
    return out;
  }

  // Indices of the position-like and momentum-like entries for leapfrog.
  bool is_position(Eigen::Index i) const noexcept {
    const Eigen::Index m = m_;
    return i < m || (i >= 2 * m && i < 3 * m);
  }

 private:
  const HamiltonianSystem& system_;
  int m_;
  bool extended_;
  std::vector<Expr> rates_;
};

Eigen::VectorXd rk4_step(const PhaseField& f, double t, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + h / 2, x + h / 2 * k1);
  const Eigen::VectorXd k3 = f(t + h / 2, x + h / 2 * k2);
  const Eigen::VectorXd k4 = f(t + h, x + h * k3);
  return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

// Kick-drift-kick. Momentum rates depend on positions only and vice versa.
Eigen::VectorXd leapfrog_step(const PhaseField& f, double t, Eigen::VectorXd x, double h) {
  const auto kick = [&](double at, double scale) {
    const Eigen::VectorXd rate = f(at, x);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!f.is_position(i)) x(i) += scale * rate(i);
    }
  };
  kick(t, h / 2);
  const Eigen::VectorXd rate = f(t + h / 2, x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (f.is_position(i)) x(i) += h * rate(i);
  }
  kick(t + h, h / 2);
  return x;
}

bool finite_and_bounded(const Eigen::VectorXd& x) {
  return std::all_of(x.data(), x.data() + x.size(),
                     [](double v) { return std::isfinite(v) && std::abs(v) <= kBlowUpBound; });
}

Eigen::VectorXd pack(const PhasePoint& x) {
  std::vector<double> all;
  all.insert(all.end(), x.q.begin(), x.q.end());
  all.insert(all.end(), x.p.begin(), x.p.end());
  all.insert(all.end(), x.qd.begin(), x.qd.end());
  all.insert(all.end(), x.pd.begin(), x.pd.end());
  return Eigen::Map<const Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
}

PhasePoint unpack(double t, const Eigen::VectorXd& x, int dim) {
  const auto m = static_cast<std::size_t>(dim);
  PhasePoint out;
  out.t = t;
  const double* d = x.data();
  out.q.assign(d, d + m);
  out.p.assign(d + m, d + 2 * m);
  if (static_cast<std::size_t>(x.size()) >= 4 * m) {
    out.qd.assign(d + 2 * m, d + 3 * m);
    out.pd.assign(d + 3 * m, d + 4 * m);
  }
  return out;
}

Eigen::VectorXd base_part(const PhasePoint& x) {
  PhasePoint base = x;
  base.qd.clear();
  base.pd.clear();
  return pack(base);
}

void check_point(const PhasePoint& x, int dim) {
  const auto m = static_cast<std::size_t>(dim);
  if (x.q.size() != m || x.p.size() != m) throw DomainError("phase point does not match the system dimension");
  if (x.qd.size() != x.pd.size() || (!x.qd.empty() && x.qd.size() != m)) {
    throw DomainError("vertical block does not match the system dimension");
  }
}

// Base state at tau, stepped by RK4 off the closest preceding sample.
Eigen::VectorXd base_state_at(const PhaseField& f, const Trajectory& base, double tau) {
  const double t0 = base.start_time();
  const auto last = base.samples.size() - 1;
  std::size_t i = 0;
  if (last > 0 && base.dt > 0) {
    i = static_cast<std::size_t>(std::clamp(std::floor((tau - t0) / base.dt), 0.0, static_cast<double>(last)));
  }
  const PhasePoint& from = base.samples[i];
  const Eigen::VectorXd x = base_part(from);
  const double h = tau - from.t;
  return h == 0.0 ? x : rk4_step(f, from.t, x, h);
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) { return a.exp(); }

}  // namespace

std::string_view to_string(Scheme scheme) { return scheme == Scheme::rk4 ? "rk4" : "leapfrog"; }

Scheme parse_scheme(std::string_view name) {
  if (name == "rk4") return Scheme::rk4;
  if (name == "leapfrog") return Scheme::leapfrog;
  throw DomainError("unknown scheme '" + std::string(name) + "'");
}

void Trajectory::validate() const {
  if (samples.empty()) throw DomainError("trajectory has no samples");
  const bool vertical = samples.front().has_vertical();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    check_point(samples[i], dim);
    if (samples[i].has_vertical() != vertical) throw DomainError("vertical block present on some samples only");
    if (i == 0) continue;
    const double step = samples[i].t - samples[i - 1].t;
    if (!(step > 0)) throw DomainError("sample times must increase strictly");
    if (std::abs(step - dt) > 1e-12) throw DomainError("sample spacing is not uniform");
  }
}

HamiltonEquations derive_hamilton_equations(const HamiltonianSystem& system) {
  HamiltonEquations eq;
  const Expr& h = system.hamiltonian();
  for (int k = 1; k <= system.dim(); ++k) {
    const Expr dh_dp = diff(h, Coord::p(k));
    const Expr dh_dq = diff(h, Coord::q(k));
    eq.dq.push_back(dh_dp);
    eq.dp.push_back(-dh_dq);
    eq.dqd.push_back(vertical_prolong(dh_dp));
    eq.dpd.push_back(-vertical_prolong(dh_dq));
  }
  return eq;
}

Trajectory integrate(const HamiltonianSystem& system, const PhasePoint& x0, double t_end, double dt, Scheme scheme) {
  check_point(x0, system.dim());
  if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("step must be positive");
  if (!(t_end >= x0.t)) throw DomainError("end time precedes start time");
  if (scheme == Scheme::leapfrog && !system.is_separable()) {
    throw DomainError("leapfrog needs a separable Hamiltonian T(p) + V(q, t)");
  }
  const PhaseField field(system, x0.has_vertical());
  const double span = t_end - x0.t;
  const auto steps = span == 0.0 ? std::size_t{0} : static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
  const double h = steps == 0 ? dt : span / static_cast<double>(steps);

  Trajectory out;
  out.dim = system.dim();
  out.system_hash = system.hash();
  out.scheme = scheme;
  out.dt = h;
  out.samples.reserve(steps + 1);
  Eigen::VectorXd x = pack(x0);
  if (!finite_and_bounded(x)) throw BlowUpError("initial state is not finite", x0.t);
  out.samples.push_back(x0);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = x0.t + static_cast<double>(i) * h;
    x = scheme == Scheme::rk4 ? rk4_step(field, t, x, h) : leapfrog_step(field, t, x, h);
    if (!finite_and_bounded(x)) {
      throw BlowUpError("state left the finite range after t = " + std::to_string(t), t);
    }
    const double next = i + 1 == steps ? t_end : x0.t + static_cast<double>(i + 1) * h;
    out.samples.push_back(unpack(next, x, system.dim()));
  }
  return out;
}

Trajectory jacobi_integrate(const HamiltonianSystem& system, const Trajectory& base, std::span<const double> c,
                            std::span<const double> s) {
  const auto m = static_cast<std::size_t>(system.dim());
  if (base.samples.empty()) throw DomainError("base trajectory has no samples");
  if (base.dim != system.dim()) throw DomainError("base trajectory does not match the system dimension");
  if (c.size() != m || s.size() != m) throw DomainError("initial Jacobi data does not match the system dimension");
  if (base.scheme == Scheme::leapfrog && !system.is_separable()) {
    throw DomainError("leapfrog needs a separable Hamiltonian T(p) + V(q, t)");
  }
  const PhaseField field(system, false);
  const auto n = static_cast<Eigen::Index>(m);

  Eigen::RowVectorXd v(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    v(k) = c[static_cast<std::size_t>(k)];
    v(n + k) = s[static_cast<std::size_t>(k)];
  }

  Trajectory out = base;
  const auto attach = [&](PhasePoint& at) {
    at.qd.assign(v.data(), v.data() + m);
    at.pd.assign(v.data() + m, v.data() + 2 * m);
  };
  attach(out.samples.front());
  for (std::size_t i = 0; i + 1 < base.samples.size(); ++i) {
    const double t = base.samples[i].t;
    const double h = base.samples[i + 1].t - t;
    const Eigen::VectorXd x = base_part(base.samples[i]);
    if (base.scheme == Scheme::rk4) {
      const Eigen::VectorXd k1 = field(t, x);
      const Eigen::VectorXd x2 = x + h / 2 * k1;
      const Eigen::VectorXd k2 = field(t + h / 2, x2);
      const Eigen::VectorXd x3 = x + h / 2 * k2;
      const Eigen::VectorXd k3 = field(t + h / 2, x3);
      const Eigen::VectorXd x4 = x + h * k3;
      const Eigen::RowVectorXd j1 = v * field.transition(t, x);
      const Eigen::RowVectorXd j2 = (v + h / 2 * j1) * field.transition(t + h / 2, x2);
      const Eigen::RowVectorXd j3 = (v + h / 2 * j2) * field.transition(t + h / 2, x3);
      const Eigen::RowVectorXd j4 = (v + h * j3) * field.transition(t + h, x4);
      v += h / 6 * (j1 + 2 * j2 + 2 * j3 + j4);
    } else {
      // Tangent map of kick-drift-kick; A vanishes for separable H.
      Eigen::VectorXd y = x;
      y.tail(n) += h / 2 * field(t, y).tail(n);
      v.tail(n) += h / 2 * (v * field.transition(t, x)).tail(n);
      v.head(n) += h * (v * field.transition(t + h / 2, y)).head(n);
      y.head(n) += h * field(t + h / 2, y).head(n);
      v.tail(n) += h / 2 * (v * field.transition(t + h, y)).tail(n);
    }
    if (!finite_and_bounded(v.transpose())) {
      throw BlowUpError("Jacobi field left the finite range after t = " + std::to_string(t), t);
    }
    attach(out.samples[i + 1]);
  }
  return out;
}

TransitionMatrix transition_matrix(const HamiltonianSystem& system, const PhasePoint& at) {
  check_point(at, system.dim());
  const PhaseField field(system, false);
  return {at.t, field.transition(at.t, base_part(at))};
}

Eigen::MatrixXd time_ordered_exp(const HamiltonianSystem& system, const Trajectory& base, double t, int factors) {
  if (base.samples.empty()) throw DomainError("base trajectory has no samples");
  const double t0 = base.start_time();
  const double t1 = base.end_time();
  const double slack = 1e-12 * std::max(1.0, std::abs(t1));
  if (t < t0 - slack || t > t1 + slack) throw DomainError("time lies outside the base trajectory");
  const Eigen::Index n2 = 2 * system.dim();
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n2, n2);
  const double span = t - t0;
  if (span <= 0) return e;
  if (factors < 0) throw DomainError("factor count must be non-negative");
  if (factors == 0) factors = std::max(1, static_cast<int>(std::lround(span / base.dt)));
  const PhaseField field(system, false);
  const double step = span / factors;
  for (int i = 0; i < factors; ++i) {
    const double tau = t0 + (i + 0.5) * step;
    e = e * expm(field.transition(tau, base_state_at(field, base, tau)) * step);
  }
  return e;
}

std::vector<Eigen::MatrixXd> time_ordered_exp_series(const HamiltonianSystem& system, const Trajectory& base) {
  if (base.samples.empty()) throw DomainError("base trajectory has no samples");
  const PhaseField field(system, false);
  const Eigen::Index n2 = 2 * system.dim();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(base.samples.size());
  out.push_back(Eigen::MatrixXd::Identity(n2, n2));
  for (std::size_t i = 0; i + 1 < base.samples.size(); ++i) {
    const double t = base.samples[i].t;
    const double h = base.samples[i + 1].t - t;
    const Eigen::VectorXd mid = rk4_step(field, t, base_part(base.samples[i]), h / 2);
    out.push_back(out.back() * expm(field.transition(t + h / 2, mid) * h));
  }
  return out;
}

Trajectory jacobi_fd_oracle(const HamiltonianSystem& system, const PhasePoint& x0, std::span<const double> c,
                            std::span<const double> s, double eps, double t_end, double dt, Scheme scheme) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
  const auto m = static_cast<std::size_t>(system.dim());
  if (c.size() != m || s.size() != m) throw DomainError("initial Jacobi data does not match the system dimension");
  PhasePoint start = x0;
  start.qd.clear();
  start.pd.clear();
  PhasePoint shifted = start;
  for (std::size_t k = 0; k < m; ++k) {
    shifted.q[k] += eps * c[k];
    shifted.p[k] += eps * s[k];
  }
  Trajectory out = integrate(system, start, t_end, dt, scheme);
  const Trajectory moved = integrate(system, shifted, t_end, dt, scheme);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    PhasePoint& at = out.samples[i];
    const PhasePoint& other = moved.samples[i];
    at.qd.resize(m);
    at.pd.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      at.qd[k] = (other.q[k] - at.q[k]) / eps;
      at.pd[k] = (other.p[k] - at.p[k]) / eps;
    }
  }
  return out;
}

AffineFlow affine_flow(const HamiltonianSystem& system, double t, double dt) {
  if (!system.is_quadratic()) throw DomainError("affine flow needs a Hamiltonian of degree at most two");
  if (!(dt > 0)) throw DomainError("step must be positive");
  const Eigen::Index n2 = 2 * system.dim();
  AffineFlow flow{t, Eigen::MatrixXd::Identity(n2, n2), Eigen::VectorXd::Zero(n2)};
  if (t == 0.0) return flow;
  const PhaseField field(system, false);
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt - 1e-9)));
  const double h = t / steps;
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n2);
  for (int i = 0; i < steps; ++i) {
    const double at = i * h;
    flow.linear = flow.linear * expm(field.transition(at + h / 2, origin) * h);
    flow.offset = rk4_step(field, at, flow.offset, h);
  }
  return flow;
}

AffineFlow extend_affine_flow(const HamiltonianSystem& system, const AffineFlow& flow, double h) {
  if (!system.is_quadratic()) throw DomainError("affine flow needs a Hamiltonian of degree at most two");
  const PhaseField field(system, false);
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(2 * system.dim());
  return {flow.t + h, flow.linear * expm(field.transition(flow.t + h / 2, origin) * h),
          rk4_step(field, flow.t, flow.offset, h)};
}

void write_csv(std::ostream& out, const Trajectory& trajectory) {
  const int m = trajectory.dim;
  const bool vertical = trajectory.has_vertical();
  out << "t";
  for (int k = 1; k <= m; ++k) out << ",q" << k;
  for (int k = 1; k <= m; ++k) out << ",p" << k;
  if (vertical) {
    for (int k = 1; k <= m; ++k) out << ",qd" << k;
    for (int k = 1; k <= m; ++k) out << ",pd" << k;
  }
  out << '\n';
  char buf[40];
  const auto put = [&](double v) {
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.write(buf, res.ptr - buf);
  };
  for (const auto& at : trajectory.samples) {
    put(at.t);
    for (const auto* block : {&at.q, &at.p, &at.qd, &at.pd}) {
      for (double v : *block) {
        out << ',';
        put(v);
      }
    }
    out << '\n';
  }
}

nlohmann::json matrix_to_json(double t, const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"t", t}, {"rows", std::move(rows)}};
}

}  // namespace jmech
