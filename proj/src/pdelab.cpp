#include "grasspod/pdelab.hpp"

#include "grasspod/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace grasspod {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* pattern, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

void check_state(const Vector& u, double bound, const char* what, double t) {
  if (!u.allFinite() || u.cwiseAbs().maxCoeff() > bound) {
    throw InstabilityError(std::string(what) + ": solution blew up at t = " + std::to_string(t));
  }
}

// Solves (1 + 2s) x_j - s (x_{j-1} + x_{j+1}) = b_j with periodic wrap-around
// (Sherman-Morrison on top of a Thomas sweep, factors computed once).
class CyclicTridiag {
 public:
  CyclicTridiag(Index n, double s) : n_(n), s_(s), cp_(n), denom_(n) {
    const double diag = 1.0 + 2.0 * s;
    const double off = -s;
    gamma_ = -diag;
    Vector bb = Vector::Constant(n, diag);
    bb(0) = diag - gamma_;
    bb(n - 1) = diag - off * off / gamma_;
    denom_(0) = bb(0);
    cp_(0) = off / bb(0);
    for (Index i = 1; i < n; ++i) {
      denom_(i) = bb(i) - off * cp_(i - 1);
      cp_(i) = off / denom_(i);
    }
    Vector u = Vector::Zero(n);
    u(0) = gamma_;
    u(n - 1) = off;
    z_ = thomas(u);
    fact_den_ = 1.0 + z_(0) + off * z_(n - 1) / gamma_;
  }

  Vector solve(const Vector& b) const {
    Vector x = thomas(b);
    const double fact = (x(0) + -s_ * x(n_ - 1) / gamma_) / fact_den_;
    x -= fact * z_;
    return x;
  }

 private:
  Vector thomas(const Vector& r) const {
    const double off = -s_;
    Vector d(n_);
    d(0) = r(0) / denom_(0);
    for (Index i = 1; i < n_; ++i) d(i) = (r(i) - off * d(i - 1)) / denom_(i);
    for (Index i = n_ - 2; i >= 0; --i) d(i) -= cp_(i) * d(i + 1);
    return d;
  }

  Index n_;
  double s_;
  double gamma_ = 0.0;
  double fact_den_ = 1.0;
  Vector cp_;
  Vector denom_;
  Vector z_;
};

double minmod(double p, double q) {
  if (p * q <= 0.0) return 0.0;
  return std::abs(p) < std::abs(q) ? p : q;
}

// -(F_{j+1/2} - F_{j-1/2}) / h with MUSCL-minmod states and a Rusanov flux.
void burgers_rhs(const Vector& u, double h, Vector& out, Vector& flux) {
  const Index n = u.size();
  auto at = [&](Index j) { return u((j % n + n) % n); };
  for (Index j = 0; j < n; ++j) {
    const double um = at(j - 1), u0 = at(j), up = at(j + 1), upp = at(j + 2);
    const double left = u0 + 0.5 * minmod(u0 - um, up - u0);
    const double right = up - 0.5 * minmod(up - u0, upp - up);
    const double speed = std::max(std::abs(left), std::abs(right));
    flux(j) = 0.25 * (left * left + right * right) - 0.5 * speed * (right - left);
  }
  for (Index j = 0; j < n; ++j) out(j) = -(flux(j) - flux((j - 1 + n) % n)) / h;
}

Vector linspace(double lo, double hi, int count) {
  Vector v(count);
  for (int i = 0; i < count; ++i) {
    const double x = count == 1 ? lo : lo + i * (hi - lo) / (count - 1);
    v(i) = std::round(x * 1e10) / 1e10;  // keep grid values at their decimal spelling
  }
  return v;
}

}  // namespace

void BurgersSpec::validate() const {
  if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("burgers: a must be >= 0");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("burgers: nu must be > 0");
  if (nx < 8) throw InvalidArgument("burgers: nx must be >= 8");
  if (nt < 2) throw InvalidArgument("burgers: nt must be >= 2");
  if (!(t_final > 0.0)) throw InvalidArgument("burgers: T must be > 0");
  if (!(cfl > 0.0 && cfl <= 0.5)) throw InvalidArgument("burgers: cfl must lie in (0, 0.5]");
}

SnapshotMatrix run_burgers(const BurgersSpec& spec) {
  spec.validate();
  const Index n = spec.nx;
  const double h = 1.0 / spec.nx;
  const double dt_out = spec.t_final / (spec.nt - 1);

  Vector u(n);
  for (Index j = 0; j < n; ++j) u(j) = spec.a * std::sin(2.0 * kPi * static_cast<double>(j) * h);

  SnapshotMatrix out;
  out.data.resize(n, spec.nt);
  out.parameter = Vector{{spec.a, spec.nu}};
  out.label = fmt("burgers_a%.4f_nu%.5f", spec.a, spec.nu);
  out.data.col(0) = u;

  Vector k1(n), u1(n), flux(n), rhs(n);
  const double bound = 10.0 * spec.a + 1.0;
  for (int k = 1; k < spec.nt; ++k) {
    const double umax = u.cwiseAbs().maxCoeff();
    const int n_sub = std::max(1, static_cast<int>(std::ceil(dt_out * umax / (spec.cfl * h))));
    const double dt = dt_out / n_sub;
    // Crank-Nicolson on half steps (Strang splitting around the advection).
    const double s = spec.nu * (0.5 * dt) / (2.0 * h * h);
    const CyclicTridiag implicit(n, s);
    auto diffuse = [&](Vector& v) {
      for (Index j = 0; j < n; ++j) {
        rhs(j) = v(j) + s * (v((j - 1 + n) % n) - 2.0 * v(j) + v((j + 1) % n));
      }
      v = implicit.solve(rhs);
    };
    for (int m = 0; m < n_sub; ++m) {
      diffuse(u);
      burgers_rhs(u, h, k1, flux);
      u1 = u + dt * k1;
      burgers_rhs(u1, h, k1, flux);
      u = 0.5 * u + 0.5 * (u1 + dt * k1);
      diffuse(u);
    }
    check_state(u, bound, "burgers", k * dt_out);
    out.data.col(k) = u;
  }
  return out;
}

void BeamSpec::validate() const {
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw InvalidArgument("beam: mu1, mu2 must be > 0");
  if (!(alpha > 0.0)) throw InvalidArgument("beam: alpha must be > 0");
  if (!(gamma >= 0.0)) throw InvalidArgument("beam: gamma must be >= 0");
  if (nx < 4) throw InvalidArgument("beam: nx must be >= 4");
  if (nt < 1 || steps_per_snapshot < 1) throw InvalidArgument("beam: nt and steps must be >= 1");
  if (!(t_final > 0.0)) throw InvalidArgument("beam: T must be > 0");
  if (!(load_width > 0.0)) throw InvalidArgument("beam: load width must be > 0");
}

SnapshotMatrix run_beam(const BeamSpec& spec) { return run_beam(spec, nullptr); }

SnapshotMatrix run_beam(const BeamSpec& spec, std::vector<double>* energy) {
  spec.validate();
  const Index n = spec.nx;
  const double h = 1.0 / (spec.nx + 1);

  // Dirichlet second difference; its square is the simply supported
  // fourth difference (ghost values mirror with a sign flip).
  Matrix d2 = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    d2(i, i) = -2.0 / (h * h);
    if (i > 0) d2(i, i - 1) = 1.0 / (h * h);
    if (i + 1 < n) d2(i, i + 1) = 1.0 / (h * h);
  }
  const double a4 = std::pow(spec.alpha, 4);
  const Matrix stiff = a4 * (d2 * d2);

  Vector g1(n), g2(n);
  for (Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i + 1) * h;
    const double w2 = 2.0 * spec.load_width * spec.load_width;
    g1(i) = spec.load1_scale * std::exp(-(x - spec.center1) * (x - spec.center1) / w2);
    g2(i) = spec.load2_scale * std::exp(-(x - spec.center2) * (x - spec.center2) / w2);
  }
  auto force = [&](double t) -> Vector {
    if (spec.forcing_cutoff >= 0.0 && t > spec.forcing_cutoff) return Vector::Zero(n);
    return std::sin(spec.mu1 * kPi * t) * g1 + std::sin(spec.mu2 * kPi * t) * g2;
  };

  const int steps = spec.nt * spec.steps_per_snapshot;
  const double dt = spec.t_final / steps;
  const double damp = 2.0 * spec.gamma;
  // Newmark average acceleration (beta = 1/4, gamma = 1/2), unit mass.
  const double c0 = 4.0 / (dt * dt);
  const double c1 = 2.0 / dt;
  Matrix k_eff = stiff;
  k_eff.diagonal().array() += c0 + damp * c1;
  const Eigen::LLT<Matrix> llt(k_eff);
  if (llt.info() != Eigen::Success) throw SolverFailure("beam: effective stiffness not SPD");

  Vector u = Vector::Zero(n), v = Vector::Zero(n);
  Vector acc = force(0.0) - damp * v - stiff * u;

  SnapshotMatrix out;
  out.data.resize(n, spec.nt);
  out.parameter = Vector{{spec.mu1, spec.mu2}};
  out.label = fmt("beam_mu%g_%g", spec.mu1, spec.mu2);

  auto record_energy = [&] {
    if (energy) energy->push_back(0.5 * v.squaredNorm() + 0.5 * u.dot(stiff * u));
  };
  if (energy) energy->clear();
  record_energy();

  const double bound = 1e6;
  for (int step = 1; step <= steps; ++step) {
    const double t = step * dt;
    const Vector rhs = force(t) + c0 * u + (4.0 / dt) * v + acc + damp * (c1 * u + v);
    const Vector u_next = llt.solve(rhs);
    const Vector acc_next = c0 * (u_next - u) - (4.0 / dt) * v - acc;
    v += 0.5 * dt * (acc + acc_next);
    u = u_next;
    acc = acc_next;
    record_energy();
    if (step % spec.steps_per_snapshot == 0) {
      check_state(u, bound, "beam", t);
      out.data.col(step / spec.steps_per_snapshot - 1) = u;
    }
  }
  return out;
}

void WaveSpec::validate() const {
  if (grid < 4) throw InvalidArgument("wave: grid must be >= 4");
  if (!(dt > 0.0)) throw InvalidArgument("wave: dt must be > 0");
  if (nt < 1) throw InvalidArgument("wave: nt must be >= 1");
  if (!std::isfinite(mu1) || !std::isfinite(mu2)) throw InvalidArgument("wave: non-finite mu");
  if (dt > spacing() / std::sqrt(2.0)) {
    throw InvalidArgument("wave: CFL violated, dt = " + std::to_string(dt) +
                          " > h / sqrt(2) = " + std::to_string(spacing() / std::sqrt(2.0)));
  }
  if (!(slit1_lo <= slit1_hi && slit2_lo <= slit2_hi)) throw InvalidArgument("wave: bad slits");
}

SnapshotMatrix run_wave(const WaveSpec& spec) {
  spec.validate();
  const int m = spec.grid;
  const double h = spec.spacing();
  const double c2 = (spec.dt / h) * (spec.dt / h);
  const Index total = static_cast<Index>(m) * m;

  std::vector<int> slit_rows;
  for (int j = 0; j < m; ++j) {
    const double y = j * h;
    const double eps = 1e-12;
    if ((y >= spec.slit1_lo - eps && y <= spec.slit1_hi + eps) ||
        (y >= spec.slit2_lo - eps && y <= spec.slit2_hi + eps)) {
      slit_rows.push_back(j);
    }
  }

  Vector prev = Vector::Zero(total), cur = Vector::Zero(total), next(total);
  SnapshotMatrix out;
  out.data.resize(total, spec.nt);
  out.parameter = Vector{{spec.mu1, spec.mu2}};
  out.label = fmt("wave_mu%g_%g", spec.mu1, spec.mu2);
  out.data.col(0) = cur;

  // Neumann walls through mirrored ghost values: the neighbor across a wall
  // is the interior neighbor on the other side.
  auto at = [&](int i, int j) { return cur(wave_index(i, j, m)); };
  const double bound = 1e4 * (std::abs(spec.mu1) + 1.0);
  for (int k = 1; k < spec.nt; ++k) {
    for (int j = 0; j < m; ++j) {
      const int jd = j == 0 ? 1 : j - 1;
      const int ju = j == m - 1 ? m - 2 : j + 1;
      for (int i = 0; i < m; ++i) {
        const int il = i == 0 ? 1 : i - 1;
        const int ir = i == m - 1 ? m - 2 : i + 1;
        const double c = at(i, j);
        const double lap = (at(il, j) + at(ir, j)) + (at(i, jd) + at(i, ju)) - 4.0 * c;
        const Index idx = wave_index(i, j, m);
        next(idx) = 2.0 * c - prev(idx) + c2 * lap;
      }
    }
    const double signal = spec.mu1 * std::sin(spec.mu2 * kPi * k * spec.dt);
    for (int j : slit_rows) next(wave_index(0, j, m)) = signal;
    std::swap(prev, cur);
    std::swap(cur, next);
    check_state(cur, bound, "wave", k * spec.dt);
    out.data.col(k) = cur;
  }
  return out;
}

std::vector<GridPoint> burgers_grid() {
  const Vector as = linspace(1.0, 2.2, 6);
  const Vector nus = linspace(0.003, 0.010, 5);
  std::vector<GridPoint> pts;
  for (Index i = 0; i < as.size(); ++i) {
    for (Index j = 0; j < nus.size(); ++j) {
      const std::size_t idx = pts.size();
      pts.push_back({Vector{{as(i), nus(j)}}, idx % 3 == 0 ? "train" : "test",
                     fmt("burgers_a%.4f_nu%.5f", as(i), nus(j))});
    }
  }
  return pts;
}

std::vector<GridPoint> beam_grid() {
  std::vector<GridPoint> pts;
  for (int a = 1; a <= 7; ++a) {
    for (int b = 1; b <= 7; ++b) {
      const bool odd = a % 2 == 1 && b % 2 == 1;
      const bool even = a % 2 == 0 && b % 2 == 0;
      if (!odd && !even) continue;
      pts.push_back({Vector{{double(a), double(b)}}, odd ? "train" : "test",
                     fmt("beam_mu%g_%g", a, b)});
    }
  }
  return pts;
}

std::vector<GridPoint> wave_grid() {
  const Vector m1 = linspace(80.0, 100.0, 6);
  const Vector m2 = linspace(3.0, 5.0, 6);
  std::vector<GridPoint> pts;
  for (Index i = 0; i < m1.size(); ++i) {
    for (Index j = 0; j < m2.size(); ++j) {
      // Interleaved: every amplitude and every frequency appears in training.
      const bool train = (i + j) % 3 == 0;
      pts.push_back({Vector{{m1(i), m2(j)}}, train ? "train" : "test",
                     fmt("wave_mu%g_%g", m1(i), m2(j))});
    }
  }
  return pts;
}

}  // namespace grasspod
