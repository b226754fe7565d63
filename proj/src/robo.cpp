#include "lbd/robo.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "lbd/errors.hpp"

namespace lbd::robo {

std::string kind_name(RobotKind k) {
  switch (k) {
    case RobotKind::Rotational2: return "rotational2";
    case RobotKind::Rotational3: return "rotational3";
    case RobotKind::Prismatic2: return "prismatic2";
  }
  return "?";
}

RobotKind kind_from_name(const std::string& name) {
  if (name == "rotational2") return RobotKind::Rotational2;
  if (name == "rotational3") return RobotKind::Rotational3;
  if (name == "prismatic2") return RobotKind::Prismatic2;
  throw ValidationError("unknown robot kind '" + name + "'");
}

int RobotSpec::joints() const { return kind == RobotKind::Rotational3 ? 3 : 2; }

void RobotSpec::validate() const {
  const int q = joints();
  auto need = [&](const Eigen::VectorXd& v, const char* what) {
    if (static_cast<int>(v.size()) != q)
      throw ValidationError(std::string("robot spec: ") + what + " must have one entry per joint");
  };
  need(mass, "mass");
  need(length, "length");
  need(friction, "friction");
  for (int i = 0; i < q; ++i) {
    if (!(mass[i] > 0)) throw ValidationError("robot spec: masses must be positive");
    if (!(length[i] > 0)) throw ValidationError("robot spec: lengths must be positive");
    if (!(friction[i] >= 0)) throw ValidationError("robot spec: friction must be non-negative");
  }
  if (kind != RobotKind::Prismatic2) {
    need(inertia, "inertia");
    need(com, "com");
    for (int i = 0; i < q; ++i) {
      if (!(inertia[i] > 0)) throw ValidationError("robot spec: inertias must be positive");
      if (!(com[i] > 0 && com[i] <= length[i]))
        throw ValidationError("robot spec: center of mass must lie on the link");
    }
  }
}

ArmParams lump_parameters(const RobotSpec& spec) {
  spec.validate();
  const int q = spec.joints();
  ArmParams p;
  p.kind = spec.kind;
  p.friction = spec.friction;
  p.lengths = spec.length;
  if (spec.kind == RobotKind::Prismatic2) {
    p.mass_coeff = Eigen::MatrixXd::Zero(2, 2);
    p.mass_coeff(0, 0) = spec.mass[0] + spec.mass[1];
    p.mass_coeff(1, 1) = spec.mass[1];
    p.gravity_coeff = Eigen::VectorXd::Zero(2);
    p.gravity_accel = spec.gravity;
    return p;
  }
  p.mass_coeff = Eigen::MatrixXd::Zero(q, q);
  p.gravity_coeff = Eigen::VectorXd::Zero(q);
  for (int i = 0; i < q; ++i) {
    double tail_mass = 0.0;  // mass carried beyond link i
    for (int k = i + 1; k < q; ++k) tail_mass += spec.mass[k];
    p.mass_coeff(i, i) = spec.mass[i] * spec.com[i] * spec.com[i] + spec.inertia[i] +
                         tail_mass * spec.length[i] * spec.length[i];
    p.gravity_coeff[i] = -(spec.mass[i] * spec.com[i] + tail_mass * spec.length[i]) * spec.gravity;
    for (int j = i + 1; j < q; ++j) {
      double tail_j = 0.0;
      for (int k = j + 1; k < q; ++k) tail_j += spec.mass[k];
      const double c = (spec.mass[j] * spec.com[j] + tail_j * spec.length[j]) * spec.length[i];
      p.mass_coeff(i, j) = c;
      p.mass_coeff(j, i) = c;
    }
  }
  p.gravity_accel = spec.gravity;
  return p;
}

bool Workspace::contains(const Eigen::Vector2d& p, double slack) const {
  if (annulus) {
    const double r = p.norm();
    return r >= r_min - slack && r <= r_max + slack;
  }
  return p.x() >= x_lo - slack && p.x() <= x_hi + slack && p.y() >= y_lo - slack &&
         p.y() <= y_hi + slack;
}

Eigen::Vector2d Workspace::clamp(const Eigen::Vector2d& p) const {
  if (annulus) {
    const double r = p.norm();
    if (r < 1e-12) return Eigen::Vector2d(0.0, r_min);
    const double rc = std::min(std::max(r, r_min), r_max);
    return p * (rc / r);
  }
  return Eigen::Vector2d(std::min(std::max(p.x(), x_lo), x_hi),
                         std::min(std::max(p.y(), y_lo), y_hi));
}

Eigen::Vector2d Workspace::sample_interior(Rng& rng, double margin) const {
  if (annulus) {
    const double lo = r_min + margin * (r_max - r_min);
    const double hi = r_max - margin * (r_max - r_min);
    const double r = std::sqrt(rng.uniform(lo * lo, hi * hi));
    const double phi = rng.uniform(0.0, 6.283185307179586);
    return Eigen::Vector2d(r * std::sin(phi), r * std::cos(phi));
  }
  const double mx = margin * (x_hi - x_lo), my = margin * (y_hi - y_lo);
  return Eigen::Vector2d(rng.uniform(x_lo + mx, x_hi - mx), rng.uniform(y_lo + my, y_hi - my));
}

ArmDynamics::ArmDynamics(ArmParams params) : params_(std::move(params)), nq_(params_.joints()) {
  if (params_.kind == RobotKind::Prismatic2 && nq_ != 2)
    throw ValidationError("prismatic arm must have 2 joints");
}

Eigen::MatrixXd ArmDynamics::inertia(const Eigen::VectorXd& theta) const {
  if (params_.kind == RobotKind::Prismatic2) return params_.mass_coeff;
  Eigen::MatrixXd m(nq_, nq_);
  for (int i = 0; i < nq_; ++i) {
    m(i, i) = params_.mass_coeff(i, i);
    for (int j = i + 1; j < nq_; ++j) {
      const double v = params_.mass_coeff(i, j) * std::cos(theta[j] - theta[i]);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

Eigen::VectorXd ArmDynamics::bias(const Eigen::VectorXd& state) const {
  const auto theta = state.head(nq_);
  const auto omega = state.tail(nq_);
  Eigen::VectorXd b(nq_);
  if (params_.kind == RobotKind::Prismatic2) {
    b[0] = params_.friction[0] * omega[0] + params_.mass_coeff(0, 0) * params_.gravity_accel;
    b[1] = params_.friction[1] * omega[1];
    return b;
  }
  for (int i = 0; i < nq_; ++i) {
    double v = params_.gravity_coeff[i] * std::sin(theta[i]) + params_.friction[i] * omega[i];
    for (int j = 0; j < nq_; ++j) {
      if (j == i) continue;
      v -= params_.mass_coeff(i, j) * std::sin(theta[j] - theta[i]) * omega[j] * omega[j];
    }
    b[i] = v;
  }
  return b;
}

namespace {

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd inv = m.inverse();
  const double cond = m.cwiseAbs().rowwise().sum().maxCoeff() *
                      inv.cwiseAbs().rowwise().sum().maxCoeff();
  if (!inv.allFinite() || cond > 1e12)
    throw SingularConfigurationError("inertia matrix numerically singular (cond ~ " +
                                     std::to_string(cond) + ")");
  return inv;
}

}  // namespace

Eigen::VectorXd ArmDynamics::acceleration(const Eigen::VectorXd& state,
                                          const Eigen::VectorXd& tau) const {
  const auto omega = state.tail(nq_);
  if (params_.kind == RobotKind::Prismatic2) {
    Eigen::VectorXd alpha(2);
    alpha[0] = (tau[0] - params_.friction[0] * omega[0]) / params_.mass_coeff(0, 0) -
               params_.gravity_accel;
    alpha[1] = (tau[1] - params_.friction[1] * omega[1]) / params_.mass_coeff(1, 1);
    return alpha;
  }
  const Eigen::MatrixXd minv = checked_inverse(inertia(state.head(nq_)));
  return minv * (tau - bias(state));
}

void ArmDynamics::deriv(const Eigen::VectorXd& state, const Eigen::VectorXd& tau,
                        Eigen::Ref<Eigen::VectorXd> dx) const {
  dx.head(nq_) = state.tail(nq_);
  dx.tail(nq_) = acceleration(state, tau);
}

void ArmDynamics::linearize(const Eigen::VectorXd& state, const Eigen::VectorXd& tau,
                            Eigen::MatrixXd& state_jac, Eigen::MatrixXd& control_jac) const {
  const int n = state_dim();
  state_jac = Eigen::MatrixXd::Zero(n, n);
  control_jac = Eigen::MatrixXd::Zero(n, nq_);
  state_jac.topRightCorner(nq_, nq_).setIdentity();

  const auto theta = state.head(nq_);
  const auto omega = state.tail(nq_);

  if (params_.kind == RobotKind::Prismatic2) {
    for (int i = 0; i < 2; ++i) {
      const double inv = 1.0 / params_.mass_coeff(i, i);
      state_jac(nq_ + i, nq_ + i) = -params_.friction[i] * inv;
      control_jac(nq_ + i, i) = inv;
    }
    return;
  }

  const Eigen::MatrixXd minv = checked_inverse(inertia(theta));
  const Eigen::VectorXd alpha = minv * (tau - bias(state));

  // d alpha / d theta_a = Minv (dr/dtheta_a - dM/dtheta_a alpha), r = tau - bias.
  for (int a = 0; a < nq_; ++a) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nq_);
    // -(dM/dtheta_a) alpha: dM(i,j)/dtheta_a = -Mc(i,j) sin(th_j - th_i) (d_ja - d_ia)
    for (int i = 0; i < nq_; ++i)
      for (int j = 0; j < nq_; ++j) {
        if (i == j) continue;
        const double delta = (j == a ? 1.0 : 0.0) - (i == a ? 1.0 : 0.0);
        if (delta == 0.0) continue;
        const double dmij = -params_.mass_coeff(i, j) * std::sin(theta[j] - theta[i]) * delta;
        rhs[i] -= dmij * alpha[j];
      }
    // -(dbias/dtheta_a)
    for (int i = 0; i < nq_; ++i) {
      double db = (i == a) ? params_.gravity_coeff[i] * std::cos(theta[i]) : 0.0;
      for (int j = 0; j < nq_; ++j) {
        if (j == i) continue;
        const double delta = (j == a ? 1.0 : 0.0) - (i == a ? 1.0 : 0.0);
        if (delta == 0.0) continue;
        db -= params_.mass_coeff(i, j) * std::cos(theta[j] - theta[i]) * delta * omega[j] * omega[j];
      }
      rhs[i] -= db;
    }
    state_jac.col(a).tail(nq_) = minv * rhs;
  }

  // d alpha / d omega_a = Minv (-dbias/domega_a)
  for (int a = 0; a < nq_; ++a) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nq_);
    for (int i = 0; i < nq_; ++i) {
      double db = (i == a) ? params_.friction[i] : 0.0;
      if (i != a) db -= 2.0 * params_.mass_coeff(i, a) * std::sin(theta[a] - theta[i]) * omega[a];
      rhs[i] = -db;
    }
    state_jac.col(nq_ + a).tail(nq_) = minv * rhs;
  }

  control_jac.bottomRows(nq_) = minv;
}

void ArmDynamics::forward_kinematics(const Eigen::VectorXd& state, Eigen::VectorXd& w,
                                     Eigen::Vector2d& z, Eigen::VectorXd& dw,
                                     Eigen::Vector2d& dz) const {
  const auto theta = state.head(nq_);
  const auto omega = state.tail(nq_);
  const int d = interior_joints();
  w.resize(2 * d);
  dw.resize(2 * d);
  if (params_.kind == RobotKind::Prismatic2) {
    const double y1 = params_.lengths[0] + theta[0];
    w << 0.0, y1;
    dw << 0.0, omega[0];
    z = Eigen::Vector2d(params_.lengths[1] + theta[1], y1);
    dz = Eigen::Vector2d(omega[1], omega[0]);
    return;
  }
  Eigen::Vector2d p(0.0, 0.0), dp(0.0, 0.0);
  for (int i = 0; i < nq_; ++i) {
    p += params_.lengths[i] * Eigen::Vector2d(std::sin(theta[i]), std::cos(theta[i]));
    dp += params_.lengths[i] * omega[i] * Eigen::Vector2d(std::cos(theta[i]), -std::sin(theta[i]));
    if (i < d) {
      w.segment<2>(2 * i) = p;
      dw.segment<2>(2 * i) = dp;
    }
  }
  z = p;
  dz = dp;
}

Eigen::Vector2d ArmDynamics::tip_position(const Eigen::VectorXd& theta) const {
  if (params_.kind == RobotKind::Prismatic2)
    return Eigen::Vector2d(params_.lengths[1] + theta[1], params_.lengths[0] + theta[0]);
  Eigen::Vector2d p(0.0, 0.0);
  for (int i = 0; i < nq_; ++i)
    p += params_.lengths[i] * Eigen::Vector2d(std::sin(theta[i]), std::cos(theta[i]));
  return p;
}

Eigen::MatrixXd ArmDynamics::tip_jacobian(const Eigen::VectorXd& theta) const {
  Eigen::MatrixXd jac(2, nq_);
  if (params_.kind == RobotKind::Prismatic2) {
    jac << 0.0, 1.0, 1.0, 0.0;
    return jac;
  }
  for (int i = 0; i < nq_; ++i) {
    jac(0, i) = params_.lengths[i] * std::cos(theta[i]);
    jac(1, i) = -params_.lengths[i] * std::sin(theta[i]);
  }
  return jac;
}

Eigen::VectorXd ArmDynamics::state_from_observation(const Eigen::Vector2d& z,
                                                    const Eigen::VectorXd& w,
                                                    const Eigen::Vector2d& dz,
                                                    const Eigen::VectorXd& dw) const {
  Eigen::VectorXd state(state_dim());
  if (params_.kind == RobotKind::Prismatic2) {
    state[0] = w[1] - params_.lengths[0];
    state[1] = z[0] - params_.lengths[1];
    state[2] = dw[1];
    state[3] = dz[0];
    return state;
  }
  Eigen::Vector2d prev(0.0, 0.0), dprev(0.0, 0.0);
  for (int i = 0; i < nq_; ++i) {
    const bool tip = (i == nq_ - 1);
    const Eigen::Vector2d p = tip ? z : Eigen::Vector2d(w.segment<2>(2 * i));
    const Eigen::Vector2d dp = tip ? dz : Eigen::Vector2d(dw.segment<2>(2 * i));
    const Eigen::Vector2d seg = p - prev;
    const Eigen::Vector2d dseg = dp - dprev;
    state[i] = std::atan2(seg.x(), seg.y());
    state[nq_ + i] = -(seg.x() * dseg.y() - seg.y() * dseg.x()) / seg.squaredNorm();
    prev = p;
    dprev = dp;
  }
  return state;
}

double ArmDynamics::energy(const Eigen::VectorXd& state) const {
  const auto theta = state.head(nq_);
  const auto omega = state.tail(nq_);
  if (params_.kind == RobotKind::Prismatic2) {
    const double kinetic = 0.5 * (params_.mass_coeff(0, 0) * omega[0] * omega[0] +
                                  params_.mass_coeff(1, 1) * omega[1] * omega[1]);
    return kinetic + params_.mass_coeff(0, 0) * params_.gravity_accel * theta[0];
  }
  const double kinetic = 0.5 * omega.dot(inertia(theta) * omega);
  double potential = 0.0;
  for (int i = 0; i < nq_; ++i) potential -= params_.gravity_coeff[i] * std::cos(theta[i]);
  return kinetic + potential;
}

Eigen::VectorXd ArmDynamics::home_state() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(state_dim());
  if (params_.kind != RobotKind::Prismatic2)
    for (int i = 0; i < nq_; ++i) x[i] = 3.14159265358979323846;
  return x;
}

Workspace ArmDynamics::workspace() const {
  Workspace ws;
  if (params_.kind == RobotKind::Prismatic2) {
    ws.annulus = false;
    ws.x_lo = 0.5 * params_.lengths[1];
    ws.x_hi = 2.0 * params_.lengths[1];
    ws.y_lo = 0.5 * params_.lengths[0];
    ws.y_hi = 2.0 * params_.lengths[0];
    return ws;
  }
  const double total = params_.lengths.sum();
  ws.annulus = true;
  ws.r_max = total;
  ws.r_min = std::max(0.0, 2.0 * params_.lengths.maxCoeff() - total);
  return ws;
}

void InterfaceMap::validate() const {
  const int q = latent_dim(), p = control_dim();
  if (p < q) throw ValidationError("interface map must have p >= q");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  if (svd.singularValues()[q - 1] <= 1e-9 * svd.singularValues()[0])
    throw ValidationError("interface map must have full row rank");
}

InterfaceMap InterfaceMap::identity(int q) { return InterfaceMap{Eigen::MatrixXd::Identity(q, q)}; }

InterfaceMap InterfaceMap::random(int q, int p, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::MatrixXd dir(q, p);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < p; ++j) dir(i, j) = rng.normal();
    // Row norms spread across one order of magnitude, in shuffled order.
    std::vector<double> norms(q);
    const double base = rng.uniform(0.8, 1.25);
    for (int i = 0; i < q; ++i)
      norms[i] = base * std::pow(10.0, (q == 1 ? 0.0 : static_cast<double>(i) / (q - 1)) - 0.5);
    for (int i = q - 1; i > 0; --i) std::swap(norms[i], norms[rng.uniform_int(0, i)]);
    for (int i = 0; i < q; ++i) dir.row(i) *= norms[i] / dir.row(i).norm();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dir);
    if (svd.singularValues()[q - 1] > 0.02 * svd.singularValues()[0]) return InterfaceMap{dir};
  }
  throw ValidationError("interface sampling failed to produce a well-conditioned matrix");
}

namespace {

RobotSpec sample_spec(RobotKind kind, Rng& rng) {
  RobotSpec s;
  s.kind = kind;
  const int q = s.joints();
  s.mass.resize(q);
  s.length.resize(q);
  s.friction.resize(q);
  for (int i = 0; i < q; ++i) s.mass[i] = rng.uniform(0.5, 2.0);
  for (int i = 0; i < q; ++i) s.length[i] = rng.uniform(0.5, 1.0);
  if (kind == RobotKind::Prismatic2) {
    s.friction.setZero();  // printed prismatic model has no friction
  } else {
    s.inertia.resize(q);
    s.com.resize(q);
    for (int i = 0; i < q; ++i) {
      s.com[i] = 0.5 * s.length[i];
      s.inertia[i] = s.mass[i] * s.length[i] * s.length[i] / 12.0;
      s.friction[i] = rng.uniform(0.05, 0.2);
    }
  }
  s.gravity = 9.81;
  return s;
}

}  // namespace

std::vector<RobotSystem> build_system_table(std::uint64_t seed) {
  struct Family {
    RobotKind kind;
    int q;
    std::array<int, 4> control_dims;
    std::array<const char*, 2> theta_names;
    std::array<const char*, 4> iface_names;
    const char* noun;
  };
  const std::array<Family, 3> families = {{
      {RobotKind::Rotational2, 2, {2, 2, 3, 4}, {"great", "rebel"},
       {"devious", "vivacious", "mauve", "wine"}, "beetle"},
      {RobotKind::Rotational3, 3, {3, 3, 4, 6}, {"talented", "thoughtful"},
       {"ruddy", "steel", "zippy", "antique"}, "butterfly"},
      {RobotKind::Prismatic2, 2, {2, 2, 3, 4}, {"great", "lush"},
       {"piquant", "bipedal", "impartial", "proficient"}, "bumblebee"},
  }};

  std::vector<RobotSystem> table;
  int id = 1;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const Family& fam = families[f];
    std::array<RobotSpec, 2> specs;
    for (int t = 0; t < 2; ++t) {
      Rng rng = Rng::stream(seed, {stream_tag::kRoboParams, f, static_cast<std::uint64_t>(t)});
      specs[t] = sample_spec(fam.kind, rng);
    }
    std::array<InterfaceMap, 4> ifaces;
    for (int a = 0; a < 4; ++a) {
      if (a == 0) {
        ifaces[a] = InterfaceMap::identity(fam.q);
      } else {
        Rng rng = Rng::stream(seed, {stream_tag::kRoboInterface, f, static_cast<std::uint64_t>(a)});
        ifaces[a] = InterfaceMap::random(fam.q, fam.control_dims[a], rng);
      }
    }
    for (int t = 0; t < 2; ++t)
      for (int a = 0; a < 4; ++a) {
        RobotSystem sys;
        sys.id = id++;
        sys.name = std::string(fam.theta_names[t]) + "-" + fam.iface_names[a] + "-" + fam.noun;
        sys.spec = specs[t];
        sys.interface = ifaces[a];
        table.push_back(std::move(sys));
      }
  }
  return table;
}

std::vector<double> episode_grid() {
  std::vector<double> grid(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) grid[i] = i * kDt;
  return grid;
}

namespace {

/// Natural cubic spline through (t_i, y_i); evaluates anywhere inside [t0, tK].
class CubicSpline {
 public:
  CubicSpline(const std::vector<double>& t, const std::vector<double>& y) : t_(t), y_(y) {
    const int n = static_cast<int>(t.size());
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
      const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    // Thomas solve on the interior unknowns (natural ends stay zero).
    for (int i = 2; i + 1 < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    for (int i = n - 2; i >= 1; --i)
      m_[i] = (d[i] - c[i] * (i + 2 < n ? m_[i + 1] : 0.0)) / b[i];
  }

  double operator()(double x) const {
    const int n = static_cast<int>(t_.size());
    int i = 1;
    while (i + 1 < n && x > t_[i]) ++i;
    const double h = t_[i] - t_[i - 1];
    const double u = (t_[i] - x) / h, v = (x - t_[i - 1]) / h;
    return u * y_[i - 1] + v * y_[i] +
           ((u * u * u - u) * m_[i - 1] + (v * v * v - v) * m_[i]) * h * h / 6.0;
  }

 private:
  std::vector<double> t_, y_;
  std::vector<double> m_;
};

}  // namespace

TargetProcess generate_target(const ArmDynamics& dyn, std::uint64_t seed, int system_id,
                              int target_index, int variant) {
  Rng rng = Rng::stream(seed, {stream_tag::kRoboTargets, static_cast<std::uint64_t>(system_id),
                               static_cast<std::uint64_t>(target_index),
                               static_cast<std::uint64_t>(variant)});
  const Workspace ws = dyn.workspace();
  const Eigen::Vector2d start = dyn.tip_position(dyn.home_state().head(dyn.joints()));
  const double extent = ws.annulus ? ws.r_max : std::min(ws.x_hi - ws.x_lo, ws.y_hi - ws.y_lo);

  // Way points every 0.5 s: a slow random walk pulled into the interior.
  const double margin = 0.15;
  auto pull_inside = [&](const Eigen::Vector2d& p) {
    if (ws.annulus) {
      Workspace inner = ws;
      inner.r_min = ws.r_min + margin * (ws.r_max - ws.r_min);
      inner.r_max = ws.r_max - margin * (ws.r_max - ws.r_min);
      return inner.clamp(p);
    }
    Workspace inner = ws;
    inner.x_lo += margin * (ws.x_hi - ws.x_lo);
    inner.x_hi -= margin * (ws.x_hi - ws.x_lo);
    inner.y_lo += margin * (ws.y_hi - ws.y_lo);
    inner.y_hi -= margin * (ws.y_hi - ws.y_lo);
    return inner.clamp(p);
  };

  const std::vector<double> knot_times{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<Eigen::Vector2d> knots;
  knots.push_back(start);
  Eigen::Vector2d cur = pull_inside(start);
  for (int k = 1; k < 5; ++k) {
    cur = pull_inside(cur + 0.12 * extent * Eigen::Vector2d(rng.normal(), rng.normal()));
    knots.push_back(cur);
  }

  std::vector<double> xs, ys;
  for (const auto& p : knots) {
    xs.push_back(p.x());
    ys.push_back(p.y());
  }
  const CubicSpline sx(knot_times, xs), sy(knot_times, ys);

  TargetProcess target;
  target.points.resize(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    const double t = i * kDt;
    target.points[i] = ws.clamp(Eigen::Vector2d(sx(t), sy(t)));
  }
  target.points[0] = start;  // exact by construction
  return target;
}

}  // namespace lbd::robo
