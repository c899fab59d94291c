#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "texture/conserved.hpp"

namespace texture {

enum class Method { LieGroupRK4, AmbientRK4Project };

inline std::string_view method_name(Method m) {
  return m == Method::LieGroupRK4 ? "lie-group-rk4" : "ambient-rk4-project";
}

inline Method parse_method(std::string_view s) {
  if (s == "lie-group-rk4") return Method::LieGroupRK4;
  if (s == "ambient-rk4-project") return Method::AmbientRK4Project;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

struct IntegratorConfig {
  Method method = Method::LieGroupRK4;
  double step = 1e-3;
  double z_start = 0.0;
  double z_end = 10.0;
  /// Orbit tolerance; sampled points must satisfy the orbit invariants to
  /// ten times this value.
  double tolerance = 1e-10;
  /// Keep every stride-th step in the trajectory (the endpoint is always kept).
  int sample_stride = 1;

  void validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be positive");
    if (!(z_end > z_start)) throw std::invalid_argument("z_end must exceed z_start");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (sample_stride < 1) throw std::invalid_argument("sample_stride must be at least 1");
  }
};

/// Raised when a step cannot be completed; z is where the failing step started.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double z_at)
      : std::runtime_error(what + " at z = " + std::to_string(z_at)), z(z_at) {}
  double z;
};

/// The ambient method could not bring the stepped point back to the orbit.
class ProjectionFailure : public std::runtime_error {
 public:
  ProjectionFailure(const std::string& what, double dist) : std::runtime_error(what), distance(dist) {}
  double distance;
};

/// dh/dmu, the reduced velocity generating the A-motion.
inline AlgVec velocity_of(const MomentumState& s, const GammaParams& g) {
  return 0.5 * (gram_inverse(s.phase, s.A, g).inv * s.mu);
}

namespace detail {

/// Commutator-free fourth order step. The momenta ride along as an abelian
/// factor, so their update is classical RK4.
inline MomentumState cf4_step(const MomentumState& s, double dz, const GammaParams& g) {
  const PhaseId p = s.phase;
  auto rate = [&](const MomentumState& x, AlgVec& xi) {
    StateRate r = vector_field(x, g);
    xi = std::move(r.xi);
    return r.dmu;
  };
  AlgVec F1, F2, F3, F4;
  const AlgVec k1 = dz * rate(s, F1);
  F1 *= dz;
  const CMat3 Y2 = exp_act(p, 0.5 * F1, s.A);
  const AlgVec k2 = dz * rate({p, s.mu + 0.5 * k1, Y2}, F2);
  F2 *= dz;
  const CMat3 Y3 = exp_act(p, 0.5 * F2, s.A);
  const AlgVec k3 = dz * rate({p, s.mu + 0.5 * k2, Y3}, F3);
  F3 *= dz;
  const CMat3 Y4 = exp_act(p, F3 - 0.5 * F1, Y2);
  const AlgVec k4 = dz * rate({p, s.mu + k3, Y4}, F4);
  F4 *= dz;
  const CMat3 half = exp_act(p, 0.25 * F1 + (1.0 / 6.0) * (F2 + F3) - (1.0 / 12.0) * F4, s.A);
  const CMat3 A1 = exp_act(p, -(1.0 / 12.0) * F1 + (1.0 / 6.0) * (F2 + F3) + 0.25 * F4, half);
  return {p, s.mu + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, A1};
}

/// Gauss-Newton projection of X onto the orbit, moving along generators
/// from the reference orbit point A.
inline CMat3 project_to_orbit(PhaseId p, const CMat3& A, const CMat3& X, int iterations = 5) {
  const int d = algebra_dim(p);
  CMat3 cur = A;
  Eigen::Matrix<double, 18, Eigen::Dynamic, 0, 18, 6> J(18, d);
  Eigen::Matrix<double, 18, 1> r;
  auto flatten = [](const CMat3& M, auto&& out) {
    for (int i = 0; i < 9; ++i) {
      out(2 * i) = M.a[static_cast<std::size_t>(i)].real();
      out(2 * i + 1) = M.a[static_cast<std::size_t>(i)].imag();
    }
  };
  for (int it = 0; it < iterations; ++it) {
    for (int k = 0; k < d; ++k) flatten(generator(p, k, cur), J.col(k));
    flatten(X - cur, r);
    Eigen::CompleteOrthogonalDecomposition<decltype(J)> cod;
    cod.setThreshold(1e-10);
    const AlgVec delta = cod.compute(J).solve(r);
    cur = exp_act(p, delta, cur);
  }
  const double dist = frobenius(X - cur);
  if (!(dist <= 0.1)) throw ProjectionFailure("projection onto the orbit failed", dist);
  return cur;
}

inline MomentumState ambient_step(const MomentumState& s, double dz, const GammaParams& g) {
  const PhaseId p = s.phase;
  auto rate = [&](const AlgVec& mu, const CMat3& A) { return vector_field({p, mu, A}, g); };
  const StateRate r1 = rate(s.mu, s.A);
  const StateRate r2 = rate(s.mu + 0.5 * dz * r1.dmu, s.A + (0.5 * dz) * r1.dA);
  const StateRate r3 = rate(s.mu + 0.5 * dz * r2.dmu, s.A + (0.5 * dz) * r2.dA);
  const StateRate r4 = rate(s.mu + dz * r3.dmu, s.A + dz * r3.dA);
  const AlgVec mu = s.mu + (dz / 6.0) * (r1.dmu + 2.0 * r2.dmu + 2.0 * r3.dmu + r4.dmu);
  const CMat3 X = s.A + (dz / 6.0) * (r1.dA + 2.0 * r2.dA + 2.0 * r3.dA + r4.dA);
  return {p, mu, project_to_orbit(p, s.A, X)};
}

inline bool finite_state(const MomentumState& s) { return s.mu.allFinite() && is_finite(s.A); }

}  // namespace detail

/// One step of size dz (negative dz integrates backwards).
inline MomentumState step(const MomentumState& s, double dz, const GammaParams& g, Method method = Method::LieGroupRK4) {
  return method == Method::LieGroupRK4 ? detail::cf4_step(s, dz, g) : detail::ambient_step(s, dz, g);
}

/// n steps of size dz; errors carry the z offset from the start.
inline MomentumState advance(MomentumState s, double dz, int n, const GammaParams& g, Method method = Method::LieGroupRK4) {
  for (int i = 0; i < n; ++i) {
    try {
      s = step(s, dz, g, method);
    } catch (const ProjectionFailure& e) {
      throw IntegrationError(e.what(), i * dz);
    } catch (const SingularSolve& e) {
      throw IntegrationError(e.what(), i * dz);
    }
    if (!detail::finite_state(s)) throw IntegrationError("non-finite state", i * dz);
  }
  return s;
}

struct DriftReport {
  /// max |q(z) - q(z0)| / max(|q(z0)|, 1) per quantity.
  std::map<std::string, double> relative;
  double orbit_residual = 0.0;
};

struct Trajectory {
  PhaseId phase = PhaseId::APhase2;
  std::vector<double> z;
  std::vector<MomentumState> states;
  std::vector<std::string> names;
  /// values[i][q] is quantity q at sample i.
  std::vector<std::vector<double>> values;
  DriftReport drift;
};

inline int step_count(const IntegratorConfig& c) {
  return static_cast<int>(std::ceil((c.z_end - c.z_start) / c.step - 1e-9));
}

/// Integrate from z_start to z_end with a uniform step no larger than the
/// configured one. Drift is tracked at every step, states only at samples.
inline Trajectory simulate(const MomentumState& initial, const GammaParams& g, const IntegratorConfig& c) {
  c.validate();
  g.validate();
  const PhaseId p = initial.phase;
  if (!detail::finite_state(initial) || initial.mu.size() != algebra_dim(p))
    throw std::invalid_argument("initial state is not valid for phase " + std::string(phase_name(p)));
  const int n = step_count(c);
  const double dz = (c.z_end - c.z_start) / n;
  const auto qs = tracked_quantities(p);

  Trajectory t;
  t.phase = p;
  for (const auto& q : qs) t.names.push_back(q.name);
  std::vector<double> q0;
  for (const auto& q : qs) q0.push_back(q.value(initial, g));
  for (const auto& name : t.names) t.drift.relative[name] = 0.0;

  auto record = [&](double z, const MomentumState& s, const std::vector<double>& vals) {
    const double res = orbit_residual(p, s.A);
    t.drift.orbit_residual = std::max(t.drift.orbit_residual, res);
    if (!(res <= 10.0 * c.tolerance)) throw IntegrationError("state left the orbit", z);
    t.z.push_back(z);
    t.states.push_back(s);
    t.values.push_back(vals);
  };
  record(c.z_start, initial, q0);

  MomentumState s = initial;
  std::vector<double> vals(qs.size());
  for (int i = 1; i <= n; ++i) {
    const double z_prev = c.z_start + (i - 1) * dz;
    try {
      s = step(s, dz, g, c.method);
    } catch (const ProjectionFailure& e) {
      throw IntegrationError(e.what(), z_prev);
    } catch (const SingularSolve& e) {
      throw IntegrationError(e.what(), z_prev);
    }
    if (!detail::finite_state(s)) throw IntegrationError("non-finite state", z_prev);
    for (std::size_t k = 0; k < qs.size(); ++k) {
      vals[k] = qs[k].value(s, g);
      double& d = t.drift.relative[t.names[k]];
      d = std::max(d, std::abs(vals[k] - q0[k]) / std::max(std::abs(q0[k]), 1.0));
    }
    if (i % c.sample_stride == 0 || i == n) record(i == n ? c.z_end : c.z_start + i * dz, s, vals);
  }
  return t;
}

struct BPhaseSolution {
  double v = 0.0;
  Vec3 w;
  CMat3 A;
};

/// Closed form for the B-phase texture equations: v constant, w rotating
/// about e3 as a free symmetric top, and
/// A(z) = e^{i v0 z} A0 exp(z (J w0)^ / a) rho(Omega z).
inline BPhaseSolution bphase_analytic(double v0, const Vec3& w0, const CMat3& A0, const GammaParams& g, double z) {
  const double a = 4.0 * g.g1 + 2.0 * g.g2 + 2.0 * g.g3;
  const double c = 4.0 * g.g1;
  const double rate = (a - c) * w0[2] / a;
  const Vec3 Jw0{a * w0[0], a * w0[1], c * w0[2]};
  BPhaseSolution r;
  r.v = v0;
  r.w = rho(-rate * z) * w0;
  r.A = std::exp(I_unit * (v0 * z)) * (A0 * (exp_so3((z / a) * Jw0) * rho(rate * z)));
  return r;
}

/// Group curve with g' g^{-1} = xi(z) from velocity samples on a uniform
/// grid; midpoint velocities come from cubic interpolation.
inline std::vector<GroupElem> reconstruct(PhaseId p, const std::vector<double>& z, const std::vector<AlgVec>& xi,
                                          const GroupElem& g0) {
  if (z.size() != xi.size()) throw std::invalid_argument("grid and velocity sizes differ");
  std::vector<GroupElem> out{g0};
  const std::size_t n = z.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = z[i + 1] - z[i];
    AlgVec mid;
    if (n < 4) {
      mid = 0.5 * (xi[i] + xi[i + 1]);
    } else {
      // four consecutive samples around the interval, midpoint weights of
      // the cubic through them
      const std::size_t j = std::min(std::max<std::size_t>(i, 1) - 1, n - 4);
      const double t = 0.5 + static_cast<double>(i - j);
      const double w0 = -(t - 1) * (t - 2) * (t - 3) / 6.0, w1 = t * (t - 2) * (t - 3) / 2.0;
      const double w2 = -t * (t - 1) * (t - 3) / 2.0, w3 = t * (t - 1) * (t - 2) / 6.0;
      mid = w0 * xi[j] + w1 * xi[j + 1] + w2 * xi[j + 2] + w3 * xi[j + 3];
    }
    const AlgVec F1 = h * xi[i], F2 = h * mid, F4 = h * xi[i + 1];
    const GroupElem right = algebra_exp(p, 0.25 * F1 + (1.0 / 3.0) * F2 - (1.0 / 12.0) * F4);
    const GroupElem left = algebra_exp(p, -(1.0 / 12.0) * F1 + (1.0 / 3.0) * F2 + 0.25 * F4);
    out.push_back(compose(left, compose(right, out.back())));
  }
  return out;
}

}  // namespace texture
