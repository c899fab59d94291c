#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "texture/dynamics.hpp"

namespace texture {

/// Value and functional derivatives of an observable at a momentum state.
struct Observation {
  double value = 0.0;
  Gradient grad;
};

/// A named observable on momentum states with analytic derivatives.
struct ConservedQuantity {
  std::string name;
  std::function<Observation(const MomentumState&, const GammaParams&)> eval;
  /// Optional value-only shortcut.
  std::function<double(const MomentumState&, const GammaParams&)> fast_value;

  [[nodiscard]] double value(const MomentumState& s, const GammaParams& g) const {
    return fast_value ? fast_value(s, g) : eval(s, g).value;
  }
};

namespace detail {

inline Observation coordinate_observation(const MomentumState& s, int index) {
  const int d = algebra_dim(s.phase);
  Observation o{s.mu(index), {AlgVec::Zero(d), AlgVec::Zero(d)}};
  o.grad.d_mu(index) = 1.0;
  return o;
}

inline void require_phase(const MomentumState& s, PhaseId p, const char* what) {
  if (s.phase != p) throw std::invalid_argument(std::string(what) + " is defined for " + std::string(phase_name(p)) + " states");
}

}  // namespace detail

/// Tangent form jm(A, dA) = 2 <<dA, iA>>.
inline double jm_tangent(const CMat3& A, const CMat3& dA, const GammaParams& g) {
  return 2.0 * gpair(dA, I_unit * A, g);
}

/// Momentum form jm = mu^T K^+ b with b_j = <<G_j A, iA>>, i.e. the pullback
/// of the tangent form through the inverse Legendre map.
inline Observation jm_eval(const MomentumState& s, const GammaParams& g) {
  const PhaseId p = s.phase;
  const int d = algebra_dim(p);
  const CMat3 iA = I_unit * s.A;
  const AlgMat K = gram(p, s.A, g);
  const PseudoInverse pk = pseudo_inverse(K, d - isotropy_algebra_dim(p));
  const AlgMat& Kp = pk.inv;
  const AlgMat Q = AlgMat::Identity(d, d) - K * Kp;
  const AlgMat Kp2 = Kp * Kp;

  std::array<CMat3, 6> GA;
  AlgVec b(d);
  for (int j = 0; j < d; ++j) {
    GA[static_cast<std::size_t>(j)] = generator(p, j, s.A);
    b(j) = gpair(GA[static_cast<std::size_t>(j)], iA, g);
  }
  Observation o;
  o.grad.d_mu = Kp * b;
  o.value = s.mu.dot(o.grad.d_mu);
  o.grad.d_G = AlgVec::Zero(d);
  for (int k = 0; k < d; ++k) {
    const CMat3& GkA = GA[static_cast<std::size_t>(k)];
    AlgVec db(d);
    for (int j = 0; j < d; ++j)
      db(j) = gpair(generator(p, j, GkA), iA, g) + gpair(GA[static_cast<std::size_t>(j)], I_unit * GkA, g);
    const AlgMat dK = gram_derivative(p, k, s.A, g);
    const AlgMat dKp = -Kp * dK * Kp + Q * dK * Kp2 + Kp2 * dK * Q;
    o.grad.d_G(k) = s.mu.dot(dKp * b + Kp * db);
  }
  return o;
}

inline double jm(const MomentumState& s, const GammaParams& g) {
  const PhaseId p = s.phase;
  const CMat3 iA = I_unit * s.A;
  AlgVec b(algebra_dim(p));
  for (int j = 0; j < algebra_dim(p); ++j) b(j) = gpair(generator(p, j, s.A), iA, g);
  return s.mu.dot(gram_inverse(p, s.A, g).inv * b);
}

inline Observation h_eval(const MomentumState& s, const GammaParams& g) {
  const HamiltonianEval e = hamiltonian_eval(s, g);
  return {e.value, e.grad};
}

/// e3 . m for every phase with a rotation momentum m.
inline Observation j3_eval(const MomentumState& s) {
  return detail::coordinate_observation(s, (s.phase == PhaseId::APhase1 ? 0 : w_offset(s.phase)) + 2);
}
inline double j3(const MomentumState& s) { return j3_eval(s).value; }

/// -e3 . n, APhase1 only.
inline Observation j3_orb_eval(const MomentumState& s) {
  detail::require_phase(s, PhaseId::APhase1, "j3_orb");
  Observation o = detail::coordinate_observation(s, 5);
  o.value = -o.value;
  o.grad.d_mu = -o.grad.d_mu;
  return o;
}
inline double j3_orb(const MomentumState& s) { return j3_orb_eval(s).value; }

/// Spin momentum map m, APhase1 only.
inline Vec3 j_spin(const MomentumState& s) {
  detail::require_phase(s, PhaseId::APhase1, "j_spin");
  return s.m();
}
inline Observation j_spin_eval(const MomentumState& s, int component) {
  detail::require_phase(s, PhaseId::APhase1, "j_spin");
  return detail::coordinate_observation(s, component);
}

inline Observation j_spin_sq_eval(const MomentumState& s) {
  detail::require_phase(s, PhaseId::APhase1, "j_spin_sq");
  const Vec3 m = s.m();
  Observation o{dot(m, m), {AlgVec::Zero(6), AlgVec::Zero(6)}};
  for (int i = 0; i < 3; ++i) o.grad.d_mu(i) = 2.0 * m[i];
  return o;
}
inline double j_spin_sq(const MomentumState& s) { return j_spin_sq_eval(s).value; }

/// u(1) momentum p (BPhase, Omega1, Omega4).
inline Observation p_eval(const MomentumState& s) {
  if (!has_phase_coordinate(s.phase)) throw std::invalid_argument("phase has no u(1) momentum");
  return detail::coordinate_observation(s, 0);
}

/// C = 1/2 Re Tr(A* A). The derivative along each generator is computed
/// rather than assumed to vanish.
inline Observation casimir_eval(const MomentumState& s) {
  detail::require_phase(s, PhaseId::APhase1, "casimir");
  Observation o{0.5 * pair(s.A, s.A), {AlgVec::Zero(6), AlgVec::Zero(6)}};
  for (int k = 0; k < 6; ++k) o.grad.d_G(k) = pair(s.A, generator(PhaseId::APhase1, k, s.A));
  return o;
}
inline double casimir(const MomentumState& s) { return casimir_eval(s).value; }

/// BPhase momentum maps evaluated on a covector alpha at A:
/// J1 = Re Tr(alpha* iA), J2 = vee 2 Re(alpha* A).
inline double b_momentum_j1(const CMat3& alpha, const CMat3& A) { return trace(adjoint(alpha) * (I_unit * A)).real(); }
inline Vec3 b_momentum_j2(const CMat3& alpha, const CMat3& A) { return vee(re(2.0 * (adjoint(alpha) * A))); }

struct IntegralSet {
  std::vector<ConservedQuantity> quantities;
  bool known_complete = true;
  std::string status;
};

/// Look up an observable by its output name: h, jm, j3orb, jspin1..3,
/// jspin_sq, j3, p, casimir.
inline ConservedQuantity quantity(const std::string& name) {
  if (name == "h") return {name, h_eval, hamiltonian};
  if (name == "jm") return {name, jm_eval, jm};
  if (name == "j3") return {name, [](const MomentumState& s, const GammaParams&) { return j3_eval(s); }, {}};
  if (name == "j3orb") return {name, [](const MomentumState& s, const GammaParams&) { return j3_orb_eval(s); }, {}};
  if (name == "jspin_sq")
    return {name, [](const MomentumState& s, const GammaParams&) { return j_spin_sq_eval(s); }, {}};
  if (name == "p") return {name, [](const MomentumState& s, const GammaParams&) { return p_eval(s); }, {}};
  if (name == "casimir") return {name, [](const MomentumState& s, const GammaParams&) { return casimir_eval(s); }, {}};
  if (name.size() == 6 && name.rfind("jspin", 0) == 0 && name[5] >= '1' && name[5] <= '3') {
    const int c = name[5] - '1';
    return {name, [c](const MomentumState& s, const GammaParams&) { return j_spin_eval(s, c); }, {}};
  }
  throw std::invalid_argument("unknown quantity: " + name);
}

inline IntegralSet integral_set(PhaseId p) {
  IntegralSet r;
  auto add = [&](std::initializer_list<const char*> names) {
    for (const char* n : names) r.quantities.push_back(quantity(n));
  };
  switch (p) {
    case PhaseId::APhase1:
      add({"h", "jm", "j3orb", "jspin3", "jspin_sq"});
      r.status = "completely integrable";
      break;
    case PhaseId::Omega4:
      add({"h", "j3", "jm"});
      r.known_complete = false;
      r.status = "three integrals in involution; a fourth is not known";
      break;
    case PhaseId::BPhase:
      add({"h", "jm", "j3"});
      r.status = "explicitly solvable";
      break;
    default:
      add({"h", "jm", "j3"});
      r.status = "completely integrable";
      break;
  }
  return r;
}

/// Observables tracked along trajectories: the integral set plus the
/// Casimir for APhase1.
inline std::vector<ConservedQuantity> tracked_quantities(PhaseId p) {
  std::vector<ConservedQuantity> q = integral_set(p).quantities;
  if (p == PhaseId::APhase1) q.push_back(quantity("casimir"));
  return q;
}

}  // namespace texture
