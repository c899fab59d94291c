#pragma once

// Reduced Lagrangians, Legendre maps, Hamiltonians, Lie-Poisson brackets and
// vector fields for every phase.
//
// Each phase has a Lie algebra with a basis e_0..e_{d-1} whose generators
// G_k(A) are linear in A. Coordinates:
//   APhase1            (v1, v2, v3, w1, w2, w3)   G = e_k^ A | A e_k^
//   APhase2/6/8        (w1, w2, w3)               G = [e_k^, A]
//   BPhase             (v, w1, w2, w3)            G = iA | A e_k^
//   Omega1/4           (v, w1, w2, w3)            G = iA | [e_k^, A]
// Momenta use the same layout: (m, n), m, (p, m), (p, m).

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "texture/algebra.hpp"
#include "texture/phases.hpp"

namespace texture {

using AlgVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;
using AlgMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;

class SingularSolve : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int algebra_dim(PhaseId p) {
  switch (p) {
    case PhaseId::APhase1: return 6;
    case PhaseId::BPhase:
    case PhaseId::Omega1:
    case PhaseId::Omega4: return 4;
    default: return 3;
  }
}

/// Dimension of the isotropy algebra, i.e. of the kernel of the Gram matrix.
inline int isotropy_algebra_dim(PhaseId p) { return (p == PhaseId::APhase1 || p == PhaseId::Omega1) ? 1 : 0; }

/// Phases whose first algebra coordinate is the u(1) phase velocity.
inline bool has_phase_coordinate(PhaseId p) {
  return p == PhaseId::BPhase || p == PhaseId::Omega1 || p == PhaseId::Omega4;
}

/// Index of w1 in the algebra coordinates.
inline int w_offset(PhaseId p) {
  if (p == PhaseId::APhase1) return 3;
  return has_phase_coordinate(p) ? 1 : 0;
}

namespace detail {
inline Vec3 seg3(const AlgVec& x, int off) { return {x(off), x(off + 1), x(off + 2)}; }
inline void put3(AlgVec& x, int off, const Vec3& v) {
  for (int i = 0; i < 3; ++i) x(off + i) = v[i];
}
}  // namespace detail

struct ReducedVelocity {
  PhaseId phase = PhaseId::APhase2;
  AlgVec xi;

  /// v is the u(1) velocity (BPhase, Omega1, Omega4); v_vec the left
  /// rotation velocity (APhase1).
  static ReducedVelocity make(PhaseId p, const Vec3& w, double v = 0.0, const Vec3& v_vec = {}) {
    ReducedVelocity r{p, AlgVec::Zero(algebra_dim(p))};
    detail::put3(r.xi, w_offset(p), w);
    if (p == PhaseId::APhase1) detail::put3(r.xi, 0, v_vec);
    if (has_phase_coordinate(p)) r.xi(0) = v;
    return r;
  }
  [[nodiscard]] Vec3 w() const { return detail::seg3(xi, w_offset(phase)); }
  [[nodiscard]] double v() const { return has_phase_coordinate(phase) ? xi(0) : 0.0; }
  [[nodiscard]] Vec3 v_vec() const { return phase == PhaseId::APhase1 ? detail::seg3(xi, 0) : Vec3{}; }
};

struct MomentumState {
  PhaseId phase = PhaseId::APhase2;
  AlgVec mu;
  CMat3 A;

  /// m is the rotation momentum (left momentum for APhase1), n the APhase1
  /// right momentum, p the u(1) momentum.
  static MomentumState make(PhaseId ph, const CMat3& A, const Vec3& m, double p = 0.0, const Vec3& n = {}) {
    MomentumState s{ph, AlgVec::Zero(algebra_dim(ph)), A};
    if (ph == PhaseId::APhase1) {
      detail::put3(s.mu, 0, m);
      detail::put3(s.mu, 3, n);
    } else {
      detail::put3(s.mu, w_offset(ph), m);
      if (has_phase_coordinate(ph)) s.mu(0) = p;
    }
    return s;
  }
  [[nodiscard]] Vec3 m() const { return detail::seg3(mu, phase == PhaseId::APhase1 ? 0 : w_offset(phase)); }
  [[nodiscard]] Vec3 n() const { return phase == PhaseId::APhase1 ? detail::seg3(mu, 3) : Vec3{}; }
  [[nodiscard]] double p() const { return has_phase_coordinate(phase) ? mu(0) : 0.0; }
};

/// Generator of the k-th algebra basis element at A.
inline CMat3 generator(PhaseId p, int k, const CMat3& A) {
  switch (p) {
    case PhaseId::APhase1:
      return k < 3 ? hat(Vec3::unit(k)) * A : A * hat(Vec3::unit(k - 3));
    case PhaseId::BPhase:
      return k == 0 ? I_unit * A : A * hat(Vec3::unit(k - 1));
    case PhaseId::Omega1:
    case PhaseId::Omega4:
      return k == 0 ? I_unit * A : commutator(CMat3(hat(Vec3::unit(k - 1))), A);
    default: return commutator(CMat3(hat(Vec3::unit(k))), A);
  }
}

/// Infinitesimal generator xi_M(A) = sum_k xi_k G_k(A).
inline CMat3 infgen(PhaseId p, const AlgVec& xi, const CMat3& A) {
  CMat3 r;
  for (int k = 0; k < algebra_dim(p); ++k)
    if (xi(k) != 0.0) r += xi(k) * generator(p, k, A);
  return r;
}
inline CMat3 infgen(const ReducedVelocity& xi, const CMat3& A) { return infgen(xi.phase, xi.xi, A); }

/// Algebra bracket [a, b] in coordinates, normalized so that
/// G_a(G_b A) - G_b(G_a A) = G_{[a,b]}(A).
inline AlgVec structure_bracket(PhaseId p, const AlgVec& a, const AlgVec& b) {
  AlgVec r = AlgVec::Zero(algebra_dim(p));
  using detail::put3;
  using detail::seg3;
  switch (p) {
    case PhaseId::APhase1:
      put3(r, 0, cross(seg3(a, 0), seg3(b, 0)));
      put3(r, 3, -cross(seg3(a, 3), seg3(b, 3)));
      break;
    case PhaseId::BPhase: put3(r, 1, -cross(seg3(a, 1), seg3(b, 1))); break;
    case PhaseId::Omega1:
    case PhaseId::Omega4: put3(r, 1, cross(seg3(a, 1), seg3(b, 1))); break;
    default: put3(r, 0, cross(seg3(a, 0), seg3(b, 0))); break;
  }
  return r;
}

/// Group element exp(xi) in the phase's symmetry group.
inline GroupElem algebra_exp(PhaseId p, const AlgVec& xi) {
  const int wo = w_offset(p);
  const Vec3 w = detail::seg3(xi, wo);
  switch (p) {
    case PhaseId::APhase1: return {0.0, exp_so3(detail::seg3(xi, 0)), exp_so3(-w)};
    case PhaseId::BPhase: return {xi(0), Mat3::identity(), exp_so3(-w)};
    case PhaseId::Omega1:
    case PhaseId::Omega4: {
      const Mat3 R = exp_so3(w);
      return {xi(0), R, R};
    }
    default: return GroupElem::rotation(exp_so3(w));
  }
}

inline CMat3 exp_act(PhaseId p, const AlgVec& xi, const CMat3& A) { return act_unchecked(algebra_exp(p, xi), A); }

/// Gram matrix K_jl = <<G_j A, G_l A>>; the reduced Lagrangian is xi^T K xi.
inline AlgMat gram(PhaseId p, const CMat3& A, const GammaParams& g) {
  const int d = algebra_dim(p);
  std::array<CMat3, 6> G;
  for (int k = 0; k < d; ++k) G[static_cast<std::size_t>(k)] = generator(p, k, A);
  AlgMat K(d, d);
  for (int j = 0; j < d; ++j)
    for (int l = j; l < d; ++l) K(j, l) = K(l, j) = gpair(G[static_cast<std::size_t>(j)], G[static_cast<std::size_t>(l)], g);
  return K;
}

/// Derivative of the Gram matrix along the generator curve of e_k.
inline AlgMat gram_derivative(PhaseId p, int k, const CMat3& A, const GammaParams& g) {
  const int d = algebra_dim(p);
  const CMat3 B = generator(p, k, A);
  std::array<CMat3, 6> G, GB;
  for (int j = 0; j < d; ++j) {
    G[static_cast<std::size_t>(j)] = generator(p, j, A);
    GB[static_cast<std::size_t>(j)] = generator(p, j, B);
  }
  AlgMat dK(d, d);
  for (int j = 0; j < d; ++j)
    for (int l = j; l < d; ++l) {
      const auto uj = static_cast<std::size_t>(j), ul = static_cast<std::size_t>(l);
      dK(j, l) = dK(l, j) = gpair(GB[uj], G[ul], g) + gpair(G[uj], GB[ul], g);
    }
  return dK;
}

struct PseudoInverse {
  AlgMat inv;
  AlgMat range_projector;
  double condition = 1.0;
};

/// Moore-Penrose inverse of a symmetric PSD matrix of known rank.
inline PseudoInverse pseudo_inverse(const AlgMat& K, int rank, double max_condition = 1e12) {
  const int d = static_cast<int>(K.rows());
  Eigen::SelfAdjointEigenSolver<AlgMat> es(K);
  const auto& lam = es.eigenvalues();
  const auto& U = es.eigenvectors();
  const double lmax = lam(d - 1);
  const double lmin = lam(d - rank);
  PseudoInverse r;
  r.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(lmin > 0.0) || r.condition > max_condition)
    throw SingularSolve("momentum-velocity map is near singular (condition " + std::to_string(r.condition) + ")");
  r.inv = AlgMat::Zero(d, d);
  r.range_projector = AlgMat::Zero(d, d);
  for (int i = d - rank; i < d; ++i) {
    r.inv += (1.0 / lam(i)) * U.col(i) * U.col(i).transpose();
    r.range_projector += U.col(i) * U.col(i).transpose();
  }
  return r;
}

inline PseudoInverse gram_inverse(PhaseId p, const CMat3& A, const GammaParams& g) {
  return pseudo_inverse(gram(p, A, g), algebra_dim(p) - isotropy_algebra_dim(p));
}

struct InertiaTensors {
  Mat3 I;      // <<A e_a, A e_b>>
  Mat3 chi;    // <<e_a A, e_b A>>
  Mat3 Sigma;  // <<e_a A, A e_b>>
  Mat3 J;      // <<[A, e_a], [A, e_b]>>
};

inline InertiaTensors tensors(const CMat3& A, const GammaParams& g) {
  InertiaTensors t;
  std::array<CMat3, 3> L, R, C;
  for (int a = 0; a < 3; ++a) {
    const CMat3 E(hat(Vec3::unit(a)));
    L[static_cast<std::size_t>(a)] = E * A;
    R[static_cast<std::size_t>(a)] = A * E;
    C[static_cast<std::size_t>(a)] = commutator(A, E);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      t.I(a, b) = gpair(R[ua], R[ub], g);
      t.chi(a, b) = gpair(L[ua], L[ub], g);
      t.Sigma(a, b) = gpair(L[ua], R[ub], g);
      t.J(a, b) = gpair(C[ua], C[ub], g);
    }
  return t;
}

/// Reduced Lagrangian in each phase's closed form.
inline double lagrangian(const ReducedVelocity& xi, const CMat3& A, const GammaParams& g) {
  const Vec3 w = xi.w();
  const double v = xi.v();
  const double trG = 3.0 * g.g1 + g.g2 + g.g3;
  switch (xi.phase) {
    case PhaseId::APhase1: {
      const InertiaTensors t = tensors(A, g);
      const Vec3 vv = xi.v_vec();
      return dot(w, t.I * w) + dot(vv, t.chi * vv) + 2.0 * dot(vv, t.Sigma * w);
    }
    case PhaseId::BPhase:
      return 2.0 * g.g1 * dot(w, w) + (g.g2 + g.g3) * (w[0] * w[0] + w[1] * w[1]) + trG * v * v;
    case PhaseId::Omega1: {
      const Mat3 J = tensors(A, g).J;
      return v * v * gpair(A, A, g) + 2.0 * v * gpair(I_unit * A, commutator(CMat3(hat(w)), A), g) + dot(w, J * w);
    }
    case PhaseId::Omega4: {
      const Mat3 J = tensors(A, g).J;
      return dot(w, J * w) + 2.0 * v * gpair(I_unit * A, commutator(CMat3(hat(w)), A), g) + trG * v * v;
    }
    default: return dot(w, tensors(A, g).J * w);
  }
}

/// The defining form <<xi_M(A), xi_M(A)>>.
inline double lagrangian_from_generator(const ReducedVelocity& xi, const CMat3& A, const GammaParams& g) {
  const CMat3 X = infgen(xi, A);
  return gpair(X, X, g);
}

struct VarDerivatives {
  AlgVec dl_dxi;
  CMat3 dl_dA;
};

/// Variational derivatives of the reduced Lagrangian. dl_dA is the gradient
/// for <A, B> = Re Tr(A^* B) within the phase's ambient space: all of
/// gl(3, C) for the A phases, symmetric traceless matrices for the Omega
/// phases. The BPhase Lagrangian does not depend on A.
inline VarDerivatives var_derivatives(const ReducedVelocity& xi, const CMat3& A, const GammaParams& g) {
  const PhaseId p = xi.phase;
  VarDerivatives r;
  r.dl_dxi = 2.0 * gram(p, A, g) * xi.xi;
  if (p == PhaseId::BPhase) return r;
  const CMat3 X = infgen(xi, A);
  CMat3 grad = -2.0 * infgen(p, xi.xi, times_gamma(X, g));
  if (is_omega(p)) {
    grad = 0.5 * (grad + transpose(grad));
    grad -= (trace(grad) / 3.0) * CMat3::identity();
  }
  r.dl_dA = grad;
  return r;
}

inline MomentumState legendre(const ReducedVelocity& xi, const CMat3& A, const GammaParams& g) {
  return {xi.phase, 2.0 * gram(xi.phase, A, g) * xi.xi, A};
}

/// Minimum-norm velocity for the given momenta.
inline ReducedVelocity inverse_legendre(const MomentumState& s, const GammaParams& g) {
  const PseudoInverse K = gram_inverse(s.phase, s.A, g);
  return {s.phase, 0.5 * K.inv * s.mu};
}

/// Functional derivative bundle of an observable at a momentum state:
/// d_mu is the gradient in the momentum coordinates, d_G[k] the derivative
/// along the generator curve of e_k through A at fixed momenta.
struct Gradient {
  AlgVec d_mu;
  AlgVec d_G;
};

struct HamiltonianEval {
  double value = 0.0;
  Gradient grad;
};

/// h = 1/4 mu^T K^+ mu with its functional derivatives.
inline HamiltonianEval hamiltonian_eval(const MomentumState& s, const GammaParams& g) {
  const PhaseId p = s.phase;
  const int d = algebra_dim(p);
  const AlgMat K = gram(p, s.A, g);
  const PseudoInverse pk = pseudo_inverse(K, d - isotropy_algebra_dim(p));
  const AlgMat& Kp = pk.inv;
  const AlgMat Q = AlgMat::Identity(d, d) - K * Kp;
  const AlgMat Kp2 = Kp * Kp;
  HamiltonianEval r;
  r.grad.d_mu = 0.5 * Kp * s.mu;
  r.value = 0.5 * s.mu.dot(r.grad.d_mu);
  r.grad.d_G = AlgVec::Zero(d);
  for (int k = 0; k < d; ++k) {
    const AlgMat dK = gram_derivative(p, k, s.A, g);
    const AlgMat dKp = -Kp * dK * Kp + Q * dK * Kp2 + Kp2 * dK * Q;
    r.grad.d_G(k) = 0.25 * s.mu.dot(dKp * s.mu);
  }
  return r;
}

inline double hamiltonian(const MomentumState& s, const GammaParams& g) {
  const PseudoInverse K = gram_inverse(s.phase, s.A, g);
  return 0.25 * s.mu.dot(K.inv * s.mu);
}

/// APhase1 ambient expression 1/4 <(m^ A + A n^) Gamma^{-1}, m^ A + A n^>.
/// It agrees with the Legendre-transform energy only when Gamma is a
/// multiple of the identity.
inline double a1_ambient_energy(const MomentumState& s, const GammaParams& g) {
  const CMat3 X = hat(s.m()) * s.A + s.A * hat(s.n());
  const auto d = g.diag();
  CMat3 XG = X;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) XG(i, j) /= d[static_cast<std::size_t>(j)];
  return 0.25 * pair(XG, X);
}

/// Lie-Poisson bracket {f, h} = mu . [f_mu, h_mu] + f_G . h_mu - h_G . f_mu.
/// Evaluated so that swapping f and h negates the result exactly.
inline double poisson_bracket(PhaseId p, const Gradient& f, const Gradient& h, const MomentumState& s) {
  return s.mu.dot(structure_bracket(p, f.d_mu, h.d_mu)) + (f.d_G.dot(h.d_mu) - h.d_G.dot(f.d_mu));
}

struct StateRate {
  AlgVec dmu;
  CMat3 dA;
  /// The velocity dh/dmu that generates dA.
  AlgVec xi;
};

/// Hamiltonian vector field: dA = xi_M(A), dmu_k = mu . [e_k, xi] - h_G[k]
/// with xi = dh/dmu.
inline StateRate vector_field(const MomentumState& s, const GammaParams& g) {
  const PhaseId p = s.phase;
  const int d = algebra_dim(p);
  const HamiltonianEval H = hamiltonian_eval(s, g);
  const AlgVec& xi = H.grad.d_mu;
  StateRate r{AlgVec::Zero(d), infgen(p, xi, s.A), xi};
  for (int k = 0; k < d; ++k) {
    AlgVec e = AlgVec::Zero(d);
    e(k) = 1.0;
    r.dmu(k) = s.mu.dot(structure_bracket(p, e, xi)) - H.grad.d_G(k);
  }
  return r;
}

/// Central finite-difference gradient of an arbitrary observable.
inline Gradient fd_gradient(const std::function<double(const MomentumState&)>& f, const MomentumState& s,
                            double step = 1e-5) {
  const int d = algebra_dim(s.phase);
  Gradient r{AlgVec::Zero(d), AlgVec::Zero(d)};
  for (int k = 0; k < d; ++k) {
    MomentumState a = s, b = s;
    a.mu(k) += step;
    b.mu(k) -= step;
    r.d_mu(k) = (f(a) - f(b)) / (2.0 * step);
    AlgVec e = AlgVec::Zero(d);
    e(k) = step;
    a = s;
    b = s;
    a.A = exp_act(s.phase, e, s.A);
    b.A = exp_act(s.phase, -e, s.A);
    r.d_G(k) = (f(a) - f(b)) / (2.0 * step);
  }
  return r;
}

/// Coadjoint action of (R1, R2, V) on APhase1 states:
/// (m, n, A) -> (R1 m + vee 2 Re(A' V), R2 n + vee 2 Re(V A'), A') with
/// A' = R1 A R2^T.
inline MomentumState coadjoint_act(const GroupElem& g, const CMat3& V, const MomentumState& s) {
  if (s.phase != PhaseId::APhase1) throw std::invalid_argument("coadjoint_act is defined for APhase1 states");
  const CMat3 Ap = g.R1 * s.A * transpose(g.R2);
  const Vec3 m = g.R1 * s.m() + vee(re(2.0 * (Ap * V)));
  const Vec3 n = g.R2 * s.n() + vee(re(2.0 * (V * Ap)));
  return MomentumState::make(PhaseId::APhase1, Ap, m, 0.0, n);
}

inline ReducedVelocity random_velocity(PhaseId p, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  ReducedVelocity r{p, AlgVec::Zero(algebra_dim(p))};
  for (int k = 0; k < algebra_dim(p); ++k) r.xi(k) = nd(rng);
  return r;
}

/// Random orbit point with Legendre-image momenta.
inline MomentumState random_momentum_state(PhaseId p, std::mt19937_64& rng, const GammaParams& g, double scale = 1.0) {
  const CMat3 A = orbit_sample(p, rng);
  return legendre(random_velocity(p, rng, scale), A, g);
}

}  // namespace texture
