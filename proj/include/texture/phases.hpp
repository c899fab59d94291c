#pragma once

// Phase registry: base points, group actions, orbit membership, isotropy,
// random orbit sampling and the Ginzburg-Landau potential.

#include <array>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "texture/algebra.hpp"

namespace texture {

enum class PhaseId { APhase1, APhase2, BPhase, Omega1, Omega4, Omega6, Omega8 };

inline constexpr std::array<PhaseId, 7> all_phases{PhaseId::APhase1, PhaseId::APhase2, PhaseId::BPhase,
                                                   PhaseId::Omega1,  PhaseId::Omega4,  PhaseId::Omega6,
                                                   PhaseId::Omega8};

inline std::string_view phase_name(PhaseId p) {
  switch (p) {
    case PhaseId::APhase1: return "a1";
    case PhaseId::APhase2: return "a2";
    case PhaseId::BPhase: return "b";
    case PhaseId::Omega1: return "omega1";
    case PhaseId::Omega4: return "omega4";
    case PhaseId::Omega6: return "omega6";
    case PhaseId::Omega8: return "omega8";
  }
  return "?";
}

inline std::ostream& operator<<(std::ostream& os, PhaseId p) { return os << phase_name(p); }

inline PhaseId parse_phase(std::string_view s) {
  for (PhaseId p : all_phases)
    if (phase_name(p) == s) return p;
  throw std::invalid_argument("unknown phase '" + std::string(s) + "'");
}

/// Omega phases act by A -> e^{i phi} R A R^T on symmetric traceless matrices.
inline bool is_omega(PhaseId p) {
  return p == PhaseId::Omega1 || p == PhaseId::Omega4 || p == PhaseId::Omega6 || p == PhaseId::Omega8;
}

/// Dimension of the orbit through the base point.
inline int orbit_dimension(PhaseId p) {
  switch (p) {
    case PhaseId::APhase1: return 5;
    case PhaseId::BPhase:
    case PhaseId::Omega4: return 4;
    default: return 3;
  }
}

struct PhaseInfo {
  std::string_view group;
  std::string_view orbit;
  std::string_view status;
};

inline PhaseInfo phase_info(PhaseId p) {
  switch (p) {
    case PhaseId::APhase1:
      return {"U(1) x SO(3)_L x SO(3)_R", "d (m + i n)^T with d a unit vector and (m, n) orthonormal, diffeomorphic to (S^2 x SO(3))/Z2",
              "completely integrable on the 10-dimensional coadjoint orbit"};
    case PhaseId::APhase2:
      return {"SO(3), A -> R A R^T", "SO(3)/(Z2 x Z2)", "completely integrable on the 6-dimensional coadjoint orbit"};
    case PhaseId::BPhase:
      return {"U(1) x SO(3)_L x SO(3)_R", "U(1) x SO(3)", "explicitly solvable (free symmetric rigid body)"};
    case PhaseId::Omega1:
      return {"U(1) x SO(3), A -> e^{i phi} R A R^T", "U(1) x SO(3)/(Z2 x SO(2))",
              "completely integrable on all 6-dimensional coadjoint orbits"};
    case PhaseId::Omega4:
      return {"U(1) x SO(3), A -> e^{i phi} R A R^T", "(U(1) x SO(3))/tetrahedral group",
              "three integrals in involution; completeness unknown"};
    case PhaseId::Omega6:
      return {"U(1) x SO(3), A -> e^{i phi} R A R^T", "(U(1) x SO(3))/(U(1) x Z2)",
              "completely integrable on the 6-dimensional coadjoint orbit"};
    case PhaseId::Omega8:
      return {"U(1) x SO(3), A -> e^{i phi} R A R^T", "diffeomorphic to SO(3)",
              "completely integrable on the 6-dimensional coadjoint orbit"};
  }
  return {};
}

inline const cplx omega_cube_root{-0.5, 0.86602540378443864676};

/// Base point A0 of each phase's orbit.
inline CMat3 base_point(PhaseId p) {
  CMat3 A;
  switch (p) {
    case PhaseId::APhase1:
    case PhaseId::APhase2:
      A(2, 0) = 1.0;
      A(2, 1) = I_unit;
      break;
    case PhaseId::BPhase: A = CMat3::identity(); break;
    case PhaseId::Omega1:
      A(0, 0) = 1.0;
      A(1, 1) = 1.0;
      A(2, 2) = -2.0;
      break;
    case PhaseId::Omega4:
      // diag(1, w, w^2): symmetric, traceless, unitary, fixed by the tetrahedral group.
      A(0, 0) = 1.0;
      A(1, 1) = omega_cube_root;
      A(2, 2) = omega_cube_root * omega_cube_root;
      break;
    case PhaseId::Omega6:
      A(0, 0) = 1.0;
      A(0, 1) = I_unit;
      A(1, 0) = I_unit;
      A(1, 1) = -1.0;
      break;
    case PhaseId::Omega8:
      A(0, 1) = 1.0;
      A(0, 2) = I_unit;
      A(1, 0) = 1.0;
      A(2, 0) = I_unit;
      break;
  }
  return A;
}

/// The Omega4 matrix with a stray (2,1) entry, kept for comparison. It is not
/// symmetric and is not fixed by the tetrahedral isotropy group.
inline CMat3 omega4_printed_matrix() {
  CMat3 A;
  A(0, 0) = 1.0;
  A(1, 0) = 1.0;
  A(1, 1) = omega_cube_root;
  A(2, 2) = omega_cube_root * omega_cube_root;
  return A;
}

/// (e^{i phi}, R1, R2) acting by A -> e^{i phi} R1 A R2^T. Omega phases and
/// APhase2 require R1 == R2; APhase2 also requires phi == 0.
struct GroupElem {
  double phi = 0.0;
  Mat3 R1 = Mat3::identity();
  Mat3 R2 = Mat3::identity();

  static GroupElem rotation(const Mat3& R) { return {0.0, R, R}; }
};

inline GroupElem compose(const GroupElem& g, const GroupElem& h) { return {g.phi + h.phi, g.R1 * h.R1, g.R2 * h.R2}; }
inline GroupElem inverse(const GroupElem& g) { return {-g.phi, transpose(g.R1), transpose(g.R2)}; }

inline void validate_group_elem(PhaseId p, const GroupElem& g, double tol = 1e-10) {
  if (so3_residual(g.R1) > tol || so3_residual(g.R2) > tol)
    throw std::invalid_argument("group element rotation is not in SO(3)");
  const bool tied = p == PhaseId::APhase2 || is_omega(p);
  if (tied && frobenius(g.R1 - g.R2) > tol)
    throw std::invalid_argument("phase group acts by conjugation; R1 must equal R2");
  if (p == PhaseId::APhase2 && std::abs(g.phi) > tol)
    throw std::invalid_argument("APhase2 group has no U(1) factor");
}

inline CMat3 act_unchecked(const GroupElem& g, const CMat3& A) {
  return std::polar(1.0, g.phi) * (g.R1 * A * transpose(g.R2));
}

inline CMat3 act(PhaseId p, const GroupElem& g, const CMat3& A) {
  validate_group_elem(p, g);
  return act_unchecked(g, A);
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, pi);
  Vec3 axis{nd(rng), nd(rng), nd(rng)};
  const double n = norm(axis);
  if (n < 1e-12) return Mat3::identity();
  return exp_so3((ang(rng) / n) * axis);
}

inline GroupElem random_group_elem(PhaseId p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ph(0.0, 2.0 * pi);
  GroupElem g;
  g.R1 = random_rotation(rng);
  if (p == PhaseId::APhase1 || p == PhaseId::BPhase) {
    g.R2 = random_rotation(rng);
  } else {
    g.R2 = g.R1;
  }
  if (p != PhaseId::APhase2) g.phi = ph(rng);
  return g;
}

inline CMat3 orbit_sample(PhaseId p, std::mt19937_64& rng) { return act_unchecked(random_group_elem(p, rng), base_point(p)); }

inline CMat3 orbit_sample(PhaseId p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return orbit_sample(p, rng);
}

namespace detail {

inline double max_abs(const CMat3& M) {
  double r = 0.0;
  for (const auto& x : M.a) r = std::max(r, std::abs(x));
  return r;
}
inline double max_abs(const Mat3& M) {
  double r = 0.0;
  for (double x : M.a) r = std::max(r, std::abs(x));
  return r;
}

inline double a_phase_residual(const CMat3& A) {
  const CMat3 As = adjoint(A);
  double r = max_abs(A * As * A - 2.0 * A);
  r = std::max(r, max_abs(A * transpose(A)));
  r = std::max(r, max_abs(im(A * As)));
  return std::max(r, std::abs(trace(A * As) - 2.0));
}

inline double symmetric_traceless_residual(const CMat3& A) {
  return std::max(max_abs(A - transpose(A)), std::abs(trace(A)));
}

// Unit eigenvector of the largest eigenvalue of a real symmetric matrix.
inline Vec3 dominant_eigenvector(const Mat3& S) {
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = 0.5 * (S(i, j) + S(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
  const Eigen::Vector3d v = es.eigenvectors().col(2);
  return {v(0), v(1), v(2)};
}

}  // namespace detail

/// Largest violation of the phase's defining invariant system at A.
inline double orbit_residual(PhaseId p, const CMat3& A) {
  using detail::max_abs;
  if (!is_finite(A)) return std::numeric_limits<double>::infinity();
  const CMat3 As = adjoint(A);
  switch (p) {
    case PhaseId::APhase1: return detail::a_phase_residual(A);
    case PhaseId::APhase2: return std::max(detail::a_phase_residual(A), max_abs(A * A));
    case PhaseId::BPhase: {
      const CMat3 AAt = A * transpose(A);
      return std::max(max_abs(As * A - CMat3::identity()), max_abs(AAt - (trace(AAt) / 3.0) * CMat3::identity()));
    }
    case PhaseId::Omega1: {
      double r = detail::symmetric_traceless_residual(A);
      // e^{-i theta} A is real for a single global phase theta
      for (const auto& x : A.a)
        for (const auto& y : A.a) r = std::max(r, std::abs((x * std::conj(y)).imag()));
      r = std::max(r, std::abs(trace(As * A).real() - 6.0));
      return std::max(r, std::abs(std::abs(det(A)) - 2.0));
    }
    case PhaseId::Omega4: {
      double r = detail::symmetric_traceless_residual(A);
      r = std::max(r, std::abs(trace(A * A)));
      return std::max(r, max_abs(A * As - CMat3::identity()));
    }
    case PhaseId::Omega6: {
      double r = max_abs(A - transpose(A));
      r = std::max(r, max_abs(A * A));
      r = std::max(r, max_abs(A * As * A - 4.0 * A));
      return std::max(r, std::abs(trace(A * As).real() - 4.0));
    }
    case PhaseId::Omega8: {
      double r = detail::symmetric_traceless_residual(A);
      const CMat3 N = A * A;
      const CMat3 S = 0.5 * (A * As - 0.5 * (N * adjoint(N)));
      r = std::max(r, max_abs(im(S)));
      const Vec3 x = detail::dominant_eigenvector(re(S));
      std::array<cplx, 3> a{};
      for (int i = 0; i < 3; ++i) a[i] = A(i, 0) * x[0] + A(i, 1) * x[1] + A(i, 2) * x[2];
      CMat3 B;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) B(i, j) = x[i] * a[j] + a[i] * x[j];
      r = std::max(r, max_abs(A - B));
      cplx aa = 0.0, xa = 0.0;
      double na = 0.0;
      for (int i = 0; i < 3; ++i) {
        aa += a[i] * a[i];
        xa += x[i] * a[i];
        na += std::norm(a[i]);
      }
      r = std::max(r, std::abs(aa));
      r = std::max(r, std::abs(xa));
      return std::max(r, std::abs(na - 2.0));
    }
  }
  return std::numeric_limits<double>::infinity();
}

inline bool is_on_orbit(PhaseId p, const CMat3& A, double tol = 1e-10) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  return orbit_residual(p, A) <= tol;
}

/// True iff g fixes the phase's base point.
inline bool isotropy_check(PhaseId p, const GroupElem& g, double tol = 1e-10) {
  const CMat3 A0 = base_point(p);
  return detail::max_abs(act(p, g, A0) - A0) <= tol;
}

/// The 24 rotation matrices with entries in {0, +1, -1}.
inline std::vector<Mat3> signed_permutation_rotations() {
  std::vector<Mat3> out;
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& pm : perms)
    for (int s = 0; s < 8; ++s) {
      Mat3 R;
      for (int i = 0; i < 3; ++i) R(i, pm[static_cast<std::size_t>(i)]) = (s >> i & 1) ? -1.0 : 1.0;
      if (det(R) > 0.0) out.push_back(R);
    }
  return out;
}

struct PotentialParams {
  double alpha = 1.0;
  std::array<double, 5> beta{0.0, 0.0, 0.0, 0.0, 0.0};
};

/// Ginzburg-Landau potential U(A).
inline double potential_U(const CMat3& A, const PotentialParams& pp) {
  const CMat3 As = adjoint(A);
  const CMat3 AAs = A * As;
  const CMat3 AsA = As * A;
  const double t1 = trace(AAs).real();
  const double t2 = std::norm(trace(A * transpose(A)));
  const double t3 = trace(AsA * conj(AsA)).real();
  const double t4 = trace(AAs * AAs).real();
  const double t5 = trace(AAs * conj(AAs)).real();
  const auto& b = pp.beta;
  return pp.alpha * t1 + b[0] * t2 + b[1] * t1 * t1 + b[2] * t3 + b[3] * t4 + b[4] * t5;
}

/// Gradient energy <<dA, dA>> of a one-dimensional texture.
inline double fgrad(const CMat3& /*A*/, const CMat3& dA, const GammaParams& g) { return gpair(dA, dA, g); }

/// Same energy as the explicit gamma-weighted component sum.
inline double fgrad_components(const CMat3& dA, const GammaParams& g) {
  double s1 = 0.0, s3 = 0.0;
  for (int p = 0; p < 3; ++p) {
    for (int i = 0; i < 3; ++i) s1 += std::norm(dA(p, i));
    s3 += std::norm(dA(p, 2));
  }
  return g.g1 * s1 + (g.g2 + g.g3) * s3;
}

}  // namespace texture
