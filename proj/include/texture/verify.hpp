#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "texture/integrate.hpp"

namespace texture {

struct VerificationReport {
  std::string check;
  PhaseId phase = PhaseId::APhase2;
  std::uint64_t seed = 0;
  int n_points = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  /// Rank of the differentials (independence), or of the Poisson tensor
  /// (kernel dimension), per sampled point.
  std::map<int, int> rank_histogram;
  /// Rank of the Hamiltonian vector fields (independence only).
  std::map<int, int> hvf_rank_histogram;
  bool known_complete = true;
  bool pass = false;
  /// Reproduction hint for the worst point when the check fails.
  std::string offending;
};

/// Relative numerical rank threshold.
inline constexpr double rank_threshold = 1e-8;

inline int numerical_rank(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
  if (sv(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_threshold * sv(0)) ++r;
  return r;
}

/// Coordinates (mu, t) on g* x orbit, t along an orthonormal basis of the
/// orbit tangent space at A. B maps algebra directions to tangent
/// coordinates: G_k(A) = sum_i B(i, k) u_i.
struct PoissonCoordinates {
  Eigen::MatrixXd B;
  Eigen::MatrixXd P;

  [[nodiscard]] int size() const { return static_cast<int>(P.rows()); }
};

inline PoissonCoordinates poisson_coordinates(const MomentumState& s) {
  const PhaseId p = s.phase;
  const int d = algebra_dim(p);
  const int r = orbit_dimension(p);
  Eigen::MatrixXd G(18, d);
  for (int k = 0; k < d; ++k) {
    const CMat3 T = generator(p, k, s.A);
    for (int i = 0; i < 9; ++i) {
      G(2 * i, k) = T.a[static_cast<std::size_t>(i)].real();
      G(2 * i + 1, k) = T.a[static_cast<std::size_t>(i)].imag();
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU);
  PoissonCoordinates c;
  c.B = svd.matrixU().leftCols(r).transpose() * G;
  c.P = Eigen::MatrixXd::Zero(d + r, d + r);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      AlgVec ej = AlgVec::Zero(d), ek = AlgVec::Zero(d);
      ej(j) = 1.0;
      ek(k) = 1.0;
      c.P(j, k) = s.mu.dot(structure_bracket(p, ej, ek));
    }
  c.P.block(0, d, d, r) = -c.B.transpose();
  c.P.block(d, 0, r, d) = c.B;
  return c;
}

/// Differential of an observable in (mu, t) coordinates.
inline Eigen::VectorXd coordinate_differential(const PoissonCoordinates& c, const Gradient& grad) {
  const int d = static_cast<int>(grad.d_mu.size());
  const int r = static_cast<int>(c.B.rows());
  Eigen::VectorXd df(d + r);
  df.head(d) = grad.d_mu;
  df.tail(r) = (c.B * c.B.transpose()).ldlt().solve(c.B * grad.d_G);
  return df;
}

namespace detail {

inline std::string describe_state(const MomentumState& s, std::uint64_t seed, int index) {
  std::ostringstream os;
  os.precision(17);
  os << "seed " << seed << " point " << index << " mu [";
  for (int i = 0; i < s.mu.size(); ++i) os << (i ? " " : "") << s.mu(i);
  os << "]";
  return os.str();
}

inline VerificationReport start_report(const char* check, PhaseId p, int n_points, std::uint64_t seed, double tol) {
  if (n_points < 1) throw std::invalid_argument("n_points must be at least 1");
  VerificationReport r;
  r.check = check;
  r.phase = p;
  r.seed = seed;
  r.n_points = n_points;
  r.tolerance = tol;
  r.known_complete = integral_set(p).known_complete;
  return r;
}

}  // namespace detail

/// Pairwise brackets of the integral set, normalised by
/// |df| |P| |dg| in (mu, t) coordinates.
inline VerificationReport check_involution(PhaseId p, int n_points, std::uint64_t seed, const GammaParams& g,
                                           double tol = 1e-8) {
  VerificationReport rep = detail::start_report("involution", p, n_points, seed, tol);
  const auto set = integral_set(p).quantities;
  std::mt19937_64 rng(seed);
  for (int n = 0; n < n_points; ++n) {
    const MomentumState s = random_momentum_state(p, rng, g);
    const PoissonCoordinates c = poisson_coordinates(s);
    const double pnorm = Eigen::JacobiSVD<Eigen::MatrixXd>(c.P).singularValues()(0);
    std::vector<Gradient> grads;
    for (const auto& q : set) grads.push_back(q.eval(s, g).grad);
    for (std::size_t i = 0; i < set.size(); ++i)
      for (std::size_t j = i + 1; j < set.size(); ++j) {
        const double b = std::abs(poisson_bracket(p, grads[i], grads[j], s));
        const double scale = coordinate_differential(c, grads[i]).norm() * pnorm *
                             coordinate_differential(c, grads[j]).norm();
        const double res = scale > 0.0 ? b / scale : b;
        if (res > rep.max_residual) {
          rep.max_residual = res;
          rep.offending = detail::describe_state(s, seed, n) + " pair " + set[i].name + "," + set[j].name;
        }
      }
  }
  rep.pass = rep.max_residual <= tol;
  if (rep.pass) rep.offending.clear();
  return rep;
}

struct IntegralRanks {
  int differential = 0;
  int vector_field = 0;
};

/// Numerical ranks of the integral set's differentials and Hamiltonian
/// vector fields at one state.
inline IntegralRanks integral_ranks(const MomentumState& s, const GammaParams& g) {
  const auto set = integral_set(s.phase).quantities;
  const int n = static_cast<int>(set.size());
  const PoissonCoordinates c = poisson_coordinates(s);
  Eigen::MatrixXd D(n, c.size()), H(n, c.size());
  for (int i = 0; i < n; ++i) {
    D.row(i) = coordinate_differential(c, set[static_cast<std::size_t>(i)].eval(s, g).grad).transpose();
    H.row(i) = (c.P * D.row(i).transpose()).transpose();
  }
  return {numerical_rank(D), numerical_rank(H)};
}

/// Ranks of the differentials and of the Hamiltonian vector fields of the
/// integral set. max_residual is the fraction of points where either rank
/// is deficient; the budget is 1%.
inline VerificationReport check_independence(PhaseId p, int n_points, std::uint64_t seed, const GammaParams& g) {
  VerificationReport rep = detail::start_report("independence", p, n_points, seed, 0.01);
  const int want = static_cast<int>(integral_set(p).quantities.size());
  std::mt19937_64 rng(seed);
  int deficient = 0;
  for (int n = 0; n < n_points; ++n) {
    const MomentumState s = random_momentum_state(p, rng, g);
    const auto [rd, rh] = integral_ranks(s, g);
    ++rep.rank_histogram[rd];
    ++rep.hvf_rank_histogram[rh];
    if (rd != want || rh != want) {
      ++deficient;
      if (rep.offending.empty()) rep.offending = detail::describe_state(s, seed, n);
    }
  }
  rep.max_residual = static_cast<double>(deficient) / n_points;
  rep.pass = rep.max_residual <= rep.tolerance;
  if (rep.pass) rep.offending.clear();
  return rep;
}

/// Expected dimension of the kernel of the Poisson tensor.
inline int expected_kernel_dimension(PhaseId p) { return isotropy_algebra_dim(p); }

/// Kernel of the Poisson tensor in (mu, t) coordinates. rank_histogram
/// holds the leaf dimension; max_residual the largest normalised singular
/// value among the expected kernel directions.
inline VerificationReport check_kernel_dimension(PhaseId p, int n_points, std::uint64_t seed, const GammaParams& g) {
  VerificationReport rep = detail::start_report("kernel_dimension", p, n_points, seed, rank_threshold);
  const int k = expected_kernel_dimension(p);
  std::mt19937_64 rng(seed);
  bool ok = true;
  for (int n = 0; n < n_points; ++n) {
    const MomentumState s = random_momentum_state(p, rng, g);
    const PoissonCoordinates c = poisson_coordinates(s);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(c.P).singularValues();
    const int rank = numerical_rank(c.P);
    ++rep.rank_histogram[rank];
    if (k > 0) rep.max_residual = std::max(rep.max_residual, sv(sv.size() - k) / sv(0));
    if (rank != c.size() - k) {
      ok = false;
      if (rep.offending.empty()) rep.offending = detail::describe_state(s, seed, n);
    }
  }
  rep.pass = ok;
  return rep;
}

/// Analytic variational derivatives of the reduced Lagrangian and analytic
/// gradients of the integral set against central differences.
inline VerificationReport check_gradients(PhaseId p, int n_points, std::uint64_t seed, const GammaParams& g,
                                          double tol = 1e-6) {
  VerificationReport rep = detail::start_report("gradients", p, n_points, seed, tol);
  const double h = 1e-5;
  const int d = algebra_dim(p);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); };
  const auto set = integral_set(p).quantities;
  std::mt19937_64 rng(seed);
  for (int n = 0; n < n_points; ++n) {
    const CMat3 A = orbit_sample(p, rng);
    const ReducedVelocity xi = random_velocity(p, rng);
    const VarDerivatives vd = var_derivatives(xi, A, g);
    double worst = 0.0;
    for (int k = 0; k < d; ++k) {
      ReducedVelocity a = xi, b = xi;
      a.xi(k) += h;
      b.xi(k) -= h;
      worst = std::max(worst, rel((lagrangian(a, A, g) - lagrangian(b, A, g)) / (2 * h), vd.dl_dxi(k)));
      AlgVec e = AlgVec::Zero(d);
      e(k) = h;
      const double fd = (lagrangian(xi, exp_act(p, e, A), g) - lagrangian(xi, exp_act(p, -e, A), g)) / (2 * h);
      worst = std::max(worst, rel(fd, pair(vd.dl_dA, generator(p, k, A))));
    }
    const MomentumState s = legendre(xi, A, g);
    for (const auto& q : set) {
      const Gradient an = q.eval(s, g).grad;
      const Gradient fd = fd_gradient([&](const MomentumState& x) { return q.value(x, g); }, s, h);
      for (int k = 0; k < d; ++k)
        worst = std::max({worst, rel(an.d_mu(k), fd.d_mu(k)), rel(an.d_G(k), fd.d_G(k))});
    }
    if (worst > rep.max_residual) {
      rep.max_residual = worst;
      rep.offending = detail::describe_state(s, seed, n);
    }
  }
  rep.pass = rep.max_residual <= tol;
  if (rep.pass) rep.offending.clear();
  return rep;
}

/// Independent constrained Euler-Lagrange integrator for the gradient
/// energy <<dA, dA>> on the orbit. The orbit is parametrised by
/// A = e^{i phi} L(R) A_start R^T with R in SO(3) held by multipliers, where
/// L(R) = R for conjugation phases and I for BPhase. The equations of
/// motion are J^T W (J q'' + H(q', q')) = C^T lambda: the acceleration of A
/// is Gamma-orthogonal to the orbit.
class ConstrainedELOracle {
 public:
  ConstrainedELOracle(PhaseId p, const CMat3& A_start, const GammaParams& g)
      : phase_(p), start_(A_start), g_(g), phi_(has_phase_coordinate(p)), left_(p != PhaseId::BPhase),
        n_(has_phase_coordinate(p) ? 10 : 9) {
    if (p == PhaseId::APhase1 || p == PhaseId::Omega1)
      throw std::invalid_argument("the Euler-Lagrange oracle needs a discrete isotropy group");
    q_ = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < 3; ++i) q_(r0() + 4 * i) = 1.0;
    qd_ = Eigen::VectorXd::Zero(n_);
  }

  /// Set the initial velocity so that dA/dz matches dA.
  void set_velocity(const CMat3& dA) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(24, n_);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(24);
    for (int a = 0; a < n_; ++a) put(M, a, image(q_, unit(a)));
    const Eigen::MatrixXd C = constraint_rows(q_);
    M.bottomRows(6) = C;
    put_vec(rhs, dA);
    qd_ = M.colPivHouseholderQr().solve(rhs);
  }

  [[nodiscard]] CMat3 A() const { return lift(q_); }

  /// One RK4 step on (q, q'); z is used only for error messages.
  void step(double dz, double z) {
    const Eigen::VectorXd a1 = accel(q_, qd_, z);
    const Eigen::VectorXd qa = q_ + 0.5 * dz * qd_, va = qd_ + 0.5 * dz * a1;
    const Eigen::VectorXd a2 = accel(qa, va, z);
    const Eigen::VectorXd qb = q_ + 0.5 * dz * va, vb = qd_ + 0.5 * dz * a2;
    const Eigen::VectorXd a3 = accel(qb, vb, z);
    const Eigen::VectorXd qc = q_ + dz * vb, vc = qd_ + dz * a3;
    const Eigen::VectorXd a4 = accel(qc, vc, z);
    q_ += (dz / 6.0) * (qd_ + 2.0 * va + 2.0 * vb + vc);
    qd_ += (dz / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  }

 private:
  [[nodiscard]] int r0() const { return phi_ ? 1 : 0; }
  [[nodiscard]] Eigen::VectorXd unit(int a) const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
    e(a) = 1.0;
    return e;
  }
  [[nodiscard]] Mat3 rot(const Eigen::VectorXd& q) const {
    Mat3 R;
    for (int i = 0; i < 9; ++i) R.a[static_cast<std::size_t>(i)] = q(r0() + i);
    return R;
  }
  [[nodiscard]] double angle(const Eigen::VectorXd& q) const { return phi_ ? q(0) : 0.0; }

  [[nodiscard]] CMat3 core(const Mat3& R) const { return (left_ ? CMat3(R) * start_ : start_) * transpose(R); }
  [[nodiscard]] CMat3 lift(const Eigen::VectorXd& q) const {
    return std::exp(I_unit * angle(q)) * core(rot(q));
  }
  /// J(q) v: derivative of the lift along v.
  [[nodiscard]] CMat3 image(const Eigen::VectorXd& q, const Eigen::VectorXd& v) const {
    const Mat3 R = rot(q), dR = rot(v);
    CMat3 dX = (left_ ? CMat3(R) * start_ : start_) * transpose(dR);
    if (left_) dX += CMat3(dR) * start_ * transpose(R);
    return std::exp(I_unit * angle(q)) * (I_unit * angle(v) * core(R) + dX);
  }
  /// Second derivative of the lift along the straight line q + t v.
  [[nodiscard]] CMat3 curvature(const Eigen::VectorXd& q, const Eigen::VectorXd& v) const {
    const Mat3 R = rot(q), dR = rot(v);
    const double w = angle(v);
    CMat3 dX = (left_ ? CMat3(R) * start_ : start_) * transpose(dR);
    CMat3 ddX;
    if (left_) {
      dX += CMat3(dR) * start_ * transpose(R);
      ddX = 2.0 * (CMat3(dR) * start_ * transpose(dR));
    }
    return std::exp(I_unit * angle(q)) * (-(w * w) * core(R) + (2.0 * w) * (I_unit * dX) + ddX);
  }
  [[nodiscard]] Eigen::MatrixXd constraint_rows(const Eigen::VectorXd& q) const {
    const Mat3 R = rot(q);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(6, n_);
    for (int k = 0; k < 9; ++k) {
      Mat3 E;
      E.a[static_cast<std::size_t>(k)] = 1.0;
      const Mat3 D = transpose(E) * R + transpose(R) * E;
      int row = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) C(row++, r0() + k) = D(i, j);
    }
    return C;
  }
  static void put(Eigen::MatrixXd& M, int col, const CMat3& X) {
    for (int i = 0; i < 9; ++i) {
      M(2 * i, col) = X.a[static_cast<std::size_t>(i)].real();
      M(2 * i + 1, col) = X.a[static_cast<std::size_t>(i)].imag();
    }
  }
  static void put_vec(Eigen::VectorXd& v, const CMat3& X) {
    for (int i = 0; i < 9; ++i) {
      v(2 * i) = X.a[static_cast<std::size_t>(i)].real();
      v(2 * i + 1) = X.a[static_cast<std::size_t>(i)].imag();
    }
  }

  [[nodiscard]] Eigen::VectorXd accel(const Eigen::VectorXd& q, const Eigen::VectorXd& v, double z) const {
    std::vector<CMat3> Ja;
    for (int a = 0; a < n_; ++a) Ja.push_back(image(q, unit(a)));
    const CMat3 H = curvature(q, v);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n_ + 6, n_ + 6);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_ + 6);
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) K(a, b) = gpair(Ja[static_cast<std::size_t>(a)], Ja[static_cast<std::size_t>(b)], g_);
      rhs(a) = -gpair(Ja[static_cast<std::size_t>(a)], H, g_);
    }
    const Eigen::MatrixXd C = constraint_rows(q);
    K.block(0, n_, n_, 6) = -C.transpose();
    K.block(n_, 0, 6, n_) = C;
    const Mat3 dR = rot(v);
    const Mat3 S = transpose(dR) * dR;
    int row = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) rhs(n_ + row++) = -2.0 * S(i, j);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n_ + 6) throw IntegrationError("oracle constraint solve failed", z);
    return lu.solve(rhs).head(n_);
  }

  PhaseId phase_;
  CMat3 start_;
  GammaParams g_;
  bool phi_;
  bool left_;
  int n_;
  Eigen::VectorXd q_, qd_;
};

/// Integrates the Lie-Poisson system and the constrained Euler-Lagrange
/// oracle from matched data on the same grid; max_residual is the sup of
/// the Frobenius distance between the two A curves.
inline VerificationReport check_ep_el_equivalence(const MomentumState& initial, const GammaParams& g,
                                                  const IntegratorConfig& c, double tol = 1e-6) {
  c.validate();
  const PhaseId p = initial.phase;
  VerificationReport rep = detail::start_report("ep_el_equivalence", p, 1, 0, tol);
  ConstrainedELOracle el(p, initial.A, g);
  el.set_velocity(infgen(p, velocity_of(initial, g), initial.A));
  const int n = step_count(c);
  const double dz = (c.z_end - c.z_start) / n;
  MomentumState s = initial;
  for (int i = 1; i <= n; ++i) {
    const double z = c.z_start + (i - 1) * dz;
    s = step(s, dz, g, c.method);
    el.step(dz, z);
    rep.max_residual = std::max(rep.max_residual, frobenius(s.A - el.A()));
  }
  rep.n_points = n + 1;
  rep.pass = rep.max_residual <= tol;
  return rep;
}

}  // namespace texture
