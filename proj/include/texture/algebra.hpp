#pragma once

// Fixed-size real/complex 3x3 algebra used throughout the texture library:
// vectors, real and complex matrices, the hat/vee isomorphism, the two trace
// pairings on gl(3,C) and the SO(3) exponential.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace texture {

using cplx = std::complex<double>;
inline constexpr cplx I_unit{0.0, 1.0};
inline constexpr double pi = 3.14159265358979323846;

struct Vec3 {
  std::array<double, 3> v{};

  constexpr Vec3() = default;
  constexpr Vec3(double x, double y, double z) : v{x, y, z} {}

  constexpr double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  constexpr double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  static constexpr Vec3 unit(int i) {
    Vec3 e;
    e[i] = 1.0;
    return e;
  }

  Vec3& operator+=(const Vec3& o) {
    for (int i = 0; i < 3; ++i) (*this)[i] += o[i];
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    for (int i = 0; i < 3; ++i) (*this)[i] -= o[i];
    return *this;
  }
  Vec3& operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator-(Vec3 a) { return a *= -1.0; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Real 3x3 matrix, row-major.
struct Mat3 {
  std::array<double, 9> a{};

  constexpr double& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
  constexpr double operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }

  static constexpr Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
  static constexpr Mat3 diag(double x, double y, double z) {
    Mat3 m;
    m(0, 0) = x;
    m(1, 1) = y;
    m(2, 2) = z;
    return m;
  }

  Mat3& operator+=(const Mat3& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  Mat3& operator-=(const Mat3& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  Mat3& operator*=(double s) {
    for (auto& x : a) x *= s;
    return *this;
  }
  friend Mat3 operator+(Mat3 x, const Mat3& y) { return x += y; }
  friend Mat3 operator-(Mat3 x, const Mat3& y) { return x -= y; }
  friend Mat3 operator*(double s, Mat3 x) { return x *= s; }
  friend Mat3 operator*(Mat3 x, double s) { return x *= s; }
  friend bool operator==(const Mat3&, const Mat3&) = default;

  friend Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
        r(i, j) = s;
      }
    return r;
  }
  friend Vec3 operator*(const Mat3& x, const Vec3& u) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = x(i, 0) * u[0] + x(i, 1) * u[1] + x(i, 2) * u[2];
    return r;
  }
};

inline Mat3 transpose(const Mat3& m) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(j, i);
  return r;
}
inline double trace(const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }
inline double det(const Mat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}
inline double frobenius(const Mat3& m) {
  double s = 0.0;
  for (double x : m.a) s += x * x;
  return std::sqrt(s);
}
inline Mat3 outer(const Vec3& x, const Vec3& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x[i] * y[j];
  return r;
}

/// Complex 3x3 matrix, row-major. Ambient order-parameter space gl(3,C).
struct CMat3 {
  std::array<cplx, 9> a{};

  constexpr CMat3() = default;
  CMat3(const Mat3& m) {  // NOLINT: real matrices embed implicitly
    for (std::size_t k = 0; k < 9; ++k) a[k] = m.a[k];
  }

  constexpr cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
  constexpr cplx operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }

  static CMat3 identity() { return CMat3(Mat3::identity()); }

  CMat3& operator+=(const CMat3& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  CMat3& operator-=(const CMat3& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  CMat3& operator*=(cplx s) {
    for (auto& x : a) x *= s;
    return *this;
  }
  friend CMat3 operator+(CMat3 x, const CMat3& y) { return x += y; }
  friend CMat3 operator-(CMat3 x, const CMat3& y) { return x -= y; }
  friend CMat3 operator-(CMat3 x) { return x *= -1.0; }
  friend CMat3 operator*(cplx s, CMat3 x) { return x *= s; }
  friend CMat3 operator*(CMat3 x, cplx s) { return x *= s; }
  friend CMat3 operator*(double s, CMat3 x) { return x *= s; }
  friend CMat3 operator*(CMat3 x, double s) { return x *= s; }
  friend bool operator==(const CMat3&, const CMat3&) = default;

  friend CMat3 operator*(const CMat3& x, const CMat3& y) {
    CMat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
        r(i, j) = s;
      }
    return r;
  }
};

inline CMat3 operator*(const Mat3& x, const CMat3& y) { return CMat3(x) * y; }
inline CMat3 operator*(const CMat3& x, const Mat3& y) { return x * CMat3(y); }

inline CMat3 transpose(const CMat3& m) {
  CMat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(j, i);
  return r;
}
inline CMat3 conj(const CMat3& m) {
  CMat3 r;
  for (std::size_t k = 0; k < 9; ++k) r.a[k] = std::conj(m.a[k]);
  return r;
}
/// Conjugate transpose A*.
inline CMat3 adjoint(const CMat3& m) { return conj(transpose(m)); }
inline cplx trace(const CMat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }
inline cplx det(const CMat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}
inline Mat3 re(const CMat3& m) {
  Mat3 r;
  for (std::size_t k = 0; k < 9; ++k) r.a[k] = m.a[k].real();
  return r;
}
inline Mat3 im(const CMat3& m) {
  Mat3 r;
  for (std::size_t k = 0; k < 9; ++k) r.a[k] = m.a[k].imag();
  return r;
}
inline double frobenius(const CMat3& m) {
  double s = 0.0;
  for (const auto& x : m.a) s += std::norm(x);
  return std::sqrt(s);
}
inline CMat3 commutator(const CMat3& x, const CMat3& y) { return x * y - y * x; }
inline bool is_finite(const CMat3& m) {
  for (const auto& x : m.a)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

/// Skew matrix with hat(v) u = v x u.
inline Mat3 hat(const Vec3& v) {
  Mat3 m;
  m(0, 1) = -v[2];
  m(0, 2) = v[1];
  m(1, 0) = v[2];
  m(1, 2) = -v[0];
  m(2, 0) = -v[1];
  m(2, 1) = v[0];
  return m;
}

/// Vector of the skew part 1/2 (M - M^T). Complex expressions are passed
/// through re() first at the call site.
inline Vec3 vee(const Mat3& m) {
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

/// <A, B> = Re Tr(A* B).
inline double pair(const CMat3& x, const CMat3& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < 9; ++k) s += (std::conj(x.a[k]) * y.a[k]).real();
  return s;
}

struct GammaParams {
  double g1 = 1.0;
  double g2 = 1.0;
  double g3 = 1.0;

  /// Diagonal of Gamma = diag(g1, g1, g1 + g2 + g3).
  [[nodiscard]] std::array<double, 3> diag() const { return {g1, g1, g1 + g2 + g3}; }
  [[nodiscard]] Mat3 matrix() const { return Mat3::diag(g1, g1, g1 + g2 + g3); }
  [[nodiscard]] Mat3 inverse() const { return Mat3::diag(1.0 / g1, 1.0 / g1, 1.0 / (g1 + g2 + g3)); }
  [[nodiscard]] double min_weight() const { return std::min(g1, g1 + g2 + g3); }

  void validate() const {
    if (!(g1 > 0.0 && g2 > 0.0 && g3 > 0.0) || !std::isfinite(g1 + g2 + g3))
      throw std::invalid_argument("gamma coefficients must be finite and positive");
  }
};

/// A Gamma (right multiplication by the diagonal weight).
inline CMat3 times_gamma(const CMat3& x, const GammaParams& g) {
  const auto d = g.diag();
  CMat3 r = x;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) *= d[static_cast<std::size_t>(j)];
  return r;
}

/// <<A, B>> = Re Tr(Gamma A* B). Column j of A and B is weighted by Gamma_jj.
inline double gpair(const CMat3& x, const CMat3& y, const GammaParams& g) {
  const auto d = g.diag();
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += d[static_cast<std::size_t>(j)] * (std::conj(x(i, j)) * y(i, j)).real();
  return s;
}

/// Rodrigues formula for exp(hat(v)).
inline Mat3 exp_so3(const Vec3& v) {
  const double th = norm(v);
  const Mat3 K = hat(v);
  double s, c;
  if (th < 1e-6) {
    const double t2 = th * th;
    s = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    c = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    s = std::sin(th) / th;
    c = (1.0 - std::cos(th)) / (th * th);
  }
  return Mat3::identity() + s * K + c * (K * K);
}

/// rho(phi) = exp(phi e3^), rotation about the third axis.
inline Mat3 rho(double phi) { return exp_so3(Vec3{0.0, 0.0, phi}); }

/// Max-norm distance of R^T R from the identity plus |det R - 1|.
inline double so3_residual(const Mat3& R) {
  const Mat3 D = transpose(R) * R - Mat3::identity();
  double r = 0.0;
  for (double x : D.a) r = std::max(r, std::abs(x));
  return std::max(r, std::abs(det(R) - 1.0));
}

}  // namespace texture
