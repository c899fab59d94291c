#include <gtest/gtest.h>

#include <random>

#include "texture/conserved.hpp"

using namespace texture;

namespace {

const GammaParams kGamma{0.9, 1.4, 0.6};

double grad_norm(const Gradient& d) { return std::sqrt(d.d_mu.squaredNorm() + d.d_G.squaredNorm()); }

class PerPhase : public ::testing::TestWithParam<PhaseId> {};

std::string phase_label(const ::testing::TestParamInfo<PhaseId>& info) { return std::string(phase_name(info.param)); }

}  // namespace

TEST(JmTangent, ZeroVelocityGivesZero) {
  const CMat3 A = base_point(PhaseId::BPhase);
  EXPECT_EQ(jm_tangent(A, CMat3{}, GammaParams{1, 1, 1}), 0.0);
}

TEST(JmTangent, BPhaseHandTrace) {
  const CMat3 A = CMat3::identity();
  const CMat3 dA = I_unit * CMat3::identity() + CMat3(hat(Vec3{0.3, -1.1, 0.7}));
  EXPECT_NEAR(jm_tangent(A, dA, GammaParams{1, 1, 1}), 10.0, 1e-14);
}

TEST_P(PerPhase, JmFormsAgreeThroughLegendre) {
  const PhaseId p = GetParam();
  std::mt19937_64 rng(101);
  for (int t = 0; t < 100; ++t) {
    const CMat3 A = orbit_sample(p, rng);
    const ReducedVelocity xi = random_velocity(p, rng);
    const MomentumState s = legendre(xi, A, kGamma);
    const double tangent = jm_tangent(A, infgen(xi, A), kGamma);
    EXPECT_NEAR(jm(s, kGamma), tangent, 1e-10 * std::max(1.0, std::abs(tangent)));
  }
}

TEST_P(PerPhase, AnalyticGradientsMatchFiniteDifferences) {
  const PhaseId p = GetParam();
  std::mt19937_64 rng(202);
  std::vector<ConservedQuantity> qs = tracked_quantities(p);
  if (has_phase_coordinate(p)) qs.push_back(quantity("p"));
  for (int t = 0; t < 5; ++t) {
    const MomentumState s = random_momentum_state(p, rng, kGamma);
    for (const auto& q : qs) {
      const Gradient a = q.eval(s, kGamma).grad;
      const Gradient f = fd_gradient([&](const MomentumState& x) { return q.value(x, kGamma); }, s);
      const double scale = 1.0 + grad_norm(a);
      EXPECT_LT((a.d_mu - f.d_mu).norm(), 1e-7 * scale) << q.name;
      EXPECT_LT((a.d_G - f.d_G).norm(), 1e-7 * scale) << q.name;
    }
  }
}

TEST_P(PerPhase, IntegralSetInvolution) {
  const PhaseId p = GetParam();
  std::mt19937_64 rng(303);
  const auto set = integral_set(p).quantities;
  for (int t = 0; t < 100; ++t) {
    const MomentumState s = random_momentum_state(p, rng, kGamma);
    std::vector<Gradient> d;
    for (const auto& q : set) d.push_back(q.eval(s, kGamma).grad);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = i + 1; j < d.size(); ++j) {
        const double b = poisson_bracket(p, d[i], d[j], s);
        const double scale = grad_norm(d[i]) * grad_norm(d[j]) * (1.0 + s.mu.norm());
        EXPECT_LE(std::abs(b), 1e-8 * scale) << set[i].name << "," << set[j].name;
      }
  }
}

INSTANTIATE_TEST_SUITE_P(AllPhases, PerPhase, ::testing::ValuesIn(all_phases), phase_label);

TEST(Jm, EqualsUOneMomentumWhereIAIsAGenerator) {
  std::mt19937_64 rng(404);
  for (PhaseId p : {PhaseId::BPhase, PhaseId::Omega1, PhaseId::Omega4})
    for (int t = 0; t < 100; ++t) {
      const MomentumState s = random_momentum_state(p, rng, kGamma);
      EXPECT_NEAR(jm(s, kGamma), s.p(), 1e-10 * std::max(1.0, std::abs(s.p()))) << phase_name(p);
    }
}

TEST(J3Orb, Examples) {
  const CMat3 A = base_point(PhaseId::APhase1);
  EXPECT_EQ(j3_orb(MomentumState::make(PhaseId::APhase1, A, {})), 0.0);
  EXPECT_EQ(j3_orb(MomentumState::make(PhaseId::APhase1, A, {}, 0.0, Vec3::unit(2))), -1.0);
  EXPECT_THROW(j3_orb(MomentumState::make(PhaseId::APhase2, A, {})), std::invalid_argument);
}

TEST(J3Orb, InvariantUnderRightRotationAboutE3) {
  std::mt19937_64 rng(505);
  const MomentumState s = random_momentum_state(PhaseId::APhase1, rng, kGamma);
  for (double phi : {0.3, 1.7, -2.4}) {
    GroupElem g;
    g.R2 = rho(phi);
    EXPECT_NEAR(j3_orb(coadjoint_act(g, CMat3{}, s)), j3_orb(s), 1e-14);
  }
}

TEST(JSpin, Examples) {
  std::mt19937_64 rng(606);
  const CMat3 A = base_point(PhaseId::APhase1);
  EXPECT_EQ(j_spin(MomentumState::make(PhaseId::APhase1, A, {})), Vec3{});
  const MomentumState s = random_momentum_state(PhaseId::APhase1, rng, kGamma);
  const Mat3 R = random_rotation(rng);
  GroupElem g;
  g.R1 = R;
  EXPECT_LT(norm(j_spin(coadjoint_act(g, CMat3{}, s)) - R * j_spin(s)), 1e-13);
  EXPECT_NEAR(j_spin_sq(s), dot(s.m(), s.m()), 1e-15);
}

TEST(JSpin, SquaredNormCommutesWithOrbitalJ3) {
  std::mt19937_64 rng(707);
  for (int t = 0; t < 50; ++t) {
    const MomentumState s = random_momentum_state(PhaseId::APhase1, rng, kGamma);
    EXPECT_NEAR(poisson_bracket(PhaseId::APhase1, j_spin_sq_eval(s).grad, j3_orb_eval(s).grad, s), 0.0, 1e-12);
  }
}

TEST(J3, CoordinateProjection) {
  for (PhaseId p : all_phases) {
    const CMat3 A = base_point(p);
    EXPECT_EQ(j3(MomentumState::make(p, A, {})), 0.0);
    EXPECT_EQ(j3(MomentumState::make(p, A, {1, 2, 3})), 3.0);
  }
}

TEST(Casimir, BasePointValue) {
  EXPECT_DOUBLE_EQ(casimir(MomentumState::make(PhaseId::APhase1, base_point(PhaseId::APhase1), {})), 1.0);
}

TEST(Casimir, ConstantOnOrbit) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CMat3 A = orbit_sample(PhaseId::APhase1, seed);
    EXPECT_NEAR(casimir(MomentumState::make(PhaseId::APhase1, A, {})), 1.0, 1e-13);
  }
}

TEST(Casimir, CommutesWithEverything) {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    const MomentumState s = random_momentum_state(PhaseId::APhase1, rng, kGamma);
    const Gradient c = casimir_eval(s).grad;
    EXPECT_LE(std::abs(poisson_bracket(PhaseId::APhase1, c, h_eval(s, kGamma).grad, s)), 1e-9);
    Gradient f{AlgVec::Zero(6), AlgVec::Zero(6)};
    for (int k = 0; k < 6; ++k) {
      f.d_mu(k) = nd(rng);
      f.d_G(k) = nd(rng);
    }
    EXPECT_LE(std::abs(poisson_bracket(PhaseId::APhase1, c, f, s)), 1e-9);
  }
}

TEST(IntegralSet, SizesNamesAndFlags) {
  const auto a1 = integral_set(PhaseId::APhase1);
  ASSERT_EQ(a1.quantities.size(), 5u);
  std::vector<std::string> names;
  for (const auto& q : a1.quantities) names.push_back(q.name);
  EXPECT_EQ(names, (std::vector<std::string>{"h", "jm", "j3orb", "jspin3", "jspin_sq"}));
  EXPECT_TRUE(a1.known_complete);
  EXPECT_EQ(integral_set(PhaseId::APhase2).quantities.size(), 3u);
  const auto o4 = integral_set(PhaseId::Omega4);
  EXPECT_EQ(o4.quantities.size(), 3u);
  EXPECT_FALSE(o4.known_complete);
  for (PhaseId p : {PhaseId::Omega1, PhaseId::Omega6, PhaseId::Omega8}) {
    EXPECT_EQ(integral_set(p).quantities.size(), 3u);
    EXPECT_TRUE(integral_set(p).known_complete);
  }
  EXPECT_EQ(integral_set(PhaseId::BPhase).status, "explicitly solvable");
}

TEST(Quantity, UnknownNameThrows) { EXPECT_THROW(quantity("energy"), std::invalid_argument); }

TEST(Quantity, HMatchesHamiltonian) {
  std::mt19937_64 rng(909);
  for (PhaseId p : all_phases) {
    const MomentumState s = random_momentum_state(p, rng, kGamma);
    EXPECT_EQ(quantity("h").value(s, kGamma), hamiltonian_eval(s, kGamma).value);
  }
}

TEST(BMomentumMaps, PairWithGenerators) {
  std::mt19937_64 rng(1001);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    const CMat3 A = orbit_sample(PhaseId::BPhase, rng);
    CMat3 alpha;
    for (auto& x : alpha.a) x = cplx(nd(rng), nd(rng));
    const Vec3 w{nd(rng), nd(rng), nd(rng)};
    EXPECT_NEAR(b_momentum_j1(alpha, A), pair(alpha, I_unit * A), 1e-12);
    EXPECT_NEAR(dot(w, b_momentum_j2(alpha, A)), -pair(alpha, A * hat(w)), 1e-12);
  }
}

TEST(BMomentumMaps, J1OfVelocityCovectorIsJm) {
  std::mt19937_64 rng(1102);
  for (int t = 0; t < 20; ++t) {
    const CMat3 A = orbit_sample(PhaseId::BPhase, rng);
    const ReducedVelocity xi = random_velocity(PhaseId::BPhase, rng);
    const CMat3 dA = infgen(xi, A);
    const CMat3 alpha = 2.0 * times_gamma(dA, kGamma);
    EXPECT_NEAR(b_momentum_j1(alpha, A), jm_tangent(A, dA, kGamma), 1e-12);
  }
}

TEST(Quantity, ValueShortcutsMatchFullEvaluation) {
  std::mt19937_64 rng(1203);
  for (PhaseId p : all_phases) {
    const MomentumState s = random_momentum_state(p, rng, kGamma);
    for (const auto& q : tracked_quantities(p)) {
      const double full = q.eval(s, kGamma).value;
      EXPECT_NEAR(q.value(s, kGamma), full, 1e-12 * std::max(1.0, std::abs(full))) << q.name;
    }
  }
}
