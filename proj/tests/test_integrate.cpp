#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "texture/integrate.hpp"

using namespace texture;

namespace {

const GammaParams kGamma{0.9, 1.4, 0.6};

double state_distance(const MomentumState& a, const MomentumState& b) {
  return std::max((a.mu - b.mu).cwiseAbs().maxCoeff(), frobenius(a.A - b.A));
}

MomentumState bphase_state(const BPhaseSolution& s, const GammaParams& g) {
  return legendre(ReducedVelocity::make(PhaseId::BPhase, s.w, s.v), s.A, g);
}

class PerPhase : public ::testing::TestWithParam<PhaseId> {};

std::string phase_label(const ::testing::TestParamInfo<PhaseId>& info) { return std::string(phase_name(info.param)); }

}  // namespace

TEST(Config, Validation) {
  IntegratorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.step = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = IntegratorConfig{};
  c.z_end = c.z_start;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_method("ambient-rk4-project"), Method::AmbientRK4Project);
  EXPECT_EQ(method_name(Method::LieGroupRK4), "lie-group-rk4");
  EXPECT_THROW(parse_method("euler"), std::invalid_argument);
}

TEST_P(PerPhase, ZeroMomentumIsEquilibrium) {
  const PhaseId p = GetParam();
  const MomentumState s = MomentumState::make(p, orbit_sample(p, std::uint64_t{4}), {});
  for (Method m : {Method::LieGroupRK4, Method::AmbientRK4Project}) {
    const MomentumState t = step(s, 0.1, kGamma, m);
    EXPECT_EQ(t.mu, s.mu);
    EXPECT_LT(frobenius(t.A - s.A), 1e-15);
  }
}

TEST_P(PerPhase, StepStaysOnOrbit) {
  const PhaseId p = GetParam();
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    const MomentumState s = random_momentum_state(p, rng, kGamma);
    EXPECT_LT(orbit_residual(p, step(s, 0.05, kGamma).A), 1e-12);
    EXPECT_LT(orbit_residual(p, step(s, 0.05, kGamma, Method::AmbientRK4Project).A), 1e-12);
  }
}

TEST_P(PerPhase, ForwardThenBackwardReturns) {
  const PhaseId p = GetParam();
  std::mt19937_64 rng(13);
  const MomentumState s = random_momentum_state(p, rng, kGamma);
  const MomentumState once = step(step(s, 1e-2, kGamma), -1e-2, kGamma);
  EXPECT_LT(state_distance(once, s), 1e-9);
  const MomentumState many = advance(advance(s, 1e-3, 1000, kGamma), -1e-3, 1000, kGamma);
  EXPECT_LT(state_distance(many, s), 1e-9);
}

TEST_P(PerPhase, MethodsAgree) {
  const PhaseId p = GetParam();
  std::mt19937_64 rng(14);
  const MomentumState s = random_momentum_state(p, rng, kGamma);
  auto gap = [&](int n) {
    return state_distance(advance(s, 1.0 / n, n, kGamma), advance(s, 1.0 / n, n, kGamma, Method::AmbientRK4Project));
  };
  const double coarse = gap(500), fine = gap(1000);
  EXPECT_LT(fine, coarse / 12.0);
  EXPECT_LT(fine, 1e-10 * (1.0 + s.mu.norm()));
}

TEST_P(PerPhase, ConservationOverTenUnits) {
  const PhaseId p = GetParam();
  std::mt19937_64 rng(15);
  IntegratorConfig c;
  c.sample_stride = 100;
  const Trajectory t = simulate(random_momentum_state(p, rng, kGamma), kGamma, c);
  EXPECT_EQ(t.z.size(), 101u);
  EXPECT_DOUBLE_EQ(t.z.back(), 10.0);
  for (const auto& [name, d] : t.drift.relative) {
    if (name == "casimir")
      EXPECT_LE(d, 1e-10) << name;
    else
      EXPECT_LE(d, 1e-8) << name;
  }
  for (const auto& s : t.states) EXPECT_TRUE(is_on_orbit(p, s.A, 10.0 * c.tolerance));
}

INSTANTIATE_TEST_SUITE_P(AllPhases, PerPhase, ::testing::ValuesIn(all_phases), phase_label);

TEST(Simulate, GridAndSampling) {
  std::mt19937_64 rng(16);
  IntegratorConfig c;
  c.z_end = 1.0;
  c.step = 0.3;
  const Trajectory t = simulate(random_momentum_state(PhaseId::APhase2, rng, kGamma), kGamma, c);
  ASSERT_EQ(t.z.size(), 5u);
  for (std::size_t i = 1; i < t.z.size(); ++i) EXPECT_GT(t.z[i], t.z[i - 1]);
  EXPECT_NEAR(t.z[1], 0.25, 1e-15);
  EXPECT_EQ(t.names, (std::vector<std::string>{"h", "jm", "j3"}));
  EXPECT_EQ(t.values.size(), t.z.size());
}

TEST(Simulate, RejectsBadInput) {
  MomentumState s = MomentumState::make(PhaseId::APhase2, base_point(PhaseId::APhase2), {1, 0, 0});
  IntegratorConfig c;
  c.step = -1.0;
  EXPECT_THROW(simulate(s, kGamma, c), std::invalid_argument);
  c = IntegratorConfig{};
  s.mu(0) = std::nan("");
  EXPECT_THROW(simulate(s, kGamma, c), std::invalid_argument);
}

TEST(Simulate, AmbientProjectionFailureReportsZ) {
  std::mt19937_64 rng(17);
  const MomentumState s = random_momentum_state(PhaseId::APhase2, rng, kGamma, 50.0);
  IntegratorConfig c;
  c.method = Method::AmbientRK4Project;
  c.step = 1.0;
  c.z_end = 5.0;
  try {
    simulate(s, kGamma, c);
    FAIL() << "expected an integration error";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.z, 0.0);
    EXPECT_NE(std::string(e.what()).find("z = "), std::string::npos);
  }
}

TEST(Projection, RejectsFarPoints) {
  const CMat3 A = base_point(PhaseId::BPhase);
  EXPECT_THROW(detail::project_to_orbit(PhaseId::BPhase, A, 3.0 * A), ProjectionFailure);
  const CMat3 near = exp_act(PhaseId::BPhase, AlgVec::Constant(4, 0.01), A);
  EXPECT_LT(frobenius(detail::project_to_orbit(PhaseId::BPhase, A, near) - near), 1e-14);
}

TEST(BAnalytic, AxisAlignedSteadyRotation) {
  const CMat3 A0 = base_point(PhaseId::BPhase);
  for (double z : {0.0, 1.3, 7.0}) {
    EXPECT_LT(norm(bphase_analytic(0.4, {0, 0, 1}, A0, kGamma, z).w - Vec3{0, 0, 1}), 1e-15);
    EXPECT_LT(norm(bphase_analytic(0.4, {1, 0, 0}, A0, kGamma, z).w - Vec3{1, 0, 0}), 1e-15);
  }
}

TEST(BAnalytic, HandIntegratedCase) {
  const GammaParams g{1, 1, 1};
  for (double z : {0.0, 0.7, 3.1, 9.4}) {
    const BPhaseSolution s = bphase_analytic(0.0, {1, 0, 1}, CMat3::identity(), g, z);
    EXPECT_LT(norm(s.w - Vec3{std::cos(z / 2), -std::sin(z / 2), 1}), 1e-14);
  }
}

TEST(BAnalytic, SolvesTheTextureEquations) {
  std::mt19937_64 rng(18);
  const CMat3 A0 = orbit_sample(PhaseId::BPhase, rng);
  const Vec3 w0{0.3, -0.8, 1.1};
  const double a = 4 * kGamma.g1 + 2 * kGamma.g2 + 2 * kGamma.g3, c = 4 * kGamma.g1;
  const double h = 1e-5;
  for (double z : {0.5, 2.0}) {
    const BPhaseSolution s = bphase_analytic(0.7, w0, A0, kGamma, z);
    const BPhaseSolution sp = bphase_analytic(0.7, w0, A0, kGamma, z + h);
    const BPhaseSolution sm = bphase_analytic(0.7, w0, A0, kGamma, z - h);
    const CMat3 dA = (1.0 / (2 * h)) * (sp.A - sm.A);
    EXPECT_LT(frobenius(dA - (I_unit * 0.7 * s.A + s.A * hat(s.w))), 1e-8);
    const Vec3 dw = (1.0 / (2 * h)) * (sp.w - sm.w);
    const Vec3 Jw{a * s.w[0], a * s.w[1], c * s.w[2]};
    const Vec3 Jdw{a * dw[0], a * dw[1], c * dw[2]};
    EXPECT_LT(norm(Jdw + cross(s.w, Jw)), 1e-8);
    EXPECT_TRUE(is_on_orbit(PhaseId::BPhase, s.A));
  }
}

TEST(BAnalytic, MatchesNumericTrajectories) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> ug(0.5, 2.0);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10; ++t) {
    const GammaParams g{ug(rng), ug(rng), ug(rng)};
    const double v0 = nd(rng);
    const Vec3 w0{nd(rng), nd(rng), nd(rng)};
    const CMat3 A0 = orbit_sample(PhaseId::BPhase, rng);
    IntegratorConfig c;
    c.sample_stride = 50;
    const Trajectory tr = simulate(bphase_state(bphase_analytic(v0, w0, A0, g, 0.0), g), g, c);
    double sup = 0.0;
    for (std::size_t i = 0; i < tr.z.size(); ++i)
      sup = std::max(sup, state_distance(tr.states[i], bphase_state(bphase_analytic(v0, w0, A0, g, tr.z[i]), g)));
    EXPECT_LE(sup, 1e-8) << "trial " << t;
  }
}

TEST(Order, FourthOrderOnBPhase) {
  const Vec3 w0{0.9, -0.4, 1.3};
  const CMat3 A0 = orbit_sample(PhaseId::BPhase, std::uint64_t{20});
  const double v0 = 0.6, z_end = 4.0;
  const MomentumState s0 = bphase_state(bphase_analytic(v0, w0, A0, kGamma, 0.0), kGamma);
  const MomentumState ref = bphase_state(bphase_analytic(v0, w0, A0, kGamma, z_end), kGamma);
  auto error = [&](int n) { return state_distance(advance(s0, z_end / n, n, kGamma), ref); };
  const double e1 = error(40), e2 = error(80);
  const double order = std::log2(e1 / e2);
  EXPECT_GE(order, 3.8);
  EXPECT_LE(order, 4.2);
}

TEST(Reconstruct, ZeroVelocityKeepsStart) {
  const GroupElem g0 = random_group_elem(PhaseId::BPhase, *std::make_unique<std::mt19937_64>(21));
  const std::vector<double> z{0, 0.1, 0.2, 0.3, 0.4};
  const auto gs = reconstruct(PhaseId::BPhase, z, std::vector<AlgVec>(5, AlgVec::Zero(4)), g0);
  for (const auto& g : gs) {
    EXPECT_EQ(g.phi, g0.phi);
    EXPECT_LT(frobenius(g.R1 - g0.R1) + frobenius(g.R2 - g0.R2), 1e-15);
  }
}

TEST(Reconstruct, ConstantVelocityIsOneParameterSubgroup) {
  std::mt19937_64 rng(22);
  for (PhaseId p : all_phases) {
    const GroupElem g0 = random_group_elem(p, rng);
    const AlgVec xi = random_velocity(p, rng).xi;
    std::vector<double> z;
    for (int i = 0; i <= 20; ++i) z.push_back(0.05 * i);
    const auto gs = reconstruct(p, z, std::vector<AlgVec>(z.size(), xi), g0);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const GroupElem e = compose(algebra_exp(p, z[i] * xi), g0);
      EXPECT_NEAR(gs[i].phi, e.phi, 1e-12);
      EXPECT_LT(frobenius(gs[i].R1 - e.R1) + frobenius(gs[i].R2 - e.R2), 1e-12);
    }
  }
}

TEST(Reconstruct, BPhaseMatchesClosedForm) {
  std::mt19937_64 rng(23);
  const GroupElem g0 = random_group_elem(PhaseId::BPhase, rng);
  const CMat3 A0 = act(PhaseId::BPhase, g0, base_point(PhaseId::BPhase));
  const Vec3 w0{0.5, 0.2, -0.9};
  const double v0 = -0.3;
  IntegratorConfig c;
  c.z_end = 5.0;
  const MomentumState s0 = bphase_state(bphase_analytic(v0, w0, A0, kGamma, 0.0), kGamma);
  const Trajectory tr = simulate(s0, kGamma, c);
  std::vector<AlgVec> xi;
  for (const auto& s : tr.states) xi.push_back(velocity_of(s, kGamma));
  const auto gs = reconstruct(PhaseId::BPhase, tr.z, xi, g0);
  double sup = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const CMat3 A = act(PhaseId::BPhase, gs[i], base_point(PhaseId::BPhase));
    sup = std::max(sup, frobenius(A - bphase_analytic(v0, w0, A0, kGamma, tr.z[i]).A));
  }
  EXPECT_LE(sup, 1e-8);
}
