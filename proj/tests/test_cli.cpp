#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "cli_app.hpp"

using namespace texture;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "texture_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("texture_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Cli, BPhaseExampleConserves) {
  const Result r = run({"simulate", "--phase", "b", "--gamma", "1,1,1", "--w0", "1,0,1", "--z-span", "0,10", "--dz",
                        "1e-3", "--stride", "100"});
  EXPECT_EQ(r.code, 0) << r.err;
  const Trajectory t = from_csv(r.out, PhaseId::BPhase);
  EXPECT_EQ(t.z.size(), 101u);
  EXPECT_DOUBLE_EQ(t.z.back(), 10.0);
  EXPECT_NE(r.err.find("drift within"), std::string::npos);
  const auto s = bphase_analytic(0.0, {1, 0, 1}, CMat3::identity(), {1, 1, 1}, 10.0);
  EXPECT_LT(frobenius(t.states.back().A - s.A), 1e-8);
}

TEST(Cli, JsonOutputToFile) {
  const auto path = temp_file("a2.json");
  const Result r = run({"simulate", "--phase", "a2", "--seed", "5", "--z-span", "0,1", "--format", "json", "--out",
                        path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("drift h"), std::string::npos);
  std::ifstream f(path);
  const std::string text((std::istreambuf_iterator<char>(f)), {});
  const TrajectoryFile tf = from_json(text);
  EXPECT_EQ(tf.trajectory.phase, PhaseId::APhase2);
  EXPECT_EQ(tf.trajectory.z.size(), 1001u);
  std::filesystem::remove(path);
}

TEST(Cli, SeedIsDeterministic) {
  const std::vector<std::string> args{"simulate", "--phase", "omega6", "--seed", "17", "--z-span", "0,0.5"};
  const Result a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto other = args;
  other[4] = "18";
  EXPECT_NE(run(other).out, a.out);
}

TEST(Cli, MomentaAndVelocitiesAgree) {
  const GammaParams g{1, 1, 1};
  const MomentumState s = legendre(ReducedVelocity::make(PhaseId::Omega1, {0.3, -0.2, 0.5}, 0.4),
                                   base_point(PhaseId::Omega1), g);
  auto csv3 = [](const AlgVec& v, int o) {
    return fmt17(v(o)) + "," + fmt17(v(o + 1)) + "," + fmt17(v(o + 2));
  };
  const Result vel = run({"simulate", "--phase", "omega1", "--w0", "0.3,-0.2,0.5", "--v0", "0.4", "--z-span", "0,0.1"});
  const Result mom = run({"simulate", "--phase", "omega1", "--m0", csv3(s.mu, 1), "--p0", fmt17(s.mu(0)), "--z-span",
                          "0,0.1"});
  ASSERT_EQ(vel.code, 0) << vel.err;
  ASSERT_EQ(mom.code, 0) << mom.err;
  const Trajectory a = from_csv(vel.out, PhaseId::Omega1), b = from_csv(mom.out, PhaseId::Omega1);
  EXPECT_LT((a.states.back().mu - b.states.back().mu).norm(), 1e-12);
}

TEST(Cli, ConfigFileAndOverride) {
  const auto path = temp_file("run.toml");
  {
    std::ofstream f(path);
    f << "phase = \"omega8\"\nseed = 3\nz-span = \"0,0.2\"\nstride = 50\n";
  }
  const Result r = run({"--config", path.string(), "simulate"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(from_csv(r.out, PhaseId::Omega8).z.size(), 5u);
  const Result o = run({"--config", path.string(), "simulate", "--stride", "100"});
  EXPECT_EQ(from_csv(o.out, PhaseId::Omega8).z.size(), 3u);
  std::filesystem::remove(path);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"simulate", "--phase", "c"}).code, 2);
  EXPECT_EQ(run({"simulate", "--phase", "b"}).code, 2);
  EXPECT_EQ(run({"simulate", "--phase", "b", "--w0", "1,2"}).code, 2);
  EXPECT_EQ(run({"simulate", "--phase", "b", "--w0", "1,0,0", "--gamma", "-1,1,1"}).code, 2);
  EXPECT_EQ(run({"simulate", "--phase", "a2", "--w0", "1,0,0", "--p0", "1"}).code, 2);
  EXPECT_EQ(run({"simulate", "--phase", "b", "--w0", "1,0,0", "--dz", "0"}).code, 2);
  EXPECT_EQ(run({"simulate", "--phase", "b", "--w0", "1,0,0", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"simulate", "--phase", "b", "--w0", "1,0,0", "--bogus"}).code, 2);
  const Result r = run({"verify", "--phase", "a2", "--check", "nonsense"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unknown check"), std::string::npos);
}

TEST(Cli, BlowUpExitsThreeWithPosition) {
  const Result r = run({"simulate", "--phase", "a2", "--w0", "1e6,3e5,2e5", "--z-span", "0,1", "--dz", "0.1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("at z = "), std::string::npos);
}

TEST(Cli, VerifyOmegaFourCarriesFlag) {
  const Result r = run({"verify", "--phase", "omega4", "--points", "20", "--check", "involution", "--seed", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["check"], "involution");
  EXPECT_EQ(j[0]["known_complete"], false);
  EXPECT_EQ(j[0]["n_points"], 20);
  EXPECT_TRUE(j[0]["pass"].get<bool>());
  EXPECT_NE(r.err.find("not known complete"), std::string::npos);
}

TEST(Cli, VerifyDefaultChecks) {
  const Result r = run({"verify", "--phase", "omega8", "--points", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  std::vector<std::string> checks;
  for (const auto& e : j) checks.push_back(e["check"]);
  EXPECT_EQ(checks.size(), 5u);
  EXPECT_EQ(checks.back(), "ep_el_equivalence");
  const auto a1 = nlohmann::json::parse(run({"verify", "--phase", "a1", "--points", "10"}).out);
  EXPECT_EQ(a1.size(), 4u);
}

TEST(Cli, VerifyFailureExitsFour) {
  const Result r = run({"verify", "--phase", "a2", "--points", "10", "--check", "involution", "--tol", "0"});
  EXPECT_EQ(r.code, 4);
}

TEST(Cli, PhasesListing) {
  const Result r = run({"phases"});
  EXPECT_EQ(r.code, 0);
  for (PhaseId p : all_phases) EXPECT_NE(r.out.find(std::string(phase_name(p)) + "\n"), std::string::npos);
  EXPECT_NE(r.out.find("diffeomorphic to SO(3)"), std::string::npos);
  EXPECT_NE(r.out.find("explicitly solvable"), std::string::npos);
  EXPECT_NE(r.out.find("not known complete"), std::string::npos);
  EXPECT_NE(r.out.find("symplectic leaf dimension 10"), std::string::npos);
}
