#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "texture/io.hpp"

namespace texture::cli {

enum ExitCode : int { ok = 0, usage = 2, integration = 3, check_failed = 4 };

struct RunOptions {
  std::string phase;
  std::string gamma = "1,1,1";
  std::string alpha_beta;
  std::string w0, v0, m0, n0;
  std::optional<double> p0;
  std::optional<std::uint64_t> seed;
  std::string z_span = "0,10";
  double dz = 1e-3;
  std::string method = "lie-group-rk4";
  int stride = 1;
  int points = 100;
  double tol = 1e-8;
  std::string out;
  std::string format = "csv";
  std::vector<std::string> checks;
  bool all = false;
};

inline std::vector<double> parse_list(const std::string& s, std::size_t want, const char* what) {
  std::vector<double> v;
  for (const auto& f : texture::detail::split(s, ',')) v.push_back(texture::detail::parse_double(f));
  if (v.size() != want)
    throw std::invalid_argument(std::string(what) + " needs " + std::to_string(want) + " comma-separated numbers");
  return v;
}

inline Vec3 parse_vec3(const std::string& s, const char* what) {
  const auto v = parse_list(s, 3, what);
  return {v[0], v[1], v[2]};
}

inline GammaParams parse_gamma(const std::string& s) {
  const auto v = parse_list(s, 3, "--gamma");
  GammaParams g{v[0], v[1], v[2]};
  g.validate();
  return g;
}

inline PotentialParams parse_potential(const std::string& s) {
  const auto v = parse_list(s, 6, "--alpha-beta");
  PotentialParams u;
  u.alpha = v[0];
  for (std::size_t i = 0; i < 5; ++i) u.beta[i] = v[i + 1];
  return u;
}

/// Explicit momenta win over velocities; a seed alone draws a random
/// Legendre-image state. The seed also picks the starting orbit point.
inline MomentumState initial_state(const RunOptions& o, PhaseId p, const GammaParams& g) {
  std::mt19937_64 rng(o.seed.value_or(0));
  const CMat3 A = o.seed ? orbit_sample(p, rng) : base_point(p);
  const bool momenta = !o.m0.empty() || !o.n0.empty() || o.p0.has_value();
  const bool velocities = !o.w0.empty() || !o.v0.empty();
  if (!o.n0.empty() && p != PhaseId::APhase1) throw std::invalid_argument("--n0 applies to a1 only");
  if (o.p0 && !has_phase_coordinate(p)) throw std::invalid_argument("--p0 applies to b, omega1, omega4 only");
  if (momenta && velocities) throw std::invalid_argument("give either velocities or momenta, not both");
  if (momenta) {
    const Vec3 m = o.m0.empty() ? Vec3{} : parse_vec3(o.m0, "--m0");
    const Vec3 n = o.n0.empty() ? Vec3{} : parse_vec3(o.n0, "--n0");
    return MomentumState::make(p, A, m, o.p0.value_or(0.0), n);
  }
  if (velocities) {
    const Vec3 w = o.w0.empty() ? Vec3{} : parse_vec3(o.w0, "--w0");
    double v = 0.0;
    Vec3 v_vec;
    if (!o.v0.empty()) {
      if (p == PhaseId::APhase1) {
        v_vec = parse_vec3(o.v0, "--v0");
      } else {
        if (!has_phase_coordinate(p)) throw std::invalid_argument("--v0 does not apply to this phase");
        v = parse_list(o.v0, 1, "--v0")[0];
      }
    }
    return legendre(ReducedVelocity::make(p, w, v, v_vec), A, g);
  }
  if (o.seed) return legendre(random_velocity(p, rng), A, g);
  throw std::invalid_argument("no initial state: give --w0/--v0, --m0/--n0/--p0 or --seed");
}

inline IntegratorConfig integrator_config(const RunOptions& o) {
  const auto span = parse_list(o.z_span, 2, "--z-span");
  IntegratorConfig c;
  c.method = parse_method(o.method);
  c.step = o.dz;
  c.z_start = span[0];
  c.z_end = span[1];
  c.sample_stride = o.stride;
  c.validate();
  return c;
}

inline void write_output(const RunOptions& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + o.out);
  f << text;
}

inline int cmd_simulate(const RunOptions& o, std::ostream& out, std::ostream& err) {
  PhaseId p;
  GammaParams g;
  IntegratorConfig c;
  MomentumState s0;
  try {
    p = parse_phase(o.phase);
    g = parse_gamma(o.gamma);
    c = integrator_config(o);
    s0 = initial_state(o, p, g);
    if (o.format != "csv" && o.format != "json") throw std::invalid_argument("--format must be csv or json");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }
  Trajectory t;
  try {
    t = simulate(s0, g, c);
  } catch (const IntegrationError& e) {
    err << "integration failed: " << e.what() << "\n";
    return integration;
  }
  write_output(o, o.format == "csv" ? to_csv(t) : to_json({t, g, c}), out);

  std::ostream& summary = o.out.empty() ? err : out;
  bool within = true;
  summary << "phase " << phase_name(p) << ", " << t.z.size() << " samples, z in [" << c.z_start << ", " << c.z_end
          << "]\n";
  for (const auto& [name, d] : t.drift.relative) {
    within = within && d <= o.tol;
    summary << "  drift " << std::left << std::setw(9) << name << fmt17(d) << "\n";
  }
  summary << "  orbit residual " << fmt17(t.drift.orbit_residual) << "\n";
  if (!o.alpha_beta.empty())
    summary << "  potential " << fmt17(potential_U(s0.A, parse_potential(o.alpha_beta))) << "\n";
  summary << (within ? "drift within " : "drift exceeds ") << o.tol << "\n";
  return within ? ok : check_failed;
}

inline std::vector<std::string> default_checks(PhaseId p) {
  std::vector<std::string> c{"involution", "independence", "kernel", "gradients"};
  if (p != PhaseId::APhase1 && p != PhaseId::Omega1) c.push_back("ep-el");
  return c;
}

inline VerificationReport run_check(const std::string& name, PhaseId p, const RunOptions& o, const GammaParams& g) {
  const std::uint64_t seed = o.seed.value_or(1);
  if (name == "involution") return check_involution(p, o.points, seed, g, o.tol);
  if (name == "independence") return check_independence(p, o.points, seed, g);
  if (name == "kernel") return check_kernel_dimension(p, o.points, seed, g);
  if (name == "gradients") return check_gradients(p, o.points, seed, g);
  if (name == "ep-el") {
    std::mt19937_64 rng(seed);
    IntegratorConfig c;
    c.z_end = 5.0;
    VerificationReport r = check_ep_el_equivalence(random_momentum_state(p, rng, g), g, c);
    r.seed = seed;
    return r;
  }
  throw std::invalid_argument("unknown check '" + name + "'");
}

inline int cmd_verify(const RunOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<PhaseId> phases;
  GammaParams g;
  try {
    g = parse_gamma(o.gamma);
    if (o.all)
      phases.assign(all_phases.begin(), all_phases.end());
    else if (o.phase.empty())
      throw std::invalid_argument("give --phase or --all");
    else
      phases.push_back(parse_phase(o.phase));
    if (o.points < 1) throw std::invalid_argument("--points must be at least 1");
    for (const auto& c : o.checks) {
      const auto known = default_checks(PhaseId::APhase2);
      if (std::find(known.begin(), known.end(), c) == known.end()) throw std::invalid_argument("unknown check '" + c + "'");
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  std::ostream& table = o.out.empty() ? err : out;
  bool all_pass = true;
  table << std::left << std::setw(8) << "phase" << std::setw(14) << "check" << std::setw(24) << "max_residual"
        << "result\n";
  for (PhaseId p : phases) {
    for (const auto& name : o.checks.empty() ? default_checks(p) : o.checks) {
      VerificationReport r;
      try {
        r = run_check(name, p, o, g);
      } catch (const std::invalid_argument& e) {
        table << std::setw(8) << phase_name(p) << std::setw(14) << name << "skipped: " << e.what() << "\n";
        continue;
      } catch (const IntegrationError& e) {
        err << "integration failed: " << e.what() << "\n";
        return integration;
      }
      all_pass = all_pass && r.pass;
      table << std::setw(8) << phase_name(p) << std::setw(14) << name << std::setw(24) << fmt17(r.max_residual)
            << (r.pass ? "pass" : "FAIL") << (r.known_complete ? "" : " (integral set not known complete)") << "\n";
      reports.push_back(report_json(r));
    }
  }
  write_output(o, reports.dump(2) + "\n", out);
  return all_pass ? ok : check_failed;
}

inline void print_matrix(std::ostream& os, const CMat3& A) {
  for (int i = 0; i < 3; ++i) {
    os << "    [";
    for (int j = 0; j < 3; ++j) {
      const cplx x = A(i, j);
      std::ostringstream e;
      e << x.real();
      if (x.imag() != 0.0) e << (x.imag() < 0 ? "-" : "+") << std::abs(x.imag()) << "i";
      os << (j ? ", " : "") << std::setw(16) << e.str();
    }
    os << "]\n";
  }
}

inline int cmd_phases(std::ostream& out) {
  out << std::setprecision(6);
  for (PhaseId p : all_phases) {
    const PhaseInfo info = phase_info(p);
    const IntegralSet set = integral_set(p);
    out << phase_name(p) << "\n";
    out << "  group: " << info.group << "\n";
    out << "  orbit: " << info.orbit << "\n";
    out << "  orbit dimension " << orbit_dimension(p) << ", symplectic leaf dimension "
        << algebra_dim(p) + orbit_dimension(p) - isotropy_algebra_dim(p) << "\n";
    out << "  base point:\n";
    print_matrix(out, base_point(p));
    out << "  integrals (" << set.quantities.size() << "):";
    for (const auto& q : set.quantities) out << " " << q.name;
    out << "\n  status: " << info.status << (set.known_complete ? "" : "; integral set not known complete") << "\n";
  }
  return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Texture equations of superfluid 3He and neutron-star phases"};
  app.set_config("--config", "", "flat key = value file; flags override it");
  app.require_subcommand(1);
  RunOptions o;

  app.add_option("--phase", o.phase, "a1, a2, b, omega1, omega4, omega6, omega8");
  app.add_option("--gamma", o.gamma, "gradient coefficients g1,g2,g3")->capture_default_str();
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--tol", o.tol, "pass tolerance")->capture_default_str();
  app.add_option("--out", o.out, "output file (default: standard output)");
  app.add_option("--alpha-beta", o.alpha_beta, "simulate: potential alpha,b1,..,b5 (reported, not integrated)");
  app.add_option("--w0", o.w0, "simulate: initial rotation velocity w1,w2,w3");
  app.add_option("--v0", o.v0, "simulate: initial phase velocity (a1: left velocity v1,v2,v3)");
  app.add_option("--m0", o.m0, "simulate: initial momentum m1,m2,m3");
  app.add_option("--n0", o.n0, "simulate: initial right momentum n1,n2,n3 (a1)");
  app.add_option("--p0", o.p0, "simulate: initial phase momentum");
  app.add_option("--z-span", o.z_span, "simulate: z0,z1")->capture_default_str();
  app.add_option("--dz", o.dz, "simulate: step size")->capture_default_str();
  app.add_option("--method", o.method, "simulate: lie-group-rk4 or ambient-rk4-project")->capture_default_str();
  app.add_option("--stride", o.stride, "simulate: keep every n-th step")->capture_default_str();
  app.add_option("--format", o.format, "simulate: csv or json")->capture_default_str();
  app.add_option("--points", o.points, "verify: random states per check")->capture_default_str();
  app.add_option("--check", o.checks, "verify: involution, independence, kernel, gradients, ep-el");
  app.add_flag("--all", o.all, "verify: all seven phases");

  CLI::App* sim = app.add_subcommand("simulate", "integrate a texture and write the trajectory")->fallthrough();
  CLI::App* ver = app.add_subcommand("verify", "run the integrability checks")->fallthrough();
  app.add_subcommand("phases", "list the phases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return usage;
  }
  try {
    if (sim->parsed()) {
      if (o.phase.empty()) {
        err << "error: --phase is required\n" << app.help();
        return usage;
      }
      return cmd_simulate(o, out, err);
    }
    if (ver->parsed()) return cmd_verify(o, out, err);
    return cmd_phases(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }
}

}  // namespace texture::cli
