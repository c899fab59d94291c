#pragma once

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "texture/verify.hpp"

namespace texture {

/// A trajectory together with the parameters that produced it.
struct TrajectoryFile {
  Trajectory trajectory;
  GammaParams gamma;
  IntegratorConfig config;
};

/// Shortest form that is still 17 significant digits: "%.17g".
inline std::string fmt17(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot serialise a non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string entry_suffix(int i) { return std::to_string(i / 3) + std::to_string(i % 3); }

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace detail

/// Column names: z, mu_k, A_re_ij, A_im_ij (row i, column j), then the
/// tracked quantities.
inline std::vector<std::string> csv_columns(PhaseId p, const std::vector<std::string>& names) {
  std::vector<std::string> cols{"z"};
  for (int k = 0; k < algebra_dim(p); ++k) cols.push_back("mu_" + std::to_string(k));
  for (int i = 0; i < 9; ++i) cols.push_back("A_re_" + detail::entry_suffix(i));
  for (int i = 0; i < 9; ++i) cols.push_back("A_im_" + detail::entry_suffix(i));
  for (const auto& n : names) cols.push_back(n);
  return cols;
}

inline std::string to_csv(const Trajectory& t) {
  std::string out;
  const auto cols = csv_columns(t.phase, t.names);
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (std::size_t r = 0; r < t.z.size(); ++r) {
    const MomentumState& s = t.states[r];
    out += fmt17(t.z[r]);
    for (int k = 0; k < s.mu.size(); ++k) out += "," + fmt17(s.mu(k));
    for (const auto& a : s.A.a) out += "," + fmt17(a.real());
    for (const auto& a : s.A.a) out += "," + fmt17(a.imag());
    for (double v : t.values[r]) out += "," + fmt17(v);
    out += '\n';
  }
  return out;
}

/// Inverse of to_csv; the phase is not stored in the file. Drift is not
/// part of the CSV form.
inline Trajectory from_csv(const std::string& text, PhaseId p) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
  const auto header = detail::split(line, ',');
  const int d = algebra_dim(p);
  const std::size_t fixed = 1 + static_cast<std::size_t>(d) + 18;
  if (header.size() < fixed) throw std::invalid_argument("CSV header too short for phase");
  Trajectory t;
  t.phase = p;
  t.names.assign(header.begin() + static_cast<std::ptrdiff_t>(fixed), header.end());
  if (csv_columns(p, t.names) != header) throw std::invalid_argument("CSV header does not match phase layout");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != header.size()) throw std::invalid_argument("CSV row has wrong field count");
    std::size_t c = 0;
    t.z.push_back(detail::parse_double(f[c++]));
    MomentumState s{p, AlgVec::Zero(d), CMat3{}};
    for (int k = 0; k < d; ++k) s.mu(k) = detail::parse_double(f[c++]);
    for (auto& a : s.A.a) a.real(detail::parse_double(f[c++]));
    for (auto& a : s.A.a) a.imag(detail::parse_double(f[c++]));
    std::vector<double> vals;
    while (c < f.size()) vals.push_back(detail::parse_double(f[c++]));
    t.states.push_back(s);
    t.values.push_back(vals);
  }
  return t;
}

/// Trajectory JSON: {phase, config, samples, drift}. Numbers use "%.17g" so
/// that a parsed file re-serialises byte for byte.
inline std::string to_json(const TrajectoryFile& f) {
  const Trajectory& t = f.trajectory;
  auto arr = [](auto begin, auto end, auto fn) {
    std::string s = "[";
    for (auto it = begin; it != end; ++it) s += (it == begin ? "" : ",") + fn(*it);
    return s + "]";
  };
  auto quoted = [](const std::string& s) { return nlohmann::json(s).dump(); };
  std::string out = "{\n";
  out += "  \"phase\": " + quoted(std::string(phase_name(t.phase))) + ",\n";
  out += "  \"config\": {\"gamma\": [" + fmt17(f.gamma.g1) + "," + fmt17(f.gamma.g2) + "," + fmt17(f.gamma.g3) +
         "], \"method\": " + quoted(std::string(method_name(f.config.method))) +
         ", \"step\": " + fmt17(f.config.step) + ", \"z_start\": " + fmt17(f.config.z_start) +
         ", \"z_end\": " + fmt17(f.config.z_end) + ", \"tolerance\": " + fmt17(f.config.tolerance) +
         ", \"sample_stride\": " + std::to_string(f.config.sample_stride) + "},\n";
  out += "  \"quantities\": " + arr(t.names.begin(), t.names.end(), quoted) + ",\n";
  out += "  \"samples\": [";
  for (std::size_t r = 0; r < t.z.size(); ++r) {
    const MomentumState& s = t.states[r];
    std::vector<double> mu(s.mu.data(), s.mu.data() + s.mu.size());
    std::vector<double> re, im;
    for (const auto& a : s.A.a) {
      re.push_back(a.real());
      im.push_back(a.imag());
    }
    out += std::string(r ? "," : "") + "\n    {\"z\": " + fmt17(t.z[r]) +
           ", \"mu\": " + arr(mu.begin(), mu.end(), fmt17) + ", \"A_re\": " + arr(re.begin(), re.end(), fmt17) +
           ", \"A_im\": " + arr(im.begin(), im.end(), fmt17) +
           ", \"values\": " + arr(t.values[r].begin(), t.values[r].end(), fmt17) + "}";
  }
  out += "\n  ],\n  \"drift\": {\"relative\": {";
  bool first = true;
  for (const auto& [name, v] : t.drift.relative) {
    out += std::string(first ? "" : ", ") + quoted(name) + ": " + fmt17(v);
    first = false;
  }
  out += "}, \"orbit_residual\": " + fmt17(t.drift.orbit_residual) + "}\n}\n";
  return out;
}

inline TrajectoryFile from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TrajectoryFile f;
  Trajectory& t = f.trajectory;
  t.phase = parse_phase(j.at("phase").get<std::string>());
  const auto& c = j.at("config");
  const auto gm = c.at("gamma").get<std::vector<double>>();
  if (gm.size() != 3) throw std::invalid_argument("gamma needs three entries");
  f.gamma = {gm[0], gm[1], gm[2]};
  f.config.method = parse_method(c.at("method").get<std::string>());
  f.config.step = c.at("step").get<double>();
  f.config.z_start = c.at("z_start").get<double>();
  f.config.z_end = c.at("z_end").get<double>();
  f.config.tolerance = c.at("tolerance").get<double>();
  f.config.sample_stride = c.at("sample_stride").get<int>();
  t.names = j.at("quantities").get<std::vector<std::string>>();
  const int d = algebra_dim(t.phase);
  for (const auto& s : j.at("samples")) {
    t.z.push_back(s.at("z").get<double>());
    const auto mu = s.at("mu").get<std::vector<double>>();
    const auto re = s.at("A_re").get<std::vector<double>>();
    const auto im = s.at("A_im").get<std::vector<double>>();
    if (static_cast<int>(mu.size()) != d || re.size() != 9 || im.size() != 9)
      throw std::invalid_argument("sample has the wrong shape for phase");
    MomentumState st{t.phase, Eigen::Map<const Eigen::VectorXd>(mu.data(), d), CMat3{}};
    for (std::size_t i = 0; i < 9; ++i) st.A.a[i] = cplx(re[i], im[i]);
    t.states.push_back(st);
    t.values.push_back(s.at("values").get<std::vector<double>>());
  }
  for (const auto& [k, v] : j.at("drift").at("relative").items()) t.drift.relative[k] = v.get<double>();
  t.drift.orbit_residual = j.at("drift").at("orbit_residual").get<double>();
  return f;
}

inline nlohmann::ordered_json report_json(const VerificationReport& r) {
  auto hist = [](const std::map<int, int>& h) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [k, v] : h) o[std::to_string(k)] = v;
    return o;
  };
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["phase"] = std::string(phase_name(r.phase));
  j["seed"] = r.seed;
  j["n_points"] = r.n_points;
  j["max_residual"] = r.max_residual;
  j["rank_histogram"] = hist(r.rank_histogram);
  j["pass"] = r.pass;
  if (!r.hvf_rank_histogram.empty()) j["hvf_rank_histogram"] = hist(r.hvf_rank_histogram);
  j["tolerance"] = r.tolerance;
  j["known_complete"] = r.known_complete;
  if (!r.offending.empty()) j["offending"] = r.offending;
  return j;
}

}  // namespace texture
