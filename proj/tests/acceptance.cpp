// Copyright 2026 The telesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "telesim/telesim.hpp"

using namespace telesim;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmtd(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. Bell-basis expansion reassembles the three-photon state.
Verdict bell_expansion() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 g(1001);
  double worst = 0.0, worst_norm = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto [a, b] = oracle::random_qubit(g);
    const auto ref = oracle::three_photon(a, b);
    const auto branches = bell_decompose(compose_three(prepare_input(a, b), epr_ket(M_PI)));
    const auto back = bell_reassemble(branches);
    for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, std::abs(back[i] - ref[i]));
    for (const auto& br : branches) worst_norm = std::max(worst_norm, std::abs(br.bob.norm_squared() - 0.25));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && worst_norm <= 1e-12 && secs < 1.0,
          fmtd("max reassembly error %.2e, max |norm^2 - 1/4| %.2e, %.3f s", worst, worst_norm, secs)};
}

// 2. Each Bell state on photons (1,2) fires exactly its detector.
Verdict distinguishability() {
  std::mt19937_64 g(1002);
  double worst_other = 0.0, worst_own = 0.0;
  for (auto d : kAliceDetectors) {
    for (int t = 0; t < 25; ++t) {
      const auto [a, b] = oracle::random_qubit(g);
      const auto dist = bsm_probabilities(kron(bell_vector(bell_state_for(d)), Qubit{a, b}), BsmParams{});
      for (auto other : kAliceDetectors) {
        const double p = dist[index_of(other)].probability;
        if (other == d) worst_own = std::max(worst_own, std::abs(p - 1.0));
        else worst_other = std::max(worst_other, p);
      }
    }
  }
  return {worst_other <= 1e-12 && worst_own <= 1e-12,
          fmtd("max wrong-detector probability %.2e, max |P(own) - 1| %.2e", worst_other, worst_own)};
}

// 3. Teleportation certainty vs. the beamsplitter baseline.
Verdict certainty() {
  std::mt19937_64 g(1003);
  double worst_fid = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto [a, b] = oracle::random_qubit(g);
    const auto in = prepare_input(a, b);
    for (auto d : kAliceDetectors) {
      const auto out = teleport_forced(in, EprParams{}, BsmParams{}, d);
      worst_fid = std::max(worst_fid, std::abs(*out.fidelity_to_input - 1.0));
    }
  }
  RunConfig cfg;
  cfg.shots = 100000;
  cfg.seed = 3;
  cfg.input_angle_deg = 45.0;
  const auto complete = run_teleport(cfg);
  const std::uint64_t detected = complete.shots - complete.counts[index_of(DetectorId::NoDetection)];
  const double conditional = complete.success_given_detection(detected);
  const auto base = run_baseline(cfg);
  const double base_rate = base.success_rate();
  return {worst_fid <= 1e-12 && conditional == 1.0 && std::abs(base_rate - 0.5) <= 0.01,
          fmtd("max |F - 1| %.2e, complete success|detected %.4f, baseline success %.4f", worst_fid,
               conditional, base_rate)};
}

// 4./5. Analyzer fringes for one crystal pair.
Verdict fringe_pair(const char* first, const char* second) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg;
  cfg.mode = Mode::SweepAnalyzer;
  cfg.input_angle_deg = 45.0;
  cfg.shots = 10000;
  cfg.seed = 4;
  cfg.sweep = SweepRange{0.0, 360.0, 10.0};
  const auto records = sweep_analyzer(cfg);
  const auto fa = fit_fringe(select_pair(records, first));
  const auto fb = fit_fringe(select_pair(records, second));
  const double diff = fringe_phase_difference(fa, fb);
  const double secs = seconds_since(t0);
  // cos^2 shape: full-contrast fringe with residual small against its amplitude.
  const bool shaped = fa.visibility > 0.95 && fb.visibility > 0.95 && fa.residual < 0.05 * fa.amplitude &&
                      fb.residual < 0.05 * fb.amplitude;
  std::ostringstream os;
  os << first << " phase " << fa.phase_deg << ", " << second << " phase " << fb.phase_deg
     << ", difference " << diff << " deg, visibilities " << fa.visibility << "/" << fb.visibility << ", "
     << secs << " s";
  return {shaped && std::abs(diff - 90.0) <= 2.0 && secs < 10.0, os.str()};
}

// 6. Prism scan peak and width.
Verdict overlap_scan() {
  RunConfig cfg;
  cfg.mode = Mode::SweepOverlap;
  cfg.overlap_sigma_um = 50.0;
  cfg.shots = 10000;
  cfg.seed = 6;
  cfg.sweep = SweepRange{-200.0, 210.0, 10.0};
  const auto records = sweep_overlap(cfg);
  double best = -1.0, best_x = 0.0;
  for (std::size_t i = 0; i < records.size(); i += 4) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) sum += static_cast<double>(records[i + k].coincidences);
    if (sum > best) {
      best = sum;
      best_x = records[i].sweep_value;
    }
  }
  const auto fit = fit_overlap(records);
  const double expected = 2.0 * std::sqrt(2.0 * std::log(2.0)) * cfg.overlap_sigma_um;
  const double rel = std::abs(fit.fwhm() - expected) / expected;
  return {best_x == 0.0 && rel <= 0.05,
          fmtd("peak at %.1f um, fitted FWHM %.2f um vs %.2f um (%.2f%%)", best_x, fit.fwhm(), expected,
               100.0 * rel)};
}

// 7. Partial EPR coherence carries through to the teleported fringe.
Verdict visibility_propagation() {
  RunConfig cfg;
  cfg.mode = Mode::SweepAnalyzer;
  cfg.input_angle_deg = 45.0;
  cfg.visibility = 0.8;
  cfg.shots = 10000;
  cfg.seed = 7;
  const auto fit = fit_fringe(select_pair(sweep_analyzer(cfg), "D4II-D3"));
  // Closed-form fringe, evaluated densely; no sampler involved.
  double lo = 1.0, hi = 0.0;
  for (double t = 0.0; t < 360.0; t += 0.25) {
    const double y = oracle::fringe_45_d4ii(t, 0.8);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  const double oracle_vis = (hi - lo) / (hi + lo);
  return {std::abs(oracle_vis - 0.8) <= 1e-9 && std::abs(fit.visibility - oracle_vis) <= 0.02,
          fmtd("fitted visibility %.4f, closed-form %.4f", fit.visibility, oracle_vis)};
}

// 8. Outcome frequencies and schedule independence.
Verdict statistics() {
  RunConfig cfg;
  cfg.shots = 100000;
  cfg.seed = 8;
  const auto stats = run_teleport(cfg);
  double worst = 0.0;
  for (auto d : kAliceDetectors) worst = std::max(worst, std::abs(stats.frequency(d) - 0.25));

  bool identical = true;
  for (auto mode : {Mode::SweepAnalyzer, Mode::SweepOverlap}) {
    RunConfig sweep;
    sweep.mode = mode;
    sweep.visibility = 0.9;
    sweep.seed = 8;
    std::string reference;
    for (unsigned threads : {1u, 2u, 3u, 8u}) {
      sweep.threads = threads;
      std::ostringstream os;
      write_csv(os, mode == Mode::SweepAnalyzer ? sweep_analyzer(sweep) : sweep_overlap(sweep));
      if (threads == 1) reference = os.str();
      else identical = identical && os.str() == reference;
    }
  }
  for (unsigned threads : {2u, 8u}) {
    auto c = cfg;
    c.threads = threads;
    identical = identical && run_teleport(c).counts == stats.counts;
  }
  return {worst <= 0.01 && identical,
          fmtd("max |freq - 0.25| %.4f, outputs identical across thread counts: ", worst) +
              (identical ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"1 Bell-basis expansion", bell_expansion},
      {"2 complete-BSM distinguishability", distinguishability},
      {"3 teleportation certainty", certainty},
      {"4 type-I fringes (D4I/D4II)", [] { return fringe_pair("D4I-D3", "D4II-D3"); }},
      {"5 type-II fringes (D4III/D4IV)", [] { return fringe_pair("D4III-D3", "D4IV-D3"); }},
      {"6 overlap scan", overlap_scan},
      {"7 visibility propagation", visibility_propagation},
      {"8 statistical sanity", statistics},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    failures += v.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
