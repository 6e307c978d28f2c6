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

// Measurement runs: analyzer-angle fringes, prism-position overlap scans,
// batch teleportation statistics, and the curve fits used to read them.
//
// Every (point, detector) cell draws from its own substream derived from the
// run seed, so output is identical for any worker count.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "telesim/bell.hpp"
#include "telesim/linalg.hpp"
#include "telesim/protocol.hpp"
#include "telesim/random.hpp"
#include "telesim/sfg_bsm.hpp"
#include "telesim/sources.hpp"

namespace telesim {

enum class Mode { Teleport, SweepAnalyzer, SweepOverlap, Baseline, BellDecompose };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Closed-open grid [start, stop) with nonzero step of either sign.
struct SweepRange {
  double start = 0.0;
  double stop = 360.0;
  double step = 10.0;

  void validate() const {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
      throw ConfigError("sweep bounds must be finite");
    if (step == 0.0) throw ConfigError("sweep step must be nonzero");
    if ((stop - start) / step < 0.0)
      throw ConfigError("sweep step points away from the stop value");
  }

  std::vector<double> values() const {
    validate();
    // Relative slack keeps a stop value that is an exact multiple of step out.
    const double span = (stop - start) / step;
    const auto n = static_cast<std::size_t>(std::ceil(span - 1e-9));
    std::vector<double> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) v.push_back(start + static_cast<double>(i) * step);
    return v;
  }
};

struct RunConfig {
  Mode mode = Mode::Teleport;
  double input_angle_deg = 45.0;
  // When set, overrides input_angle_deg.
  std::optional<std::array<ComplexAmp, 2>> amplitudes;
  double epr_phase = std::numbers::pi;
  double visibility = 1.0;
  double sfg_efficiency = 1.0;
  double overlap_sigma_um = 50.0;
  double prism_offset_um = 0.0;
  std::uint64_t shots = 10000;
  std::optional<SweepRange> sweep;  // mode-dependent default when absent
  std::uint64_t seed = 1;
  unsigned threads = 1;

  InputState input() const {
    if (amplitudes) return prepare_input((*amplitudes)[0], (*amplitudes)[1]);
    return prepare_input_linear(input_angle_deg);
  }
  EprParams epr() const { return EprParams{epr_phase, visibility}; }
  BsmParams bsm() const {
    BsmParams p;
    p.sfg_efficiency = sfg_efficiency;
    p.prism_offset_um = prism_offset_um;
    p.overlap_sigma_um = overlap_sigma_um;
    return p;
  }

  SweepRange sweep_range() const {
    if (sweep) return *sweep;
    if (mode == Mode::SweepOverlap) return SweepRange{-200.0, 210.0, 10.0};
    return SweepRange{0.0, 360.0, 10.0};
  }

  // Rethrows any physics-parameter violation as ConfigError.
  void validate() const {
    if (shots < 1) throw ConfigError("shots must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (!std::isfinite(input_angle_deg)) throw ConfigError("input-angle must be finite");
    try {
      (void)input();
      epr().validate();
      bsm().validate();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (sweep) sweep->validate();
  }
};

struct CoincidenceRecord {
  double sweep_value = 0.0;
  std::string detector_pair;
  std::uint64_t coincidences = 0;
  std::uint64_t shots = 0;

  double rate() const { return shots ? static_cast<double>(coincidences) / static_cast<double>(shots) : 0.0; }
  friend bool operator==(const CoincidenceRecord&, const CoincidenceRecord&) = default;
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

/// Analyzer A3 passes cos(theta)|H> + sin(theta)|V>; returns the joint
/// probability of Alice's outcome and Bob's click.
inline double joint_rate(double theta_deg, const DensityMatrix<2>& bob, double outcome_probability = 1.0) {
  return outcome_probability * std::clamp(bob.expectation(linear_polarization(theta_deg)), 0.0, 1.0);
}

inline double joint_rate(double theta_deg, const OutcomeProbability& outcome) {
  if (!outcome.bob) return 0.0;
  return joint_rate(theta_deg, *outcome.bob, outcome.probability);
}

inline BsmDistribution ideal_distribution(const RunConfig& cfg) {
  return bsm_probabilities(compose_three(cfg.input(), prepare_epr(cfg.epr())), cfg.bsm());
}

inline std::vector<CoincidenceRecord> sweep_analyzer(const RunConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.sweep_range().values();
  const auto dist = ideal_distribution(cfg);
  std::vector<CoincidenceRecord> out(grid.size() * 4);
  parallel_for(out.size(), cfg.threads, [&](std::size_t cell) {
    const std::size_t point = cell / 4;
    const std::size_t det = cell % 4;
    auto rng = RandomStream::derive(cfg.seed, {point, det});
    const double p = joint_rate(grid[point], dist[det]);
    out[cell] = CoincidenceRecord{grid[point], std::string(pair_label(kAliceDetectors[det])),
                                  rng.binomial(cfg.shots, p), cfg.shots};
  });
  return out;
}

// Prism scan: Bob's analyzer removed, so each pair counts every click of
// that Alice detector in coincidence with D3.
inline std::vector<CoincidenceRecord> sweep_overlap(const RunConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.sweep_range().values();
  const auto rho = compose_three(cfg.input(), prepare_epr(cfg.epr()));
  std::vector<BsmDistribution> dists;
  dists.reserve(grid.size());
  for (double x : grid) {
    auto bsm = cfg.bsm();
    bsm.prism_offset_um = x;
    dists.push_back(bsm_probabilities(rho, bsm));
  }
  std::vector<CoincidenceRecord> out(grid.size() * 4);
  parallel_for(out.size(), cfg.threads, [&](std::size_t cell) {
    const std::size_t point = cell / 4;
    const std::size_t det = cell % 4;
    auto rng = RandomStream::derive(cfg.seed, {point, det});
    out[cell] = CoincidenceRecord{grid[point], std::string(pair_label(kAliceDetectors[det])),
                                  rng.binomial(cfg.shots, dists[point][det].probability), cfg.shots};
  });
  return out;
}

inline std::vector<CoincidenceRecord> select_pair(const std::vector<CoincidenceRecord>& records,
                                                  std::string_view pair) {
  std::vector<CoincidenceRecord> out;
  for (const auto& r : records)
    if (r.detector_pair == pair) out.push_back(r);
  return out;
}

struct FringeFit {
  double amplitude = 0.0;
  double offset = 0.0;
  double phase_deg = 0.0;  // in [0, 180)
  double visibility = 0.0;
  double residual = 0.0;   // RMS
};

/// Least-squares fit of y = A cos^2(theta - phi) + C.
inline FringeFit fit_fringe(const std::vector<double>& theta_deg, const std::vector<double>& y) {
  if (theta_deg.size() != y.size()) throw std::invalid_argument("fit_fringe: size mismatch");
  if (theta_deg.size() < 8) throw std::invalid_argument("fit_fringe: need at least 8 points");
  const auto [lo, hi] = std::minmax_element(theta_deg.begin(), theta_deg.end());
  if (*hi - *lo < 180.0 - 1e-9) throw std::invalid_argument("fit_fringe: points must span 180 degrees");

  // A cos^2(t - phi) + C = a cos 2t + b sin 2t + c
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = 2.0 * theta_deg[static_cast<std::size_t>(i)] * std::numbers::pi / 180.0;
    design(i, 0) = std::cos(t);
    design(i, 1) = std::sin(t);
    design(i, 2) = 1.0;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  const double r = std::hypot(coef(0), coef(1));
  const double scale = std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
  if (r <= 1e-9 * scale || rhs.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("fit_fringe: degenerate fit (data has no fringe)");

  FringeFit f;
  f.amplitude = 2.0 * r;
  f.offset = coef(2) - r;
  double phase = 0.5 * std::atan2(coef(1), coef(0)) * 180.0 / std::numbers::pi;
  if (phase < 0.0) phase += 180.0;
  f.phase_deg = phase;
  f.visibility = coef(2) > 0.0 ? std::clamp(r / coef(2), 0.0, 1.0) : 0.0;
  f.residual = std::sqrt((design * coef - rhs).squaredNorm() / static_cast<double>(n));
  return f;
}

inline FringeFit fit_fringe(const std::vector<CoincidenceRecord>& records) {
  std::vector<double> t, y;
  for (const auto& r : records) {
    t.push_back(r.sweep_value);
    y.push_back(r.rate());
  }
  return fit_fringe(t, y);
}

/// Separation of two fringe phases folded into [0, 90].
inline double fringe_phase_difference(const FringeFit& a, const FringeFit& b) {
  double d = std::fmod(std::abs(a.phase_deg - b.phase_deg), 180.0);
  return d > 90.0 ? 180.0 - d : d;
}

struct GaussianFit {
  double peak = 0.0;
  double center = 0.0;
  double sigma = 0.0;
  double fwhm() const { return 2.0 * std::sqrt(2.0 * std::numbers::ln2) * sigma; }
};

// Weighted log-parabola fit, reweighting by the current model each pass.
inline GaussianFit fit_gaussian(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_gaussian: size mismatch");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > 0.0) keep.push_back(i);
  if (keep.size() < 3) throw std::invalid_argument("fit_gaussian: need three positive points");

  const auto n = static_cast<Eigen::Index>(keep.size());
  Eigen::VectorXd w(n);
  for (Eigen::Index k = 0; k < n; ++k) w(k) = y[keep[static_cast<std::size_t>(k)]];
  Eigen::Vector3d coef = Eigen::Vector3d::Zero();
  for (int pass = 0; pass < 8; ++pass) {
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const std::size_t i = keep[static_cast<std::size_t>(k)];
      design(k, 0) = w(k);
      design(k, 1) = w(k) * x[i];
      design(k, 2) = w(k) * x[i] * x[i];
      rhs(k) = w(k) * std::log(y[i]);
    }
    coef = design.colPivHouseholderQr().solve(rhs);
    if (!(coef(2) < 0.0)) throw std::invalid_argument("fit_gaussian: data is not peaked");
    for (Eigen::Index k = 0; k < n; ++k) {
      const double xi = x[keep[static_cast<std::size_t>(k)]];
      w(k) = std::exp(coef(0) + coef(1) * xi + coef(2) * xi * xi);
    }
  }
  GaussianFit g;
  g.sigma = std::sqrt(-1.0 / (2.0 * coef(2)));
  g.center = -coef(1) / (2.0 * coef(2));
  g.peak = std::exp(coef(0) - coef(1) * coef(1) / (4.0 * coef(2)));
  return g;
}

/// Fits the overlap curve formed by summing all detector pairs per point.
inline GaussianFit fit_overlap(const std::vector<CoincidenceRecord>& records) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (x.empty() || x.back() != r.sweep_value) {
      x.push_back(r.sweep_value);
      y.push_back(0.0);
    }
    y.back() += static_cast<double>(r.coincidences);
  }
  return fit_gaussian(x, y);
}

// --- CSV ---------------------------------------------------------------

inline constexpr std::string_view kCsvHeader = "sweep_value,detector_pair,coincidences,shots";

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, const std::vector<CoincidenceRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records)
    os << format_double(r.sweep_value) << ',' << r.detector_pair << ',' << r.coincidences << ','
       << r.shots << '\n';
}

namespace detail {
template <class T>
T parse_number(std::string_view s, std::size_t line) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("csv line " + std::to_string(line) + ": bad number '" +
                                std::string(s) + "'");
  return v;
}
}  // namespace detail

inline std::vector<CoincidenceRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw std::invalid_argument("csv: missing or wrong header");
  std::vector<CoincidenceRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    f.push_back(rest);
    if (f.size() != 4)
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected 4 fields");
    CoincidenceRecord r{detail::parse_number<double>(f[0], lineno), std::string(f[1]),
                        detail::parse_number<std::uint64_t>(f[2], lineno),
                        detail::parse_number<std::uint64_t>(f[3], lineno)};
    if (r.coincidences > r.shots)
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": coincidences exceed shots");
    out.push_back(std::move(r));
  }
  return out;
}

// --- batch statistics ------------------------------------------------------

struct TeleportStats {
  std::uint64_t shots = 0;
  std::array<std::uint64_t, 5> counts{};  // indexed by DetectorId
  double fidelity_sum = 0.0;

  std::uint64_t successes() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  double frequency(DetectorId d) const {
    return shots ? static_cast<double>(counts[index_of(d)]) / static_cast<double>(shots) : 0.0;
  }
  double success_rate() const {
    return shots ? static_cast<double>(successes()) / static_cast<double>(shots) : 0.0;
  }
  // Every registered Alice click identifies a Bell state and is corrected.
  double success_given_detection(std::uint64_t detected) const {
    return detected ? static_cast<double>(successes()) / static_cast<double>(detected) : 0.0;
  }
  double mean_fidelity() const {
    return successes() ? fidelity_sum / static_cast<double>(successes()) : 0.0;
  }
};

inline constexpr std::uint64_t kShotsPerChunk = 4096;

// Samples `cfg.shots` rounds from `dist`. Rounds are grouped into fixed-size
// chunks, each with its own substream, so totals do not depend on threads.
inline TeleportStats run_batch(const RunConfig& cfg, const BsmDistribution& dist) {
  const auto in = cfg.input();
  std::array<std::optional<TeleportOutcome>, 5> per_detector;
  for (std::size_t k = 0; k < 5; ++k) {
    InProcessChannel channel;
    per_detector[k] = complete_round(in, BellOutcome{dist[k].detector, dist[k].bob, dist[k].probability}, channel);
  }
  const std::uint64_t chunks = (cfg.shots + kShotsPerChunk - 1) / kShotsPerChunk;
  std::vector<std::array<std::uint64_t, 5>> chunk_counts(chunks);
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    auto rng = RandomStream::derive(cfg.seed, {c});
    const std::uint64_t n = std::min<std::uint64_t>(kShotsPerChunk, cfg.shots - c * kShotsPerChunk);
    std::array<std::uint64_t, 5> counts{};
    for (std::uint64_t i = 0; i < n; ++i) ++counts[index_of(sample_outcome(dist, rng).detector)];
    chunk_counts[c] = counts;
  });
  TeleportStats s;
  s.shots = cfg.shots;
  for (const auto& cc : chunk_counts)
    for (std::size_t k = 0; k < 5; ++k) s.counts[k] += cc[k];
  for (std::size_t k = 0; k < 4; ++k)
    if (per_detector[k]->fidelity_to_input)
      s.fidelity_sum += static_cast<double>(s.counts[k]) * *per_detector[k]->fidelity_to_input;
  return s;
}

inline TeleportStats run_teleport(const RunConfig& cfg) {
  cfg.validate();
  return run_batch(cfg, ideal_distribution(cfg));
}

inline TeleportStats run_baseline(const RunConfig& cfg) {
  cfg.validate();
  return run_batch(cfg, linear_bsm_probabilities(compose_three(cfg.input(), prepare_epr(cfg.epr()))));
}

}  // namespace telesim
