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

// Alice's complete Bell state measurement built from sum-frequency generation.
//
// Photons 1 and 2 up-convert in one of four crystals into a single photon 4:
//
//   type-I  crystals:  |1_1 1_2> -> |H_4>,   |0_1 0_2> -> |V_4>
//   type-II crystals:  |0_1 1_2> -> |H_4>,   |1_1 0_2> -> |V_4>
//
// The type-I output goes to diagonal projector G1 (detectors D4_I at 45 deg,
// D4_II at 135 deg), the type-II output to G2 (D4_III, D4_IV). Each projector
// port selects one Bell state of photons (1,2):
//
//   D4_I <-> Phi+,  D4_II <-> Phi-,  D4_III <-> Psi+,  D4_IV <-> Psi-
//
// The routing maps are written out directly; nothing here is computed from
// Bell projectors. Tests use the Bell projectors as the independent check.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "telesim/bell.hpp"
#include "telesim/linalg.hpp"
#include "telesim/random.hpp"

namespace telesim {

enum class DetectorId { D4_I, D4_II, D4_III, D4_IV, NoDetection };

inline constexpr std::array<DetectorId, 4> kAliceDetectors = {
    DetectorId::D4_I, DetectorId::D4_II, DetectorId::D4_III, DetectorId::D4_IV};
inline constexpr std::array<DetectorId, 5> kAllOutcomes = {
    DetectorId::D4_I, DetectorId::D4_II, DetectorId::D4_III, DetectorId::D4_IV,
    DetectorId::NoDetection};

constexpr std::string_view to_string(DetectorId d) {
  switch (d) {
    case DetectorId::D4_I: return "D4_I";
    case DetectorId::D4_II: return "D4_II";
    case DetectorId::D4_III: return "D4_III";
    case DetectorId::D4_IV: return "D4_IV";
    case DetectorId::NoDetection: return "NoDetection";
  }
  return "?";
}

/// Coincidence-pair label used in CSV output, e.g. "D4I-D3".
constexpr std::string_view pair_label(DetectorId d) {
  switch (d) {
    case DetectorId::D4_I: return "D4I-D3";
    case DetectorId::D4_II: return "D4II-D3";
    case DetectorId::D4_III: return "D4III-D3";
    case DetectorId::D4_IV: return "D4IV-D3";
    case DetectorId::NoDetection: break;
  }
  throw std::invalid_argument("pair_label: NoDetection has no coincidence pair");
}

constexpr std::size_t index_of(DetectorId d) { return static_cast<std::size_t>(d); }

constexpr BellState bell_state_for(DetectorId d) {
  switch (d) {
    case DetectorId::D4_I: return BellState::PhiPlus;
    case DetectorId::D4_II: return BellState::PhiMinus;
    case DetectorId::D4_III: return BellState::PsiPlus;
    case DetectorId::D4_IV: return BellState::PsiMinus;
    case DetectorId::NoDetection: break;
  }
  throw std::invalid_argument("bell_state_for: NoDetection has no Bell state");
}

// Sign convention of the diagonal basis at G1/G2. Only one is modeled:
// |45> = (|H> + |V>)/sqrt2 and |135> = (|H> - |V>)/sqrt2, so that
// |H> = (|45> + |135>)/sqrt2 and |V> = (|45> - |135>)/sqrt2.
enum class DiagonalConvention { HPlusV };

struct BsmParams {
  double sfg_efficiency = 1.0;    // lumped SFG, collection and detector efficiency
  double prism_offset_um = 0.0;   // input-pulse delay line position
  double overlap_sigma_um = 50.0; // width of the pulse overlap curve
  DiagonalConvention convention = DiagonalConvention::HPlusV;
  // Residual V_4-vs-H_4 phase left by compensators C-2 (type-I) and C-3
  // (type-II). Zero means perfectly adjusted.
  double type_i_phase = 0.0;
  double type_ii_phase = 0.0;

  void validate() const {
    if (!(sfg_efficiency > 0.0 && sfg_efficiency <= 1.0))
      throw std::domain_error("sfg-efficiency must be in (0, 1], got " +
                              std::to_string(sfg_efficiency));
    if (!(overlap_sigma_um > 0.0) || !std::isfinite(overlap_sigma_um))
      throw std::domain_error("overlap-sigma must be > 0, got " + std::to_string(overlap_sigma_um));
    if (!std::isfinite(prism_offset_um))
      throw std::domain_error("prism-offset must be finite");
    if (!std::isfinite(type_i_phase) || !std::isfinite(type_ii_phase))
      throw std::domain_error("compensator phases must be finite");
  }
};

/// exp(-dx^2 / (2 sigma^2))
inline double overlap_factor(double delta_x_um, double sigma_um) {
  if (!(sigma_um > 0.0)) throw std::domain_error("overlap_factor: sigma must be > 0");
  const double r = delta_x_um / sigma_um;
  return std::exp(-0.5 * r * r);
}

/// Probability that the up-converted photon is produced and registered.
inline double detection_scale(const BsmParams& p) {
  return p.sfg_efficiency * overlap_factor(p.prism_offset_um, p.overlap_sigma_um);
}

// Output of the four crystals, each a ket over (photon-4 polarization) x
// (photon 3) with index 2*pol4 + q3, pol4 = 0 for H_4 and 1 for V_4.
struct SfgBranches {
  QubitPair type_i;
  QubitPair type_ii;
};

namespace detail {
inline constexpr std::size_t kH4 = 0;
inline constexpr std::size_t kV4 = 1;

inline std::size_t triple_index(std::size_t q1, std::size_t q2, std::size_t q3) {
  return 4 * q1 + 2 * q2 + q3;
}
}  // namespace detail

inline SfgBranches sfg_route(const QubitTriple& s, double type_i_phase = 0.0,
                             double type_ii_phase = 0.0) {
  using detail::kH4;
  using detail::kV4;
  using detail::triple_index;
  Vec<4> one = Vec<4>::Zero();
  Vec<4> two = Vec<4>::Zero();
  const ComplexAmp ph1 = std::polar(1.0, type_i_phase);
  const ComplexAmp ph2 = std::polar(1.0, type_ii_phase);
  for (std::size_t q3 = 0; q3 < 2; ++q3) {
    const auto b = static_cast<Eigen::Index>(q3);
    one(static_cast<Eigen::Index>(2 * kH4) + b) = s[triple_index(1, 1, q3)];
    one(static_cast<Eigen::Index>(2 * kV4) + b) = ph1 * s[triple_index(0, 0, q3)];
    two(static_cast<Eigen::Index>(2 * kH4) + b) = s[triple_index(0, 1, q3)];
    two(static_cast<Eigen::Index>(2 * kV4) + b) = ph2 * s[triple_index(1, 0, q3)];
  }
  return SfgBranches{QubitPair(one), QubitPair(two)};
}

enum class Projector { G1, G2 };

struct DetectorBranch {
  DetectorId detector;
  Qubit bob;  // unnormalized
};

// Splits one crystal-pair output at its diagonal projector into the 45 deg
// and 135 deg ports, returning Bob's conditional (unnormalized) ket for each.
inline std::array<DetectorBranch, 2> project_g(const QubitPair& branch, Projector which,
                                               DiagonalConvention = DiagonalConvention::HPlusV) {
  const double h = kInvSqrt2;
  // <45|H> = <45|V> = 1/sqrt2;  <135|H> = 1/sqrt2, <135|V> = -1/sqrt2
  Vec<2> port45, port135;
  for (Eigen::Index q3 = 0; q3 < 2; ++q3) {
    const ComplexAmp hv = branch[static_cast<std::size_t>(q3)];
    const ComplexAmp vv = branch[static_cast<std::size_t>(2 + q3)];
    port45(q3) = h * (hv + vv);
    port135(q3) = h * (hv - vv);
  }
  const bool g1 = which == Projector::G1;
  return {DetectorBranch{g1 ? DetectorId::D4_I : DetectorId::D4_III, Qubit(port45)},
          DetectorBranch{g1 ? DetectorId::D4_II : DetectorId::D4_IV, Qubit(port135)}};
}

/// Bob's unnormalized ket for each Alice detector, pure-state path.
inline std::array<DetectorBranch, 4> sfg_detector_branches(const QubitTriple& s,
                                                           const BsmParams& p = {}) {
  const auto routed = sfg_route(s, p.type_i_phase, p.type_ii_phase);
  const auto g1 = project_g(routed.type_i, Projector::G1, p.convention);
  const auto g2 = project_g(routed.type_ii, Projector::G2, p.convention);
  return {g1[0], g1[1], g2[0], g2[1]};
}

/// 2x8 measurement operator of one Alice detector (ideal efficiency): the
/// linear map taking a three-photon ket to Bob's conditional ket.
inline Mat<2, 8> detector_operator(DetectorId d, const BsmParams& p = {}) {
  const std::size_t k = index_of(d);
  if (k >= 4) throw std::invalid_argument("detector_operator: NoDetection has no operator");
  Mat<2, 8> op;
  for (std::size_t col = 0; col < 8; ++col) {
    const auto branches = sfg_detector_branches(QubitTriple::basis(col), p);
    op.col(static_cast<Eigen::Index>(col)) = branches[k].bob.vector();
  }
  return op;
}

struct OutcomeProbability {
  DetectorId detector;
  double probability;
  std::optional<DensityMatrix<2>> bob;  // absent for NoDetection or zero probability
};

// Outcome distribution over D4_I..D4_IV, NoDetection (in that order).
using BsmDistribution = std::array<OutcomeProbability, 5>;

inline BsmDistribution bsm_probabilities(const DensityMatrix<8>& rho, const BsmParams& p) {
  p.validate();
  const double scale = detection_scale(p);
  BsmDistribution out{};
  double detected = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto d = kAliceDetectors[k];
    const Mat<2, 8> op = detector_operator(d, p);
    Mat<2, 2> bob = op * rho.matrix() * op.adjoint();
    bob = (0.5 * (bob + bob.adjoint())).eval();
    const double weight = bob.trace().real();
    // Weights at rounding level are treated as exact zeros.
    const double prob = weight > kTol ? scale * weight : 0.0;
    std::optional<DensityMatrix<2>> state;
    if (prob > 0.0) state = DensityMatrix<2>::from_unnormalized(bob);
    out[k] = OutcomeProbability{d, prob, state};
    detected += prob;
  }
  out[4] = OutcomeProbability{DetectorId::NoDetection, std::max(0.0, 1.0 - detected), std::nullopt};
  return out;
}

inline BsmDistribution bsm_probabilities(const QubitTriple& s, const BsmParams& p) {
  return bsm_probabilities(DensityMatrix<8>::from_pure(s), p);
}

struct BellOutcome {
  DetectorId detector = DetectorId::NoDetection;
  std::optional<DensityMatrix<2>> bob;
  double probability = 0.0;
};

/// Draws one outcome from a precomputed distribution using a single uniform.
inline BellOutcome sample_outcome(const BsmDistribution& dist, RandomStream& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  const OutcomeProbability* last_positive = &dist[4];
  for (const auto& o : dist) {
    if (o.probability <= 0.0) continue;
    last_positive = &o;
    cum += o.probability;
    if (u < cum) return BellOutcome{o.detector, o.bob, o.probability};
  }
  return BellOutcome{last_positive->detector, last_positive->bob, last_positive->probability};
}

inline BellOutcome measure_bsm(const DensityMatrix<8>& rho, const BsmParams& p,
                               RandomStream& rng) {
  return sample_outcome(bsm_probabilities(rho, p), rng);
}

}  // namespace telesim
