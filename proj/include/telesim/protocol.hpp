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

// Alice/Bob teleportation round: Bell measurement, two-bit message, Pauli
// correction on Bob's photon, fidelity against the input.

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "telesim/channel.hpp"
#include "telesim/linalg.hpp"
#include "telesim/random.hpp"
#include "telesim/sfg_bsm.hpp"
#include "telesim/sources.hpp"

namespace telesim {

enum class CorrectionTag { Identity, PauliZ, PauliX, PauliXZ };

constexpr std::string_view to_string(CorrectionTag t) {
  switch (t) {
    case CorrectionTag::Identity: return "I";
    case CorrectionTag::PauliZ: return "Z";
    case CorrectionTag::PauliX: return "X";
    case CorrectionTag::PauliXZ: return "XZ";
  }
  return "?";
}

struct CorrectionUnitary {
  CorrectionTag tag;
  Unitary2 matrix;

  static CorrectionUnitary make(CorrectionTag tag) {
    Unitary2 x, z;
    x << 0.0, 1.0, 1.0, 0.0;
    z << 1.0, 0.0, 0.0, -1.0;
    switch (tag) {
      case CorrectionTag::Identity: return {tag, Unitary2::Identity()};
      case CorrectionTag::PauliZ: return {tag, z};
      case CorrectionTag::PauliX: return {tag, x};
      case CorrectionTag::PauliXZ: return {tag, x * z};
    }
    throw std::invalid_argument("CorrectionUnitary: unknown tag");
  }
};

// Bob's conditional states, up to global phase:
//   D4_I:   a|0> - b|1>   -> Z
//   D4_II:  a|0> + b|1>   -> I
//   D4_III: b|0> - a|1>   -> XZ
//   D4_IV: -b|0> - a|1>   -> X
inline CorrectionUnitary correction_for(DetectorId d) {
  switch (d) {
    case DetectorId::D4_I: return CorrectionUnitary::make(CorrectionTag::PauliZ);
    case DetectorId::D4_II: return CorrectionUnitary::make(CorrectionTag::Identity);
    case DetectorId::D4_III: return CorrectionUnitary::make(CorrectionTag::PauliXZ);
    case DetectorId::D4_IV: return CorrectionUnitary::make(CorrectionTag::PauliX);
    case DetectorId::NoDetection: break;
  }
  throw std::invalid_argument("correction_for: no correction exists for NoDetection");
}

inline ClassicalMessage encode_message(DetectorId d) {
  if (d == DetectorId::NoDetection)
    throw std::invalid_argument("encode_message: NoDetection cannot be announced");
  return ClassicalMessage(static_cast<std::uint8_t>(index_of(d)));
}

inline DetectorId detector_from_message(ClassicalMessage m) { return kAliceDetectors[m.code()]; }

inline CorrectionUnitary decode_message(ClassicalMessage m) {
  return correction_for(detector_from_message(m));
}

struct TeleportOutcome {
  DetectorId detector = DetectorId::NoDetection;
  std::optional<ClassicalMessage> message;
  std::optional<DensityMatrix<2>> corrected_bob;
  std::optional<double> fidelity_to_input;

  bool success() const { return detector != DetectorId::NoDetection; }
};

/// Announces `outcome` over `channel`, applies Bob's correction and scores it.
inline TeleportOutcome complete_round(const InputState& in, const BellOutcome& outcome,
                                      ClassicalChannel& channel) {
  TeleportOutcome out;
  out.detector = outcome.detector;
  if (outcome.detector == DetectorId::NoDetection || !outcome.bob) return out;
  channel.send(encode_message(outcome.detector));
  const auto received = channel.receive();
  const auto u = decode_message(received);
  out.message = received;
  out.corrected_bob = apply_unitary(u.matrix, *outcome.bob);
  out.fidelity_to_input = fidelity(*out.corrected_bob, in.ket());
  return out;
}

inline TeleportOutcome teleport_once(const InputState& in, const EprParams& epr,
                                     const BsmParams& bsm, RandomStream& rng,
                                     ClassicalChannel& channel) {
  const auto rho = compose_three(in, prepare_epr(epr));
  return complete_round(in, measure_bsm(rho, bsm, rng), channel);
}

inline TeleportOutcome teleport_once(const InputState& in, const EprParams& epr,
                                     const BsmParams& bsm, RandomStream& rng) {
  InProcessChannel channel;
  return teleport_once(in, epr, bsm, rng, channel);
}

/// Runs the round as if Alice's detector `d` had fired.
inline TeleportOutcome teleport_forced(const InputState& in, const EprParams& epr,
                                       const BsmParams& bsm, DetectorId d) {
  const auto dist = bsm_probabilities(compose_three(in, prepare_epr(epr)), bsm);
  const auto& o = dist[index_of(d)];
  InProcessChannel channel;
  return complete_round(in, BellOutcome{o.detector, o.bob, o.probability}, channel);
}

// Beamsplitter Bell analyzer without nonlinear interaction. Two-photon
// interference separates Psi- (photons exit different ports) and Psi+ (same
// port, orthogonal polarizations), but Phi+ and Phi- both leave as same-port,
// same-polarization pairs and cannot be told apart; they count as failures.
// Successful events report the SFG detector tied to the same Bell state so
// the correction table is shared.
inline BsmDistribution linear_bsm_probabilities(const DensityMatrix<8>& rho) {
  BsmDistribution out{};
  double detected = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto d = kAliceDetectors[k];
    const auto bell = bell_state_for(d);
    if (bell == BellState::PhiPlus || bell == BellState::PhiMinus) {
      out[k] = OutcomeProbability{d, 0.0, std::nullopt};
      continue;
    }
    // <B|_12 (x) I_3
    Mat<2, 8> op = Mat<2, 8>::Zero();
    const auto bv = bell_vector(bell);
    for (std::size_t pair = 0; pair < 4; ++pair) {
      op(0, static_cast<Eigen::Index>(2 * pair)) = std::conj(bv[pair]);
      op(1, static_cast<Eigen::Index>(2 * pair + 1)) = std::conj(bv[pair]);
    }
    Mat<2, 2> bob = op * rho.matrix() * op.adjoint();
    bob = (0.5 * (bob + bob.adjoint())).eval();
    const double w = bob.trace().real();
    std::optional<DensityMatrix<2>> state;
    if (w > kTol) state = DensityMatrix<2>::from_unnormalized(bob);
    out[k] = OutcomeProbability{d, w > kTol ? w : 0.0, state};
    detected += out[k].probability;
  }
  out[4] = OutcomeProbability{DetectorId::NoDetection, std::max(0.0, 1.0 - detected), std::nullopt};
  return out;
}

inline TeleportOutcome run_linear_bsm_baseline(const InputState& in, const EprParams& epr,
                                               RandomStream& rng) {
  const auto rho = compose_three(in, prepare_epr(epr));
  InProcessChannel channel;
  return complete_round(in, sample_outcome(linear_bsm_probabilities(rho), rng), channel);
}

}  // namespace telesim
