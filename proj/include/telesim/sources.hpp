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

// Photon sources: the arbitrary polarization input (photon 1) and the SPDC
// pair shared by Alice (photon 2) and Bob (photon 3).

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "telesim/linalg.hpp"

namespace telesim {

// alpha|H> + beta|V>, unit norm.
class InputState {
 public:
  InputState(ComplexAmp alpha, ComplexAmp beta) : alpha_(alpha), beta_(beta) {
    if (!is_finite(alpha) || !is_finite(beta))
      throw std::domain_error("InputState: non-finite amplitude");
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kTol)
      throw std::domain_error("InputState: |alpha|^2 + |beta|^2 must be 1");
  }

  ComplexAmp alpha() const { return alpha_; }
  ComplexAmp beta() const { return beta_; }
  Qubit ket() const { return Qubit{alpha_, beta_}; }

 private:
  ComplexAmp alpha_;
  ComplexAmp beta_;
};

// Relative phase phi of (|00> + e^{i phi}|11>)/sqrt2 and the coherence
// (indistinguishability) v of the two down-conversion amplitudes.
struct EprParams {
  double relative_phase = std::numbers::pi;
  double visibility = 1.0;

  void validate() const {
    if (!std::isfinite(relative_phase))
      throw std::domain_error("EprParams: relative phase must be finite");
    if (!(visibility >= 0.0 && visibility <= 1.0))
      throw std::domain_error("visibility must be in [0, 1], got " + std::to_string(visibility));
  }
};

enum class PhotonRole { Input, Alice, Bob, Sfg };

// Wavelengths are carried for reporting only.
struct PhotonLabel {
  PhotonRole role;
  double wavelength_nm;
};

inline constexpr PhotonLabel kInputPhoton{PhotonRole::Input, 800.0};
inline constexpr PhotonLabel kAlicePhoton{PhotonRole::Alice, 885.0};
inline constexpr PhotonLabel kBobPhoton{PhotonRole::Bob, 730.0};
inline constexpr PhotonLabel kSfgPhoton{PhotonRole::Sfg, 420.0};

/// Accepts amplitudes normalized to within 1e-9 and renormalizes them exactly.
inline InputState prepare_input(ComplexAmp alpha, ComplexAmp beta) {
  if (!is_finite(alpha) || !is_finite(beta))
    throw std::domain_error("prepare_input: non-finite amplitude");
  const double n2 = std::norm(alpha) + std::norm(beta);
  if (n2 == 0.0) throw std::domain_error("prepare_input: zero vector");
  if (std::abs(n2 - 1.0) > 1e-9)
    throw std::domain_error("prepare_input: |alpha|^2 + |beta|^2 = " + std::to_string(n2) +
                            ", expected 1");
  const double n = std::sqrt(n2);
  return InputState(alpha / n, beta / n);
}

inline InputState prepare_input_linear(double angle_deg) {
  const auto k = linear_polarization(angle_deg);
  return InputState(k[0], k[1]);
}

/// rho = v |psi(phi)><psi(phi)| + (1 - v)(|00><00| + |11><11|)/2
inline DensityMatrix<4> prepare_epr(const EprParams& p) {
  p.validate();
  Mat<4, 4> m = Mat<4, 4>::Zero();
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  const ComplexAmp coherence = 0.5 * p.visibility * std::polar(1.0, -p.relative_phase);
  m(0, 3) = coherence;
  m(3, 0) = std::conj(coherence);
  return DensityMatrix<4>(m);
}

/// The ideal pair (|00> + e^{i phi}|11>)/sqrt2 as a ket.
inline QubitPair epr_ket(double relative_phase) {
  return QubitPair{kInvSqrt2, 0.0, 0.0, kInvSqrt2 * std::polar(1.0, relative_phase)};
}

inline DensityMatrix<8> compose_three(const InputState& in, const DensityMatrix<4>& epr) {
  return kron(DensityMatrix<2>::from_pure(in.ket()), epr);
}

inline QubitTriple compose_three(const InputState& in, const QubitPair& epr) {
  return kron(in.ket(), epr);
}

}  // namespace telesim
