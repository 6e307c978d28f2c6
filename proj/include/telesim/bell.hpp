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

#pragma once

#include <array>
#include <string_view>

#include "telesim/linalg.hpp"

namespace telesim {

enum class BellState { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<BellState, 4> kAllBellStates = {
    BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus};

constexpr std::string_view to_string(BellState b) {
  switch (b) {
    case BellState::PhiPlus: return "PhiPlus";
    case BellState::PhiMinus: return "PhiMinus";
    case BellState::PsiPlus: return "PsiPlus";
    case BellState::PsiMinus: return "PsiMinus";
  }
  return "?";
}

/// (|00> +- |11>)/sqrt2 for Phi, (|01> +- |10>)/sqrt2 for Psi.
inline QubitPair bell_vector(BellState b) {
  const double h = kInvSqrt2;
  switch (b) {
    case BellState::PhiPlus: return QubitPair{h, 0.0, 0.0, h};
    case BellState::PhiMinus: return QubitPair{h, 0.0, 0.0, -h};
    case BellState::PsiPlus: return QubitPair{0.0, h, h, 0.0};
    case BellState::PsiMinus: return QubitPair{0.0, h, -h, 0.0};
  }
  throw std::invalid_argument("bell_vector: unknown Bell state");
}

// One term of the Bell-basis expansion of a three-photon ket: the Bell state
// of photons (1,2) and the unnormalized conditional ket of photon 3.
struct BellBranch {
  BellState bell;
  Qubit bob;
};

// Expands s = sum_B |B>_12 (x) branch_B. Branches keep their amplitude weight,
// so ||branch_B||^2 is the probability of Bell outcome B.
inline std::array<BellBranch, 4> bell_decompose(const QubitTriple& s) {
  std::array<BellBranch, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto bell = kAllBellStates[k];
    const auto bv = bell_vector(bell);
    Vec<2> branch = Vec<2>::Zero();
    for (std::size_t pair = 0; pair < 4; ++pair) {
      const ComplexAmp w = std::conj(bv[pair]);
      if (w == ComplexAmp{}) continue;
      branch(0) += w * s[2 * pair];
      branch(1) += w * s[2 * pair + 1];
    }
    out[k] = BellBranch{bell, Qubit(branch)};
  }
  return out;
}

inline QubitTriple bell_reassemble(const std::array<BellBranch, 4>& branches) {
  QubitTriple total;
  for (const auto& b : branches) total = total + kron(bell_vector(b.bell), b.bob);
  return total;
}

}  // namespace telesim
