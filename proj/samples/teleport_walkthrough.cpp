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

// Walks one elliptically polarized photon through the protocol, printing
// Bob's state before and after correction for each of Alice's detectors.

#include <cstdio>

#include "telesim/telesim.hpp"

using namespace telesim;

int main() {
  const auto in = prepare_input({0.6, 0.0}, {0.0, 0.8});
  const EprParams epr;  // ideal pair, phase pi
  const BsmParams bsm;  // unit efficiency, perfect overlap

  std::printf("input: alpha=%.3f%+.3fi beta=%.3f%+.3fi\n", in.alpha().real(), in.alpha().imag(),
              in.beta().real(), in.beta().imag());

  const auto rho = compose_three(in, prepare_epr(epr));
  const auto dist = bsm_probabilities(rho, bsm);
  for (auto d : kAliceDetectors) {
    const auto& o = dist[index_of(d)];
    const auto corr = correction_for(d);
    const auto fixed = apply_unitary(corr.matrix, *o.bob);
    std::printf("%-7s p=%.4f  Bell=%-8s  before=%.4f  %-2s  after=%.12f\n",
                std::string(to_string(d)).c_str(), o.probability,
                std::string(to_string(bell_state_for(d))).c_str(), fidelity(*o.bob, in.ket()),
                std::string(to_string(corr.tag)).c_str(), fidelity(fixed, in.ket()));
  }

  RandomStream rng(2026);
  SocketPairChannel wire;
  const auto round = teleport_once(in, epr, bsm, rng, wire);
  std::printf("sampled round over socket: detector=%s message=%u fidelity=%.12f\n",
              std::string(to_string(round.detector)).c_str(), unsigned(round.message->code()),
              *round.fidelity_to_input);
  return 0;
}
