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

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "telesim/sources.hpp"

using namespace telesim;

namespace {
const double h = kInvSqrt2;
}

TEST(PrepareInput, AcceptsArbitraryAmplitudes) {
  const auto horiz = prepare_input(1.0, 0.0);
  EXPECT_EQ(horiz.alpha(), ComplexAmp(1.0));
  EXPECT_EQ(horiz.beta(), ComplexAmp(0.0));

  const auto circ = prepare_input(h, ComplexAmp(0.0, h));
  EXPECT_NEAR(std::norm(circ.alpha()) + std::norm(circ.beta()), 1.0, kTol);
  EXPECT_NEAR(circ.beta().imag(), h, kTol);
}

TEST(PrepareInput, RenormalizesSmallDrift) {
  const auto in = prepare_input(h * (1 + 4e-10), h);
  EXPECT_NEAR(std::norm(in.alpha()) + std::norm(in.beta()), 1.0, 1e-15);
}

TEST(PrepareInput, RejectsZeroAndUnnormalized) {
  EXPECT_THROW(prepare_input(0.0, 0.0), std::domain_error);
  EXPECT_THROW(prepare_input(1.0, 1.0), std::domain_error);
  EXPECT_THROW(prepare_input(1.0, std::nan("")), std::domain_error);
}

TEST(PrepareInputLinear, CardinalAngles) {
  const auto a0 = prepare_input_linear(0.0);
  EXPECT_NEAR(a0.alpha().real(), 1.0, kTol);
  EXPECT_NEAR(std::abs(a0.beta()), 0.0, kTol);
  const auto a45 = prepare_input_linear(45.0);
  EXPECT_NEAR(a45.alpha().real(), h, kTol);
  EXPECT_NEAR(a45.beta().real(), h, kTol);
  const auto a90 = prepare_input_linear(90.0);
  EXPECT_NEAR(std::abs(a90.alpha()), 0.0, kTol);
  EXPECT_NEAR(a90.beta().real(), 1.0, kTol);
}

TEST(PrepareInputLinear, OrthogonalAnglesHaveZeroFidelity) {
  for (double t = -180.0; t <= 180.0; t += 7.5) {
    EXPECT_NEAR(fidelity(prepare_input_linear(t).ket(), prepare_input_linear(t + 90.0).ket()), 0.0,
                kTol);
  }
}

TEST(PrepareEpr, IdealIsProjectorOntoSingletLikePair) {
  const auto rho = prepare_epr({M_PI, 1.0});
  const QubitPair ideal{h, 0.0, 0.0, -h};
  EXPECT_LE(rho.max_abs_diff(DensityMatrix<4>::from_pure(ideal)), kTol);
  EXPECT_NEAR(rho.purity(), 1.0, kTol);
}

TEST(PrepareEpr, FullyDephasedLimit) {
  const auto rho = prepare_epr({M_PI, 0.0});
  Mat<4, 4> ref = Mat<4, 4>::Zero();
  ref(0, 0) = 0.5;
  ref(3, 3) = 0.5;
  EXPECT_LE((rho.matrix() - ref).cwiseAbs().maxCoeff(), kTol);
}

TEST(PrepareEpr, PartialVisibilityCoherence) {
  const auto rho = prepare_epr({M_PI, 0.8});
  EXPECT_NEAR(rho.trace(), 1.0, kTol);
  EXPECT_NEAR(rho(0, 3).real(), -0.4, kTol);
  EXPECT_NEAR(rho(0, 3).imag(), 0.0, kTol);
}

TEST(PrepareEpr, RejectsOutOfRangeVisibility) {
  EXPECT_THROW(prepare_epr({M_PI, 1.5}), std::domain_error);
  EXPECT_THROW(prepare_epr({M_PI, -0.1}), std::domain_error);
  EXPECT_THROW(prepare_epr({std::nan(""), 1.0}), std::domain_error);
}

TEST(PrepareEpr, ValidAndPurityMatchesClosedFormOnGrid) {
  for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (double phi = -M_PI; phi <= M_PI + 1e-9; phi += M_PI / 6) {
      const auto rho = prepare_epr({phi, v});  // validates on construction
      EXPECT_GE(rho.eigenvalues().minCoeff(), -kPsdTol);
      EXPECT_NEAR(rho.purity(), (1.0 + v * v) / 2.0, kTol) << "v=" << v << " phi=" << phi;
    }
  }
}

TEST(ComposeThree, DiagonalInputIdealPair) {
  const auto rho = compose_three(prepare_input(h, h), prepare_epr({M_PI, 1.0}));
  const QubitTriple ref{0.5, 0.0, 0.0, -0.5, 0.5, 0.0, 0.0, -0.5};
  EXPECT_LE(rho.max_abs_diff(DensityMatrix<8>::from_pure(ref)), kTol);
}

TEST(ComposeThree, HorizontalInputTopEigenvector) {
  const auto rho = compose_three(prepare_input(1.0, 0.0), prepare_epr({M_PI, 1.0}));
  Eigen::SelfAdjointEigenSolver<Mat<8, 8>> solver(rho.matrix());
  const Vec<8> top = solver.eigenvectors().col(7);
  const QubitTriple ref{h, 0.0, 0.0, -h, 0.0, 0.0, 0.0, 0.0};
  EXPECT_NEAR(std::norm(ref.vector().dot(top)), 1.0, kTol);
}

TEST(ComposeThree, DephasedPairIsRankTwo) {
  for (double angle : {0.0, 30.0, 45.0, 117.0}) {
    const auto rho = compose_three(prepare_input_linear(angle), prepare_epr({M_PI, 0.0}));
    EXPECT_NEAR(rho.trace(), 1.0, kTol);
    EXPECT_EQ(rho.rank(), 2u);
  }
}

TEST(ComposeThree, MatchesOracleAndStaysPositive) {
  std::mt19937_64 g(8);
  for (int t = 0; t < 50; ++t) {
    const auto [a, b] = oracle::random_qubit(g);
    const double v = (t % 5) / 4.0, phi = 0.3 * t;
    const auto rho = compose_three(prepare_input(a, b), prepare_epr({phi, v}));
    const auto ref = oracle::three_photon_dm(a, b, phi, v);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) EXPECT_NEAR(std::abs(rho(i, j) - ref[i][j]), 0.0, kTol);
    EXPECT_GE(rho.eigenvalues().minCoeff(), -kPsdTol);
  }
}

TEST(PhotonLabel, WavelengthsArePositiveMetadata) {
  for (const auto& p : {kInputPhoton, kAlicePhoton, kBobPhoton, kSfgPhoton}) EXPECT_GT(p.wavelength_nm, 0.0);
}
