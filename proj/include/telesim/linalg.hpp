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

// Small fixed-dimension polarization algebra: kets and density matrices over
// one to three qubits.
//
// Basis ordering is |0> = |H>, |1> = |V>, lexicographic over qubit labels with
// the lower-numbered photon as the most significant label. For a three-photon
// ket the amplitude index is 4*q1 + 2*q2 + q3.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace telesim {

using ComplexAmp = std::complex<double>;

/// Absolute tolerance used for every exact-algebra check in the library.
inline constexpr double kTol = 1e-12;
/// Smallest eigenvalue still accepted as positive semidefinite.
inline constexpr double kPsdTol = 1e-10;

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

template <std::size_t N>
using Vec = Eigen::Matrix<ComplexAmp, static_cast<int>(N), 1>;
template <std::size_t R, std::size_t C>
using Mat = Eigen::Matrix<ComplexAmp, static_cast<int>(R), static_cast<int>(C)>;
using Unitary2 = Mat<2, 2>;

inline bool is_finite(ComplexAmp z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <std::size_t N>
concept PolarizationDim = (N == 2 || N == 4 || N == 8);

// A ket over 1, 2 or 3 polarization qubits. Amplitudes need not be normalized:
// conditional branches keep their probability weight until measurement.
template <std::size_t N>
  requires PolarizationDim<N>
class PureState {
 public:
  static constexpr std::size_t kDim = N;

  PureState() { amps_.setZero(); }

  explicit PureState(const Vec<N>& amps) : amps_(amps) { check_finite(); }

  PureState(std::initializer_list<ComplexAmp> amps) {
    if (amps.size() != N) {
      throw std::invalid_argument("PureState: expected " + std::to_string(N) +
                                  " amplitudes, got " +
                                  std::to_string(amps.size()));
    }
    std::size_t i = 0;
    for (auto a : amps) amps_(static_cast<Eigen::Index>(i++)) = a;
    check_finite();
  }

  static PureState basis(std::size_t index) {
    if (index >= N) throw std::out_of_range("PureState::basis: index out of range");
    PureState s;
    s.amps_(static_cast<Eigen::Index>(index)) = 1.0;
    return s;
  }

  static constexpr std::size_t dim() { return N; }

  ComplexAmp operator[](std::size_t i) const {
    return amps_(static_cast<Eigen::Index>(i));
  }
  const Vec<N>& vector() const { return amps_; }

  double norm_squared() const { return amps_.squaredNorm(); }
  double norm() const { return amps_.norm(); }
  bool is_normalized(double tol = kTol) const {
    return std::abs(norm_squared() - 1.0) <= tol;
  }

  PureState normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::domain_error("PureState: cannot normalize the zero vector");
    return PureState(Vec<N>(amps_ / n));
  }

  ComplexAmp inner(const PureState& other) const { return amps_.dot(other.amps_); }

  PureState operator*(ComplexAmp c) const { return PureState(Vec<N>(amps_ * c)); }
  PureState operator+(const PureState& o) const { return PureState(Vec<N>(amps_ + o.amps_)); }
  PureState operator-(const PureState& o) const { return PureState(Vec<N>(amps_ - o.amps_)); }

  double max_abs_diff(const PureState& o) const {
    return (amps_ - o.amps_).cwiseAbs().maxCoeff();
  }

 private:
  void check_finite() const {
    for (Eigen::Index i = 0; i < amps_.size(); ++i) {
      if (!is_finite(amps_(i))) throw std::domain_error("PureState: non-finite amplitude");
    }
  }

  Vec<N> amps_;
};

using Qubit = PureState<2>;
using QubitPair = PureState<4>;
using QubitTriple = PureState<8>;

// Tensor product; `a` carries the more significant qubit labels.
template <std::size_t A, std::size_t B>
  requires PolarizationDim<A * B>
PureState<A * B> kron(const PureState<A>& a, const PureState<B>& b) {
  Vec<A * B> out;
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < B; ++j)
      out(static_cast<Eigen::Index>(i * B + j)) = a[i] * b[j];
  return PureState<A * B>(out);
}

/// |<a|b>|^2 for normalized single-qubit states.
inline double fidelity(const Qubit& a, const Qubit& b) {
  if (!a.is_normalized(1e-9) || !b.is_normalized(1e-9))
    throw std::invalid_argument("fidelity: arguments must be normalized");
  return std::min(1.0, std::norm(a.inner(b)));
}

template <std::size_t N>
bool is_unitary(const Mat<N, N>& u, double tol = kTol) {
  return ((u.adjoint() * u) - Mat<N, N>::Identity()).cwiseAbs().maxCoeff() <= tol;
}

inline Qubit apply_unitary(const Unitary2& u, const Qubit& s) {
  if (!is_unitary<2>(u)) throw std::invalid_argument("apply_unitary: matrix is not unitary");
  return Qubit(Vec<2>(u * s.vector()));
}

// Hermitian, positive semidefinite, unit-trace matrix. Construction validates.
template <std::size_t N>
  requires PolarizationDim<N>
class DensityMatrix {
 public:
  using Matrix = Mat<N, N>;

  explicit DensityMatrix(const Matrix& m) : m_(m) { validate(); }

  static DensityMatrix from_pure(const PureState<N>& s) {
    const auto u = s.normalized();
    return DensityMatrix(Matrix(u.vector() * u.vector().adjoint()));
  }

  static DensityMatrix maximally_mixed() {
    return DensityMatrix(Matrix(Matrix::Identity() / static_cast<double>(N)));
  }

  // Accepts any nonzero PSD Hermitian matrix and rescales it to unit trace.
  static DensityMatrix from_unnormalized(const Matrix& m) {
    const double tr = m.trace().real();
    if (!(tr > 0.0)) throw std::domain_error("DensityMatrix: zero-trace operator");
    return DensityMatrix(Matrix(m / tr));
  }

  static constexpr std::size_t dim() { return N; }
  const Matrix& matrix() const { return m_; }
  ComplexAmp operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  double trace() const { return m_.trace().real(); }
  double purity() const { return (m_ * m_).trace().real(); }

  /// <s|rho|s>
  double expectation(const PureState<N>& s) const {
    return (s.vector().adjoint() * m_ * s.vector())(0, 0).real();
  }

  Eigen::Matrix<double, static_cast<int>(N), 1> eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  }

  std::size_t rank(double tol = 1e-9) const {
    const auto ev = eigenvalues();
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) r += ev(i) > tol ? 1 : 0;
    return r;
  }

  double max_abs_diff(const DensityMatrix& o) const {
    return (m_ - o.m_).cwiseAbs().maxCoeff();
  }

 private:
  void validate() const {
    for (Eigen::Index i = 0; i < m_.size(); ++i) {
      if (!is_finite(m_.data()[i])) throw std::domain_error("DensityMatrix: non-finite entry");
    }
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kTol)
      throw std::domain_error("DensityMatrix: not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > kTol)
      throw std::domain_error("DensityMatrix: trace is not 1");
    if (eigenvalues().minCoeff() < -kPsdTol)
      throw std::domain_error("DensityMatrix: not positive semidefinite");
  }

  Matrix m_;
};

template <std::size_t A, std::size_t B>
  requires PolarizationDim<A * B>
DensityMatrix<A * B> kron(const DensityMatrix<A>& a, const DensityMatrix<B>& b) {
  Mat<A * B, A * B> out;
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < A; ++j)
      for (std::size_t k = 0; k < B; ++k)
        for (std::size_t l = 0; l < B; ++l)
          out(static_cast<Eigen::Index>(i * B + k), static_cast<Eigen::Index>(j * B + l)) =
              a(i, j) * b(k, l);
  return DensityMatrix<A * B>(out);
}

inline double fidelity(const DensityMatrix<2>& rho, const Qubit& target) {
  return std::clamp(rho.expectation(target.normalized()), 0.0, 1.0);
}

inline DensityMatrix<2> apply_unitary(const Unitary2& u, const DensityMatrix<2>& rho) {
  if (!is_unitary<2>(u)) throw std::invalid_argument("apply_unitary: matrix is not unitary");
  Mat<2, 2> out = u * rho.matrix() * u.adjoint();
  // Restore exact Hermiticity lost to rounding.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix<2>::from_unnormalized(out);
}

/// Linear polarization cos(theta)|H> + sin(theta)|V>.
inline Qubit linear_polarization(double angle_deg) {
  const double t = angle_deg * M_PI / 180.0;
  return Qubit{std::cos(t), std::sin(t)};
}

}  // namespace telesim
