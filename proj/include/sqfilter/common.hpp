// Copyright 2026 The sqfilter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sqf {

template <typename Scalar>
using Complex = std::complex<Scalar>;

/// Dense complex matrix used for system operators and density matrices.
template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using CMatrix2 = Eigen::Matrix<Complex<Scalar>, 2, 2>;

template <typename Scalar>
using CMatrix4 = Eigen::Matrix<Complex<Scalar>, 4, 4>;

using MatrixXc = CMatrix<double>;
using Matrix2c = CMatrix2<double>;
using Matrix4c = CMatrix4<double>;
using cdouble = Complex<double>;

template <typename Scalar>
inline constexpr Complex<Scalar> kI{Scalar(0), Scalar(1)};

// Error hierarchy. Every failure that a caller may want to react to carries its
// own type; messages name the violated condition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters or coefficients violate a required identity or inequality.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Input lies outside the domain of a parametrization (e.g. maximal squeezing).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The quadrature transfer matrix is numerically singular.
class SingularTransferError : public Error {
 public:
  SingularTransferError(const std::string& what, Complex<double> det)
      : Error(what), determinant(det) {}
  Complex<double> determinant;
};

/// Both arguments of the phase selection vanish; every phase is admissible.
class DegeneratePhaseError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A stochastic step produced a non-positive trace.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double time) : Error(what), time(time) {}
  double time;
};

template <typename Derived>
auto hermitian_residual(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, Eigen::Index d, const char* name) {
  if (a.rows() != d || a.cols() != d) {
    throw ShapeError(std::string(name) + ": expected " + std::to_string(d) + "x" +
                     std::to_string(d) + " matrix, got " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()));
  }
}

}  // namespace sqf
