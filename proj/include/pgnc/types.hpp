// Copyright 2026 The pgnc Authors
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

#include <Eigen/Dense>

namespace pgnc {

template <typename Scalar, int Rows = Eigen::Dynamic, int Cols = Eigen::Dynamic>
using Matrix = Eigen::Matrix<Scalar, Rows, Cols>;

template <typename Scalar, int Rows = Eigen::Dynamic>
using Vector = Eigen::Matrix<Scalar, Rows, 1>;

using Complex = std::complex<double>;
using CMatrix = Matrix<Complex>;
using CVector = Vector<Complex>;
using RMatrix = Matrix<double>;
using RVector = Vector<double>;

// A density-matrix ensemble stored as horizontally stacked dim x dim blocks,
// dim x (dim * n_states) overall. Keeps the per-step Hamiltonian products as
// single GEMMs instead of one small product per state.
using CStack = Matrix<Complex>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Paper-facing unit rule: frequencies are quoted as f/2pi in MHz, stored as
// angular rates in rad/ns; times are in ns throughout.
inline double mhz_to_radns(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }
inline double radns_to_mhz(double w_radns) { return w_radns / (kTwoPi * 1e-3); }

}  // namespace pgnc
