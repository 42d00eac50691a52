// Copyright 2026 The fdxbl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FDXBL_TYPES_HPP
#define FDXBL_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace fdxbl {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Random engine used everywhere. Every worker owns its own stream.
using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Derives an independent, reproducible stream from a base seed and a path of
/// indices (experiment, kappa point, pair, ...). Streams with different paths
/// are decorrelated through splitmix64 mixing.
Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

/// The 64-bit key behind make_stream, usable as a seed of its own.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

class InvalidGeometry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DegenerateChannel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DegenerateBeam : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fdxbl

#endif
