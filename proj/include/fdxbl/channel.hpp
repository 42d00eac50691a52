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

#ifndef FDXBL_CHANNEL_HPP
#define FDXBL_CHANNEL_HPP

#include "fdxbl/types.hpp"

#include <limits>
#include <vector>

namespace fdxbl {

enum class ArraySide { tx, rx };

/// How the transmit/receive array separation is measured.
enum class SeparationReference { center_to_center, edge_to_edge };

/// User-facing description of the two base-station arrays. Lengths are in
/// wavelengths; the carrier frequency fixes the wavelength in meters.
struct ArraySpec {
    int n_tx = 8;
    int n_rx = 8;
    double carrier_hz = 28e9;
    double spacing_wavelengths = 0.5;
    double separation_wavelengths = 10.0;
    SeparationReference separation_reference = SeparationReference::center_to_center;
};

/// Two collinear uniform linear arrays laid out along the x axis. The transmit
/// array is centered at the origin, the receive array sits at +x.
struct ArrayGeometry {
    int n_tx = 0;
    int n_rx = 0;
    double wavelength = 0.0;       // m
    double element_spacing = 0.0;  // m
    double array_separation = 0.0; // m, per separation_reference
    SeparationReference separation_reference = SeparationReference::center_to_center;
    std::vector<Eigen::Vector3d> tx_positions;
    std::vector<Eigen::Vector3d> rx_positions;

    int size(ArraySide side) const { return side == ArraySide::tx ? n_tx : n_rx; }
};

/// Builds and validates the geometry. Throws InvalidGeometry on nonpositive
/// counts/lengths or any coincident tx/rx element pair.
ArrayGeometry make_geometry(const ArraySpec &spec);

/// How the self-interference gain is chosen when normalizing a realization.
///
/// per_realization: every realization hits the peak-INR target exactly.
/// reference_capped: the gain is fixed by the peak of the (Frobenius-normalized)
///   spherical-wave component, and lowered for the rare realization whose own
///   peak exceeds it, so no realization exceeds the target.
enum class InrNormalization { per_realization, reference_capped };

/// Link-budget targets plus the folded gain factors that replace the
/// transmit-power / noise-power ratios after normalization.
struct LinkBudget {
    double snr_max_db = 10.0;
    double inr_max_db = 40.0;
    double gain_tx = 1.0; // P_tx^BS / P_n^UE
    double gain_rx = 1.0; // P_tx^UE / P_n^BS
    double gain_si = 1.0; // P_tx^BS / P_n^BS
};

struct NormalizationPolicy {
    InrNormalization mode = InrNormalization::per_realization;
    /// Squared top singular value of the reference SI matrix; used by
    /// reference_capped only.
    double reference_sigma_max_sq = 0.0;
};

struct ChannelRealization {
    CVector h_tx; // Nt
    CVector h_rx; // Nr
    CMatrix si;   // Nr x Nt
    double kappa_db = 0.0;
    LinkBudget budget;
    /// Cross-link INR at the downlink user; -inf encodes no interference.
    double inr_cross_db = -std::numeric_limits<double>::infinity();
    double azimuth_tx = 0.0; // deg
    double azimuth_rx = 0.0; // deg

    int n_tx() const { return static_cast<int>(h_tx.size()); }
    int n_rx() const { return static_cast<int>(h_rx.size()); }
};

/// Far-field ULA response, entries exp(j 2 pi (d/lambda) n sin(theta)).
CVector steering_vector(const ArrayGeometry &geometry, double azimuth_deg, ArraySide which);

struct UserDraw {
    CVector h_tx;
    CVector h_rx;
    double azimuth_tx = 0.0;
    double azimuth_rx = 0.0;
};

inline constexpr double kMaxAzimuthDeg = 60.0;

/// Draws the downlink and uplink LOS channels: azimuths uniform on
/// [-60, 60] deg, a uniform global phase, unit path gain.
/// Draw order: azimuth_tx, azimuth_rx, phase_tx, phase_rx.
UserDraw sample_user_channels(const ArrayGeometry &geometry, Rng &rng);

/// Near-field spherical-wave coupling, H[m, n] = exp(-j 2 pi r / lambda) / r,
/// with r the distance from tx element n to rx element m.
CMatrix spherical_wave_si(const ArrayGeometry &geometry);

/// Mixing weights (sqrt(k/(k+1)), sqrt(1/(k+1))) for a linear Rician factor.
/// k = +inf gives (1, 0).
std::pair<double, double> rician_weights(double kappa_linear);

/// Rescales a matrix to Frobenius norm sqrt(rows * cols).
CMatrix frobenius_normalized(const CMatrix &m);

/// Rician mix of two matrices already normalized to equal Frobenius norm.
CMatrix mix_si_channel(const CMatrix &static_part, const CMatrix &random_part, double kappa_linear);

/// Draws H = sqrt(k/(k+1)) Hbar + sqrt(1/(k+1)) Htilde with Htilde i.i.d.
/// CN(0, 1); both components are Frobenius-normalized before mixing.
/// Throws std::invalid_argument on NaN kappa.
CMatrix sample_si_channel(const CMatrix &h_bar, double kappa_db, Rng &rng);

double sigma_max_sq(const CMatrix &m);

/// Top singular triple of m: (sigma, left vector u, right vector v).
struct SingularPair {
    double sigma = 0.0;
    CVector u;
    CVector v;
};
SingularPair top_singular_pair(const CMatrix &m);

/// Folds the link budget into gain factors. Peak SNR over ||f||^2 = Nt is
/// Nt ||h||^2 gain (Cauchy-Schwarz, attained by MRT) and peak INR over both
/// beam sets is Nt Nr sigma_max(H)^2 gain (operator norm, attained by the top
/// singular pair). Throws DegenerateChannel on an all-zero input.
ChannelRealization normalize_realization(const CVector &h_tx_raw, const CVector &h_rx_raw,
                                         const CMatrix &si_raw, const LinkBudget &targets,
                                         const NormalizationPolicy &policy = {});

/// Convenience bundle: geometry, reference SI component and normalization
/// settings, drawing complete realizations for a given kappa.
class ScenarioSampler {
public:
    ScenarioSampler(const ArraySpec &spec, const LinkBudget &targets, InrNormalization mode);

    const ArrayGeometry &geometry() const { return geometry_; }
    const CMatrix &static_si() const { return static_si_; }
    const NormalizationPolicy &policy() const { return policy_; }
    const LinkBudget &targets() const { return targets_; }

    UserDraw draw_users(Rng &rng) const { return sample_user_channels(geometry_, rng); }

    /// Realization for fixed users with a fresh random SI component from rng.
    ChannelRealization realize(const UserDraw &users, double kappa_db, Rng &rng) const;

    /// Users and SI component drawn from the same stream.
    ChannelRealization sample(double kappa_db, Rng &rng) const;

private:
    ArrayGeometry geometry_;
    CMatrix static_si_; // Frobenius-normalized spherical-wave component
    LinkBudget targets_;
    NormalizationPolicy policy_;
};

double db_to_linear(double db);

} // namespace fdxbl

#endif
