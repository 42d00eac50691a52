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

#include "fdxbl/channel.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace fdxbl {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ArrayGeometry make_geometry(const ArraySpec &spec)
{
    if (spec.n_tx < 1 || spec.n_rx < 1)
        throw InvalidGeometry("array sizes must be positive");
    if (!(spec.carrier_hz > 0.0) || !(spec.spacing_wavelengths > 0.0) ||
        !std::isfinite(spec.separation_wavelengths))
        throw InvalidGeometry("carrier frequency and element spacing must be positive");

    ArrayGeometry g;
    g.n_tx = spec.n_tx;
    g.n_rx = spec.n_rx;
    g.wavelength = kSpeedOfLight / spec.carrier_hz;
    g.element_spacing = spec.spacing_wavelengths * g.wavelength;
    g.array_separation = spec.separation_wavelengths * g.wavelength;
    g.separation_reference = spec.separation_reference;

    const double tx_half = 0.5 * (g.n_tx - 1) * g.element_spacing;
    const double rx_half = 0.5 * (g.n_rx - 1) * g.element_spacing;
    double rx_center = g.array_separation;
    if (spec.separation_reference == SeparationReference::edge_to_edge)
        rx_center = tx_half + g.array_separation + rx_half;

    g.tx_positions.reserve(g.n_tx);
    for (int n = 0; n < g.n_tx; ++n)
        g.tx_positions.emplace_back(n * g.element_spacing - tx_half, 0.0, 0.0);
    g.rx_positions.reserve(g.n_rx);
    for (int m = 0; m < g.n_rx; ++m)
        g.rx_positions.emplace_back(rx_center - rx_half + m * g.element_spacing, 0.0, 0.0);

    for (const auto &r : g.rx_positions)
        for (const auto &t : g.tx_positions)
            if ((r - t).norm() <= 1e-12 * g.wavelength)
                throw InvalidGeometry("transmit and receive elements coincide");
    return g;
}

CVector steering_vector(const ArrayGeometry &geometry, double azimuth_deg, ArraySide which)
{
    const int n = geometry.size(which);
    const double k = 2.0 * kPi * geometry.element_spacing / geometry.wavelength *
                     std::sin(azimuth_deg * kPi / 180.0);
    CVector a(n);
    for (int i = 0; i < n; ++i)
        a[i] = std::polar(1.0, k * i);
    return a;
}

UserDraw sample_user_channels(const ArrayGeometry &geometry, Rng &rng)
{
    std::uniform_real_distribution<double> azimuth(-kMaxAzimuthDeg, kMaxAzimuthDeg);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    UserDraw d;
    d.azimuth_tx = azimuth(rng);
    d.azimuth_rx = azimuth(rng);
    const double phi_tx = phase(rng);
    const double phi_rx = phase(rng);
    d.h_tx = std::polar(1.0, phi_tx) * steering_vector(geometry, d.azimuth_tx, ArraySide::tx);
    d.h_rx = std::polar(1.0, phi_rx) * steering_vector(geometry, d.azimuth_rx, ArraySide::rx);
    return d;
}

CMatrix spherical_wave_si(const ArrayGeometry &geometry)
{
    CMatrix h(geometry.n_rx, geometry.n_tx);
    for (int m = 0; m < geometry.n_rx; ++m) {
        for (int n = 0; n < geometry.n_tx; ++n) {
            const double r = (geometry.rx_positions[m] - geometry.tx_positions[n]).norm();
            if (!(r > 0.0))
                throw InvalidGeometry("zero tx-rx element distance at (" + std::to_string(m) +
                                      ", " + std::to_string(n) + ")");
            h(m, n) = std::polar(1.0 / r, -2.0 * kPi * r / geometry.wavelength);
        }
    }
    return h;
}

std::pair<double, double> rician_weights(double kappa_linear)
{
    if (std::isinf(kappa_linear))
        return {1.0, 0.0};
    return {std::sqrt(kappa_linear / (kappa_linear + 1.0)), std::sqrt(1.0 / (kappa_linear + 1.0))};
}

CMatrix frobenius_normalized(const CMatrix &m)
{
    const double norm = m.norm();
    if (!(norm > 0.0))
        throw DegenerateChannel("cannot normalize an all-zero matrix");
    return m * (std::sqrt(static_cast<double>(m.rows() * m.cols())) / norm);
}

CMatrix mix_si_channel(const CMatrix &static_part, const CMatrix &random_part, double kappa_linear)
{
    if (static_part.rows() != random_part.rows() || static_part.cols() != random_part.cols())
        throw ShapeMismatch("SI components differ in shape");
    const auto [a, b] = rician_weights(kappa_linear);
    if (b == 0.0)
        return a * static_part;
    if (a == 0.0)
        return b * random_part;
    return a * static_part + b * random_part;
}

CMatrix sample_si_channel(const CMatrix &h_bar, double kappa_db, Rng &rng)
{
    if (std::isnan(kappa_db))
        throw std::invalid_argument("kappa_db is NaN");
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix h_tilde(h_bar.rows(), h_bar.cols());
    for (Eigen::Index j = 0; j < h_tilde.cols(); ++j)
        for (Eigen::Index i = 0; i < h_tilde.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            h_tilde(i, j) = cplx(re, im);
        }
    return mix_si_channel(frobenius_normalized(h_bar), frobenius_normalized(h_tilde),
                          db_to_linear(kappa_db));
}

double sigma_max_sq(const CMatrix &m)
{
    Eigen::JacobiSVD<CMatrix> svd(m);
    const double s = svd.singularValues()(0);
    return s * s;
}

SingularPair top_singular_pair(const CMatrix &m)
{
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.singularValues()(0), svd.matrixU().col(0), svd.matrixV().col(0)};
}

ChannelRealization normalize_realization(const CVector &h_tx_raw, const CVector &h_rx_raw,
                                         const CMatrix &si_raw, const LinkBudget &targets,
                                         const NormalizationPolicy &policy)
{
    const double n_tx = static_cast<double>(h_tx_raw.size());
    const double n_rx = static_cast<double>(h_rx_raw.size());
    if (si_raw.rows() != h_rx_raw.size() || si_raw.cols() != h_tx_raw.size())
        throw ShapeMismatch("SI channel must be Nr x Nt");
    const double tx_energy = h_tx_raw.squaredNorm();
    const double rx_energy = h_rx_raw.squaredNorm();
    if (!(tx_energy > 0.0) || !(rx_energy > 0.0))
        throw DegenerateChannel("user channel is all zeros");
    const double sigma2 = sigma_max_sq(si_raw);
    if (!(sigma2 > 0.0))
        throw DegenerateChannel("self-interference channel is all zeros");

    ChannelRealization ch;
    ch.h_tx = h_tx_raw;
    ch.h_rx = h_rx_raw;
    ch.si = si_raw;
    ch.budget = targets;
    ch.budget.gain_tx = db_to_linear(targets.snr_max_db) / (n_tx * tx_energy);
    ch.budget.gain_rx = db_to_linear(targets.snr_max_db) / (n_rx * rx_energy);

    double peak_sigma2 = sigma2;
    if (policy.mode == InrNormalization::reference_capped) {
        if (!(policy.reference_sigma_max_sq > 0.0))
            throw std::invalid_argument("reference_capped normalization needs a positive reference");
        peak_sigma2 = std::max(sigma2, policy.reference_sigma_max_sq);
    }
    ch.budget.gain_si = db_to_linear(targets.inr_max_db) / (n_tx * n_rx * peak_sigma2);
    return ch;
}

ScenarioSampler::ScenarioSampler(const ArraySpec &spec, const LinkBudget &targets,
                                 InrNormalization mode)
    : geometry_(make_geometry(spec)), static_si_(frobenius_normalized(spherical_wave_si(geometry_))),
      targets_(targets)
{
    policy_.mode = mode;
    policy_.reference_sigma_max_sq = sigma_max_sq(static_si_);
}

ChannelRealization ScenarioSampler::realize(const UserDraw &users, double kappa_db, Rng &rng) const
{
    CMatrix si = sample_si_channel(static_si_, kappa_db, rng);
    ChannelRealization ch = normalize_realization(users.h_tx, users.h_rx, si, targets_, policy_);
    ch.kappa_db = kappa_db;
    ch.azimuth_tx = users.azimuth_tx;
    ch.azimuth_rx = users.azimuth_rx;
    return ch;
}

ChannelRealization ScenarioSampler::sample(double kappa_db, Rng &rng) const
{
    const UserDraw users = draw_users(rng);
    return realize(users, kappa_db, rng);
}

} // namespace fdxbl
