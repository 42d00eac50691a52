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

#ifndef FDXBL_METRICS_HPP
#define FDXBL_METRICS_HPP

#include "fdxbl/channel.hpp"

namespace fdxbl {

/// Transmit beam f (Nt) and receive beam w (Nr), with ||f||^2 = Nt and
/// ||w||^2 = Nr.
struct BeamPair {
    CVector f;
    CVector w;
};

/// True when both power constraints hold within rel_tol.
bool satisfies_power(const BeamPair &pair, double rel_tol = 1e-6);

/// Measurements of one probing slot, all in dB.
struct MeasurementVector {
    double snr_tx_db = 0.0;
    double snr_rx_db = 0.0;
    double inr_rx_db = 0.0;
    bool noisy = false;
    int slot_index = 1;
};

/// Variance of the zero-mean Gaussian added to each dB measurement.
struct NoiseModel {
    double sigma2 = 0.0;
};

/// Linear values below this are clamped before dB conversion (-200 dB).
inline constexpr double kLinearFloor = 1e-20;
inline constexpr double kDbFloor = -200.0;

double to_db(double linear);
double from_db(double db);

double snr_tx(const ChannelRealization &ch, const CVector &f);
double snr_rx(const ChannelRealization &ch, const CVector &w);
double inr_rx(const ChannelRealization &ch, const CVector &f, const CVector &w);

/// Cross-link INR in linear units (zero for inr_cross_db = -inf).
double inr_cross(const ChannelRealization &ch);

double sinr_tx(const ChannelRealization &ch, const CVector &f);
double sinr_rx(const ChannelRealization &ch, const CVector &f, const CVector &w);

/// Spectral efficiencies in bps/Hz; r_sum is r_tx + r_rx.
struct Rates {
    double r_tx = 0.0;
    double r_rx = 0.0;
    double r_sum = 0.0;
};

Rates rates_from_sinr(double sinr_tx, double sinr_rx);
Rates rates(const ChannelRealization &ch, const CVector &f, const CVector &w);
inline Rates rates(const ChannelRealization &ch, const BeamPair &p) { return rates(ch, p.f, p.w); }

/// Standard normal draws for one slot, in the order snr_tx, snr_rx, inr_rx.
struct SlotNoise {
    double snr_tx = 0.0;
    double snr_rx = 0.0;
    double inr_rx = 0.0;
};

/// Always consumes exactly three normals from rng, whatever sigma2 is, so
/// streams stay aligned across noise levels.
SlotNoise draw_slot_noise(Rng &rng);

/// Exact dB metrics plus sqrt(sigma2) times the given standard normals.
MeasurementVector measure_with(const ChannelRealization &ch, const BeamPair &pair,
                               const NoiseModel &noise, const SlotNoise &z, int slot_index);

MeasurementVector measure(const ChannelRealization &ch, const BeamPair &pair,
                          const NoiseModel &noise, Rng &rng, int slot_index);

} // namespace fdxbl

#endif
