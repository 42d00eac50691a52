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

#include "fdxbl/metrics.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace fdxbl;

namespace {

ChannelRealization draw(std::uint64_t seed, double kappa_db = 7.0)
{
    static const ScenarioSampler sampler(ArraySpec{}, LinkBudget{},
                                         InrNormalization::reference_capped);
    Rng rng = make_stream(seed);
    return sampler.sample(kappa_db, rng);
}

CVector mrt(const CVector &h) { return h * (std::sqrt(static_cast<double>(h.size())) / h.norm()); }

} // namespace

TEST_CASE("snr_tx: matched beam, orthogonal beam, direct oracle")
{
    const ChannelRealization ch = draw(1);
    CHECK(std::abs(to_db(snr_tx(ch, mrt(ch.h_tx))) - 10.0) < 1e-9);
    CHECK(std::abs(to_db(snr_rx(ch, mrt(ch.h_rx))) - 10.0) < 1e-9);

    // Project a random vector off h_tx, rescale to feasible power.
    std::mt19937_64 rng(3);
    CVector f = oracle::random_beam(8, rng);
    f -= ch.h_tx * (ch.h_tx.dot(f) / ch.h_tx.squaredNorm());
    f *= std::sqrt(8.0) / f.norm();
    CHECK(snr_tx(ch, f) < 1e-25);
    CHECK(to_db(0.0) == kDbFloor);

    for (int i = 0; i < 100; ++i) {
        const CVector fr = oracle::random_beam(8, rng);
        const CVector wr = oracle::random_beam(8, rng);
        CHECK(snr_tx(ch, fr) == doctest::Approx(oracle::snr_tx(ch, fr)).epsilon(1e-12));
        CHECK(snr_rx(ch, wr) == doctest::Approx(oracle::snr_rx(ch, wr)).epsilon(1e-12));
        CHECK(inr_rx(ch, fr, wr) == doctest::Approx(oracle::inr_rx(ch, fr, wr)).epsilon(1e-12));
    }
}

TEST_CASE("inr_rx: nulling and operator-norm peak")
{
    const ScenarioSampler sampler(ArraySpec{}, LinkBudget{}, InrNormalization::per_realization);
    Rng rng = make_stream(4);
    const ChannelRealization ch = sampler.sample(7.0, rng);
    std::mt19937_64 beams(8);
    const CVector f = oracle::random_beam(8, beams);
    const CVector hf = ch.si * f;
    CVector w = oracle::random_beam(8, beams);
    w -= hf * (hf.dot(w) / hf.squaredNorm());
    w *= std::sqrt(8.0) / w.norm();
    CHECK(inr_rx(ch, f, w) < 1e-20);

    const SingularPair top = top_singular_pair(ch.si);
    CHECK(std::abs(to_db(inr_rx(ch, std::sqrt(8.0) * top.v, std::sqrt(8.0) * top.u)) - 40.0) <
          1e-6);
}

TEST_CASE("dimension mismatch is an error")
{
    const ChannelRealization ch = draw(2);
    CHECK_THROWS_AS(snr_tx(ch, CVector::Ones(4)), ShapeMismatch);
    CHECK_THROWS_AS(snr_rx(ch, CVector::Ones(9)), ShapeMismatch);
    CHECK_THROWS_AS(inr_rx(ch, CVector::Ones(8), CVector::Ones(3)), ShapeMismatch);
}

TEST_CASE("sinr and rates arithmetic")
{
    CHECK(rates_from_sinr(10.0, 10.0).r_sum == doctest::Approx(6.918863237274595).epsilon(1e-12));
    CHECK(rates_from_sinr(0.0, 0.0).r_sum == 0.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const Rates r = rates_from_sinr(u(rng), u(rng));
        CHECK(r.r_sum - (r.r_tx + r.r_rx) == 0.0);
    }

    // SINR_rx = SNR_rx / (1 + INR_rx): 10 / 11 when both are 10.
    ChannelRealization ch = draw(6);
    const CVector f = mrt(ch.h_tx);
    const CVector w = mrt(ch.h_rx);
    ch.budget.gain_si = 10.0 / std::norm(w.dot(ch.si * f));
    CHECK(inr_rx(ch, f, w) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(sinr_rx(ch, f, w) == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
    ch.budget.gain_si = 0.0;
    CHECK(sinr_rx(ch, f, w) == doctest::Approx(snr_rx(ch, w)).epsilon(1e-15));

    const ChannelRealization c2 = draw(7);
    std::mt19937_64 beams(7);
    for (int i = 0; i < 200; ++i) {
        const CVector fr = oracle::random_beam(8, beams);
        const CVector wr = oracle::random_beam(8, beams);
        CHECK(sinr_rx(c2, fr, wr) <= snr_rx(c2, wr));
        // No cross-link interference: downlink SINR is the SNR.
        CHECK(sinr_tx(c2, fr) == snr_tx(c2, fr));
        const Rates r = rates(c2, fr, wr);
        CHECK(r.r_sum == doctest::Approx(oracle::sum_rate(oracle::snr_tx(c2, fr),
                                                          oracle::snr_rx(c2, wr) /
                                                              (1.0 + oracle::inr_rx(c2, fr, wr))))
                             .epsilon(1e-12));
    }
    CHECK(inr_cross(c2) == 0.0);
}

TEST_CASE("measurements: exact without noise, dB-domain noise with the right spread")
{
    const ChannelRealization ch = draw(8);
    const BeamPair p{mrt(ch.h_tx), mrt(ch.h_rx)};
    Rng rng = make_stream(1);
    const MeasurementVector y0 = measure(ch, p, NoiseModel{0.0}, rng, 1);
    CHECK(y0.snr_tx_db == to_db(snr_tx(ch, p.f)));
    CHECK(y0.inr_rx_db == to_db(inr_rx(ch, p.f, p.w)));
    CHECK_FALSE(y0.noisy);

    const int n = 100000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = measure(ch, p, NoiseModel{0.4}, rng, 1).snr_tx_db;
        s += v;
        ss += v * v;
    }
    const double mean = s / n;
    const double sd = std::sqrt((ss - n * mean * mean) / (n - 1));
    CHECK(std::abs(sd / std::sqrt(0.4) - 1.0) < 0.01);
    CHECK(std::abs(mean - 10.0) < 0.01);

    // Orthogonal pair: floor plus noise.
    BeamPair q = p;
    const CVector hf = ch.si * q.f;
    q.w -= hf * (hf.dot(q.w) / hf.squaredNorm());
    q.w *= std::sqrt(8.0) / q.w.norm();
    const SlotNoise z{0.0, 0.0, 1.5};
    const MeasurementVector yq = measure_with(ch, q, NoiseModel{0.4}, z, 2);
    CHECK(yq.inr_rx_db == doctest::Approx(kDbFloor + 1.5 * std::sqrt(0.4)).epsilon(1e-12));
    CHECK(yq.slot_index == 2);

    // Stream alignment: three normals per slot regardless of sigma2.
    Rng a = make_stream(2), b = make_stream(2);
    measure(ch, p, NoiseModel{0.0}, a, 1);
    draw_slot_noise(b);
    CHECK(a() == b());
}

TEST_CASE("power constraint predicate")
{
    std::mt19937_64 rng(1);
    BeamPair p{oracle::random_beam(8, rng), oracle::random_beam(8, rng)};
    CHECK(satisfies_power(p));
    p.f *= 1.0 + 1e-5;
    CHECK_FALSE(satisfies_power(p));
}
