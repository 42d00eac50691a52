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

#include "fdxbl/batch_kernel.hpp"

#include <cmath>
#include <numbers>

namespace fdxbl {

BatchNoise draw_batch_noise(int batch_size, int horizon, Rng &rng)
{
    BatchNoise z(static_cast<std::size_t>(batch_size) * horizon);
    for (auto &slot : z)
        slot = draw_slot_noise(rng);
    return z;
}

namespace {

constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;

struct HeadCache {
    std::vector<RMatrix> inputs; // input to each dense layer (post-ReLU)
};

/// Beams of one slot together with the channel products needed by backward.
struct BeamBlock {
    RMatrix raw;    // D x B
    RVector norm_f; // per-column norm of the 2 Nt transmit block
    RVector norm_w;
    CMatrix f; // Nt x B
    CMatrix w; // Nr x B
    CMatrix hf; // Nr x B, H f
    CMatrix hw; // Nt x B, H^H w
    CVector a;  // h_tx^H f
    CVector b;  // w^H h_rx
    CVector z;  // w^H H f
};

struct SlotCache {
    BeamBlock beams;
    RMatrix x; // 3 x B, scaled measurements
    Eigen::Matrix<bool, 3, Eigen::Dynamic> live; // reading above the dB floor
    RMatrix s_prev, c_prev;
    RMatrix gi, gf, gg, go;
    RMatrix tanh_c;
    HeadCache probe; // head that produced this slot's beams (slots >= 2)
};

RMatrix head_forward(const LearnerParams &params, const std::vector<DenseLayerSlot> &layers,
                     const RMatrix &input, HeadCache *cache)
{
    RMatrix x = input;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        RMatrix z = params.weight(layers[k]) * x;
        z.colwise() += params.bias(layers[k]);
        if (k + 1 < layers.size())
            z = z.cwiseMax(0.0);
        if (cache)
            cache->inputs.push_back(std::move(x));
        x = std::move(z);
    }
    return x;
}

/// Returns d(loss)/d(input) and accumulates weight gradients.
RMatrix head_backward(const LearnerParams &params, const std::vector<DenseLayerSlot> &layers,
                      const HeadCache &cache, RMatrix d, RVector &grad)
{
    for (std::size_t k = layers.size(); k-- > 0;) {
        const auto &s = layers[k];
        const RMatrix &in = cache.inputs[k];
        Eigen::Map<RMatrix>(grad.data() + s.weight, s.out, s.in).noalias() += d * in.transpose();
        Eigen::Map<RVector>(grad.data() + s.bias, s.out) += d.rowwise().sum();
        RMatrix d_in = params.weight(s).transpose() * d;
        if (k > 0)
            d_in = (in.array() > 0.0).select(d_in, 0.0);
        d = std::move(d_in);
    }
    return d;
}

void beams_from_raw(BeamBlock &blk, int n_tx, int n_rx, std::span<const ChannelRealization> batch)
{
    const Eigen::Index cols = blk.raw.cols();
    blk.norm_f.resize(cols);
    blk.norm_w.resize(cols);
    blk.f.resize(n_tx, cols);
    blk.w.resize(n_rx, cols);
    blk.hf.resize(n_rx, cols);
    blk.hw.resize(n_tx, cols);
    blk.a.resize(cols);
    blk.b.resize(cols);
    blk.z.resize(cols);
    bool degenerate = false;
#pragma omp parallel for schedule(static) reduction(|| : degenerate)
    for (Eigen::Index j = 0; j < cols; ++j) {
        const auto col = blk.raw.col(j);
        const double nf = col.head(2 * n_tx).norm();
        const double nw = col.tail(2 * n_rx).norm();
        if (!(nf > 0.0) || !(nw > 0.0) || !std::isfinite(nf) || !std::isfinite(nw)) {
            degenerate = true;
            continue;
        }
        blk.norm_f[j] = nf;
        blk.norm_w[j] = nw;
        const double sf = std::sqrt(static_cast<double>(n_tx)) / nf;
        const double sw = std::sqrt(static_cast<double>(n_rx)) / nw;
        for (int i = 0; i < n_tx; ++i)
            blk.f(i, j) = sf * cplx(col[i], col[n_tx + i]);
        for (int i = 0; i < n_rx; ++i)
            blk.w(i, j) = sw * cplx(col[2 * n_tx + i], col[2 * n_tx + n_rx + i]);

        const ChannelRealization &ch = batch[j];
        blk.hf.col(j).noalias() = ch.si * blk.f.col(j);
        blk.hw.col(j).noalias() = ch.si.adjoint() * blk.w.col(j);
        blk.a[j] = ch.h_tx.dot(blk.f.col(j));
        blk.b[j] = blk.w.col(j).dot(ch.h_rx);
        blk.z[j] = blk.w.col(j).dot(blk.hf.col(j));
    }
    if (degenerate)
        throw DegenerateBeam("network emitted an all-zero or non-finite beam; training state is "
                             "degenerate");
}

/// Maps complex gradients (dL/dRe + j dL/dIm) of f and w back through the
/// power normalization onto the raw outputs of column j.
void normalize_backward(const BeamBlock &blk, Eigen::Index j, const CVector &gf,
                        const CVector &gw, RMatrix &d_raw)
{
    auto part = [&](Eigen::Index offset, int n, double norm, const CVector &g) {
        const auto u = blk.raw.col(j).segment(offset, 2 * n);
        RVector gr(2 * n);
        gr.head(n) = g.real();
        gr.tail(n) = g.imag();
        const double proj = u.dot(gr) / (norm * norm);
        d_raw.col(j).segment(offset, 2 * n) =
            (std::sqrt(static_cast<double>(n)) / norm) * (gr - proj * u);
    };
    const int n_tx = static_cast<int>(gf.size());
    const int n_rx = static_cast<int>(gw.size());
    part(0, n_tx, blk.norm_f[j], gf);
    part(2 * n_tx, n_rx, blk.norm_w[j], gw);
}

struct Unrolled {
    std::vector<SlotCache> slots;
    RMatrix c_final;
    HeadCache serve;
    BeamBlock serving;
};

void check_batch(const LearnerParams &params, std::span<const ChannelRealization> batch,
                 std::span<const SlotNoise> z)
{
    const auto &l = params.layout();
    if (batch.empty())
        throw std::invalid_argument("batch is empty");
    if (z.size() != batch.size() * static_cast<std::size_t>(params.config().horizon))
        throw std::invalid_argument("noise tensor must hold T triples per sample");
    for (const auto &ch : batch)
        if (ch.n_tx() != l.n_tx || ch.n_rx() != l.n_rx)
            throw ShapeMismatch("channel dimensions do not match the learner");
}

Unrolled run_forward(const LearnerParams &params, std::span<const ChannelRealization> batch,
                     const NoiseModel &noise, std::span<const SlotNoise> z, bool keep)
{
    check_batch(params, batch, z);
    if (noise.sigma2 < 0.0)
        throw std::invalid_argument("noise variance must be nonnegative");
    const auto &l = params.layout();
    const int horizon = params.config().horizon;
    const int hidden = l.hidden;
    const Eigen::Index cols = static_cast<Eigen::Index>(batch.size());
    const double sd = std::sqrt(noise.sigma2);
    const double scale = params.config().measurement_scale;

    Unrolled u;
    u.slots.resize(horizon);
    RMatrix s = RMatrix::Zero(hidden, cols);
    RMatrix c = RMatrix::Zero(hidden, cols);
    RMatrix raw = params.init_raw().replicate(1, cols);

    for (int t = 0; t < horizon; ++t) {
        SlotCache &sc = u.slots[t];
        sc.beams.raw = std::move(raw);
        beams_from_raw(sc.beams, l.n_tx, l.n_rx, batch);

        sc.x.resize(kMeasurementDim, cols);
        sc.live.resize(kMeasurementDim, cols);
#pragma omp parallel for schedule(static)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const ChannelRealization &ch = batch[j];
            const SlotNoise &zn = z[j * horizon + t];
            const double lin[3] = {ch.budget.gain_tx * std::norm(sc.beams.a[j]),
                                   ch.budget.gain_rx * std::norm(sc.beams.b[j]),
                                   ch.budget.gain_si * std::norm(sc.beams.z[j])};
            const double noise_draw[3] = {zn.snr_tx, zn.snr_rx, zn.inr_rx};
            for (int k = 0; k < 3; ++k) {
                sc.live(k, j) = lin[k] > kLinearFloor;
                sc.x(k, j) = (to_db(lin[k]) + sd * noise_draw[k]) / scale;
            }
        }

        RMatrix gates = params.lstm_wx() * sc.x;
        gates.noalias() += params.lstm_wh() * s;
        gates.colwise() += params.lstm_b();
        auto sig = [](const auto &m) { return (1.0 + (-m.array()).exp()).inverse().matrix(); };
        sc.gi = sig(gates.topRows(hidden));
        sc.gf = sig(gates.middleRows(hidden, hidden));
        sc.gg = gates.middleRows(2 * hidden, hidden).array().tanh().matrix();
        sc.go = sig(gates.bottomRows(hidden));
        RMatrix c_next = sc.gf.cwiseProduct(c) + sc.gi.cwiseProduct(sc.gg);
        sc.tanh_c = c_next.array().tanh().matrix();
        RMatrix s_next = sc.go.cwiseProduct(sc.tanh_c);
        sc.s_prev = std::move(s);
        sc.c_prev = std::move(c);
        s = std::move(s_next);
        c = std::move(c_next);

        if (t + 1 < horizon)
            raw = head_forward(params, l.probe, s, keep ? &u.slots[t + 1].probe : nullptr);
        if (!keep) {
            // inference only: drop what backward would need
            sc.s_prev.resize(0, 0);
            sc.c_prev.resize(0, 0);
        }
    }
    u.serving.raw = head_forward(params, l.serve, c, keep ? &u.serve : nullptr);
    beams_from_raw(u.serving, l.n_tx, l.n_rx, batch);
    u.c_final = std::move(c);
    return u;
}

BatchOutput collect(const Unrolled &u, std::span<const ChannelRealization> batch)
{
    BatchOutput out;
    const Eigen::Index cols = static_cast<Eigen::Index>(batch.size());
    out.achieved.resize(cols);
    out.serving.resize(cols);
    double total = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
        out.serving[j] = {u.serving.f.col(j), u.serving.w.col(j)};
        out.achieved[j] = rates(batch[j], out.serving[j]);
        total += out.achieved[j].r_sum;
    }
    out.loss = -total / static_cast<double>(cols);
    return out;
}

} // namespace

BatchOutput batch_forward(const LearnerParams &params, std::span<const ChannelRealization> batch,
                          const NoiseModel &noise, std::span<const SlotNoise> z)
{
    return collect(run_forward(params, batch, noise, z, false), batch);
}

BatchOutput batch_loss_and_gradient(const LearnerParams &params,
                                    std::span<const ChannelRealization> batch,
                                    const NoiseModel &noise, std::span<const SlotNoise> z,
                                    RVector &grad)
{
    const Unrolled u = run_forward(params, batch, noise, z, true);
    BatchOutput out = collect(u, batch);

    const auto &l = params.layout();
    const int horizon = params.config().horizon;
    const int hidden = l.hidden;
    const Eigen::Index cols = static_cast<Eigen::Index>(batch.size());
    const double weight = -1.0 / static_cast<double>(cols);
    const double scale = params.config().measurement_scale;
    grad = RVector::Zero(l.size);

    // Serving beams: d(-mean R)/d(raw).
    RMatrix d_raw(l.beam_dim(), cols);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j) {
        const ChannelRealization &ch = batch[j];
        const BeamBlock &blk = u.serving;
        const double st = ch.budget.gain_tx * std::norm(blk.a[j]);
        const double sr = ch.budget.gain_rx * std::norm(blk.b[j]);
        const double in = ch.budget.gain_si * std::norm(blk.z[j]);
        const double xc = inr_cross(ch);
        const double ln2 = std::numbers::ln2;
        const double d_st = weight / ((1.0 + xc + st) * ln2);
        const double d_sr = weight / ((1.0 + in + sr) * ln2);
        const double d_in = weight * (1.0 / (1.0 + in + sr) - 1.0 / (1.0 + in)) / ln2;
        const CVector gf = (2.0 * d_st * ch.budget.gain_tx * blk.a[j]) * ch.h_tx +
                           (2.0 * d_in * ch.budget.gain_si * blk.z[j]) * blk.hw.col(j);
        const CVector gw = (2.0 * d_sr * ch.budget.gain_rx * std::conj(blk.b[j])) * ch.h_rx +
                           (2.0 * d_in * ch.budget.gain_si * std::conj(blk.z[j])) * blk.hf.col(j);
        normalize_backward(blk, j, gf, gw, d_raw);
    }
    RMatrix d_c = head_backward(params, l.serve, u.serve, d_raw, grad);
    RMatrix d_s = RMatrix::Zero(hidden, cols);

    auto g_wx = Eigen::Map<RMatrix>(grad.data() + l.lstm_wx, 4 * hidden, kMeasurementDim);
    auto g_wh = Eigen::Map<RMatrix>(grad.data() + l.lstm_wh, 4 * hidden, hidden);
    auto g_b = Eigen::Map<RVector>(grad.data() + l.lstm_b, 4 * hidden);

    RMatrix d_gates(4 * hidden, cols);
    for (int t = horizon - 1; t >= 0; --t) {
        const SlotCache &sc = u.slots[t];
        // d_s, d_c hold gradients w.r.t. this slot's outputs s_{t+1}, c_{t+1}.
        d_c.array() += d_s.array() * sc.go.array() * (1.0 - sc.tanh_c.array().square());
        d_gates.topRows(hidden) =
            (d_c.array() * sc.gg.array() * sc.gi.array() * (1.0 - sc.gi.array())).matrix();
        d_gates.middleRows(hidden, hidden) =
            (d_c.array() * sc.c_prev.array() * sc.gf.array() * (1.0 - sc.gf.array())).matrix();
        d_gates.middleRows(2 * hidden, hidden) =
            (d_c.array() * sc.gi.array() * (1.0 - sc.gg.array().square())).matrix();
        d_gates.bottomRows(hidden) =
            (d_s.array() * sc.tanh_c.array() * sc.go.array() * (1.0 - sc.go.array())).matrix();

        g_wx.noalias() += d_gates * sc.x.transpose();
        g_wh.noalias() += d_gates * sc.s_prev.transpose();
        g_b += d_gates.rowwise().sum();
        const RMatrix d_x = params.lstm_wx().transpose() * d_gates;
        RMatrix d_s_prev = params.lstm_wh().transpose() * d_gates;
        d_c = d_c.cwiseProduct(sc.gf);

        // Measurements: y = 10 log10(gain |.|^2) + noise, scaled by 1/scale.
        const BeamBlock &blk = sc.beams;
#pragma omp parallel for schedule(static)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const ChannelRealization &ch = batch[j];
            const double k_tx = sc.live(0, j) ? d_x(0, j) / scale * kDbPerNeper / std::norm(blk.a[j]) : 0.0;
            const double k_rx = sc.live(1, j) ? d_x(1, j) / scale * kDbPerNeper / std::norm(blk.b[j]) : 0.0;
            const double k_si = sc.live(2, j) ? d_x(2, j) / scale * kDbPerNeper / std::norm(blk.z[j]) : 0.0;
            const CVector gf = (2.0 * k_tx * blk.a[j]) * ch.h_tx + (2.0 * k_si * blk.z[j]) * blk.hw.col(j);
            const CVector gw = (2.0 * k_rx * std::conj(blk.b[j])) * ch.h_rx +
                               (2.0 * k_si * std::conj(blk.z[j])) * blk.hf.col(j);
            normalize_backward(blk, j, gf, gw, d_raw);
        }
        if (t == 0)
            Eigen::Map<RVector>(grad.data() + l.init_raw, l.beam_dim()) += d_raw.rowwise().sum();
        else
            d_s_prev += head_backward(params, l.probe, sc.probe, d_raw, grad);

        d_s = std::move(d_s_prev);
    }
    return out;
}

} // namespace fdxbl
