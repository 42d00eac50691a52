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

#include "fdxbl/network.hpp"

#include <cmath>

namespace fdxbl {

void LearnerConfig::validate() const
{
    auto require = [](bool ok, const char *field) {
        if (!ok)
            throw std::invalid_argument(std::string("learner config: invalid ") + field);
    };
    require(n_tx >= 1, "n_tx");
    require(n_rx >= 1, "n_rx");
    require(horizon >= 1, "horizon");
    require(hidden_dim >= 1, "hidden_dim");
    for (int w : dnn_hidden_widths)
        require(w >= 1, "dnn_hidden_widths");
    require(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning_rate");
    require(batch_size >= 1, "batch_size");
    require(train_iterations >= 0, "train_iterations");
    require(measurement_scale > 0.0, "measurement_scale");
}

ParamLayout ParamLayout::make(const LearnerConfig &config)
{
    config.validate();
    ParamLayout l;
    l.n_tx = config.n_tx;
    l.n_rx = config.n_rx;
    l.hidden = config.hidden_dim;
    l.widths = config.dnn_hidden_widths;

    Eigen::Index off = 0;
    auto take = [&off](Eigen::Index n) {
        const Eigen::Index at = off;
        off += n;
        return at;
    };
    const Eigen::Index h4 = 4 * static_cast<Eigen::Index>(l.hidden);
    l.lstm_wx = take(h4 * kMeasurementDim);
    l.lstm_wh = take(h4 * l.hidden);
    l.lstm_b = take(h4);

    auto dense_stack = [&](std::vector<DenseLayerSlot> &stack) {
        int in = l.hidden;
        std::vector<int> outs = l.widths;
        outs.push_back(l.beam_dim());
        for (int out : outs) {
            DenseLayerSlot s;
            s.in = in;
            s.out = out;
            s.weight = take(static_cast<Eigen::Index>(in) * out);
            s.bias = take(out);
            stack.push_back(s);
            in = out;
        }
    };
    dense_stack(l.probe);
    dense_stack(l.serve);
    l.init_raw = take(l.beam_dim());
    l.size = off;
    return l;
}

LearnerParams::LearnerParams(const LearnerConfig &config)
    : config_(config), layout_(ParamLayout::make(config)), values_(RVector::Zero(layout_.size))
{
}

LearnerParams LearnerParams::initialize(const LearnerConfig &config, Rng &rng)
{
    LearnerParams p(config);
    const ParamLayout &l = p.layout_;
    RVector &v = p.values_;

    auto glorot = [&](Eigen::Index off, int fan_out, int fan_in) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-limit, limit);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(fan_out) * fan_in; ++i)
            v[off + i] = u(rng);
    };
    const int h4 = 4 * l.hidden;
    glorot(l.lstm_wx, h4, kMeasurementDim);
    glorot(l.lstm_wh, h4, l.hidden);
    v.segment(l.lstm_b + l.hidden, l.hidden).setOnes(); // forget gate
    for (const auto *stack : {&l.probe, &l.serve})
        for (const auto &s : *stack)
            glorot(s.weight, s.out, s.in);

    v.segment(l.init_raw, l.n_tx).setOnes();
    v.segment(l.init_raw + 2 * l.n_tx, l.n_rx).setOnes();
    return p;
}

RMatrix mlp_forward(const LearnerParams &params, const std::vector<DenseLayerSlot> &layers,
                    const Eigen::Ref<const RMatrix> &input)
{
    RMatrix x = input;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        RMatrix z = params.weight(layers[k]) * x;
        z.colwise() += params.bias(layers[k]);
        if (k + 1 < layers.size())
            z = z.cwiseMax(0.0);
        x = std::move(z);
    }
    return x;
}

} // namespace fdxbl
