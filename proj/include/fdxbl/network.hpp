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

#ifndef FDXBL_NETWORK_HPP
#define FDXBL_NETWORK_HPP

#include "fdxbl/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdxbl {

/// Hyperparameters of the recurrent beam learner and its training loop.
struct LearnerConfig {
    int n_tx = 8;
    int n_rx = 8;
    int horizon = 10; // probing slots T
    int hidden_dim = 512;
    std::vector<int> dnn_hidden_widths{1024, 1024, 1024};
    double learning_rate = 1e-4;
    int batch_size = 128;
    int train_iterations = 30000;
    double measurement_scale = 10.0; // dB divisor applied before the LSTM
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;
};

/// Number of raw DNN outputs per beam pair: real and imaginary parts of f and w.
inline int beam_output_dim(int n_tx, int n_rx) { return 2 * (n_tx + n_rx); }

struct DenseLayerSlot {
    Eigen::Index weight = 0; // out x in, column-major
    Eigen::Index bias = 0;
    int in = 0;
    int out = 0;
};

/// Offsets of every weight block inside the flat parameter vector.
///
/// LSTM gate rows are stacked as input, forget, candidate, output.
struct ParamLayout {
    int n_tx = 0;
    int n_rx = 0;
    int hidden = 0;
    std::vector<int> widths;

    Eigen::Index lstm_wx = 0; // 4H x 3
    Eigen::Index lstm_wh = 0; // 4H x H
    Eigen::Index lstm_b = 0;  // 4H
    std::vector<DenseLayerSlot> probe;
    std::vector<DenseLayerSlot> serve;
    Eigen::Index init_raw = 0; // 2(Nt + Nr)
    Eigen::Index size = 0;

    static ParamLayout make(const LearnerConfig &config);
    int beam_dim() const { return beam_output_dim(n_tx, n_rx); }
};

inline constexpr int kMeasurementDim = 3;

/// All trainable weights, stored in one flat vector so optimizers and
/// checkpoints treat them uniformly.
class LearnerParams {
public:
    LearnerParams() = default;
    explicit LearnerParams(const LearnerConfig &config);

    /// Glorot-uniform weights, zero biases except a unit forget-gate bias, and
    /// the initial probing pair set to broadside (all-ones f and w).
    static LearnerParams initialize(const LearnerConfig &config, Rng &rng);

    const LearnerConfig &config() const { return config_; }
    const ParamLayout &layout() const { return layout_; }
    RVector &values() { return values_; }
    const RVector &values() const { return values_; }

    using ConstMat = Eigen::Map<const RMatrix>;
    using ConstVec = Eigen::Map<const RVector>;

    ConstMat lstm_wx() const { return mat(layout_.lstm_wx, 4 * layout_.hidden, kMeasurementDim); }
    ConstMat lstm_wh() const { return mat(layout_.lstm_wh, 4 * layout_.hidden, layout_.hidden); }
    ConstVec lstm_b() const { return vec(layout_.lstm_b, 4 * layout_.hidden); }
    ConstMat weight(const DenseLayerSlot &s) const { return mat(s.weight, s.out, s.in); }
    ConstVec bias(const DenseLayerSlot &s) const { return vec(s.bias, s.out); }
    ConstVec init_raw() const { return vec(layout_.init_raw, layout_.beam_dim()); }

private:
    ConstMat mat(Eigen::Index off, Eigen::Index r, Eigen::Index c) const
    {
        return ConstMat(values_.data() + off, r, c);
    }
    ConstVec vec(Eigen::Index off, Eigen::Index n) const { return ConstVec(values_.data() + off, n); }

    LearnerConfig config_;
    ParamLayout layout_;
    RVector values_;
};

/// Forward pass of a ReLU MLP with a linear output layer on a batch of columns.
RMatrix mlp_forward(const LearnerParams &params, const std::vector<DenseLayerSlot> &layers,
                    const Eigen::Ref<const RMatrix> &input);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace fdxbl

#endif
