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

#ifndef FDXBL_CONFIG_HPP
#define FDXBL_CONFIG_HPP

#include "fdxbl/channel.hpp"
#include "fdxbl/network.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fdxbl {

/// Everything an experiment needs. Read from a flat `key = value` file; `#`
/// starts a comment, lists are comma-separated.
struct ExperimentConfig {
    ArraySpec array;
    LinkBudget targets;
    InrNormalization inr_normalization = InrNormalization::reference_capped;

    std::vector<double> kappa_db{-13.0, -3.0, 3.0, 7.0, 17.0};
    double cdf_kappa_db = 7.0;
    double sigma2 = 0.4;
    std::vector<int> horizons{3, 4, 5, 10};
    int n_eval_pairs = 1000;

    /// Learner hyperparameters; horizon and seed are set per trained model.
    LearnerConfig learner;
    int validation_pairs = 256;
    int validate_every = 1000;
    double lr_decay = 1.0;
    int lr_decay_every = 0;

    std::uint64_t seed = 1; // evaluation scenarios and probing noise
    std::vector<std::uint64_t> train_seeds{0};
    bool random_baseline = true;

    std::filesystem::path output_dir;     // empty: FDXBL_OUT, then ./fdxbl_out
    std::filesystem::path checkpoint_dir; // empty: <output_dir>/checkpoints

    void validate() const;
};

/// Throws ParseError with the offending line number on unknown keys or
/// malformed values.
ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig &config);

const char *to_string(InrNormalization mode);
const char *to_string(SeparationReference ref);

} // namespace fdxbl

#endif
