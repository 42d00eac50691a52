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

#ifndef FDXBL_CHECKPOINT_HPP
#define FDXBL_CHECKPOINT_HPP

#include "fdxbl/network.hpp"

#include <filesystem>
#include <optional>

namespace fdxbl {

// Checkpoint container:
//
//   fdxbl-checkpoint 1\n
//   key value\n ...        (learner config, one field per line)
//   data <count>\n
//   <count little-endian IEEE-754 doubles>
//   <8-byte FNV-1a 64 checksum of the data bytes>
//
// The embedded config is what load_params validates shapes against.

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void save_params(const LearnerParams &params, const std::filesystem::path &path);

/// Loads a checkpoint. When expected is given, every shape field (n_tx, n_rx,
/// horizon, hidden_dim, widths) must match; the error names expected and
/// found values.
LearnerParams load_params(const std::filesystem::path &path,
                          const std::optional<LearnerConfig> &expected = std::nullopt);

} // namespace fdxbl

#endif
