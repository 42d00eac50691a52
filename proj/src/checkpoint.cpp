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

#include "fdxbl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace fdxbl {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

constexpr const char *kMagic = "fdxbl-checkpoint";
constexpr int kVersion = 1;

std::uint64_t fnv1a(const char *data, std::size_t n)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string join_widths(const std::vector<int> &w)
{
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i)
        s += (i ? "," : "") + std::to_string(w[i]);
    return s.empty() ? "-" : s;
}

std::vector<int> parse_widths(const std::string &s)
{
    std::vector<int> out;
    if (s == "-")
        return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stoi(item));
    return out;
}

std::string hexfloat(double x)
{
    std::ostringstream os;
    os << std::hexfloat << x;
    return os.str();
}

} // namespace

void save_params(const LearnerParams &params, const std::filesystem::path &path)
{
    const LearnerConfig &c = params.config();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw CheckpointError("cannot open " + path.string() + " for writing");
    out << kMagic << ' ' << kVersion << '\n'
        << "n_tx " << c.n_tx << '\n'
        << "n_rx " << c.n_rx << '\n'
        << "horizon " << c.horizon << '\n'
        << "hidden_dim " << c.hidden_dim << '\n'
        << "dnn_hidden_widths " << join_widths(c.dnn_hidden_widths) << '\n'
        << "measurement_scale " << hexfloat(c.measurement_scale) << '\n'
        << "learning_rate " << hexfloat(c.learning_rate) << '\n'
        << "batch_size " << c.batch_size << '\n'
        << "train_iterations " << c.train_iterations << '\n'
        << "seed " << c.seed << '\n'
        << "data " << params.values().size() << '\n';
    const auto *bytes = reinterpret_cast<const char *>(params.values().data());
    const std::size_t n = static_cast<std::size_t>(params.values().size()) * sizeof(double);
    out.write(bytes, static_cast<std::streamsize>(n));
    const std::uint64_t sum = fnv1a(bytes, n);
    out.write(reinterpret_cast<const char *>(&sum), sizeof(sum));
    if (!out)
        throw CheckpointError("write failed for " + path.string());
}

LearnerParams load_params(const std::filesystem::path &path,
                          const std::optional<LearnerConfig> &expected)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CheckpointError("cannot open checkpoint " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw CheckpointError(path.string() + ": empty file");
    {
        std::istringstream head(line);
        std::string magic;
        int version = 0;
        head >> magic >> version;
        if (magic != kMagic)
            throw CheckpointError(path.string() + ": not a checkpoint file");
        if (version != kVersion)
            throw CheckpointError(path.string() + ": unsupported checkpoint version " +
                                  std::to_string(version) + " (expected " +
                                  std::to_string(kVersion) + ")");
    }

    std::map<std::string, std::string> fields;
    long long count = -1;
    while (std::getline(in, line)) {
        const auto sp = line.find(' ');
        if (sp == std::string::npos)
            throw CheckpointError(path.string() + ": malformed header line '" + line + "'");
        const std::string key = line.substr(0, sp);
        const std::string value = line.substr(sp + 1);
        if (key == "data") {
            count = std::stoll(value);
            break;
        }
        fields[key] = value;
    }
    if (count < 0)
        throw CheckpointError(path.string() + ": missing data section");

    LearnerConfig c;
    try {
        c.n_tx = std::stoi(fields.at("n_tx"));
        c.n_rx = std::stoi(fields.at("n_rx"));
        c.horizon = std::stoi(fields.at("horizon"));
        c.hidden_dim = std::stoi(fields.at("hidden_dim"));
        c.dnn_hidden_widths = parse_widths(fields.at("dnn_hidden_widths"));
        c.measurement_scale = std::strtod(fields.at("measurement_scale").c_str(), nullptr);
        c.learning_rate = std::strtod(fields.at("learning_rate").c_str(), nullptr);
        c.batch_size = std::stoi(fields.at("batch_size"));
        c.train_iterations = std::stoi(fields.at("train_iterations"));
        c.seed = std::stoull(fields.at("seed"));
    } catch (const std::exception &e) {
        throw CheckpointError(path.string() + ": incomplete or corrupt header (" + e.what() + ")");
    }

    if (expected) {
        auto check = [&](const char *name, const std::string &want, const std::string &got) {
            if (want != got)
                throw CheckpointError(path.string() + ": shape mismatch in " + name +
                                      ": expected " + want + ", found " + got);
        };
        check("n_tx", std::to_string(expected->n_tx), std::to_string(c.n_tx));
        check("n_rx", std::to_string(expected->n_rx), std::to_string(c.n_rx));
        check("horizon", std::to_string(expected->horizon), std::to_string(c.horizon));
        check("hidden_dim", std::to_string(expected->hidden_dim), std::to_string(c.hidden_dim));
        check("dnn_hidden_widths", join_widths(expected->dnn_hidden_widths),
              join_widths(c.dnn_hidden_widths));
    }

    LearnerParams params(c);
    if (count != params.values().size())
        throw CheckpointError(path.string() + ": parameter count " + std::to_string(count) +
                              " does not match the embedded shape (expected " +
                              std::to_string(params.values().size()) + ")");
    const std::size_t n = static_cast<std::size_t>(count) * sizeof(double);
    in.read(reinterpret_cast<char *>(params.values().data()), static_cast<std::streamsize>(n));
    std::uint64_t stored = 0;
    in.read(reinterpret_cast<char *>(&stored), sizeof(stored));
    if (!in)
        throw CheckpointError(path.string() + ": truncated data section");
    if (in.peek() != std::char_traits<char>::eof())
        throw CheckpointError(path.string() + ": trailing bytes after checksum");
    if (stored != fnv1a(reinterpret_cast<const char *>(params.values().data()), n))
        throw CheckpointError(path.string() + ": checksum mismatch (corrupted file)");
    return params;
}

} // namespace fdxbl
