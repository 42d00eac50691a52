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

#include "fdxbl/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fdxbl {

namespace {

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

double parse_double(const std::string &v)
{
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size())
        throw std::invalid_argument("trailing characters");
    return x;
}

long long parse_int(const std::string &v)
{
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size())
        throw std::invalid_argument("trailing characters");
    return x;
}

bool parse_bool(const std::string &v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw std::invalid_argument("expected true/false");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string &v, F parse_one)
{
    std::vector<T> out;
    for (const auto &item : split_list(v))
        out.push_back(static_cast<T>(parse_one(item)));
    return out;
}

std::string fmt_double(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

template <typename T>
std::string fmt_list(const std::vector<T> &v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ", ";
        if constexpr (std::is_floating_point_v<T>)
            s += fmt_double(v[i]);
        else
            s += std::to_string(v[i]);
    }
    return s;
}

using Setter = std::function<void(ExperimentConfig &, const std::string &)>;

const std::map<std::string, Setter> &setters()
{
    static const std::map<std::string, Setter> table = {
        {"n_tx", [](auto &c, const auto &v) { c.array.n_tx = static_cast<int>(parse_int(v)); }},
        {"n_rx", [](auto &c, const auto &v) { c.array.n_rx = static_cast<int>(parse_int(v)); }},
        {"carrier_hz", [](auto &c, const auto &v) { c.array.carrier_hz = parse_double(v); }},
        {"spacing_wavelengths",
         [](auto &c, const auto &v) { c.array.spacing_wavelengths = parse_double(v); }},
        {"separation_wavelengths",
         [](auto &c, const auto &v) { c.array.separation_wavelengths = parse_double(v); }},
        {"separation_reference",
         [](auto &c, const auto &v) {
             if (v == "center")
                 c.array.separation_reference = SeparationReference::center_to_center;
             else if (v == "edge")
                 c.array.separation_reference = SeparationReference::edge_to_edge;
             else
                 throw std::invalid_argument("expected center or edge");
         }},
        {"snr_max_db", [](auto &c, const auto &v) { c.targets.snr_max_db = parse_double(v); }},
        {"inr_max_db", [](auto &c, const auto &v) { c.targets.inr_max_db = parse_double(v); }},
        {"inr_normalization",
         [](auto &c, const auto &v) {
             if (v == "per_realization")
                 c.inr_normalization = InrNormalization::per_realization;
             else if (v == "reference_capped")
                 c.inr_normalization = InrNormalization::reference_capped;
             else
                 throw std::invalid_argument("expected per_realization or reference_capped");
         }},
        {"kappa_db", [](auto &c, const auto &v) { c.kappa_db = parse_list<double>(v, parse_double); }},
        {"cdf_kappa_db", [](auto &c, const auto &v) { c.cdf_kappa_db = parse_double(v); }},
        {"sigma2", [](auto &c, const auto &v) { c.sigma2 = parse_double(v); }},
        {"horizons", [](auto &c, const auto &v) { c.horizons = parse_list<int>(v, parse_int); }},
        {"n_eval_pairs",
         [](auto &c, const auto &v) { c.n_eval_pairs = static_cast<int>(parse_int(v)); }},
        {"hidden_dim",
         [](auto &c, const auto &v) { c.learner.hidden_dim = static_cast<int>(parse_int(v)); }},
        {"dnn_hidden_widths",
         [](auto &c, const auto &v) { c.learner.dnn_hidden_widths = parse_list<int>(v, parse_int); }},
        {"learning_rate", [](auto &c, const auto &v) { c.learner.learning_rate = parse_double(v); }},
        {"batch_size",
         [](auto &c, const auto &v) { c.learner.batch_size = static_cast<int>(parse_int(v)); }},
        {"train_iterations",
         [](auto &c, const auto &v) {
             c.learner.train_iterations = static_cast<int>(parse_int(v));
         }},
        {"measurement_scale",
         [](auto &c, const auto &v) { c.learner.measurement_scale = parse_double(v); }},
        {"validation_pairs",
         [](auto &c, const auto &v) { c.validation_pairs = static_cast<int>(parse_int(v)); }},
        {"validate_every",
         [](auto &c, const auto &v) { c.validate_every = static_cast<int>(parse_int(v)); }},
        {"lr_decay", [](auto &c, const auto &v) { c.lr_decay = parse_double(v); }},
        {"lr_decay_every",
         [](auto &c, const auto &v) { c.lr_decay_every = static_cast<int>(parse_int(v)); }},
        {"seed", [](auto &c, const auto &v) { c.seed = static_cast<std::uint64_t>(parse_int(v)); }},
        {"train_seeds",
         [](auto &c, const auto &v) { c.train_seeds = parse_list<std::uint64_t>(v, parse_int); }},
        {"random_baseline", [](auto &c, const auto &v) { c.random_baseline = parse_bool(v); }},
        {"output_dir", [](auto &c, const auto &v) { c.output_dir = v; }},
        {"checkpoint_dir", [](auto &c, const auto &v) { c.checkpoint_dir = v; }},
    };
    return table;
}

} // namespace

const char *to_string(InrNormalization mode)
{
    return mode == InrNormalization::per_realization ? "per_realization" : "reference_capped";
}

const char *to_string(SeparationReference ref)
{
    return ref == SeparationReference::center_to_center ? "center" : "edge";
}

void ExperimentConfig::validate() const
{
    if (n_eval_pairs < 1)
        throw std::invalid_argument("n_eval_pairs must be at least 1");
    if (horizons.empty())
        throw std::invalid_argument("horizons must not be empty");
    for (int t : horizons)
        if (t < 1)
            throw std::invalid_argument("every horizon must be at least 1");
    if (kappa_db.empty())
        throw std::invalid_argument("kappa_db must not be empty");
    for (double k : kappa_db)
        if (std::isnan(k))
            throw std::invalid_argument("kappa_db contains NaN");
    if (!(sigma2 >= 0.0))
        throw std::invalid_argument("sigma2 must be nonnegative");
    if (train_seeds.empty())
        throw std::invalid_argument("train_seeds must not be empty");
    if (validation_pairs < 0 || validate_every < 0)
        throw std::invalid_argument("validation settings must be nonnegative");
    LearnerConfig probe = learner;
    probe.n_tx = array.n_tx;
    probe.n_rx = array.n_rx;
    probe.validate();
}

ExperimentConfig parse_config(const std::string &text)
{
    ExperimentConfig c;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ParseError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        try {
            it->second(c, value);
        } catch (const std::exception &e) {
            throw ParseError("config line " + std::to_string(line_no) + ": bad value for '" + key +
                             "': " + e.what());
        }
    }
    c.learner.n_tx = c.array.n_tx;
    c.learner.n_rx = c.array.n_rx;
    try {
        c.validate();
    } catch (const std::invalid_argument &e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_text(const ExperimentConfig &c)
{
    std::ostringstream os;
    os << "n_tx = " << c.array.n_tx << '\n'
       << "n_rx = " << c.array.n_rx << '\n'
       << "carrier_hz = " << fmt_double(c.array.carrier_hz) << '\n'
       << "spacing_wavelengths = " << fmt_double(c.array.spacing_wavelengths) << '\n'
       << "separation_wavelengths = " << fmt_double(c.array.separation_wavelengths) << '\n'
       << "separation_reference = " << to_string(c.array.separation_reference) << '\n'
       << "snr_max_db = " << fmt_double(c.targets.snr_max_db) << '\n'
       << "inr_max_db = " << fmt_double(c.targets.inr_max_db) << '\n'
       << "inr_normalization = " << to_string(c.inr_normalization) << '\n'
       << "kappa_db = " << fmt_list(c.kappa_db) << '\n'
       << "cdf_kappa_db = " << fmt_double(c.cdf_kappa_db) << '\n'
       << "sigma2 = " << fmt_double(c.sigma2) << '\n'
       << "horizons = " << fmt_list(c.horizons) << '\n'
       << "n_eval_pairs = " << c.n_eval_pairs << '\n'
       << "hidden_dim = " << c.learner.hidden_dim << '\n'
       << "dnn_hidden_widths = " << fmt_list(c.learner.dnn_hidden_widths) << '\n'
       << "learning_rate = " << fmt_double(c.learner.learning_rate) << '\n'
       << "batch_size = " << c.learner.batch_size << '\n'
       << "train_iterations = " << c.learner.train_iterations << '\n'
       << "measurement_scale = " << fmt_double(c.learner.measurement_scale) << '\n'
       << "validation_pairs = " << c.validation_pairs << '\n'
       << "validate_every = " << c.validate_every << '\n'
       << "lr_decay = " << fmt_double(c.lr_decay) << '\n'
       << "lr_decay_every = " << c.lr_decay_every << '\n'
       << "seed = " << c.seed << '\n'
       << "train_seeds = " << fmt_list(c.train_seeds) << '\n'
       << "random_baseline = " << (c.random_baseline ? "true" : "false") << '\n';
    if (!c.output_dir.empty())
        os << "output_dir = " << c.output_dir.string() << '\n';
    if (!c.checkpoint_dir.empty())
        os << "checkpoint_dir = " << c.checkpoint_dir.string() << '\n';
    return os.str();
}

} // namespace fdxbl
