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

#include "fdxbl/harness.hpp"

#include "fdxbl/baselines.hpp"
#include "fdxbl/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <tuple>

namespace fdxbl {

namespace {

std::string fmt_kappa(double kappa_db)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", kappa_db);
    return buf;
}

std::uint64_t kappa_bits(double kappa_db) { return std::bit_cast<std::uint64_t>(kappa_db + 0.0); }

ResultRow make_row(const MethodSpec &m, const ChannelRealization &ch, int pair, const BeamPair &p)
{
    ResultRow r;
    r.method = m.tag();
    r.kappa_db = ch.kappa_db;
    r.horizon = m.horizon;
    r.seed = m.seed;
    r.pair = pair;
    r.inr_rx_db = to_db(inr_rx(ch, p.f, p.w));
    r.sinr_rx_db = to_db(sinr_rx(ch, p.f, p.w));
    const Rates rt = rates(ch, p);
    r.r_tx = rt.r_tx;
    r.r_rx = rt.r_rx;
    r.r_sum = r.r_tx + r.r_rx;
    return r;
}

ResultRow evaluate_pair(const MethodSpec &m, const ChannelRealization &ch, int pair,
                        const NoiseModel &noise, std::uint64_t noise_seed)
{
    switch (m.kind) {
    case MethodKind::mrt_mrc:
        return make_row(m, ch, pair, mrt_mrc(ch));
    case MethodKind::capacity: {
        // Same beams as MRT+MRC, self-interference removed.
        const BeamPair p = mrt_mrc(ch);
        ResultRow r;
        r.method = m.tag();
        r.kappa_db = ch.kappa_db;
        r.seed = m.seed;
        r.pair = pair;
        r.inr_rx_db = kDbFloor;
        r.sinr_rx_db = to_db(snr_rx(ch, p.w));
        const Rates rt = fd_capacity_rates(ch);
        r.r_tx = rt.r_tx;
        r.r_rx = rt.r_rx;
        r.r_sum = r.r_tx + r.r_rx;
        return r;
    }
    case MethodKind::learner: {
        Rng rng = make_stream(noise_seed, {20, 2, static_cast<std::uint64_t>(m.horizon),
                                           static_cast<std::uint64_t>(pair)});
        return make_row(m, ch, pair, unroll(*m.params, ch, noise, rng).serving);
    }
    case MethodKind::random_probe: {
        Rng rng = make_stream(noise_seed, {20, 3, static_cast<std::uint64_t>(m.horizon),
                                           static_cast<std::uint64_t>(pair)});
        return make_row(m, ch, pair, random_probe_policy(ch, m.horizon, noise, rng).serving);
    }
    }
    throw std::logic_error("unknown method kind");
}

std::vector<MethodSpec> baseline_methods(const ExperimentConfig &config)
{
    std::vector<MethodSpec> out;
    out.push_back({MethodKind::mrt_mrc, 0, config.seed, nullptr});
    out.push_back({MethodKind::capacity, 0, config.seed, nullptr});
    if (config.random_baseline)
        for (int t : config.horizons)
            out.push_back({MethodKind::random_probe, t, config.seed, nullptr});
    return out;
}

void append(std::vector<ResultRow> &dst, std::vector<ResultRow> &&src)
{
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

std::string gnuplot_quote(const std::string &s) { return "'" + s + "'"; }

} // namespace

MissingCheckpoint::MissingCheckpoint(int horizon, double kappa_db, std::uint64_t seed,
                                     const std::filesystem::path &path)
    : std::runtime_error("no trained model for (T=" + std::to_string(horizon) +
                         ", kappa=" + fmt_kappa(kappa_db) + " dB, seed " + std::to_string(seed) +
                         "): missing " + path.string()),
      horizon_(horizon), kappa_db_(kappa_db)
{
}

std::string MethodSpec::tag() const
{
    switch (kind) {
    case MethodKind::mrt_mrc:
        return "mrt_mrc";
    case MethodKind::capacity:
        return "capacity";
    case MethodKind::learner:
        return "learner_T" + std::to_string(horizon);
    case MethodKind::random_probe:
        return "random_T" + std::to_string(horizon);
    }
    return "unknown";
}

std::vector<ChannelRealization> make_eval_set(const ScenarioSampler &sampler, double kappa_db,
                                              int n_pairs, std::uint64_t seed)
{
    if (n_pairs < 1)
        throw std::invalid_argument("evaluation needs at least one pair");
    std::vector<ChannelRealization> set;
    set.reserve(n_pairs);
    for (int i = 0; i < n_pairs; ++i) {
        Rng users_rng = make_stream(seed, {10, static_cast<std::uint64_t>(i)});
        Rng si_rng = make_stream(seed, {11, kappa_bits(kappa_db), static_cast<std::uint64_t>(i)});
        set.push_back(sampler.realize(sampler.draw_users(users_rng), kappa_db, si_rng));
    }
    return set;
}

std::vector<ResultRow> evaluate_method(const MethodSpec &method,
                                       std::span<const ChannelRealization> set,
                                       const NoiseModel &noise, std::uint64_t noise_seed,
                                       Execution exec)
{
    if (method.kind == MethodKind::learner) {
        if (method.params == nullptr)
            throw std::invalid_argument("learner evaluation needs parameters");
        if (method.params->config().horizon != method.horizon)
            throw std::invalid_argument("learner horizon does not match its parameters");
    }
    const int n = static_cast<int>(set.size());
    std::vector<ResultRow> rows(n);
    if (exec == Execution::serial) {
        for (int i = 0; i < n; ++i)
            rows[i] = evaluate_pair(method, set[i], i, noise, noise_seed);
        return rows;
    }

    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < n; ++i) {
        try {
            rows[i] = evaluate_pair(method, set[i], i, noise, noise_seed);
        } catch (...) {
#pragma omp critical(fdxbl_eval_error)
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
    return rows;
}

std::filesystem::path checkpoint_path(const std::filesystem::path &dir, int horizon,
                                      double kappa_db, std::uint64_t seed)
{
    return dir / ("learner_T" + std::to_string(horizon) + "_kappa" + fmt_kappa(kappa_db) + "_seed" +
                  std::to_string(seed) + ".ckpt");
}

std::filesystem::path resolve_output_dir(const ExperimentConfig &config)
{
    if (!config.output_dir.empty())
        return config.output_dir;
    if (const char *env = std::getenv("FDXBL_OUT"); env != nullptr && *env != '\0')
        return env;
    return "fdxbl_out";
}

std::filesystem::path resolve_checkpoint_dir(const ExperimentConfig &config)
{
    if (!config.checkpoint_dir.empty())
        return config.checkpoint_dir;
    return resolve_output_dir(config) / "checkpoints";
}

ModelProvider checkpoint_provider(const ExperimentConfig &config)
{
    const std::filesystem::path dir = resolve_checkpoint_dir(config);
    LearnerConfig shape = config.learner;
    shape.n_tx = config.array.n_tx;
    shape.n_rx = config.array.n_rx;
    return [dir, shape](int horizon, double kappa_db, std::uint64_t seed) {
        const auto path = checkpoint_path(dir, horizon, kappa_db, seed);
        if (!std::filesystem::exists(path))
            throw MissingCheckpoint(horizon, kappa_db, seed, path);
        LearnerConfig expected = shape;
        expected.horizon = horizon;
        return load_params(path, expected);
    };
}

CdfResult run_cdf_experiment(const ExperimentConfig &config, const ModelProvider &models,
                             Execution exec, const EvalObserver &observer)
{
    config.validate();
    const double kappa = config.cdf_kappa_db;
    const std::uint64_t train_seed = config.train_seeds.front();

    std::vector<LearnerParams> params;
    params.reserve(config.horizons.size());
    for (int t : config.horizons)
        params.push_back(models(t, kappa, train_seed));

    const ScenarioSampler sampler(config.array, config.targets, config.inr_normalization);
    const auto set = make_eval_set(sampler, kappa, config.n_eval_pairs, config.seed);
    const NoiseModel noise{config.sigma2};

    std::vector<MethodSpec> methods = baseline_methods(config);
    for (std::size_t k = 0; k < config.horizons.size(); ++k)
        methods.push_back({MethodKind::learner, config.horizons[k], train_seed, &params[k]});

    CdfResult result;
    for (const auto &m : methods) {
        if (observer)
            observer(m, set);
        auto rows = evaluate_method(m, set, noise, config.seed, exec);
        std::vector<double> inr, sinr;
        for (const auto &r : rows) {
            inr.push_back(r.inr_rx_db);
            sinr.push_back(r.sinr_rx_db);
        }
        if (m.kind != MethodKind::capacity)
            result.curves.push_back({m.tag(), "inr_rx_db", EmpiricalCdf(std::move(inr))});
        result.curves.push_back({m.tag(), "sinr_rx_db", EmpiricalCdf(std::move(sinr))});
        append(result.rows, std::move(rows));
    }
    sort_rows(result.rows);
    return result;
}

SweepResult run_kappa_sweep(const ExperimentConfig &config, const ModelProvider &models,
                            Execution exec, const EvalObserver &observer)
{
    config.validate();
    // Resolve every model up front so a missing one fails before any work.
    std::map<std::tuple<int, double, std::uint64_t>, LearnerParams> params;
    for (double kappa : config.kappa_db)
        for (int t : config.horizons)
            for (std::uint64_t s : config.train_seeds)
                params.emplace(std::make_tuple(t, kappa, s), models(t, kappa, s));

    const ScenarioSampler sampler(config.array, config.targets, config.inr_normalization);
    const NoiseModel noise{config.sigma2};
    SweepResult result;
    for (double kappa : config.kappa_db) {
        const auto set = make_eval_set(sampler, kappa, config.n_eval_pairs, config.seed);
        std::vector<MethodSpec> methods = baseline_methods(config);
        for (int t : config.horizons)
            for (std::uint64_t s : config.train_seeds)
                methods.push_back(
                    {MethodKind::learner, t, s, &params.at(std::make_tuple(t, kappa, s))});

        std::map<std::string, std::pair<SweepPoint, std::vector<double>>> acc;
        for (const auto &m : methods) {
            if (observer)
                observer(m, set);
            auto rows = evaluate_method(m, set, noise, config.seed, exec);
            auto &[point, values] = acc[m.tag()];
            point.method = m.tag();
            point.kappa_db = kappa;
            point.horizon = m.horizon;
            point.n_seeds += 1;
            for (const auto &r : rows)
                values.push_back(r.r_sum);
            append(result.rows, std::move(rows));
        }
        for (auto &[tag, entry] : acc) {
            entry.first.r_sum = summarize(entry.second);
            result.points.push_back(entry.first);
        }
    }
    sort_rows(result.rows);
    std::stable_sort(result.points.begin(), result.points.end(),
                     [](const SweepPoint &a, const SweepPoint &b) {
                         return std::tie(a.method, a.kappa_db) < std::tie(b.method, b.kappa_db);
                     });
    return result;
}

std::vector<std::filesystem::path> write_cdf_outputs(const CdfResult &result,
                                                     const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    const auto rows_path = dir / "cdf_rows.csv";
    const auto curves_path = dir / "cdf_curves.csv";
    const auto plot_path = dir / "cdf.gp";
    emit_results(result.rows, rows_path);

    std::ofstream curves(curves_path, std::ios::trunc);
    curves << "method,metric,value,cdf\n";
    char buf[64];
    for (const auto &c : result.curves) {
        const auto &x = c.cdf.sorted();
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", x[i],
                          static_cast<double>(i + 1) / static_cast<double>(x.size()));
            curves << c.method << ',' << c.metric << ',' << buf << '\n';
        }
    }
    if (!curves)
        throw std::runtime_error("write failed for " + curves_path.string());

    std::ofstream gp(plot_path, std::ios::trunc);
    gp << "# Empirical CDFs of receive INR and SINR. Usage: gnuplot cdf.gp\n"
       << "set datafile separator ','\n"
       << "set terminal pngcairo size 1200,500\n"
       << "set output 'cdf.png'\n"
       << "set multiplot layout 1,2\n"
       << "set key bottom right\nset ylabel 'CDF'\nset grid\n";
    for (const char *metric : {"inr_rx_db", "sinr_rx_db"}) {
        gp << "set xlabel '" << metric << "'\nplot ";
        bool first = true;
        for (const auto &c : result.curves) {
            if (c.metric != metric)
                continue;
            gp << (first ? "" : ", \\\n     ") << "'cdf_curves.csv' using "
               << "(strcol(1) eq " << gnuplot_quote(c.method) << " && strcol(2) eq "
               << gnuplot_quote(metric) << " ? $3 : 1/0):4 with steps title "
               << gnuplot_quote(c.method);
            first = false;
        }
        gp << '\n';
    }
    gp << "unset multiplot\n";
    return {rows_path, curves_path, plot_path};
}

std::vector<std::filesystem::path> write_sweep_outputs(const SweepResult &result,
                                                       const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    const auto rows_path = dir / "sweep_rows.csv";
    const auto points_path = dir / "sweep_kappa.csv";
    const auto plot_path = dir / "sweep_kappa.gp";
    emit_results(result.rows, rows_path);

    std::ofstream pts(points_path, std::ios::trunc);
    pts << "method,kappa_db,T,n_seeds,n_pairs,mean_r_sum,sem_r_sum\n";
    char buf[96];
    for (const auto &p : result.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%zu,%.17g,%.17g", p.kappa_db, p.horizon,
                      p.n_seeds, p.r_sum.n, p.r_sum.mean, p.r_sum.sem);
        pts << p.method << ',' << buf << '\n';
    }
    if (!pts)
        throw std::runtime_error("write failed for " + points_path.string());

    std::vector<std::string> methods;
    for (const auto &p : result.points)
        if (methods.empty() || methods.back() != p.method)
            methods.push_back(p.method);
    std::ofstream gp(plot_path, std::ios::trunc);
    gp << "# Mean sum spectral efficiency against kappa. Usage: gnuplot sweep_kappa.gp\n"
       << "set datafile separator ','\n"
       << "set terminal pngcairo size 800,600\n"
       << "set output 'sweep_kappa.png'\n"
       << "set xlabel 'kappa (dB)'\nset ylabel 'mean sum rate (bps/Hz)'\n"
       << "set key bottom right\nset grid\nplot ";
    for (std::size_t i = 0; i < methods.size(); ++i)
        gp << (i ? ", \\\n     " : "") << "'sweep_kappa.csv' using (strcol(1) eq "
           << gnuplot_quote(methods[i]) << " ? $2 : 1/0):6 with linespoints title "
           << gnuplot_quote(methods[i]);
    gp << '\n';
    return {rows_path, points_path, plot_path};
}

TrainResult train_model(const ExperimentConfig &config, int horizon, double kappa_db,
                        std::uint64_t seed, std::function<void(int, double, double)> on_validate)
{
    LearnerConfig lc = config.learner;
    lc.n_tx = config.array.n_tx;
    lc.n_rx = config.array.n_rx;
    lc.horizon = horizon;
    lc.seed = seed;
    auto sampler = std::make_shared<ScenarioSampler>(config.array, config.targets,
                                                     config.inr_normalization);
    TrainOptions opt;
    opt.noise = NoiseModel{config.sigma2};
    opt.validation_pairs = config.validation_pairs;
    opt.validate_every = config.validate_every;
    opt.lr_decay = config.lr_decay;
    opt.lr_decay_every = config.lr_decay_every;
    opt.on_validate = std::move(on_validate);
    return train(lc, [sampler, kappa_db](Rng &rng) { return sampler->sample(kappa_db, rng); }, opt);
}

namespace {

using nlohmann::json;

json vec_json(const CVector &v)
{
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.push_back(v[i].real());
        im.push_back(v[i].imag());
    }
    return {{"re", re}, {"im", im}};
}

CVector vec_from(const json &j)
{
    const auto &re = j.at("re");
    const auto &im = j.at("im");
    if (re.size() != im.size())
        throw ParseError("dataset: re/im length mismatch");
    CVector v(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = {re[i].get<double>(), im[i].get<double>()};
    return v;
}

} // namespace

void save_dataset(const std::vector<ChannelRealization> &set, std::uint64_t seed,
                  const std::filesystem::path &path)
{
    json items = json::array();
    for (const auto &ch : set) {
        json si_re = json::array(), si_im = json::array();
        for (Eigen::Index r = 0; r < ch.si.rows(); ++r)
            for (Eigen::Index c = 0; c < ch.si.cols(); ++c) {
                si_re.push_back(ch.si(r, c).real());
                si_im.push_back(ch.si(r, c).imag());
            }
        items.push_back({{"kappa_db", ch.kappa_db},
                         {"azimuth_tx_deg", ch.azimuth_tx},
                         {"azimuth_rx_deg", ch.azimuth_rx},
                         {"h_tx", vec_json(ch.h_tx)},
                         {"h_rx", vec_json(ch.h_rx)},
                         {"si", {{"rows", ch.si.rows()}, {"cols", ch.si.cols()},
                                 {"re", si_re}, {"im", si_im}}},
                         {"snr_max_db", ch.budget.snr_max_db},
                         {"inr_max_db", ch.budget.inr_max_db},
                         {"gain_tx", ch.budget.gain_tx},
                         {"gain_rx", ch.budget.gain_rx},
                         {"gain_si", ch.budget.gain_si}});
    }
    const json doc = {{"format", "fdxbl-dataset"}, {"version", 1}, {"seed", seed},
                      {"realizations", items}};
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    // Doubles are written with round-trip precision by the serializer.
    out << doc.dump(1) << '\n';
}

std::vector<ChannelRealization> load_dataset(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot read dataset " + path.string());
    std::vector<ChannelRealization> set;
    try {
        const json doc = json::parse(in);
        if (doc.at("format") != "fdxbl-dataset" || doc.at("version") != 1)
            throw ParseError(path.string() + ": not an fdxbl dataset (version 1)");
        for (const auto &item : doc.at("realizations")) {
            ChannelRealization ch;
            ch.kappa_db = item.at("kappa_db").get<double>();
            ch.azimuth_tx = item.at("azimuth_tx_deg").get<double>();
            ch.azimuth_rx = item.at("azimuth_rx_deg").get<double>();
            ch.h_tx = vec_from(item.at("h_tx"));
            ch.h_rx = vec_from(item.at("h_rx"));
            const auto &si = item.at("si");
            const auto rows = si.at("rows").get<Eigen::Index>();
            const auto cols = si.at("cols").get<Eigen::Index>();
            const auto &re = si.at("re");
            const auto &im = si.at("im");
            if (rows != ch.h_rx.size() || cols != ch.h_tx.size() ||
                re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size())
                throw ParseError(path.string() + ": SI matrix shape does not match the users");
            ch.si.resize(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) {
                    const auto k = static_cast<std::size_t>(r * cols + c);
                    ch.si(r, c) = {re[k].get<double>(), im[k].get<double>()};
                }
            ch.budget.snr_max_db = item.at("snr_max_db").get<double>();
            ch.budget.inr_max_db = item.at("inr_max_db").get<double>();
            ch.budget.gain_tx = item.at("gain_tx").get<double>();
            ch.budget.gain_rx = item.at("gain_rx").get<double>();
            ch.budget.gain_si = item.at("gain_si").get<double>();
            set.push_back(std::move(ch));
        }
    } catch (const json::exception &e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return set;
}

} // namespace fdxbl
