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

#include "fdxbl/baselines.hpp"
#include "fdxbl/checkpoint.hpp"
#include "fdxbl/harness.hpp"

#include <doctest.h>

#include <cstdlib>
#include <map>
#include <fstream>
#include <sstream>

using namespace fdxbl;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config()
{
    ExperimentConfig c = parse_config("kappa_db = -3, 7\n"
                                      "cdf_kappa_db = 7\n"
                                      "horizons = 2, 3\n"
                                      "n_eval_pairs = 24\n"
                                      "hidden_dim = 6\n"
                                      "dnn_hidden_widths = 10\n"
                                      "train_iterations = 3\n"
                                      "batch_size = 4\n"
                                      "validation_pairs = 4\n"
                                      "validate_every = 0\n"
                                      "train_seeds = 0, 1\n");
    return c;
}

// Untrained but valid learners, keyed like checkpoints.
ModelProvider fresh_models(const ExperimentConfig &c)
{
    return [c](int t, double kappa, std::uint64_t seed) {
        LearnerConfig lc = c.learner;
        lc.horizon = t;
        Rng rng = make_stream(seed, {static_cast<std::uint64_t>(t),
                                     static_cast<std::uint64_t>(kappa + 100)});
        LearnerParams p = LearnerParams::initialize(lc, rng);
        // Generic values: zero biases on a tiny net can switch every ReLU off.
        std::normal_distribution<double> g(0.0, 0.1);
        for (auto &v : p.values())
            v += g(rng);
        return p;
    };
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("config: defaults, parsing, errors")
{
    const ExperimentConfig d = parse_config("");
    CHECK(d.array.n_tx == 8);
    CHECK(d.array.carrier_hz == 28e9);
    CHECK(d.sigma2 == 0.4);
    CHECK(d.n_eval_pairs == 1000);
    CHECK(d.horizons == std::vector<int>{3, 4, 5, 10});
    CHECK(d.kappa_db == std::vector<double>{-13, -3, 3, 7, 17});
    CHECK(d.learner.hidden_dim == 512);

    const ExperimentConfig c = parse_config("# comment\n sigma2 = 0.25  # trailing\n"
                                            "horizons=3,10\nseparation_reference = edge\n"
                                            "inr_normalization = per_realization\n");
    CHECK(c.sigma2 == 0.25);
    CHECK(c.horizons == std::vector<int>{3, 10});
    CHECK(c.array.separation_reference == SeparationReference::edge_to_edge);
    CHECK(c.inr_normalization == InrNormalization::per_realization);

    const ExperimentConfig round = parse_config(to_text(tiny_config()));
    CHECK(to_text(round) == to_text(tiny_config()));

    auto error_of = [](const std::string &text) {
        try {
            parse_config(text);
        } catch (const ParseError &e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(error_of("sigma2 = 0.4\nbogus = 1\n").find("line 2") != std::string::npos);
    CHECK(error_of("n_eval_pairs = abc\n").find("line 1") != std::string::npos);
    CHECK(error_of("no equals sign\n").find("line 1") != std::string::npos);
    CHECK(error_of("n_eval_pairs = 0\n").find("n_eval_pairs") != std::string::npos);
    CHECK(error_of("horizons = \n") != "");
    CHECK_THROWS_AS(load_config("/nonexistent/fdxbl.conf"), ParseError);
}

TEST_CASE("results CSV: round trip, header-only, malformed input")
{
    std::vector<ResultRow> rows;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 20; ++i) {
        ResultRow r;
        r.method = i < 10 ? "learner_T3" : "mrt_mrc";
        r.kappa_db = 7.0;
        r.horizon = i < 10 ? 3 : 0;
        r.seed = 5;
        r.pair = i % 10;
        r.inr_rx_db = u(rng) / 3.0;
        r.sinr_rx_db = u(rng) * 1e-7;
        r.r_tx = std::abs(u(rng)) / 7.0;
        r.r_rx = std::abs(u(rng)) / 11.0;
        r.r_sum = r.r_tx + r.r_rx;
        rows.push_back(r);
    }
    rows[3].inr_rx_db = kDbFloor;
    std::stringstream ss;
    write_results(ss, rows);
    CHECK(read_results(ss) == rows);

    std::stringstream empty;
    write_results(empty, {});
    CHECK(empty.str() == std::string(kResultHeader) + "\n");
    CHECK(read_results(empty).empty());

    auto unsorted = rows;
    std::swap(unsorted[0], unsorted[15]);
    std::stringstream bad;
    CHECK_THROWS_AS(write_results(bad, unsorted), std::logic_error);

    auto error_of = [](const std::string &text) {
        std::stringstream in(text);
        try {
            read_results(in);
        } catch (const ParseError &e) {
            return std::string(e.what());
        }
        return std::string();
    };
    const std::string h = std::string(kResultHeader) + "\n";
    CHECK(error_of(h + "mrt_mrc,7,0,1,0,1,2,3,4,7\nmrt_mrc,7,0,1,1,1,2,3\n").find("line 3") !=
          std::string::npos);
    CHECK(error_of(h + "mrt_mrc,7,0,1,0,1,2,x,4,7\n").find("line 2") != std::string::npos);
    CHECK(error_of(h + "mrt_mrc,7,0,1,0,1,2,3,4,8\n").find("r_sum") != std::string::npos);
    CHECK(error_of("wrong,header\n").find("line 1") != std::string::npos);
}

TEST_CASE("empirical CDF")
{
    const EmpiricalCdf cdf({3.0, -1.0, 2.0, 2.0, 10.0});
    CHECK(cdf(10.0) == 1.0);
    CHECK(cdf(-1.0) == doctest::Approx(0.2));
    CHECK(cdf(2.0) == doctest::Approx(0.6));
    CHECK(cdf(-5.0) == 0.0);
    CHECK(cdf.fraction_above(2.0) == doctest::Approx(0.4));
    double prev = 0.0;
    for (double x = -3.0; x < 12.0; x += 0.01) {
        CHECK(cdf(x) >= prev);
        prev = cdf(x);
    }
    CHECK_THROWS_AS(EmpiricalCdf({}), std::invalid_argument);
}

TEST_CASE("evaluation sets share users across kappa, not the random SI part")
{
    const ScenarioSampler s(ArraySpec{}, LinkBudget{}, InrNormalization::reference_capped);
    const auto a = make_eval_set(s, -3.0, 16, 9);
    const auto b = make_eval_set(s, 7.0, 16, 9);
    const auto a2 = make_eval_set(s, -3.0, 16, 9);
    for (int i = 0; i < 16; ++i) {
        CHECK(a[i].azimuth_tx == b[i].azimuth_tx);
        CHECK((a[i].h_rx - b[i].h_rx).norm() == 0.0);
        CHECK((a[i].si - a2[i].si).norm() == 0.0);
        CHECK((a[i].si - b[i].si).norm() > 0.0);
    }
    CHECK(make_eval_set(s, 7.0, 17, 9)[3].azimuth_rx == b[3].azimuth_rx);
}

TEST_CASE("parallel evaluation equals the serial reference")
{
    const ExperimentConfig c = tiny_config();
    const ScenarioSampler s(c.array, c.targets, c.inr_normalization);
    const auto set = make_eval_set(s, 7.0, 40, 3);
    const LearnerParams p = fresh_models(c)(3, 7.0, 0);
    for (const MethodSpec m : {MethodSpec{MethodKind::mrt_mrc, 0, 1, nullptr},
                               MethodSpec{MethodKind::capacity, 0, 1, nullptr},
                               MethodSpec{MethodKind::random_probe, 3, 1, nullptr},
                               MethodSpec{MethodKind::learner, 3, 0, &p}}) {
        const auto serial = evaluate_method(m, set, NoiseModel{0.4}, 11, Execution::serial);
        const auto parallel = evaluate_method(m, set, NoiseModel{0.4}, 11, Execution::parallel);
        CHECK(serial == parallel);
        for (const auto &r : serial) {
            CHECK(r.method == m.tag());
            CHECK(r.r_sum == r.r_tx + r.r_rx);
        }
    }
    MethodSpec wrong{MethodKind::learner, 2, 0, &p};
    CHECK_THROWS_AS(evaluate_method(wrong, set, NoiseModel{0.4}, 1), std::invalid_argument);
}

TEST_CASE("CDF experiment: common realizations, reproducibility, missing models")
{
    const ExperimentConfig c = tiny_config();
    const CdfResult a = run_cdf_experiment(c, fresh_models(c));
    const CdfResult b = run_cdf_experiment(c, fresh_models(c), Execution::serial);
    CHECK(a.rows == b.rows);
    CHECK(std::is_sorted(a.rows.begin(), a.rows.end(), row_less));

    // mrt, capacity, random x2, learner x2
    CHECK(a.rows.size() == 6 * 24);
    std::map<std::string, int> count;
    for (const auto &r : a.rows)
        ++count[r.method];
    CHECK(count.size() == 6);
    for (const auto &[m, n] : count)
        CHECK(n == 24);

    // Every method saw the same channels: MRT's rows are a function of the
    // realization alone, so recomputing them on the shared set must agree.
    const ScenarioSampler s(c.array, c.targets, c.inr_normalization);
    const auto set = make_eval_set(s, c.cdf_kappa_db, c.n_eval_pairs, c.seed);
    for (const auto &r : a.rows) {
        if (r.method == "mrt_mrc")
            CHECK(r.inr_rx_db == to_db(inr_rx(set[r.pair], mrt_mrc(set[r.pair]).f,
                                              mrt_mrc(set[r.pair]).w)));
        if (r.method == "capacity")
            CHECK(r.r_sum == doctest::Approx(2 * std::log2(11.0)).epsilon(1e-12));
        CHECK(r.r_sum <= 2 * std::log2(11.0) + 1e-9);
    }
    for (const auto &curve : a.curves) {
        CHECK(curve.cdf.size() == 24);
        CHECK(curve.cdf(curve.cdf.sorted().back()) == 1.0);
    }

    ModelProvider missing = [](int t, double kappa, std::uint64_t seed) -> LearnerParams {
        throw MissingCheckpoint(t, kappa, seed, "nowhere.ckpt");
    };
    try {
        run_cdf_experiment(c, missing);
        FAIL("expected a missing-checkpoint error");
    } catch (const MissingCheckpoint &e) {
        const std::string msg = e.what();
        CHECK(msg.find("T=2") != std::string::npos);
        CHECK(msg.find("kappa=7") != std::string::npos);
    }
}

TEST_CASE("kappa sweep: one point per (method, kappa), capacity flat")
{
    const ExperimentConfig c = tiny_config();
    const SweepResult r = run_kappa_sweep(c, fresh_models(c));
    // 6 methods x 2 kappa values
    CHECK(r.points.size() == 12);
    CHECK(r.rows.size() == (4 + 2 * 2) * 24 * 2);
    for (const auto &p : r.points) {
        if (p.method == "capacity")
            CHECK(p.r_sum.mean == doctest::Approx(2 * std::log2(11.0)).epsilon(1e-12));
        if (p.method.rfind("learner", 0) == 0) {
            CHECK(p.n_seeds == 2);
            CHECK(p.r_sum.n == 48);
        }
        CHECK(p.r_sum.mean <= 2 * std::log2(11.0) + 1e-9);
    }

    const fs::path dir = fs::temp_directory_path() / "fdxbl_sweep_test";
    fs::remove_all(dir);
    const auto files = write_sweep_outputs(r, dir);
    CHECK(files.size() == 3);
    CHECK(load_results(files[0]) == r.rows);
    std::ifstream pts(files[1]);
    std::string line;
    int lines = 0;
    while (std::getline(pts, line))
        ++lines;
    CHECK(lines == 1 + 12);
    const auto cdf_files = write_cdf_outputs(run_cdf_experiment(c, fresh_models(c)), dir);
    CHECK(fs::exists(cdf_files[2]));
    fs::remove_all(dir);
}

TEST_CASE("checkpoint provider and output directory defaults")
{
    ExperimentConfig c = tiny_config();
    const fs::path dir = fs::temp_directory_path() / "fdxbl_provider_test";
    fs::remove_all(dir);
    c.output_dir = dir;
    CHECK(resolve_checkpoint_dir(c) == dir / "checkpoints");
    const ModelProvider provider = checkpoint_provider(c);
    CHECK_THROWS_AS(provider(3, -3.0, 0), MissingCheckpoint);

    fs::create_directories(resolve_checkpoint_dir(c));
    const LearnerParams p = fresh_models(c)(3, -3.0, 0);
    save_params(p, checkpoint_path(resolve_checkpoint_dir(c), 3, -3.0, 0));
    CHECK((provider(3, -3.0, 0).values() - p.values()).norm() == 0.0);
    CHECK(checkpoint_path("x", 10, -13.0, 4).filename() == "learner_T10_kappa-13_seed4.ckpt");

    ExperimentConfig d = tiny_config();
    setenv("FDXBL_OUT", "/tmp/from_env", 1);
    CHECK(resolve_output_dir(d) == "/tmp/from_env");
    unsetenv("FDXBL_OUT");
    CHECK(resolve_output_dir(d) == "fdxbl_out");
    fs::remove_all(dir);
}

TEST_CASE("training entry point writes a usable model")
{
    ExperimentConfig c = tiny_config();
    const TrainResult a = train_model(c, 2, 7.0, 4);
    const TrainResult b = train_model(c, 2, 7.0, 4);
    CHECK_FALSE(a.diverged);
    CHECK(a.params.config().horizon == 2);
    CHECK((a.params.values() - b.params.values()).norm() == 0.0);
}

TEST_CASE("dataset serialization")
{
    const ScenarioSampler s(ArraySpec{}, LinkBudget{}, InrNormalization::reference_capped);
    const auto set = make_eval_set(s, 7.0, 5, 21);
    const fs::path path = fs::temp_directory_path() / "fdxbl_dataset_test.json";
    save_dataset(set, 21, path);
    const auto back = load_dataset(path);
    REQUIRE(back.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK((back[i].si - set[i].si).norm() == 0.0);
        CHECK((back[i].h_tx - set[i].h_tx).norm() == 0.0);
        CHECK(back[i].budget.gain_si == set[i].budget.gain_si);
        CHECK(back[i].azimuth_rx == set[i].azimuth_rx);
        CHECK(fd_capacity(back[i]) == fd_capacity(set[i]));
    }
    const std::string first = slurp(path);
    save_dataset(make_eval_set(s, 7.0, 5, 21), 21, path);
    CHECK(slurp(path) == first);

    std::ofstream(path) << "{\"format\": \"other\"}";
    CHECK_THROWS_AS(load_dataset(path), ParseError);
    fs::remove(path);
}
