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

#ifndef FDXBL_RESULTS_HPP
#define FDXBL_RESULTS_HPP

#include "fdxbl/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fdxbl {

/// One evaluated (method, pair). Rates are noiseless; horizon is 0 for
/// methods that do not probe.
struct ResultRow {
    std::string method;
    double kappa_db = 0.0;
    int horizon = 0;
    std::uint64_t seed = 0;
    int pair = 0;
    double inr_rx_db = 0.0;
    double sinr_rx_db = 0.0;
    double r_tx = 0.0;
    double r_rx = 0.0;
    double r_sum = 0.0;

    bool operator==(const ResultRow &) const = default;
};

inline constexpr const char *kResultHeader =
    "method,kappa_db,T,seed,pair,inr_rx_db,sinr_rx_db,r_tx,r_rx,r_sum";

/// Order used on disk: method, kappa, T, seed, pair.
bool row_less(const ResultRow &a, const ResultRow &b);
void sort_rows(std::vector<ResultRow> &rows);

/// Writes the header and one line per row, numbers at 17 significant digits
/// so the round trip is exact. Throws std::logic_error if rows are unsorted.
void write_results(std::ostream &out, const std::vector<ResultRow> &rows);
void emit_results(const std::vector<ResultRow> &rows, const std::filesystem::path &path);

/// Throws ParseError naming the line on a bad header, a wrong column count,
/// an unparseable number or r_sum != r_tx + r_rx.
std::vector<ResultRow> read_results(std::istream &in);
std::vector<ResultRow> load_results(const std::filesystem::path &path);

/// Empirical step CDF, F(x) = #{samples <= x} / n.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples);

    double operator()(double x) const;
    /// Sorted samples; the CDF jumps to (i + 1) / n at sorted()[i].
    const std::vector<double> &sorted() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }
    /// Fraction of samples strictly above x.
    double fraction_above(double x) const { return 1.0 - (*this)(x); }

private:
    std::vector<double> sorted_;
};

/// Mean and standard error of the mean.
struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double sem = 0.0;
};
SampleSummary summarize(const std::vector<double> &x);

} // namespace fdxbl

#endif
