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

#include "fdxbl/results.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

namespace fdxbl {

namespace {

constexpr std::size_t kColumns = 10;

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split_csv(const std::string &line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

[[noreturn]] void fail(int line, const std::string &what)
{
    throw ParseError("results line " + std::to_string(line) + ": " + what);
}

double to_double(const std::string &s, int line, const char *column)
{
    if (s.empty())
        fail(line, std::string("empty ") + column);
    char *end = nullptr;
    errno = 0;
    const double x = std::strtod(s.c_str(), &end);
    if (*end != '\0')
        fail(line, std::string("bad number in ") + column + ": '" + s + "'");
    return x;
}

long long to_integer(const std::string &s, int line, const char *column)
{
    if (s.empty())
        fail(line, std::string("empty ") + column);
    char *end = nullptr;
    errno = 0;
    const long long x = std::strtoll(s.c_str(), &end, 10);
    if (*end != '\0' || errno == ERANGE)
        fail(line, std::string("bad integer in ") + column + ": '" + s + "'");
    return x;
}

} // namespace

bool row_less(const ResultRow &a, const ResultRow &b)
{
    return std::tie(a.method, a.kappa_db, a.horizon, a.seed, a.pair) <
           std::tie(b.method, b.kappa_db, b.horizon, b.seed, b.pair);
}

void sort_rows(std::vector<ResultRow> &rows) { std::stable_sort(rows.begin(), rows.end(), row_less); }

void write_results(std::ostream &out, const std::vector<ResultRow> &rows)
{
    if (!std::is_sorted(rows.begin(), rows.end(), row_less))
        throw std::logic_error("result rows must be sorted by (method, kappa, T, seed, pair)");
    out << kResultHeader << '\n';
    for (const auto &r : rows) {
        if (r.method.find_first_of(",\n") != std::string::npos)
            throw std::invalid_argument("method tag contains a separator: " + r.method);
        out << r.method << ',' << num(r.kappa_db) << ',' << r.horizon << ',' << r.seed << ','
            << r.pair << ',' << num(r.inr_rx_db) << ',' << num(r.sinr_rx_db) << ',' << num(r.r_tx)
            << ',' << num(r.r_rx) << ',' << num(r.r_sum) << '\n';
    }
}

void emit_results(const std::vector<ResultRow> &rows, const std::filesystem::path &path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_results(out, rows);
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

std::vector<ResultRow> read_results(std::istream &in)
{
    std::string line;
    if (!std::getline(in, line))
        fail(1, "missing header");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kResultHeader)
        fail(1, "unexpected header '" + line + "'");

    std::vector<ResultRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const auto f = split_csv(line);
        if (f.size() != kColumns)
            fail(line_no, "expected " + std::to_string(kColumns) + " columns, found " +
                              std::to_string(f.size()));
        ResultRow r;
        r.method = f[0];
        if (r.method.empty())
            fail(line_no, "empty method");
        r.kappa_db = to_double(f[1], line_no, "kappa_db");
        r.horizon = static_cast<int>(to_integer(f[2], line_no, "T"));
        const long long seed = to_integer(f[3], line_no, "seed");
        if (seed < 0)
            fail(line_no, "negative seed");
        r.seed = static_cast<std::uint64_t>(seed);
        r.pair = static_cast<int>(to_integer(f[4], line_no, "pair"));
        r.inr_rx_db = to_double(f[5], line_no, "inr_rx_db");
        r.sinr_rx_db = to_double(f[6], line_no, "sinr_rx_db");
        r.r_tx = to_double(f[7], line_no, "r_tx");
        r.r_rx = to_double(f[8], line_no, "r_rx");
        r.r_sum = to_double(f[9], line_no, "r_sum");
        if (r.r_sum != r.r_tx + r.r_rx)
            fail(line_no, "r_sum is not r_tx + r_rx");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ResultRow> load_results(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot read results file " + path.string());
    return read_results(in);
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples))
{
    if (sorted_.empty())
        throw std::invalid_argument("empirical CDF needs at least one sample");
    for (double x : sorted_)
        if (std::isnan(x))
            throw std::invalid_argument("empirical CDF sample is NaN");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const
{
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

SampleSummary summarize(const std::vector<double> &x)
{
    SampleSummary s;
    s.n = x.size();
    if (x.empty())
        return s;
    double sum = 0.0;
    for (double v : x)
        sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : x)
            ss += (v - s.mean) * (v - s.mean);
        s.sem = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
    }
    return s;
}

} // namespace fdxbl
