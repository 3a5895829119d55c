// SPDX-License-Identifier: Apache-2.0

#include "lifi/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lifi/io/atomic_file.hpp"

namespace lifi::io {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::missing_file, "cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    // A single trailing newline produces no extra entry; drop other blank
    // trailing lines so they are not treated as data.
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& field, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error(Errc::parse,
                    path + ":" + std::to_string(line_no) + ": not a number: '" + field + "'");
    }
    return value;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_plot_data(const Series& series, const std::string& path) {
    if (series.rows.empty()) throw std::invalid_argument("refusing to emit an empty series");
    std::ostringstream out;
    for (std::size_t i = 0; i < series.columns.size(); ++i) {
        if (i > 0) out << ',';
        out << series.columns[i];
    }
    out << '\n';
    for (const auto& row : series.rows) {
        if (row.size() != series.columns.size()) {
            throw std::invalid_argument("series row width does not match the header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

void write_channel_trace_csv(const std::string& path, const channel::ChannelTrace& trace) {
    if (trace.gains.empty()) throw std::invalid_argument("channel trace is empty");
    const Eigen::Index k = trace.gains.front().rows();
    const Eigen::Index n = trace.gains.front().cols();
    Series series;
    series.columns.push_back("t_s");
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            series.columns.push_back("h_k" + std::to_string(i + 1) + "_n" + std::to_string(j + 1));
        }
    }
    series.rows.reserve(trace.gains.size());
    for (std::size_t slot = 0; slot < trace.gains.size(); ++slot) {
        const auto& g = trace.gains[slot];
        if (g.rows() != k || g.cols() != n) {
            throw std::invalid_argument("channel trace matrices change shape mid-trace");
        }
        std::vector<double> row;
        row.reserve(1 + static_cast<std::size_t>(k * n));
        row.push_back(static_cast<double>(slot) / trace.sample_rate);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < n; ++j) row.push_back(g(i, j));
        series.rows.push_back(std::move(row));
    }
    emit_plot_data(series, path);
}

channel::ChannelTrace read_channel_trace_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 3) {
        throw Error(Errc::parse, path + ": need a header and at least two rows to infer the rate");
    }
    const auto header = split_csv(lines[0]);
    if (header.empty() || header[0] != "t_s") {
        throw Error(Errc::parse, path + ":1: expected header starting with 't_s'");
    }

    // Recover K and N from the last column name and validate the full header.
    const std::size_t gain_cols = header.size() - 1;
    if (gain_cols == 0) throw Error(Errc::parse, path + ":1: no gain columns");
    Eigen::Index k_count = 0, n_count = 0;
    {
        const std::string& last = header.back();
        int ki = 0, ni = 0;
        if (std::sscanf(last.c_str(), "h_k%d_n%d", &ki, &ni) != 2 || ki < 1 || ni < 1) {
            throw Error(Errc::parse, path + ":1: bad gain column name '" + last + "'");
        }
        k_count = ki;
        n_count = ni;
    }
    if (static_cast<std::size_t>(k_count * n_count) != gain_cols) {
        throw Error(Errc::parse, path + ":1: gain column count does not match K x N");
    }
    for (Eigen::Index i = 0; i < k_count; ++i) {
        for (Eigen::Index j = 0; j < n_count; ++j) {
            const std::string expect =
                "h_k" + std::to_string(i + 1) + "_n" + std::to_string(j + 1);
            if (header[static_cast<std::size_t>(1 + i * n_count + j)] != expect) {
                throw Error(Errc::parse, path + ":1: expected column '" + expect + "'");
            }
        }
    }

    channel::ChannelTrace trace;
    trace.provenance = channel::Provenance::ingested;
    std::vector<double> times;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto fields = split_csv(lines[li]);
        if (fields.size() != header.size()) {
            throw Error(Errc::parse, path + ":" + std::to_string(li + 1) + ": expected " +
                                         std::to_string(header.size()) + " fields, found " +
                                         std::to_string(fields.size()));
        }
        times.push_back(parse_double(fields[0], path, li + 1));
        Eigen::MatrixXd g(k_count, n_count);
        for (Eigen::Index i = 0; i < k_count; ++i) {
            for (Eigen::Index j = 0; j < n_count; ++j) {
                const double v =
                    parse_double(fields[static_cast<std::size_t>(1 + i * n_count + j)], path, li + 1);
                if (!std::isfinite(v) || v < 0.0) {
                    throw Error(Errc::parse, path + ":" + std::to_string(li + 1) +
                                                 ": gains must be finite and non-negative");
                }
                g(i, j) = v;
            }
        }
        trace.gains.push_back(std::move(g));
    }

    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw Error(Errc::parse, path + ":3: time stamps must increase");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-9) {
            throw Error(Errc::parse, path + ":" + std::to_string(i + 2) +
                                         ": non-uniform time step in channel trace");
        }
    }
    trace.sample_rate = 1.0 / dt;
    return trace;
}

std::vector<geometry::ImuSample> read_imu_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw Error(Errc::parse, path + ": empty file");
    if (lines[0] != "t_s,wx_rad_s,wy_rad_s,wz_rad_s") {
        throw Error(Errc::parse,
                    path + ":1: expected header 't_s,wx_rad_s,wy_rad_s,wz_rad_s', found '" +
                        lines[0] + "'");
    }
    std::vector<geometry::ImuSample> samples;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto fields = split_csv(lines[li]);
        if (fields.size() != 4) {
            throw Error(Errc::parse,
                        path + ":" + std::to_string(li + 1) + ": expected 4 fields, found " +
                            std::to_string(fields.size()));
        }
        geometry::ImuSample s;
        s.t = parse_double(fields[0], path, li + 1);
        s.omega.x() = parse_double(fields[1], path, li + 1);
        s.omega.y() = parse_double(fields[2], path, li + 1);
        s.omega.z() = parse_double(fields[3], path, li + 1);
        if (!samples.empty() && !(s.t > samples.back().t)) {
            throw Error(Errc::parse, path + ":" + std::to_string(li + 1) +
                                         ": time stamps must be strictly increasing");
        }
        samples.push_back(s);
    }
    return samples;
}

void write_pose_csv(const std::string& path, const geometry::PoseTrace& trace) {
    Series series;
    series.columns = {"t_s", "alpha_rad", "beta_rad", "gamma_rad", "x_m", "y_m", "z_m"};
    series.rows.reserve(trace.samples.size());
    for (const auto& s : trace.samples) {
        series.rows.push_back({s.angles.t, s.angles.alpha, s.angles.beta, s.angles.gamma,
                               s.ue_position.x(), s.ue_position.y(), s.ue_position.z()});
    }
    emit_plot_data(series, path);
}

} // namespace lifi::io
