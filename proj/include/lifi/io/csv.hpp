// SPDX-License-Identifier: Apache-2.0
//
// CSV exchange formats: channel traces, IMU rate logs, pose traces, and
// generic plot series. Full-precision output, locale-independent parsing,
// CRLF tolerant, parse errors carry line numbers.

#pragma once

#include <string>
#include <vector>

#include "lifi/channel.hpp"
#include "lifi/common.hpp"
#include "lifi/geometry.hpp"

namespace lifi::io {

struct Series {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// %.17g: shortest representation that round-trips a double exactly.
std::string format_double(double v);

// Header + rows at full precision, written atomically.
void emit_plot_data(const Series& series, const std::string& path);

// Channel trace schema: t_s,h_k1_n1,...,h_kK_nN with row-major (k, n) column
// order and 1-based indices.
void write_channel_trace_csv(const std::string& path, const channel::ChannelTrace& trace);
channel::ChannelTrace read_channel_trace_csv(const std::string& path);

// IMU schema: t_s,wx_rad_s,wy_rad_s,wz_rad_s.
std::vector<geometry::ImuSample> read_imu_csv(const std::string& path);

// Pose schema: t_s,alpha_rad,beta_rad,gamma_rad,x_m,y_m,z_m.
void write_pose_csv(const std::string& path, const geometry::PoseTrace& trace);

} // namespace lifi::io
