#pragma once

#include <cstdint>
#include <string>

#include "cohertest/harness.hpp"
#include "cohertest/types.hpp"

namespace cohertest {

// CSV panel format: header "m,n,re,im", one row per (channel, time) entry.
void write_panel_csv(const Panel& panel, const std::string& path);
Panel read_panel_csv(const std::string& path);

// Compact binary format: magic "CPNL", little-endian u32 m, u32 n, then
// row-major (re, im) pairs of little-endian IEEE f64.
void write_panel_cpnl(const Panel& panel, const std::string& path);
Panel read_panel_cpnl(const std::string& path);

// Reads either format, sniffing the CPNL magic.
Panel read_panel(const std::string& path);

// Debug export of a Hermitian matrix (coherence or periodogram): header
// "i,j,re,im", one row per entry.
void write_hermitian_csv(const Eigen::MatrixXcd& matrix, const std::string& path);

// Monte Carlo table CSV. full_precision selects 17 significant digits
// instead of 4. include_timing controls the wall_seconds column; the default
// writes zeros so re-runs are byte-identical.
std::string mc_report_csv(const McReport& report, bool full_precision = false,
                          bool include_timing = false);

void write_text_file(const std::string& path, const std::string& contents);

std::uint64_t fnv1a64(const std::string& bytes);

// 17 significant digits, enough to round-trip a double.
std::string format_full(double x);
std::string format_short(double x);  // 4 significant digits

}  // namespace cohertest
