#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chemoflow/diagnostics.hpp"
#include "chemoflow/grid.hpp"

namespace chemoflow {

/// Schema header line (no trailing newline).
std::string timeseries_header();

/// Header plus one row per record, every value printed with %.17g.
std::string format_timeseries(const std::vector<DiagnosticsRecord>& records);

/// Inverse of format_timeseries. Throws std::runtime_error on a header
/// mismatch or a malformed row (with its line number).
std::vector<DiagnosticsRecord> parse_timeseries(const std::string& text);

/// Little-endian "CNS2" snapshot, version 1: magic, u32 version, u32 nx,
/// u32 ny, f64 lx, ly, t, then n, c, ux, uy in storage order.
inline constexpr std::uint32_t kSnapshotVersion = 1;
std::size_t snapshot_size(int nx, int ny);
std::vector<std::uint8_t> encode_snapshot(const State& state);

/// Throws std::runtime_error on a bad magic, version or length.
State decode_snapshot(const std::vector<std::uint8_t>& bytes);

/// File helpers; throw std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& text);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_file(const std::string& path);

}  // namespace chemoflow
