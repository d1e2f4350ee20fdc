// Snapshot files, trajectory directories, hashing and CSV helpers.
#pragma once

#include "slip/fields.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace slip {

std::string sha256_hex(const std::string& data);
std::string sha256_hex(const void* data, std::size_t n);

/// %.17g, round-trips doubles
std::string fmt(double x);
/// short scientific form for messages
std::string fmt_sci(double x);

/// One-line JSON header {"kind","nx","ny","Lx","Ly","t"} then raw little-endian doubles.
void write_snapshot(const std::filesystem::path& file, const Grid& grid, const VelocityField& y, double t);
void write_snapshot(const std::filesystem::path& file, const Grid& grid, const PressureField& p, double t);

struct Snapshot {
  std::string kind;
  int nx = 0, ny = 0;
  double Lx = 0.0, Ly = 0.0, t = 0.0;
  std::vector<double> data;
};
Snapshot read_snapshot(const std::filesystem::path& file);
VelocityField snapshot_velocity(const Grid& grid, const Snapshot& s);

/// Hash of the raw velocity data of every slice.
std::string trajectory_hash(const std::vector<VelocityField>& y);

/// Snapshots every `cadence` slices (plus the last) and manifest.json.
void write_trajectory(const std::filesystem::path& dir, const Grid& grid, const StateTrajectory& traj,
                      const std::string& config_hash, int cadence = 1);

/// Columns t, s, value; slices from `first` on.
void write_boundary_csv(const std::filesystem::path& file, const Grid& grid, const TimeGrid& time,
                        const BoundarySeries& f, int first = 0);

void write_text(const std::filesystem::path& file, const std::string& text);
std::string read_text(const std::filesystem::path& file);

}  // namespace slip
