#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qxpanse/flow.hpp"
#include "qxpanse/stepper.hpp"

namespace qxpanse {

enum class Frame : std::uint8_t { kLiouville = 0, kLab = 1 };

char const* to_string(Frame frame);

inline constexpr char kSnapshotMagic[4] = {'Q', 'X', 'W', 'F'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
// magic + version + nx + np + frame tag + five header doubles
inline constexpr std::size_t kSnapshotHeaderBytes = 4 + 3 * 4 + 1 + 5 * 8;

struct Snapshot {
  WignerField field;
  Frame frame = Frame::kLiouville;
};

std::vector<std::uint8_t> encode_snapshot(WignerField const& field, Frame frame);
// Throws FormatError with the byte offset of the first problem.
Snapshot decode_snapshot(std::span<std::uint8_t const> bytes);

void write_snapshot(std::filesystem::path const& path, WignerField const& field, Frame frame);
Snapshot read_snapshot(std::filesystem::path const& path);

struct TimeSeriesRow {
  double t_omega = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double x2 = 0.0;
  double p2 = 0.0;
  double xp_sym_hbar = 0.0;
  double norm = 0.0;
  double lambda_min = 1.0;
};

inline constexpr char kTimeSeriesHeader[] =
    "t_omega,mean_x_zpf,mean_p_zpf,x2_zpf2,p2_zpf2,xp_sym_hbar,norm,lambda_min";

void write_timeseries(std::filesystem::path const& path, std::span<TimeSeriesRow const> rows);
// Throws FormatError on malformed rows or non-increasing time.
std::vector<TimeSeriesRow> read_timeseries(std::filesystem::path const& path);

// Forward-mapped lattice points (i, j, x_cl, p_cl), the deformed grid overlay.
void write_mapped_grid(std::filesystem::path const& path, FlowField const& flow);

std::vector<std::uint8_t> read_bytes(std::filesystem::path const& path);

}  // namespace qxpanse
