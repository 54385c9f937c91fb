#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include <doctest.h>

#include "property.hpp"
#include "qxpanse/error.hpp"
#include "qxpanse/io.hpp"

using namespace qxpanse;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const& name) {
  fs::path const dir = fs::temp_directory_path() / "qxpanse_unit";
  fs::create_directories(dir);
  return dir / name;
}

WignerField random_field(qxtest::Gen& g) {
  WignerField w;
  w.grid = PhaseGrid::centered(g.size(5, 40), g.size(5, 30), g.uniform(0.01, 2.0),
                               g.uniform(0.01, 2.0), g.normal(), g.normal());
  w.time = g.uniform(0.0, 500.0);
  w.values.resize(w.grid.size());
  for (auto& a : w.values) a = g.normal() * std::pow(10.0, g.integer(-300, 300));
  return w;
}

}  // namespace

TEST_CASE("io: snapshots round-trip bit for bit") {
  qxtest::for_all(100, [](qxtest::Gen& g) {
    WignerField const w = random_field(g);
    Frame const frame = g.coin() ? Frame::kLab : Frame::kLiouville;
    auto const bytes = encode_snapshot(w, frame);
    CHECK(bytes.size() == kSnapshotHeaderBytes + 8 * w.values.size());
    Snapshot const s = decode_snapshot(bytes);
    CHECK(s.frame == frame);
    CHECK(s.field.grid == w.grid);
    CHECK(std::memcmp(&s.field.time, &w.time, sizeof(double)) == 0);
    CHECK(std::memcmp(s.field.values.data(), w.values.data(), 8 * w.values.size()) == 0);
  });
}

TEST_CASE("io: snapshot files on disk") {
  qxtest::Gen g(3);
  WignerField w = random_field(g);
  w.values[0] = -std::numeric_limits<double>::denorm_min();
  auto const path = scratch("field.qxwf");
  write_snapshot(path, w, Frame::kLab);
  Snapshot const s = read_snapshot(path);
  CHECK(s.field.values == w.values);
  CHECK(std::signbit(s.field.values[0]));
}

TEST_CASE("io: malformed snapshots report the byte offset") {
  qxtest::Gen g(5);
  auto bytes = encode_snapshot(random_field(g), Frame::kLiouville);

  auto bad_magic = bytes;
  bad_magic[2] = 'X';
  CHECK_THROWS_WITH_AS(decode_snapshot(bad_magic), doctest::Contains("offset 0"), FormatError);

  auto bad_version = bytes;
  bad_version[4] = 9;
  CHECK_THROWS_WITH_AS(decode_snapshot(bad_version), doctest::Contains("offset 4"), FormatError);

  auto bad_frame = bytes;
  bad_frame[16] = 7;
  CHECK_THROWS_WITH_AS(decode_snapshot(bad_frame), doctest::Contains("offset 16"), FormatError);

  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  try {
    decode_snapshot(truncated);
    FAIL("truncated snapshot accepted");
  } catch (FormatError const& e) {
    CHECK(e.offset() >= kSnapshotHeaderBytes);
  }

  std::vector<std::uint8_t> header_only(bytes.begin(), bytes.begin() + 10);
  CHECK_THROWS_WITH_AS(decode_snapshot(header_only), doctest::Contains("offset 8"),
                       FormatError);
}

TEST_CASE("io: time series round trip and validation") {
  qxtest::Gen g(11);
  std::vector<TimeSeriesRow> rows;
  double t = 0.0;
  for (int k = 0; k < 50; ++k) {
    rows.push_back({t, g.normal(), g.normal(), g.uniform(0, 5), g.uniform(0, 5), g.normal(),
                    1.0 + 1e-9 * g.normal(), g.uniform(0, 1)});
    t += g.uniform(0.01, 1.0);
  }
  auto const path = scratch("series.csv");
  write_timeseries(path, rows);
  {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == kTimeSeriesHeader);
  }
  auto const back = read_timeseries(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(back[k].t_omega == rows[k].t_omega);
    CHECK(back[k].xp_sym_hbar == rows[k].xp_sym_hbar);
    CHECK(back[k].lambda_min == rows[k].lambda_min);
  }

  std::swap(rows[3], rows[4]);
  write_timeseries(path, rows);
  CHECK_THROWS_AS(read_timeseries(path), FormatError);

  std::ofstream(path) << kTimeSeriesHeader << "\n0,1,2,3\n";
  CHECK_THROWS_AS(read_timeseries(path), FormatError);
}
