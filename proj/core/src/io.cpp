#include "qxpanse/io.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "qxpanse/error.hpp"

namespace qxpanse {

namespace {

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  out.insert(out.end(), raw, raw + sizeof(T));
}

class Reader {
 public:
  // `base` is the absolute offset of bytes[0] within the file.
  Reader(std::span<std::uint8_t const> bytes, std::size_t base) : bytes_(bytes), base_(base) {}

  template <class T>
  T get(char const* what) {
    if (bytes_.size() - pos_ < sizeof(T))
      throw FormatError(fmt::format("snapshot truncated while reading {}", what),
                        base_ + pos_);
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<std::uint8_t const> bytes_;
  std::size_t pos_ = 0;
  std::size_t base_ = 0;
};

}  // namespace

char const* to_string(Frame frame) { return frame == Frame::kLab ? "lab" : "liouville"; }

std::vector<std::uint8_t> encode_snapshot(WignerField const& field, Frame frame) {
  auto const& g = field.grid;
  if (field.values.size() != g.size())
    throw FormatError("field payload does not match its grid", 0);
  std::vector<std::uint8_t> out;
  out.reserve(kSnapshotHeaderBytes + 8 * g.size());
  out.insert(out.end(), kSnapshotMagic, kSnapshotMagic + 4);
  put_le(out, kSnapshotVersion);
  put_le(out, static_cast<std::uint32_t>(g.nx));
  put_le(out, static_cast<std::uint32_t>(g.np));
  out.push_back(static_cast<std::uint8_t>(frame));
  for (double h : {g.x0, g.p0, g.hx, g.hp, field.time}) put_le(out, h);
  for (double w : field.values) put_le(out, w);
  return out;
}

Snapshot decode_snapshot(std::span<std::uint8_t const> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kSnapshotMagic, 4) != 0)
    throw FormatError("bad snapshot magic", 0);
  Reader r(bytes.subspan(4), 4);
  auto const version = r.get<std::uint32_t>("version");
  if (version != kSnapshotVersion)
    throw FormatError(fmt::format("unsupported snapshot version {}", version), 4);
  auto const nx = r.get<std::uint32_t>("nx");
  auto const np = r.get<std::uint32_t>("np");
  auto const tag = r.get<std::uint8_t>("frame tag");
  if (tag > 1) throw FormatError(fmt::format("unknown frame tag {}", tag), 4 + r.pos() - 1);
  Snapshot s;
  s.frame = static_cast<Frame>(tag);
  s.field.grid.nx = nx;
  s.field.grid.np = np;
  s.field.grid.x0 = r.get<double>("x0");
  s.field.grid.p0 = r.get<double>("p0");
  s.field.grid.hx = r.get<double>("hx");
  s.field.grid.hp = r.get<double>("hp");
  s.field.time = r.get<double>("time");
  auto const count = static_cast<std::size_t>(nx) * np;
  if (r.remaining() != 8 * count)
    throw FormatError(fmt::format("payload has {} bytes, header implies {}", r.remaining(),
                                  8 * count),
                      4 + r.pos());
  s.field.values.resize(count);
  for (auto& w : s.field.values) w = r.get<double>("payload");
  return s;
}

std::vector<std::uint8_t> read_bytes(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string(), 0);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_snapshot(std::filesystem::path const& path, WignerField const& field, Frame frame) {
  auto const bytes = encode_snapshot(field, frame);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<char const*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Snapshot read_snapshot(std::filesystem::path const& path) {
  auto const bytes = read_bytes(path);
  try {
    return decode_snapshot(bytes);
  } catch (FormatError const& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

void write_timeseries(std::filesystem::path const& path, std::span<TimeSeriesRow const> rows) {
  auto out = fmt::output_file(path.string());
  out.print("{}\n", kTimeSeriesHeader);
  for (auto const& r : rows)
    out.print("{},{},{},{},{},{},{},{}\n", r.t_omega, r.mean_x, r.mean_p, r.x2, r.p2,
              r.xp_sym_hbar, r.norm, r.lambda_min);
}

std::vector<TimeSeriesRow> read_timeseries(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string(), 0);
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(in, line) || line != kTimeSeriesHeader)
    throw FormatError(path.string() + ": unexpected header", 0);
  offset += line.size() + 1;
  std::vector<TimeSeriesRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      offset += 1;
      continue;
    }
    double v[8];
    char const* p = line.data();
    char const* const end = line.data() + line.size();
    for (int c = 0; c < 8; ++c) {
      auto const [ptr, ec] = std::from_chars(p, end, v[c]);
      if (ec != std::errc() || (c < 7 && (ptr == end || *ptr != ',')) || (c == 7 && ptr != end))
        throw FormatError(fmt::format("{}: malformed column {}", path.string(), c + 1),
                          offset + static_cast<std::size_t>(p - line.data()));
      p = ptr + 1;
    }
    TimeSeriesRow r{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
    if (!rows.empty() && !(r.t_omega > rows.back().t_omega))
      throw FormatError(path.string() + ": t_omega is not strictly increasing", offset);
    rows.push_back(r);
    offset += line.size() + 1;
  }
  return rows;
}

void write_mapped_grid(std::filesystem::path const& path, FlowField const& flow) {
  auto out = fmt::output_file(path.string());
  out.print("i,j,x_zpf,p_zpf\n");
  auto const& g = flow.grid();
  auto const states = flow.states();
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.np; ++j) {
      auto const& s = states[g.index(i, j)];
      out.print("{},{},{},{}\n", i, j, s.x, s.p);
    }
}

}  // namespace qxpanse
