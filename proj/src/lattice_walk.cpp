#include "rangewalk/lattice_walk.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "rangewalk/random.hpp"

namespace rangewalk {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'W', 'R', '4'};

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw TrajectoryError("trajectory file truncated in header");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

void check_dimension(int dimension) {
  if (dimension < 1) throw TrajectoryError("dimension must be at least 1");
  if (dimension > 64) throw TrajectoryError("dimension above 64 is not supported");
}

}  // namespace

LatticePoint operator+(LatticePoint a, const LatticePoint& b) {
  for (std::size_t i = 0; i < a.coords.size(); ++i) a.coords[i] += b.coords[i];
  return a;
}

Trajectory::Trajectory(int dimension, std::uint64_t seed, std::vector<std::uint8_t> steps)
    : dimension_(dimension), seed_(seed), steps_(std::move(steps)) {
  check_dimension(dimension_);
  // Vertex coordinates are stored as 32-bit integers downstream.
  if (steps_.size() >= (std::size_t{1} << 31)) throw TrajectoryError("trajectory longer than 2^31 - 1 steps");
  const int codes = 2 * dimension_;
  for (auto code : steps_) {
    if (code >= codes) throw TrajectoryError("step code out of range for dimension");
  }
}

LatticePoint Trajectory::point(Time k) const {
  if (k < 0 || k > horizon()) throw TrajectoryError("time index outside trajectory");
  LatticePoint p = LatticePoint::origin(dimension_);
  for (Time j = 0; j < k; ++j) apply(p.coords, steps_[j]);
  return p;
}

std::vector<LatticePoint> Trajectory::points() const {
  std::vector<LatticePoint> out;
  out.reserve(steps_.size() + 1);
  for_each_point([&](Time, std::span<const std::int64_t> x) { out.push_back({{x.begin(), x.end()}}); });
  return out;
}

Trajectory generate_trajectory(int dimension, Time steps, std::uint64_t seed) {
  check_dimension(dimension);
  if (steps < 0) throw TrajectoryError("number of steps must be nonnegative");
  BoundedDraws draw(make_stream(seed, 0));
  std::vector<std::uint8_t> codes(static_cast<std::size_t>(steps));
  const auto directions = static_cast<std::uint32_t>(2 * dimension);
  for (auto& c : codes) c = static_cast<std::uint8_t>(draw(directions));
  return Trajectory(dimension, seed, std::move(codes));
}

Trajectory load_fixed_path(const std::vector<LatticePoint>& points) {
  if (points.empty()) throw TrajectoryError("path must contain at least one point");
  const int d = points.front().dimension();
  check_dimension(d);
  if (points.front() != LatticePoint::origin(d)) throw TrajectoryError("path must start at the origin");
  std::vector<std::uint8_t> codes;
  codes.reserve(points.size() - 1);
  for (std::size_t k = 1; k < points.size(); ++k) {
    const auto& a = points[k - 1].coords;
    const auto& b = points[k].coords;
    if (static_cast<int>(b.size()) != d) throw TrajectoryError("mixed dimensions in path");
    int axis = -1;
    std::int64_t l1 = 0;
    for (int i = 0; i < d; ++i) {
      const std::int64_t diff = b[i] - a[i];
      if (diff != 0) axis = i;
      l1 += diff < 0 ? -diff : diff;
    }
    if (l1 != 1) throw TrajectoryError("non-unit increment at step " + std::to_string(k - 1));
    codes.push_back(StepCode::encode(axis, static_cast<int>(b[axis] - a[axis])));
  }
  return Trajectory(d, kSyntheticSeed, std::move(codes));
}

std::pair<Trajectory, Trajectory> two_sided_trajectory(int dimension, Time steps_each_side, std::uint64_t seed) {
  check_dimension(dimension);
  if (steps_each_side < 0) throw TrajectoryError("number of steps must be nonnegative");
  const auto directions = static_cast<std::uint32_t>(2 * dimension);
  auto make = [&](std::uint64_t stream) {
    BoundedDraws draw(make_stream(seed, stream));
    std::vector<std::uint8_t> codes(static_cast<std::size_t>(steps_each_side));
    for (auto& c : codes) c = static_cast<std::uint8_t>(draw(directions));
    return Trajectory(dimension, seed, std::move(codes));
  };
  return {make(1), make(2)};
}

void write_trajectory(const Trajectory& trajectory, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kTrajectoryFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(trajectory.dimension()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(trajectory.horizon()));
  put_le<std::uint64_t>(out, trajectory.seed());
  const auto steps = trajectory.steps();
  out.write(reinterpret_cast<const char*>(steps.data()), static_cast<std::streamsize>(steps.size()));
  if (!out) throw TrajectoryError("failed writing trajectory");
}

Trajectory read_trajectory(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw TrajectoryError("not a trajectory file (bad magic)");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kTrajectoryFormatVersion) throw TrajectoryError("unsupported trajectory format version");
  const auto dimension = get_le<std::uint32_t>(in);
  const auto n = get_le<std::uint64_t>(in);
  const auto seed = get_le<std::uint64_t>(in);
  if (n >= (std::uint64_t{1} << 31)) throw TrajectoryError("trajectory length in header is too large");
  std::vector<std::uint8_t> steps(n);
  in.read(reinterpret_cast<char*>(steps.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::uint64_t>(in.gcount()) != n) throw TrajectoryError("trajectory file truncated in step stream");
  return Trajectory(static_cast<int>(dimension), seed, std::move(steps));
}

void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TrajectoryError("cannot open " + path.string() + " for writing");
  write_trajectory(trajectory, out);
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrajectoryError("cannot open " + path.string());
  return read_trajectory(in);
}

}  // namespace rangewalk
