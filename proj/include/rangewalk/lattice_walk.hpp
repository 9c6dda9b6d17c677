#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rangewalk {

using Time = std::int64_t;

/// Seed recorded on trajectories that were not produced by the generator.
inline constexpr std::uint64_t kSyntheticSeed = ~std::uint64_t{0};

struct LatticePoint {
  std::vector<std::int64_t> coords;

  static LatticePoint origin(int dimension) { return {std::vector<std::int64_t>(dimension, 0)}; }
  static LatticePoint unit(int dimension, int axis, int sign = 1) {
    LatticePoint p = origin(dimension);
    p.coords[axis] = sign;
    return p;
  }
  int dimension() const { return static_cast<int>(coords.size()); }

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

LatticePoint operator+(LatticePoint a, const LatticePoint& b);

/// One nearest-neighbour increment packed into a byte: bit 0 is the sign
/// (set for -1), the remaining bits hold the axis.
struct StepCode {
  static constexpr std::uint8_t encode(int axis, int sign) {
    return static_cast<std::uint8_t>((axis << 1) | (sign < 0 ? 1 : 0));
  }
  static constexpr int axis(std::uint8_t code) { return code >> 1; }
  static constexpr int sign(std::uint8_t code) { return (code & 1) ? -1 : 1; }
  static constexpr std::uint8_t reverse(std::uint8_t code) { return code ^ 1; }
};

class TrajectoryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Simple random walk path S_0 = 0, S_1, ..., S_N stored as its increment
/// stream. Immutable once built.
class Trajectory {
 public:
  Trajectory(int dimension, std::uint64_t seed, std::vector<std::uint8_t> steps);

  int dimension() const { return dimension_; }
  std::uint64_t seed() const { return seed_; }
  bool synthetic() const { return seed_ == kSyntheticSeed; }

  /// N, the index of the last point.
  Time horizon() const { return static_cast<Time>(steps_.size()); }
  std::span<const std::uint8_t> steps() const { return steps_; }

  LatticePoint point(Time k) const;
  std::vector<LatticePoint> points() const;

  /// Calls f(k, coords) for k = first..last with coords = S_k.
  template <class F>
  void for_each_point(F&& f, Time first = 0, Time last = -1) const {
    if (last < 0) last = horizon();
    std::vector<std::int64_t> x(dimension_, 0);
    for (Time k = 0; k < first; ++k) apply(x, steps_[k]);
    for (Time k = first; k <= last; ++k) {
      f(k, std::span<const std::int64_t>(x));
      if (k < horizon()) apply(x, steps_[k]);
    }
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  static void apply(std::vector<std::int64_t>& x, std::uint8_t code) { x[StepCode::axis(code)] += StepCode::sign(code); }

  int dimension_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> steps_;
};

Trajectory generate_trajectory(int dimension, Time steps, std::uint64_t seed);

/// Wraps an explicit nearest-neighbour path starting at the origin.
Trajectory load_fixed_path(const std::vector<LatticePoint>& points);

/// Two independent walks from the origin drawn from sub-streams 1 and 2 of `seed`.
std::pair<Trajectory, Trajectory> two_sided_trajectory(int dimension, Time steps_each_side, std::uint64_t seed);

// Binary cache format: "RWR4", u32 version, u32 dimension, u64 N, u64 seed,
// then N step bytes. All integers little-endian.
inline constexpr std::uint32_t kTrajectoryFormatVersion = 1;

void write_trajectory(const Trajectory& trajectory, std::ostream& out);
Trajectory read_trajectory(std::istream& in);
void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace rangewalk
