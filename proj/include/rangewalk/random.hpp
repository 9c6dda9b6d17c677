#pragma once

#include <cstdint>
#include <random>

namespace rangewalk {

using Engine = std::mt19937_64;

/// Independent, reproducible generator for replica `stream` of an experiment
/// seeded with `master_seed`. Both words feed a std::seed_seq, whose output is
/// fixed by the standard, so streams are identical across platforms.
inline Engine make_stream(std::uint64_t master_seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Engine(seq);
}

/// Unbiased draws in [0, range) for small ranges. Each 64-bit engine output is
/// split into two 32-bit words and reduced with Lemire's multiply-shift
/// rejection method.
class BoundedDraws {
 public:
  explicit BoundedDraws(Engine engine) : engine_(std::move(engine)) {}

  std::uint32_t operator()(std::uint32_t range) {
    std::uint64_t m = std::uint64_t{next_word()} * range;
    auto low = static_cast<std::uint32_t>(m);
    if (low < range) {
      const std::uint32_t threshold = static_cast<std::uint32_t>(-range) % range;
      while (low < threshold) {
        m = std::uint64_t{next_word()} * range;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  Engine& engine() { return engine_; }

 private:
  std::uint32_t next_word() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const std::uint64_t word = engine_();
    spare_ = static_cast<std::uint32_t>(word >> 32);
    have_spare_ = true;
    return static_cast<std::uint32_t>(word);
  }

  Engine engine_;
  std::uint32_t spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace rangewalk
