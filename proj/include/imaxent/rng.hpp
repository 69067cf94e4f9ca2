#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace imaxent {

//! SplitMix64 step; used only to spread seed material.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Derives the seed of an independent substream from a master seed and a
//! stream index. Used for per-chunk and per-replication streams so results
//! do not depend on thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s = h ^ (stream + 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

//! Seeded generator with portable uniform and normal draws. The normal
//! variates use Box-Muller on the raw 53-bit uniforms, so sequences are
//! reproducible across platforms and standard library versions.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {
  }

  //! uniform on [0, 1)
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - u01(); // (0, 1]
    double u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t raw() { return engine_(); }

private:
  std::mt19937_64 engine_;
  double spare_{ 0.0 };
  bool has_spare_{ false };
};

} // namespace imaxent
