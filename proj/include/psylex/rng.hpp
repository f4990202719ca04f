#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace psylex::rng {

// mt19937_64 mapped to (0,1] and Box-Muller normals. std::normal_distribution
// and std::uniform_real_distribution are implementation-defined, so rolling
// the transforms keeps seeded streams identical across toolchains.
class Normal {
  public:
    explicit Normal(std::uint64_t seed) : engine_(seed) {}

    // 53-bit uniform in (0,1]; never 0, so log() below is safe.
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace psylex::rng
