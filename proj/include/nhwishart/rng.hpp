#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace nhw {

// Philox4x32-10 counter-based generator.  Streams are addressed as
// (seed, stream, block): every (config, seed, draw index) pair reads the
// same numbers regardless of thread layout, which is what makes sampled
// histograms bit-reproducible under --threads.
class Philox {
  public:
    Philox(std::uint64_t seed, std::uint64_t stream)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          ctr2_(static_cast<std::uint32_t>(stream)),
          ctr3_(static_cast<std::uint32_t>(stream >> 32)) {}

    // next standard normal (Box-Muller pair, one value cached)
    double normal() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1, u2;
        next_uniform_pair(u1, u2);
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        have_ = true;
        return r * std::cos(th);
    }

    void fill_normal(std::vector<double>& out, std::size_t n) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = normal();
    }

  private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    void block(std::uint32_t out[4]) {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t c2 = ctr2_, c3 = ctr3_;
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0;
            std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2;
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            std::uint32_t n0 = hi1 ^ c1 ^ k0;
            std::uint32_t n1 = lo1;
            std::uint32_t n2 = hi0 ^ c3 ^ k1;
            std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += kW0;
            k1 += kW1;
        }
        out[0] = c0;
        out[1] = c1;
        out[2] = c2;
        out[3] = c3;
        ++block_;
    }

    void next_uniform_pair(double& u1, double& u2) {
        std::uint32_t r[4];
        block(r);
        std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
        std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
        // 52-bit mantissa shifted into (0,1); never exactly 0 or 1
        u1 = (static_cast<double>(a >> 12) + 0.5) * 0x1p-52;
        u2 = (static_cast<double>(b >> 12) + 0.5) * 0x1p-52;
    }

    std::uint32_t key0_, key1_;
    std::uint32_t ctr2_, ctr3_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool have_ = false;
};

}  // namespace nhw
