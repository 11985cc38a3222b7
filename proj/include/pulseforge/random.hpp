#pragma once

// Deterministic sampling helpers. All draws go through explicit formulas on
// top of mt19937_64 so that seeded runs are reproducible bit-for-bit
// independent of standard-library distribution internals.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace pulseforge {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Index drawn from unnormalized nonnegative weights.
    int categorical(const Eigen::VectorXd& weights) {
        const double total = weights.sum();
        double u = uniform() * total;
        for (Eigen::Index i = 0; i < weights.size(); ++i) {
            u -= weights(i);
            if (u <= 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size() - 1);
    }

    // Two-dimensional Gaussian with the given mean and covariance.
    std::complex<double> gaussian_iq(const std::complex<double>& mean, const Eigen::Matrix2d& cov) {
        const Eigen::LLT<Eigen::Matrix2d> llt(cov + 1e-300 * Eigen::Matrix2d::Identity());
        const Eigen::Matrix2d l = llt.matrixL();
        const double z0 = normal(), z1 = normal();
        const double dx = l(0, 0) * z0;
        const double dy = l(1, 0) * z0 + l(1, 1) * z1;
        return {mean.real() + dx, mean.imag() + dy};
    }

    std::uint64_t raw() { return gen_(); }

    // Derive an independent stream for a subtask, stable in (seed, tag).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + tag * 0xbf58476d1ce4e5b9ULL);
        x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27; x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace pulseforge
