#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pulseforge/errors.hpp"

namespace pulseforge {

using cxd = std::complex<double>;

// A pulse is a time series of complex samples with maximum unit norm.
// Duration equals the sample count, in units of dt cycles.
struct SampledPulse {
    std::vector<cxd> samples;
    std::string name;

    SampledPulse() = default;
    SampledPulse(std::vector<cxd> s, std::string n = "") : samples(std::move(s)), name(std::move(n)) {
        for (const auto& d : samples)
            if (std::abs(d) > 1.0 + 1e-12)
                throw ValidationError("pulse sample exceeds unit norm in '" + name + "'");
    }

    std::int64_t duration() const { return static_cast<std::int64_t>(samples.size()); }

    bool operator==(const SampledPulse&) const = default;
};

enum class PulseShape : std::uint8_t { Gaussian, GaussianSquare, Drag, Constant };

// Parametric pulse envelopes. Closed forms:
//   Gaussian:        d_j = amp * exp(-(j - c)^2 / (2 sigma^2)), c = (duration-1)/2
//   GaussianSquare:  flat top of `square_width` cycles at `amp`, symmetric
//                    Gaussian rise/fall of width (duration - square_width)/2 each
//   Drag:            d_j = g_j + i * beta * (g_{j+1} - g_{j-1}) / 2, one-sided
//                    differences at the boundaries, g the Gaussian above
//   Constant:        d_j = amp
struct ParametricPulse {
    PulseShape shape = PulseShape::Constant;
    std::int64_t duration = 0;
    cxd amp;
    double sigma = 0.0;         // Gaussian, GaussianSquare, Drag
    double square_width = 0.0;  // GaussianSquare: flat-top width in cycles
    double beta = 0.0;          // Drag
    std::string name;

    bool operator==(const ParametricPulse&) const = default;
};

inline ParametricPulse gaussian(std::int64_t duration, cxd amp, double sigma, std::string name = "") {
    return {PulseShape::Gaussian, duration, amp, sigma, 0.0, 0.0, std::move(name)};
}
inline ParametricPulse gaussian_square(std::int64_t duration, cxd amp, double sigma, double square_width,
                                       std::string name = "") {
    return {PulseShape::GaussianSquare, duration, amp, sigma, square_width, 0.0, std::move(name)};
}
inline ParametricPulse drag(std::int64_t duration, cxd amp, double sigma, double beta, std::string name = "") {
    return {PulseShape::Drag, duration, amp, sigma, 0.0, beta, std::move(name)};
}
inline ParametricPulse constant(std::int64_t duration, cxd amp, std::string name = "") {
    return {PulseShape::Constant, duration, amp, 0.0, 0.0, 0.0, std::move(name)};
}

namespace detail {
inline void check_parametric(const ParametricPulse& p) {
    if (p.duration <= 0) throw ValidationError("pulse duration must be positive");
    switch (p.shape) {
        case PulseShape::Gaussian:
        case PulseShape::Drag:
            if (p.sigma <= 0.0) throw ValidationError("sigma must be positive");
            break;
        case PulseShape::GaussianSquare:
            if (p.sigma <= 0.0) throw ValidationError("sigma must be positive");
            if (p.square_width < 0.0 || p.square_width > static_cast<double>(p.duration))
                throw ValidationError("square_width must lie in [0, duration]");
            break;
        case PulseShape::Constant:
            break;
    }
}
}  // namespace detail

// Evaluate a parametric pulse into its sample list. Throws if any sample
// would exceed the unit-norm bound.
inline SampledPulse sample_parametric(const ParametricPulse& p) {
    detail::check_parametric(p);
    const auto n = p.duration;
    std::vector<cxd> out(static_cast<std::size_t>(n));

    auto gauss = [&](double j, double center) {
        const double arg = (j - center) / p.sigma;
        return std::exp(-0.5 * arg * arg);
    };

    switch (p.shape) {
        case PulseShape::Constant:
            for (auto& d : out) d = p.amp;
            break;
        case PulseShape::Gaussian: {
            const double c = static_cast<double>(n - 1) / 2.0;
            for (std::int64_t j = 0; j < n; ++j) out[j] = p.amp * gauss(static_cast<double>(j), c);
            break;
        }
        case PulseShape::GaussianSquare: {
            // Flat top of square_width cycles centered in the pulse; the fall
            // edge mirrors the rise sample-for-sample (s[j] == s[n-1-j]).
            const double edge = (static_cast<double>(n) - p.square_width) / 2.0;
            for (std::int64_t j = 0; j < n; ++j) {
                const double t = static_cast<double>(j);
                double env;
                if (t < edge)
                    env = gauss(t, edge);
                else if (t < static_cast<double>(n) - edge)
                    env = 1.0;
                else
                    env = gauss(t, static_cast<double>(n) - edge - 1.0);
                out[j] = p.amp * env;
            }
            break;
        }
        case PulseShape::Drag: {
            const double c = static_cast<double>(n - 1) / 2.0;
            std::vector<double> g(static_cast<std::size_t>(n));
            for (std::int64_t j = 0; j < n; ++j) g[j] = gauss(static_cast<double>(j), c);
            for (std::int64_t j = 0; j < n; ++j) {
                double deriv;
                if (n == 1)
                    deriv = 0.0;
                else if (j == 0)
                    deriv = g[1] - g[0];
                else if (j == n - 1)
                    deriv = g[n - 1] - g[n - 2];
                else
                    deriv = (g[j + 1] - g[j - 1]) / 2.0;
                out[j] = p.amp * (g[j] + cxd(0.0, 1.0) * p.beta * deriv);
            }
            break;
        }
    }
    return SampledPulse(std::move(out), p.name);
}

// Either description of a pulse, as accepted by Play.
using Pulse = std::variant<ParametricPulse, SampledPulse>;

inline std::int64_t pulse_duration(const Pulse& p) {
    if (const auto* par = std::get_if<ParametricPulse>(&p)) return par->duration;
    return std::get<SampledPulse>(p).duration();
}

inline SampledPulse pulse_samples(const Pulse& p) {
    if (const auto* par = std::get_if<ParametricPulse>(&p)) return sample_parametric(*par);
    return std::get<SampledPulse>(p);
}

inline const std::string& pulse_name(const Pulse& p) {
    if (const auto* par = std::get_if<ParametricPulse>(&p)) return par->name;
    return std::get<SampledPulse>(p).name;
}

// Time-averaged absolute amplitude (sum |d_j| / duration).
inline double time_averaged_amplitude(const Pulse& p) {
    const auto s = pulse_samples(p);
    if (s.samples.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& d : s.samples) acc += std::abs(d);
    return acc / static_cast<double>(s.samples.size());
}

}  // namespace pulseforge
