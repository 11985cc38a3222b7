#pragma once

// Level-1 to level-2 readout chain: boxcar kernel, two-class linear
// discriminant analysis with a shared covariance, assignment fidelity with
// Jeffreys intervals, and Pearson-correlation crosstalk tests.

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <array>
#include <span>
#include <vector>

#include "pulseforge/linalg.hpp"

namespace pulseforge {

// Mean of a complex trace over [start, start+length).
inline cxd boxcar_kernel(std::span<const cxd> trace, std::size_t start, std::size_t length) {
    if (length == 0) throw ValidationError("boxcar window is empty");
    if (start + length > trace.size()) throw ValidationError("boxcar window exceeds the trace");
    cxd acc = 0.0;
    for (std::size_t i = start; i < start + length; ++i) acc += trace[i];
    return acc / static_cast<double>(length);
}

struct LinearDiscriminator {
    Eigen::Vector2d w = Eigen::Vector2d::Zero();
    double bias = 0.0;
    Eigen::Vector2d mean0 = Eigen::Vector2d::Zero(), mean1 = Eigen::Vector2d::Zero();
    Eigen::Matrix2d pooled_cov = Eigen::Matrix2d::Identity();

    // classify(z) = 1 iff w . [Re z, Im z] + bias > 0; ties go to 0.
    int classify(const cxd& z) const { return (w(0) * z.real() + w(1) * z.imag() + bias > 0.0) ? 1 : 0; }
};

// Two-class LDA with pooled covariance and equal priors.
inline LinearDiscriminator fit_lda(const std::vector<cxd>& points, const std::vector<int>& labels) {
    if (points.size() != labels.size()) throw ValidationError("points and labels differ in length");
    Eigen::Vector2d sum0 = Eigen::Vector2d::Zero(), sum1 = Eigen::Vector2d::Zero();
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Eigen::Vector2d v(points[i].real(), points[i].imag());
        if (labels[i]) { sum1 += v; ++n1; }
        else { sum0 += v; ++n0; }
    }
    if (n0 == 0 || n1 == 0) throw ValidationError("LDA needs samples from both classes");

    LinearDiscriminator d;
    d.mean0 = sum0 / static_cast<double>(n0);
    d.mean1 = sum1 / static_cast<double>(n1);
    Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Eigen::Vector2d v(points[i].real(), points[i].imag());
        const Eigen::Vector2d c = v - (labels[i] ? d.mean1 : d.mean0);
        scatter += c * c.transpose();
    }
    d.pooled_cov = scatter / static_cast<double>(std::max<std::size_t>(1, n0 + n1 - 2));
    Eigen::Matrix2d cov = d.pooled_cov;
    const double reg = 1e-9 * std::max(1.0, cov.trace());
    cov += reg * Eigen::Matrix2d::Identity();
    d.w = cov.ldlt().solve(d.mean1 - d.mean0);
    d.bias = -d.w.dot(0.5 * (d.mean0 + d.mean1));
    return d;
}

// Jeffreys 95% interval for a binomial rate: Beta(k + 1/2, n - k + 1/2)
// quantiles, with the boundary conventions lower(0) = 0 and upper(n) = 1.
inline std::pair<double, double> jeffreys_interval(long k, long n, double confidence = 0.95) {
    if (n <= 0 || k < 0 || k > n) throw ValidationError("bad Jeffreys interval arguments");
    const double alpha = 1.0 - confidence;
    const boost::math::beta_distribution<double> dist(k + 0.5, n - k + 0.5);
    const double lo = (k == 0) ? 0.0 : boost::math::quantile(dist, alpha / 2.0);
    const double hi = (k == n) ? 1.0 : boost::math::quantile(dist, 1.0 - alpha / 2.0);
    return {lo, hi};
}

struct AssignmentFidelityReport {
    double f_a = 0.0;
    double lo = 0.0, hi = 1.0;  // 95% interval
    double pr_1_given_0 = 0.0, pr_0_given_1 = 0.0;
    long shots0 = 0, shots1 = 0;
};

// F_a = 1 - (Pr[0|1] + Pr[1|0]) / 2. Jeffreys intervals are computed for
// each error rate separately and combined by interval arithmetic.
inline AssignmentFidelityReport assignment_fidelity(const LinearDiscriminator& d,
                                                    const std::vector<cxd>& prepared0,
                                                    const std::vector<cxd>& prepared1) {
    if (prepared0.empty() || prepared1.empty())
        throw ValidationError("assignment fidelity needs shots for both prepared states");
    long err0 = 0, err1 = 0;
    for (const auto& z : prepared0) err0 += d.classify(z) == 1;
    for (const auto& z : prepared1) err1 += d.classify(z) == 0;

    AssignmentFidelityReport r;
    r.shots0 = static_cast<long>(prepared0.size());
    r.shots1 = static_cast<long>(prepared1.size());
    r.pr_1_given_0 = static_cast<double>(err0) / r.shots0;
    r.pr_0_given_1 = static_cast<double>(err1) / r.shots1;
    r.f_a = 1.0 - 0.5 * (r.pr_1_given_0 + r.pr_0_given_1);
    const auto [lo0, hi0] = jeffreys_interval(err0, r.shots0);
    const auto [lo1, hi1] = jeffreys_interval(err1, r.shots1);
    r.lo = std::max(0.0, 1.0 - 0.5 * (hi0 + hi1));
    r.hi = std::min(1.0, 1.0 - 0.5 * (lo0 + lo1));
    return r;
}

inline double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) throw ValidationError("Pearson r needs paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw ValidationError("degenerate (zero-variance) component");
    return sxy / std::sqrt(sxx * syy);
}

struct CrosstalkResult {
    int qubit = 0;       // whose data is tested
    int own_state = 0;   // the tested qubit's prepared state j
    int comp_es = 0;     // 0 = I, 1 = Q component of the excited-spectator data
    int comp_gs = 0;     // component of the ground-spectator data
    double r = 0.0, t = 0.0, p = 1.0;
};

// Calibration IQ data for a qubit pair: iq[b_high][b_low][qubit] holds the
// shots of `qubit` (0 = low, 1 = high) from schedule cal_<b_high><b_low>.
using CalIqData = std::array<std::array<std::array<std::vector<cxd>, 2>, 2>, 2>;

// Sixteen Pearson correlation tests between a qubit's component when the
// spectator is excited and when it is ground, for both of the qubit's own
// prepared states and all four I/Q component pairings. t = r sqrt((n-2) /
// (1-r^2)) with df = n - 2, two-sided p-values.
inline std::vector<CrosstalkResult> crosstalk_test(const CalIqData& iq, long n_shots) {
    auto component = [](const std::vector<cxd>& z, int comp) {
        std::vector<double> v(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) v[i] = comp ? z[i].imag() : z[i].real();
        return v;
    };

    std::vector<CrosstalkResult> out;
    const boost::math::students_t dist(static_cast<double>(n_shots - 2));
    for (int qubit = 0; qubit < 2; ++qubit)
        for (int own = 0; own < 2; ++own)
            for (int ce = 0; ce < 2; ++ce)
                for (int cg = 0; cg < 2; ++cg) {
                    // Spectator excited/ground with this qubit prepared in `own`.
                    const auto& es = qubit == 0 ? iq[1][own][0] : iq[own][1][1];
                    const auto& gs = qubit == 0 ? iq[0][own][0] : iq[own][0][1];
                    if (static_cast<long>(es.size()) != n_shots || static_cast<long>(gs.size()) != n_shots)
                        throw ValidationError("crosstalk test requires equal shot counts");
                    CrosstalkResult res;
                    res.qubit = qubit;
                    res.own_state = own;
                    res.comp_es = ce;
                    res.comp_gs = cg;
                    res.r = pearson_r(component(es, ce), component(gs, cg));
                    if (std::abs(res.r) >= 1.0) {
                        res.t = std::numeric_limits<double>::infinity();
                        res.p = 0.0;
                    } else {
                        res.t = res.r * std::sqrt((n_shots - 2) / (1.0 - res.r * res.r));
                        res.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(res.t)));
                    }
                    out.push_back(res);
                }
    return out;
}

}  // namespace pulseforge
