#pragma once

// Small derivative-free and least-squares optimizers used by the
// characterization pipeline.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

#include "pulseforge/errors.hpp"

namespace pulseforge {

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    bool converged = false;
    int evaluations = 0;
};

// Standard Nelder-Mead simplex minimization with adaptive restarts left to
// the caller. Stops when the simplex value spread drops below `ftol`.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, double step = 0.3, double ftol = 1e-9,
                                    int max_iter = 4000) {
    const int n = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (int i = 1; i <= n; ++i) xs[i](i - 1) += step;
    int evals = 0;
    for (int i = 0; i <= n; ++i) fs[i] = (++evals, f(xs[i]));

    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        std::vector<Eigen::VectorXd> xs2;
        std::vector<double> fs2;
        for (int i : idx) {
            xs2.push_back(xs[i]);
            fs2.push_back(fs[i]);
        }
        xs = std::move(xs2);
        fs = std::move(fs2);
    };

    NelderMeadResult result;
    for (int it = 0; it < max_iter; ++it) {
        order();
        if (std::abs(fs[n] - fs[0]) < ftol) {
            result.converged = true;
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += xs[i];
        centroid /= n;

        const Eigen::VectorXd xr = centroid + (centroid - xs[n]);  // reflection
        const double fr = (++evals, f(xr));
        if (fr < fs[0]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[n]);  // expansion
            const double fe = (++evals, f(xe));
            if (fe < fr) { xs[n] = xe; fs[n] = fe; }
            else { xs[n] = xr; fs[n] = fr; }
        } else if (fr < fs[n - 1]) {
            xs[n] = xr;
            fs[n] = fr;
        } else {
            const Eigen::VectorXd xc = centroid + 0.5 * (xs[n] - centroid);  // contraction
            const double fc = (++evals, f(xc));
            if (fc < fs[n]) { xs[n] = xc; fs[n] = fc; }
            else {
                for (int i = 1; i <= n; ++i) {  // shrink
                    xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
                    fs[i] = (++evals, f(xs[i]));
                }
            }
        }
    }
    order();
    result.x = xs[0];
    result.value = fs[0];
    result.evaluations = evals;
    return result;
}

// Brent-style bracketed root finding on [a, b]; f(a) and f(b) must differ in
// sign. Converges to `rel_tol` relative accuracy.
inline double brent_root(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-10, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw NumericError("root is not bracketed");
    if (std::abs(fa) < std::abs(fb)) { std::swap(a, b); std::swap(fa, fb); }
    double c = a, fc = fa, d = b - a;
    bool mflag = true;
    for (int it = 0; it < max_iter; ++it) {
        if (fb == 0.0 || std::abs(b - a) < rel_tol * std::max(1.0, std::abs(b))) return b;
        double s;
        if (fa != fc && fb != fc) {
            s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        const double lo = (3.0 * a + b) / 4.0;
        const bool cond = !((s > std::min(lo, b) && s < std::max(lo, b))) ||
                          (mflag && std::abs(s - b) >= std::abs(b - c) / 2.0) ||
                          (!mflag && std::abs(s - b) >= std::abs(c - d) / 2.0);
        if (cond) {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        const double fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if (fa * fs < 0.0) { b = s; fb = fs; }
        else { a = s; fa = fs; }
        if (std::abs(fa) < std::abs(fb)) { std::swap(a, b); std::swap(fa, fb); }
    }
    return b;
}

struct LeastSquaresResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;
    double ssr = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Levenberg-Marquardt for small dense problems. `residuals` maps parameters
// to the residual vector; the Jacobian is computed by forward differences.
inline LeastSquaresResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals, Eigen::VectorXd p,
    int max_iter = 200, double gtol = 1e-12) {
    const auto jac = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& r0) {
        Eigen::MatrixXd j(r0.size(), x.size());
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            const double h = std::max(1e-8, 1e-8 * std::abs(x(k)));
            Eigen::VectorXd xp = x;
            xp(k) += h;
            j.col(k) = (residuals(xp) - r0) / h;
        }
        return j;
    };

    LeastSquaresResult out;
    Eigen::VectorXd r = residuals(p);
    double ssr = r.squaredNorm();
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    for (; it < max_iter; ++it) {
        const Eigen::MatrixXd j = jac(p, r);
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd g = j.transpose() * r;
        if (g.cwiseAbs().maxCoeff() < gtol * std::max(1.0, std::sqrt(ssr))) {
            converged = true;
            break;
        }
        bool accepted = false;
        for (int tries = 0; tries < 25; ++tries) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
            const Eigen::VectorXd step = lhs.ldlt().solve(-g);
            const Eigen::VectorXd p_new = p + step;
            const Eigen::VectorXd r_new = residuals(p_new);
            const double ssr_new = r_new.squaredNorm();
            if (ssr_new < ssr) {
                p = p_new;
                r = r_new;
                ssr = ssr_new;
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            converged = true;  // no downhill step exists at this scale
            break;
        }
        if (ssr < 1e-300) { converged = true; break; }
    }

    const Eigen::MatrixXd j = jac(p, r);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::Index dof = std::max<Eigen::Index>(1, r.size() - p.size());
    const double sigma2 = ssr / static_cast<double>(dof);
    out.covariance = sigma2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
    out.params = p;
    out.ssr = ssr;
    out.converged = converged;
    out.iterations = it;
    return out;
}

}  // namespace pulseforge
