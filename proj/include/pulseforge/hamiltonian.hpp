#pragma once

// Effective Hamiltonian extraction from reconstructed processes, the
// third-order amplitude model, and the CR phase calibration routine.
//
// Coefficients are defined against the orthonormal two-qubit basis
// B_ij = (1/2) P_i (x) P_j (i indexing the higher qubit), so a Hamiltonian
// H = sum_ij w_ij B_ij has w_ij = Tr[B_ij^dag H]. From a Lindblad generator
// in superoperator form the coefficients are recovered by projecting onto
// the (orthogonal, unnormalized) superoperators of the basis terms:
//
//   w_ij = Tr[S_ij^dag S_G] / ||S_ij||_F^2,   S_ij = -i(I (x) B_ij - B_ij^T (x) I)
//
// which is insensitive to Pauli / relaxation dissipators in S_G. All
// coefficients are angular rates (rad/s).

#include <array>
#include <string>
#include <vector>

#include "pulseforge/optimize.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/simulator.hpp"

namespace pulseforge {

inline constexpr std::array<char, 4> kPauliCode{'I', 'X', 'Y', 'Z'};

// B_ij = (1/2) P_i (x) P_j.
inline Mat pauli_basis_op(int i, int j) { return 0.5 * kron(pauli(i), pauli(j)); }

struct HamiltonianCoefficients {
    // omega[i][j] multiplies B_ij; i indexes the higher (control) qubit.
    std::array<std::array<double, 4>, 4> omega{};
    double t_cr = 0.0;  // seconds, metadata
    int n_cr = 1;

    double get(const std::string& label) const {
        if (label.size() != 2) throw ValidationError("coefficient label must have two letters");
        int idx[2];
        for (int k = 0; k < 2; ++k) {
            switch (label[k]) {
                case 'I': idx[k] = 0; break;
                case 'X': idx[k] = 1; break;
                case 'Y': idx[k] = 2; break;
                case 'Z': idx[k] = 3; break;
                default: throw ValidationError("bad coefficient label " + label);
            }
        }
        return omega[idx[0]][idx[1]];
    }
};

// The seven coefficients reported in the standard order.
inline const std::vector<std::string>& cr_coefficient_labels() {
    static const std::vector<std::string> labels{"ZI", "ZX", "ZY", "ZZ", "IX", "IY", "IZ"};
    return labels;
}

// Generator of the channel: S_G = log(S_E) / t, principal branch. Throws
// BranchCutError when an eigenvalue of S_E sits on the negative real axis
// (total rotation angle at or over pi); the caller must shorten t.
inline Mat generator(const Mat& superop, double t) {
    if (t <= 0.0) throw ValidationError("generator requires a positive evolution time");
    const Mat log_s = logm_principal(superop);
    const double residual = (log_s.exp() - superop).norm();
    if (residual > 1e-6)
        throw NumericError("matrix log round-trip residual " + std::to_string(residual));
    return log_s / t;
}

// Project a generator onto the Hamiltonian basis superoperators.
inline HamiltonianCoefficients extract_coefficients(const Mat& s_g) {
    if (s_g.rows() != 16 || s_g.cols() != 16)
        throw ValidationError("coefficient extraction expects a two-qubit generator");
    HamiltonianCoefficients out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == 0 && j == 0) { out.omega[i][j] = 0.0; continue; }  // identity term is a global phase
            const Mat s_ij = hamiltonian_superop(pauli_basis_op(i, j));
            const double norm2 = s_ij.squaredNorm();
            out.omega[i][j] = ((s_ij.adjoint() * s_g).trace() / norm2).real();
        }
    return out;
}

// Assemble the Hamiltonian (rad/s) from coefficients.
inline Mat hamiltonian_from_coefficients(const HamiltonianCoefficients& c) {
    Mat h = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h += c.omega[i][j] * pauli_basis_op(i, j);
    return h;
}

// ---- third-order amplitude model ----

struct ThirdOrderFit {
    double j_coupling = 0.0;   // Hz
    double lambda = 0.0;       // Hz per unit amplitude
    double delta = 0.0;        // Hz, fixed input (control-target detuning)
    double anharmonicity = 0.0;  // Hz, fixed input (control anharmonicity)
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
    double j_err = 0.0, lambda_err = 0.0;
    double residual = 0.0;
    bool converged = false;
};

// ZX rate (rad/s) as a function of the time-averaged amplitude. J, lambda,
// delta and the anharmonicity are plain frequencies in Hz; the angular rate
// absorbs the 2 pi.
inline double third_order_zx_rate(double a_bar, double j_coupling, double lambda, double delta,
                                  double anharm) {
    if (delta == 0.0) throw ValidationError("delta must be nonzero");
    const double d1 = anharm;
    for (const double pole : {-delta, -2.0 * delta, -2.0 * delta / 3.0})
        if (d1 == pole) throw ValidationError("anharmonicity hits a pole of the third-order model");
    const double la = lambda * a_bar;
    const double linear = -j_coupling * la / delta * (d1 / (d1 + delta));
    const double num = j_coupling * la * la * la * d1 * d1 *
                       (3.0 * d1 * d1 * d1 + 11.0 * d1 * d1 * delta + 15.0 * d1 * delta * delta +
                        9.0 * delta * delta * delta);
    const double den = 4.0 * delta * delta * delta * std::pow(d1 + delta, 3) * (d1 + 2.0 * delta) *
                       (3.0 * d1 + 2.0 * delta);
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    return two_pi * (linear + num / den);
}

// Nonlinear least squares of (a_bar, w_zx) points over (J, lambda). The
// model is invariant under (J, lambda) -> (-J, -lambda); the returned fit
// uses the J > 0 branch.
inline ThirdOrderFit fit_third_order(const std::vector<std::pair<double, double>>& points, double delta,
                                     double anharm) {
    if (points.size() < 4) throw ValidationError("third-order fit needs at least 4 amplitude points");
    third_order_zx_rate(0.1, 1.0, 1.0, delta, anharm);  // validates delta / anharm

    auto residuals = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(points.size());
        for (std::size_t k = 0; k < points.size(); ++k)
            r(k) = third_order_zx_rate(points[k].first, p(0), p(1), delta, anharm) - points[k].second;
        return r;
    };

    // Scale-aware starting points: the small-amplitude slope pins J*lambda.
    double slope = 0.0;
    for (const auto& [a, w] : points)
        if (a != 0.0) { slope = w / a; break; }
    const double jl = -slope / (2.0 * 3.14159265358979323846) * delta / (anharm / (anharm + delta));
    LeastSquaresResult best;
    best.ssr = std::numeric_limits<double>::infinity();
    for (const double lambda0 : {-3e8, 3e8, -1e8, 1e8}) {
        Eigen::VectorXd p0(2);
        p0 << jl / lambda0, lambda0;
        const auto fit = levenberg_marquardt(residuals, p0, 200);
        if (fit.ssr < best.ssr) best = fit;
    }
    if (!best.converged) throw NumericError("third-order fit did not converge within 200 iterations");

    ThirdOrderFit out;
    out.j_coupling = best.params(0);
    out.lambda = best.params(1);
    if (out.j_coupling < 0.0) { out.j_coupling = -out.j_coupling; out.lambda = -out.lambda; }
    out.delta = delta;
    out.anharmonicity = anharm;
    out.covariance = best.covariance;
    out.j_err = std::sqrt(std::max(0.0, best.covariance(0, 0)));
    out.lambda_err = std::sqrt(std::max(0.0, best.covariance(1, 1)));
    out.residual = best.ssr;
    out.converged = best.converged;
    return out;
}

inline double third_order_zx_rate(const ThirdOrderFit& fit, double a_bar) {
    return third_order_zx_rate(a_bar, fit.j_coupling, fit.lambda, fit.delta, fit.anharmonicity);
}

// Smallest positive amplitude with n_cr * w_zx(a) * t_cr = pi/2, located by
// bracket scan plus Brent refinement on [1e-6, 1].
inline double solve_pi_half_amplitude(const ThirdOrderFit& fit, double t_cr, int n_cr) {
    constexpr double pi = 3.14159265358979323846;
    auto f = [&](double a) { return n_cr * third_order_zx_rate(fit, a) * t_cr - pi / 2.0; };
    const int grid = 256;
    double prev_a = 1e-6, prev_f = f(prev_a);
    for (int k = 1; k <= grid; ++k) {
        const double a = 1e-6 + (1.0 - 1e-6) * k / grid;
        const double fa = f(a);
        if (prev_f == 0.0) return prev_a;
        if (prev_f * fa <= 0.0) return brent_root(f, prev_a, a, 1e-10);
        prev_a = a;
        prev_f = fa;
    }
    throw NumericError("no pi/2 amplitude in (0, 1]");
}

// ---- CR phase calibration ----

struct SweepRange {
    double lo = 0.0, hi = 1.0, step = 0.01;
};

struct PhaseCalibration {
    double amplitude = 0.0;   // amplitude giving an equal superposition on the target
    double phase = 0.0;       // pulse phase maximizing |<Y>| on the target
    double y_control0 = 0.0;  // <Y> with the control in |0>
    double y_control1 = 0.0;  // <Y> with the control in |1>
};

namespace detail {

inline Mat cr2_final_state(const BackendModel& b, std::uint32_t control, std::uint32_t target,
                           double amplitude, double phase, bool control_excited,
                           const CrPulseParams& base) {
    CrPulseParams p = base;
    p.amplitude = amplitude;
    p.phase = phase;
    Schedule s("phase_cal");
    if (control_excited) {
        const double a180 = gaussian_amp_for_angle(b, control, 3.14159265358979323846);
        s = s.append(play(gaussian(b.defaults.x90_duration, a180, b.defaults.x90_sigma, "x180"),
                          drive_channel(control)));
    }
    s = s.append(cr2_schedule(b, control, target, p));
    const Mat u = evolve_superoperator(s, b);
    Mat rho0 = Mat::Zero(b.dim(), b.dim());
    rho0(0, 0) = 1.0;
    return apply_superop(u, rho0);
}

}  // namespace detail

// Two-stage calibration: sweep the amplitude until the target qubit reaches
// an equal superposition (<Z> = 0) starting from |00>, then sweep the pulse
// phase at that amplitude and pick the phase maximizing |<Y>| on the target
// for both control states. The sign of <Y> flips with the control state.
inline PhaseCalibration calibrate_cr_phase(const BackendModel& b, const SweepRange& amplitude_sweep,
                                           const SweepRange& phase_sweep, std::uint32_t control = 1,
                                           std::uint32_t target = 0, const CrPulseParams& base = {}) {
    const Mat z_t = embed(pauli(3), static_cast<int>(target), b.n_qubits);
    const Mat y_t = embed(pauli(2), static_cast<int>(target), b.n_qubits);

    auto z_expect = [&](double a) {
        const Mat rho = detail::cr2_final_state(b, control, target, a, 0.0, false, base);
        return (z_t * rho).trace().real();
    };

    PhaseCalibration out;
    bool bracketed = false;
    double prev_a = amplitude_sweep.lo, prev_z = z_expect(prev_a);
    for (double a = amplitude_sweep.lo + amplitude_sweep.step; a <= amplitude_sweep.hi + 1e-12;
         a += amplitude_sweep.step) {
        const double z = z_expect(a);
        if (prev_z == 0.0 || prev_z * z < 0.0) {
            // Linear interpolation to the crossing inside the bracket.
            out.amplitude = prev_z == 0.0 ? prev_a : prev_a + amplitude_sweep.step * prev_z / (prev_z - z);
            bracketed = true;
            break;
        }
        prev_a = a;
        prev_z = z;
    }
    if (!bracketed) throw NumericError("no <Z> = 0 crossing in the amplitude sweep range");

    double best = -1.0;
    for (double phi = phase_sweep.lo; phi <= phase_sweep.hi + 1e-12; phi += phase_sweep.step) {
        const Mat rho0 = detail::cr2_final_state(b, control, target, out.amplitude, phi, false, base);
        const Mat rho1 = detail::cr2_final_state(b, control, target, out.amplitude, phi, true, base);
        const double y0 = (y_t * rho0).trace().real();
        const double y1 = (y_t * rho1).trace().real();
        const double score = 0.5 * (std::abs(y0) + std::abs(y1));
        if (score > best) {
            best = score;
            out.phase = phi;
            out.y_control0 = y0;
            out.y_control1 = y1;
        }
    }
    return out;
}

}  // namespace pulseforge
