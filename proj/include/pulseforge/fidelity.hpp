#pragma once

// Average gate fidelity and the 12-parameter local-rotation optimization.
//
// F = (d F_pro + 1) / (d + 1) with F_pro = Tr[S_U^dag S_E] / d^2, the
// standard process-to-average conversion. The optimization searches over
// four U3 blocks (pre/post on control and target) dressing the target
// unitary as U_pre^dag U_target U_post^dag; maximizing F against that
// dressed target removes locally correctable coherent errors. U3 follows
// the convention U3(theta, phi, lambda) = Rz(phi) Ry(theta) Rz(lambda).

#include <array>
#include <numbers>
#include <vector>

#include "pulseforge/backend.hpp"
#include "pulseforge/optimize.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/random.hpp"
#include "pulseforge/threads.hpp"

namespace pulseforge {

inline Mat rz(double angle) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = std::polar(1.0, -angle / 2.0);
    m(1, 1) = std::polar(1.0, angle / 2.0);
    return m;
}

inline Mat ry(double angle) {
    Mat m(2, 2);
    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    m << c, -s, s, c;
    return m;
}

inline Mat rx(double angle) {
    Mat m(2, 2);
    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    const cxd i(0, 1);
    m << c, -i * s, -i * s, c;
    return m;
}

inline Mat u3_matrix(double theta, double phi, double lambda) { return rz(phi) * ry(theta) * rz(lambda); }

// Perfect entangler exp(-i pi/4 ZX) (higher qubit is the Z factor).
inline Mat zx_pi_half() {
    const Mat zx = kron(pauli(3), pauli(1));
    const double a = std::numbers::pi / 4.0;
    return std::cos(a) * Mat::Identity(4, 4) - cxd(0, 1) * std::sin(a) * zx;
}

// CNOT with the given control/target out of the pair (low, high) = (0, 1)
// in the tensor convention "high qubit left".
inline Mat cx_matrix(bool control_is_high = true) {
    Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    const Mat x = pauli(1);
    const Mat id = Mat::Identity(2, 2);
    return control_is_high ? (kron(p0, id) + kron(p1, x)) : (kron(id, p0) + kron(x, p1));
}

// Twelve local-rotation angles grouped as four U3 blocks.
struct LocalRotations {
    std::array<double, 12> theta{};

    Mat pre_control() const { return u3_matrix(theta[0], theta[1], theta[2]); }
    Mat pre_target() const { return u3_matrix(theta[3], theta[4], theta[5]); }
    Mat post_control() const { return u3_matrix(theta[6], theta[7], theta[8]); }
    Mat post_target() const { return u3_matrix(theta[9], theta[10], theta[11]); }

    Mat pre() const { return kron(pre_control(), pre_target()); }
    Mat post() const { return kron(post_control(), post_target()); }
};

struct FidelityReport {
    double f_max = 0.0;
    double f_unoptimized = 0.0;
    LocalRotations rotations;
    std::string target;
    int restarts = 0;
    bool converged = false;
};

// Average gate fidelity of a channel (superoperator) against a target
// unitary.
inline double average_gate_fidelity(const Mat& superop, const Mat& target) {
    const Eigen::Index d = target.rows();
    if (superop.rows() != d * d || superop.cols() != d * d)
        throw ValidationError("channel and target dimensions do not match");
    const double f_pro = process_fidelity_to_unitary(superop, target);
    return (static_cast<double>(d) * f_pro + 1.0) / (static_cast<double>(d) + 1.0);
}

// Dressed target U_pre(Theta)^dag U_target U_post(Theta)^dag.
inline Mat dressed_target(const Mat& target, const LocalRotations& r) {
    return r.pre().adjoint() * target * r.post().adjoint();
}

// Maximize average gate fidelity over the 12 local-rotation parameters by
// simplex search from the zero start plus `restarts` random starts; restarts
// run in parallel and merge on the best value.
inline FidelityReport optimize_local(const Mat& superop, const Mat& target, int restarts = 20,
                                     std::uint64_t seed = 0) {
    const auto objective = [&](const Eigen::VectorXd& x) {
        LocalRotations r;
        for (int i = 0; i < 12; ++i) r.theta[i] = x(i);
        return -average_gate_fidelity(superop, dressed_target(target, r));
    };

    FidelityReport report;
    report.restarts = restarts;
    report.f_unoptimized = average_gate_fidelity(superop, target);

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(Eigen::VectorXd::Zero(12));
    for (int r = 0; r < restarts; ++r) {
        Rng rng(Rng::derive(seed, 1000 + r));
        Eigen::VectorXd x(12);
        for (int i = 0; i < 12; ++i) x(i) = (rng.uniform() * 2.0 - 1.0) * std::numbers::pi;
        starts.push_back(x);
    }

    std::vector<NelderMeadResult> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t k) {
        NelderMeadResult r = nelder_mead(objective, starts[k], 0.4, 1e-10, 6000);
        r = nelder_mead(objective, r.x, 0.02, 1e-12, 4000);  // polish
        results[k] = std::move(r);
    });

    std::size_t best = 0;
    for (std::size_t k = 1; k < results.size(); ++k)
        if (results[k].value < results[best].value) best = k;

    for (int i = 0; i < 12; ++i) report.rotations.theta[i] = results[best].x(i);
    report.f_max = -results[best].value;
    report.converged = results[best].converged;
    if (report.f_max < report.f_unoptimized) {  // zero start guarantees this cannot regress
        report.f_max = report.f_unoptimized;
        report.rotations = LocalRotations{};
    }
    return report;
}

// Assemble a calibrated CNOT schedule: the post-rotation block plays before
// the entangling pulse and the pre-rotation block after it (the blocks are
// named for their position in the dressed-target expression, which is
// adjoint). Rotations are realized with the backend u3 templates (two X90
// pulses and three frame shifts, mirrored onto coupled control channels).
inline Schedule build_optimized_cnot(const InstructionScheduleMap& inst_map, const Schedule& cr_schedule,
                                     const LocalRotations& rotations, std::uint32_t control,
                                     std::uint32_t target) {
    auto u3_of = [&](std::uint32_t q, const double* t) {
        return inst_map.get("u3", {q}, {t[0], t[1], t[2]});
    };
    Schedule s("cx_opt");
    s = s.append(u3_of(control, &rotations.theta[6]));
    s = s.append(u3_of(target, &rotations.theta[9]));
    s = s.append(cr_schedule);
    s = s.append(u3_of(control, &rotations.theta[0]));
    s = s.append(u3_of(target, &rotations.theta[3]));
    return s;
}

}  // namespace pulseforge
