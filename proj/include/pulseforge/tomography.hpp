#pragma once

// Two-qubit quantum process tomography.
//
// Preparations per qubit: |0>, |1>, |+> = (|0>+|1>)/sqrt2, |+i> =
// (|0>+i|1>)/sqrt2; measurement bases per qubit: X, Y, Z. That is 4^2 * 3^2
// = 144 experiments, plus four computational-basis calibration schedules
// (cal_00 .. cal_11) for readout-error mitigation. All circuits are built
// from u3/x180 templates and lowered through the scheduler, so the pulses
// under test see exactly the calibrated single-qubit gates.
//
// Reconstruction: weighted linear inversion of the mitigated outcome
// probabilities into a Choi matrix, followed by alternating projection onto
// the PSD cone and the trace-preserving subspace.

#include <array>
#include <string>
#include <vector>

#include "pulseforge/circuit.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/simulator.hpp"

namespace pulseforge {

// Preparation index codes and measurement basis codes.
inline constexpr std::array<char, 4> kPrepCode{'0', '1', '+', 'i'};
inline constexpr std::array<char, 3> kMeasCode{'X', 'Y', 'Z'};

inline std::array<double, 3> prep_u3_params(int p) {
    constexpr double pi = 3.14159265358979323846;
    switch (p) {
        case 0: return {0.0, 0.0, 0.0};            // |0>
        case 1: return {pi, 0.0, pi};              // |1>
        case 2: return {pi / 2.0, 0.0, pi};        // |+>  (Hadamard)
        case 3: return {pi / 2.0, pi / 2.0, pi};   // |+i> (S after Hadamard)
        default: throw ValidationError("prep index out of range");
    }
}

inline std::array<double, 3> meas_u3_params(int m) {
    constexpr double pi = 3.14159265358979323846;
    switch (m) {
        case 0: return {pi / 2.0, 0.0, pi};        // X basis (Hadamard)
        case 1: return {pi / 2.0, 0.0, pi / 2.0};  // Y basis (Hadamard after S^dag)
        case 2: return {0.0, 0.0, 0.0};            // Z basis
        default: throw ValidationError("meas index out of range");
    }
}

// Single-qubit preparation states and measurement projectors.
inline Mat prep_state(int p) {
    Vec v(2);
    const cxd i(0, 1);
    const double s = 1.0 / std::sqrt(2.0);
    switch (p) {
        case 0: v << 1, 0; break;
        case 1: v << 0, 1; break;
        case 2: v << s, s; break;
        case 3: v << s, s * i; break;
        default: throw ValidationError("prep index out of range");
    }
    return v * v.adjoint();
}

// Projector onto outcome bit `bit` of basis m (bit 0 <-> +1 eigenvalue).
inline Mat meas_projector(int m, int bit) {
    Vec v(2);
    const cxd i(0, 1);
    const double s = 1.0 / std::sqrt(2.0);
    switch (m) {
        case 0: v << s, (bit ? -s : s); break;
        case 1: v << s, (bit ? -s * i : s * i); break;
        case 2: v << (bit ? 0.0 : 1.0), (bit ? 1.0 : 0.0); break;
        default: throw ValidationError("meas index out of range");
    }
    return v * v.adjoint();
}

struct QptExperiment {
    std::string label;
    std::array<int, 2> prep{0, 0};  // prep[0] acts on the lower-indexed qubit of the pair
    std::array<int, 2> meas{2, 2};
    Schedule schedule;
};

struct QptSchedules {
    std::vector<QptExperiment> experiments;  // 144
    std::vector<std::pair<std::string, Schedule>> calibrations;  // cal_00 .. cal_11
    std::array<std::uint32_t, 2> qubits{0, 1};  // {low, high}
};

// Build the 144 QPT schedules plus 4 calibration schedules for a two-qubit
// gate registered in `inst_map` under `gate_name` on `gate_qubits`.
inline QptSchedules qpt_schedules(const std::string& gate_name,
                                  const std::vector<std::uint32_t>& gate_qubits,
                                  const InstructionScheduleMap& inst_map, const BackendModel& backend) {
    if (gate_qubits.size() != 2) throw ValidationError("process tomography requires a two-qubit gate");
    if (!inst_map.has(gate_name, gate_qubits))
        throw MissingDefinition("gate '" + gate_name + "' is not registered for the given qubits");

    const std::uint32_t lo = std::min(gate_qubits[0], gate_qubits[1]);
    const std::uint32_t hi = std::max(gate_qubits[0], gate_qubits[1]);
    const std::uint32_t n = hi + 1;

    QptSchedules out;
    out.qubits = {lo, hi};

    for (int p_hi = 0; p_hi < 4; ++p_hi)
        for (int p_lo = 0; p_lo < 4; ++p_lo)
            for (int m_hi = 0; m_hi < 3; ++m_hi)
                for (int m_lo = 0; m_lo < 3; ++m_lo) {
                    MiniCircuit c;
                    c.num_qubits = n;
                    const auto pp_lo = prep_u3_params(p_lo), pp_hi = prep_u3_params(p_hi);
                    const auto mp_lo = meas_u3_params(m_lo), mp_hi = meas_u3_params(m_hi);
                    c.ops.push_back({"u3", {lo}, {pp_lo[0], pp_lo[1], pp_lo[2]}});
                    c.ops.push_back({"u3", {hi}, {pp_hi[0], pp_hi[1], pp_hi[2]}});
                    c.ops.push_back({gate_name, gate_qubits, {}});
                    c.ops.push_back({"u3", {lo}, {mp_lo[0], mp_lo[1], mp_lo[2]}});
                    c.ops.push_back({"u3", {hi}, {mp_hi[0], mp_hi[1], mp_hi[2]}});
                    c.measurements = {{lo, 0}, {hi, 1}};

                    QptExperiment exp;
                    exp.prep = {p_lo, p_hi};
                    exp.meas = {m_lo, m_hi};
                    exp.label = std::string("qpt_p") + kPrepCode[p_hi] + kPrepCode[p_lo] + "_m" +
                                kMeasCode[m_hi] + kMeasCode[m_lo];
                    exp.schedule =
                        schedule_circuit(c, inst_map, SchedulingPolicy::ALAP).with_name(exp.label);
                    out.experiments.push_back(std::move(exp));
                }

    for (int b_hi = 0; b_hi < 2; ++b_hi)
        for (int b_lo = 0; b_lo < 2; ++b_lo) {
            MiniCircuit c;
            c.num_qubits = n;
            if (b_lo) c.ops.push_back({"x180", {lo}, {}});
            if (b_hi) c.ops.push_back({"x180", {hi}, {}});
            c.measurements = {{lo, 0}, {hi, 1}};
            const std::string label = "cal_" + std::to_string(b_hi) + std::to_string(b_lo);
            out.calibrations.emplace_back(
                label, schedule_circuit(c, inst_map, SchedulingPolicy::ALAP).with_name(label));
        }
    return out;
}

// Row-stochastic-by-column assignment matrix M[observed][prepared], built
// from the four calibration outcome distributions.
struct AssignmentMatrix {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

    static AssignmentMatrix from_probabilities(const std::array<Eigen::Vector4d, 4>& per_prep) {
        AssignmentMatrix am;
        for (int prep = 0; prep < 4; ++prep) am.m.col(prep) = per_prep[prep];
        for (int prep = 0; prep < 4; ++prep) {
            const double s = am.m.col(prep).sum();
            if (std::abs(s - 1.0) > 1e-9) throw ValidationError("assignment matrix columns must sum to 1");
        }
        if ((am.m.array() < -1e-12).any() || (am.m.array() > 1.0 + 1e-12).any())
            throw ValidationError("assignment matrix entries must lie in [0,1]");
        return am;
    }
};

// Readout-error mitigation: solve M p = p_observed, then project the
// quasi-probability vector onto the simplex.
inline Eigen::VectorXd mitigate(const Eigen::VectorXd& observed, const AssignmentMatrix& am) {
    const Eigen::FullPivLU<Eigen::Matrix4d> lu(am.m);
    if (!lu.isInvertible()) throw NumericError("assignment matrix is singular");
    const Eigen::Vector4d quasi = lu.solve(observed);
    return project_simplex(quasi);
}

struct QptDataPoint {
    std::array<int, 2> prep{0, 0};
    std::array<int, 2> meas{2, 2};
    Eigen::Vector4d probs = Eigen::Vector4d::Zero();  // outcome index bit0 = lower qubit
    double shots = 0;  // 0 means exact (infinite-shot) expectations
};

// Weighted linear inversion of QPT data into a Choi estimate, then CPTP
// projection. Outcome probabilities follow
//   p = Tr[ Choi (rho_prep^T (x) M_outcome) ]
// with the input factor first and the higher-indexed qubit as the left
// tensor slot.
inline Mat fit_choi(const std::vector<QptDataPoint>& data) {
    constexpr Eigen::Index d = 4, d2 = 16, n_params = d2 * d2;  // 256 real parameters
    if (data.empty()) throw ValidationError("fit_choi requires data");

    // Real parametrization of the Hermitian Choi matrix: diagonal entries,
    // then (re, im) of the upper triangle.
    std::vector<std::pair<int, int>> upper;
    for (int r = 0; r < d2; ++r)
        for (int c = r + 1; c < d2; ++c) upper.emplace_back(r, c);

    const std::size_t rows = data.size() * 4;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, n_params);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(rows);

    std::size_t row = 0;
    for (const auto& pt : data) {
        const Mat rho_p = kron(prep_state(pt.prep[1]), prep_state(pt.prep[0]));
        for (int outcome = 0; outcome < 4; ++outcome) {
            const Mat m_o = kron(meas_projector(pt.meas[1], (outcome >> 1) & 1),
                                 meas_projector(pt.meas[0], outcome & 1));
            const Mat x = kron(rho_p.transpose(), m_o);
            for (int r = 0; r < d2; ++r) a(row, r) = x(r, r).real();
            for (std::size_t k = 0; k < upper.size(); ++k) {
                const auto [r, c] = upper[k];
                a(row, d2 + 2 * k) = 2.0 * x(r, c).real();
                a(row, d2 + 2 * k + 1) = 2.0 * x(r, c).imag();
            }
            y(row) = pt.probs(outcome);
            if (pt.shots > 0) {
                const double p = std::min(std::max(pt.probs(outcome), 1e-3), 1.0 - 1e-3);
                w(row) = 1.0 / std::sqrt(p * (1.0 - p) / pt.shots);
            }
            ++row;
        }
    }

    const Eigen::MatrixXd aw = w.asDiagonal() * a;
    const Eigen::VectorXd yw = w.asDiagonal() * y;
    const Eigen::MatrixXd gram = aw.transpose() * aw;
    const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw NumericError("rank-deficient tomography design matrix");
    const Eigen::VectorXd x = solver.solve(aw.transpose() * yw);

    Mat choi = Mat::Zero(d2, d2);
    for (int r = 0; r < d2; ++r) choi(r, r) = x(r);
    for (std::size_t k = 0; k < upper.size(); ++k) {
        const auto [r, c] = upper[k];
        choi(r, c) = cxd(x(d2 + 2 * k), x(d2 + 2 * k + 1));
        choi(c, r) = std::conj(choi(r, c));
    }
    return project_cptp(choi);
}

// Exact (infinite-shot) QPT data for a channel given as a superoperator on
// the two-qubit space; useful as a fitting oracle.
inline std::vector<QptDataPoint> exact_qpt_data(const Mat& superop) {
    std::vector<QptDataPoint> data;
    for (int p_hi = 0; p_hi < 4; ++p_hi)
        for (int p_lo = 0; p_lo < 4; ++p_lo)
            for (int m_hi = 0; m_hi < 3; ++m_hi)
                for (int m_lo = 0; m_lo < 3; ++m_lo) {
                    QptDataPoint pt;
                    pt.prep = {p_lo, p_hi};
                    pt.meas = {m_lo, m_hi};
                    const Mat rho_in = kron(prep_state(p_hi), prep_state(p_lo));
                    const Mat rho_out = apply_superop(superop, rho_in);
                    for (int outcome = 0; outcome < 4; ++outcome) {
                        const Mat m_o = kron(meas_projector(m_hi, (outcome >> 1) & 1),
                                             meas_projector(m_lo, outcome & 1));
                        pt.probs(outcome) = (rho_out * m_o).trace().real();
                    }
                    data.push_back(pt);
                }
    return data;
}

}  // namespace pulseforge
