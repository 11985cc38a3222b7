#pragma once

// Quantum channel representations and conversions.
//
// Conventions used throughout:
//  - column-stacking vectorization |rho>> = vec(rho), so vec(A rho B) =
//    (B^T (x) A) vec(rho) and the superoperator of a unitary U is
//    conj(U) (x) U
//  - Choi matrix with the input system first:
//    Choi = sum_ij |i><j| (x) E(|i><j|), trace-preserving iff the partial
//    trace over the output factor equals the identity

#include <random>

#include "pulseforge/linalg.hpp"

namespace pulseforge {

inline Mat unitary_superop(const Mat& u) { return kron(u.conjugate(), u); }

// Superoperator of the Hamiltonian part of the Lindblad generator,
// S = -i (I (x) H - H^T (x) I).
inline Mat hamiltonian_superop(const Mat& h) {
    const Eigen::Index d = h.rows();
    const Mat id = Mat::Identity(d, d);
    return cxd(0, -1) * (kron(id, h) - kron(h.transpose(), id));
}

// Superoperator of a single dissipation term
// D(rho) = gamma (A rho A^dag - 1/2 {A^dag A, rho}).
inline Mat dissipator_superop(const Mat& a, double gamma) {
    const Eigen::Index d = a.rows();
    const Mat id = Mat::Identity(d, d);
    const Mat ada = a.adjoint() * a;
    return gamma * (kron(a.conjugate(), a) - 0.5 * kron(id, ada) - 0.5 * kron(ada.transpose(), id));
}

// Reshuffle between the superoperator and Choi representations.
// Choi[(i,m),(j,n)] = S[(m,n),(i,j)] with row index i*d+m, vec index m+d*n.
inline Mat superop_to_choi(const Mat& s) {
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(s.rows()))));
    if (d * d != s.rows() || s.rows() != s.cols()) throw ValidationError("superoperator must be d^2 x d^2");
    Mat choi(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index m = 0; m < d; ++m)
            for (Eigen::Index j = 0; j < d; ++j)
                for (Eigen::Index n = 0; n < d; ++n)
                    choi(i * d + m, j * d + n) = s(m + d * n, i + d * j);
    return choi;
}

inline Mat choi_to_superop(const Mat& choi) {
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(choi.rows()))));
    if (d * d != choi.rows() || choi.rows() != choi.cols()) throw ValidationError("Choi matrix must be d^2 x d^2");
    Mat s(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index m = 0; m < d; ++m)
            for (Eigen::Index j = 0; j < d; ++j)
                for (Eigen::Index n = 0; n < d; ++n)
                    s(m + d * n, i + d * j) = choi(i * d + m, j * d + n);
    return s;
}

inline Mat choi_of_unitary(const Mat& u) { return superop_to_choi(unitary_superop(u)); }

// Apply a channel in superoperator form to a density matrix.
inline Mat apply_superop(const Mat& s, const Mat& rho) { return unvec(s * vec(rho), rho.rows()); }

// Partial trace of a Choi matrix over its output factor (input is the
// first tensor slot). Trace preservation means this equals the identity.
inline Mat choi_output_trace(const Mat& choi) {
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(choi.rows()))));
    Mat out = Mat::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index m = 0; m < d; ++m) out(i, j) += choi(i * d + m, j * d + m);
    return out;
}

inline bool is_trace_preserving(const Mat& superop, double tol = 1e-6) {
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(superop.rows()))));
    const Vec id = vec(Mat::Identity(d, d));
    return (superop.adjoint() * id - id).norm() < tol * std::sqrt(static_cast<double>(d));
}

// Hermitian square root via eigendecomposition (negative eigenvalues clipped).
inline Mat psd_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m));
    RVec ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double state_fidelity(const Mat& rho, const Mat& sigma) {
    const Mat sr = psd_sqrt(rho);
    const Mat inner = psd_sqrt(sr * sigma * sr);
    const double t = inner.trace().real();
    return t * t;
}

// Process fidelity between two channels given as Choi matrices: the state
// fidelity of Choi/d. For unitary channels this reduces to |Tr(U^dag V)/d|^2.
inline double process_fidelity(const Mat& choi_a, const Mat& choi_b) {
    const auto d = static_cast<double>(std::lround(std::sqrt(static_cast<double>(choi_a.rows()))));
    return state_fidelity(choi_a / d, choi_b / d);
}

// Process fidelity of a channel (superoperator) against a target unitary:
// F_pro = Tr[S_U^dag S_E] / d^2.
inline double process_fidelity_to_unitary(const Mat& superop, const Mat& u) {
    const double d = static_cast<double>(u.rows());
    const cxd t = (unitary_superop(u).adjoint() * superop).trace();
    return t.real() / (d * d);
}

// Project a Hermitian matrix onto the PSD cone (eigenvalue clipping).
inline Mat project_psd(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m));
    RVec ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Orthogonal projection of a Choi matrix onto the trace-preserving affine
// subspace: Tr_out Choi = I.
inline Mat project_tp(const Mat& choi) {
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(choi.rows()))));
    const Mat defect = (choi_output_trace(choi) - Mat::Identity(d, d)) / static_cast<double>(d);
    return choi - kron(defect, Mat::Identity(d, d));
}

// Alternating projection onto {PSD} and {TP}; at most max_iter sweeps,
// stopping when the Frobenius update drops below tol.
inline Mat project_cptp(Mat choi, int max_iter = 500, double tol = 1e-10) {
    for (int it = 0; it < max_iter; ++it) {
        const Mat next = project_tp(project_psd(choi));
        const double delta = (next - choi).norm();
        choi = next;
        if (delta < tol) break;
    }
    return choi;
}

// Haar-random unitary via QR of a complex Ginibre matrix.
inline Mat random_unitary(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Mat g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cxd(nd(rng), nd(rng));
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
    return q;
}

}  // namespace pulseforge
