#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include "pulseforge/errors.hpp"

namespace pulseforge {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Single-qubit Pauli matrices, indexed I=0, X=1, Y=2, Z=3.
inline const Mat& pauli(int k) {
    static const std::vector<Mat> p = [] {
        std::vector<Mat> v(4, Mat::Zero(2, 2));
        const cxd i(0, 1);
        v[0] << 1, 0, 0, 1;
        v[1] << 0, 1, 1, 0;
        v[2] << 0, -i, i, 0;
        v[3] << 1, 0, 0, -1;
        return v;
    }();
    return p[k];
}

inline int pauli_index(char c) {
    switch (c) {
        case 'I': case 'i': return 0;
        case 'X': case 'x': return 1;
        case 'Y': case 'y': return 2;
        case 'Z': case 'z': return 3;
        default: throw ValidationError(std::string("unknown Pauli letter '") + c + "'");
    }
}

// Operator for a Pauli string; the leftmost character acts on the
// highest-indexed qubit (qubit 0 is the least significant bit).
inline Mat pauli_string(const std::string& s) {
    Mat out = Mat::Identity(1, 1);
    for (char c : s) out = kron(out, pauli(pauli_index(c)));
    return out;
}

// Embed a 2x2 operator on qubit q of an n-qubit register.
inline Mat embed(const Mat& op, int q, int n_qubits) {
    Mat out = Mat::Identity(1, 1);
    for (int i = n_qubits - 1; i >= 0; --i) out = kron(out, i == q ? op : Mat::Identity(2, 2));
    return out;
}

// Column-stacking vectorization and its inverse.
inline Vec vec(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }
inline Mat unvec(const Vec& v, Eigen::Index d) { return Eigen::Map<const Mat>(v.data(), d, d); }

inline Mat dagger(const Mat& m) { return m.adjoint(); }

inline Mat expm(const Mat& m) { return m.exp(); }

// Principal matrix logarithm. Throws BranchCutError when an eigenvalue lies
// within `tol` of the negative real axis (rotation angle at or over pi).
inline Mat logm_principal(const Mat& m, double tol = 1e-10) {
    Eigen::ComplexEigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed in matrix log");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const cxd ev = es.eigenvalues()(i);
        if (ev.real() < 0.0 && std::abs(ev.imag()) < tol)
            throw BranchCutError("matrix log eigenvalue on the negative real axis; shorten the evolution time");
        if (std::abs(ev) < tol) throw BranchCutError("singular matrix has no logarithm");
    }
    return m.log();
}

// Hermitian part (A + A^dag)/2.
inline Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

// Partial trace of an (n-qubit x n-qubit) density matrix over all qubits
// except those in `keep` (ascending order). Qubit 0 is the LSB of the index.
inline Mat partial_trace_keep(const Mat& rho, const std::vector<int>& keep, int n_qubits) {
    const int k = static_cast<int>(keep.size());
    const Eigen::Index dk = Eigen::Index(1) << k;
    Mat out = Mat::Zero(dk, dk);
    const Eigen::Index dim = rho.rows();
    auto extract = [&](Eigen::Index full) {
        Eigen::Index r = 0;
        for (int b = 0; b < k; ++b) r |= ((full >> keep[b]) & 1) << b;
        return r;
    };
    auto rest_bits = [&](Eigen::Index full) {
        Eigen::Index r = 0, shift = 0;
        for (int b = 0; b < n_qubits; ++b) {
            bool kept = false;
            for (int q : keep) kept |= (q == b);
            if (!kept) { r |= ((full >> b) & 1) << shift; ++shift; }
        }
        return r;
    };
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            if (rest_bits(i) == rest_bits(j)) out(extract(i), extract(j)) += rho(i, j);
    return out;
}

// Euclidean projection of a real vector onto the probability simplex.
inline RVec project_simplex(RVec v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0, theta = 0.0;
    int rho = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        cum += u[i];
        const double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0) { rho = static_cast<int>(i + 1); theta = t; }
    }
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::max(v(i) - theta, 0.0);
    return v;
}

}  // namespace pulseforge
