#include "linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace t1echo {

namespace pauli {
Mat2 identity() { return Mat2::Identity(); }
Mat2 x() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}
Mat2 y() {
    Mat2 m;
    m << 0.0, -kI, kI, 0.0;
    return m;
}
Mat2 z() {
    Mat2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}
Mat2 lower() {
    Mat2 m;
    m << 0.0, 1.0, 0.0, 0.0;
    return m;
}
Mat2 excited() {
    Mat2 m;
    m << 0.0, 0.0, 0.0, 1.0;
    return m;
}
} // namespace pauli

MatX kron(const MatX& a, const MatX& b) {
    MatX out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
    return kron(MatX(a), MatX(b));
}

namespace {

template <typename M>
M checked_exp(const M& m) {
    if (!m.allFinite()) {
        throw std::domain_error("expm: non-finite matrix entry");
    }
    M out = m.exp();
    if (!out.allFinite()) {
        throw std::domain_error("expm: overflow");
    }
    return out;
}

} // namespace

MatX expm(const MatX& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("expm: matrix must be square");
    }
    return checked_exp(m);
}
Mat2 expm(const Mat2& m) { return checked_exp(m); }
Mat4 expm(const Mat4& m) { return checked_exp(m); }
SuperOp expm(const SuperOp& m) { return checked_exp(m); }

PureState::PureState(const Vec4& amplitudes) : amps_(amplitudes) {
    if (!amplitudes.allFinite()) {
        throw std::invalid_argument("PureState: non-finite amplitude");
    }
    if (std::abs(amplitudes.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("PureState: amplitudes not normalized");
    }
}

PureState PureState::basis_state(int index) {
    if (index < 0 || index > 3) {
        throw std::out_of_range("PureState: basis index out of range");
    }
    Vec4 v = Vec4::Zero();
    v(index) = 1.0;
    return PureState(v);
}

StateCheck check_state(const MatX& rho) {
    StateCheck c{};
    c.trace_error = std::abs(rho.trace() - cplx(1.0));
    c.hermiticity_error = max_abs(rho - rho.adjoint());
    const MatX herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<MatX> es(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

DensityMatrix::DensityMatrix(const Mat4& rho) : rho_(rho) {
    if (!rho.allFinite()) {
        throw std::invalid_argument("DensityMatrix: non-finite entry");
    }
    if (!check_state(rho).ok()) {
        throw std::invalid_argument("DensityMatrix: not a valid state");
    }
}

DensityMatrix::DensityMatrix(const PureState& psi) : rho_(psi.projector()) {}

DensityMatrix DensityMatrix::unchecked(const Mat4& rho) {
    return DensityMatrix(rho, Unchecked{});
}

Mat2 partial_trace_memory(const Mat4& rho) {
    Mat2 out = Mat2::Zero();
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int m = 0; m < 2; ++m) {
                out(a, b) += rho(2 * a + m, 2 * b + m);
            }
        }
    }
    return out;
}

SuperVec vectorize(const Mat4& m) {
    return Eigen::Map<const SuperVec>(m.data());
}

Mat4 unvectorize(const SuperVec& v) {
    return Eigen::Map<const Mat4>(v.data());
}

MatX liouvillian(const MatX& h, const std::vector<std::pair<MatX, double>>& collapse_ops) {
    const Eigen::Index n = h.rows();
    const MatX id = MatX::Identity(n, n);
    MatX out = -kI * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& [c, rate] : collapse_ops) {
        if (!(rate >= 0.0)) {
            throw std::invalid_argument("liouvillian: negative collapse rate");
        }
        if (rate == 0.0) {
            continue;
        }
        const MatX cdc = c.adjoint() * c;
        out += rate * (kron(c.conjugate(), c) -
                       0.5 * (kron(id, cdc) + kron(cdc.transpose(), id)));
    }
    return out;
}

SuperOp liouvillian(const Mat4& h, const std::vector<CollapseOp>& collapse_ops) {
    std::vector<std::pair<MatX, double>> ops;
    ops.reserve(collapse_ops.size());
    for (const auto& c : collapse_ops) {
        ops.emplace_back(MatX(c.op), c.rate);
    }
    return liouvillian(MatX(h), ops);
}

double max_abs(const MatX& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace t1echo
