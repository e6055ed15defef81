#pragma once

// Dense complex linear algebra for the two-level pair.
//
// Product basis, qubit first, index = 2*q + m:
//   0: |0q 0m>   1: |0q 1m>   2: |1q 0m>   3: |1q 1m>
// The one-excitation subspace is spanned by indices 2 and 1, taken in the
// order (|1q 0m>, |0q 1m>).
//
// Density matrices are vectorized by column stacking, vec(A X B) =
// (B^T kron A) vec(X), which is also Eigen's native storage order.

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

namespace t1echo {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;
using SuperOp = Eigen::Matrix<cplx, 16, 16>;
using SuperVec = Eigen::Matrix<cplx, 16, 1>;
using MatX = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

namespace basis {
inline constexpr int kGround = 0;       // |0q 0m>
inline constexpr int kMemory = 1;       // |0q 1m>
inline constexpr int kQubit = 2;        // |1q 0m>
inline constexpr int kBoth = 3;         // |1q 1m>
inline constexpr int kSubspace[2] = {kQubit, kMemory};
} // namespace basis

namespace pauli {
Mat2 identity();
Mat2 x();
Mat2 y();
Mat2 z();
/// sigma_minus = |0><1|, lowers the excited state |1>.
Mat2 lower();
/// Projector on the excited state |1><1|.
Mat2 excited();
} // namespace pauli

/// Kronecker product, a acts on the left (more significant) factor.
MatX kron(const MatX& a, const MatX& b);
Mat4 kron(const Mat2& a, const Mat2& b);

/// Matrix exponential. Throws std::domain_error on non-finite input.
MatX expm(const MatX& m);
Mat2 expm(const Mat2& m);
Mat4 expm(const Mat4& m);
SuperOp expm(const SuperOp& m);

class PureState {
public:
    /// Normalizes within 1e-12 or throws std::invalid_argument.
    explicit PureState(const Vec4& amplitudes);

    static PureState basis_state(int index);

    const Vec4& amplitudes() const { return amps_; }
    cplx operator[](int i) const { return amps_(i); }
    Mat4 projector() const { return amps_ * amps_.adjoint(); }

private:
    Vec4 amps_;
};

struct StateCheck {
    double trace_error;
    double hermiticity_error;
    double min_eigenvalue;

    bool ok(double trace_tol = 1e-9, double herm_tol = 1e-10,
            double eig_tol = 1e-9) const {
        return trace_error < trace_tol && hermiticity_error < herm_tol &&
               min_eigenvalue > -eig_tol;
    }
};

/// Validity measures of an arbitrary square matrix read as a density matrix.
StateCheck check_state(const MatX& rho);

class DensityMatrix {
public:
    /// Throws std::invalid_argument when rho is not Hermitian, trace one and
    /// positive semidefinite within the default StateCheck tolerances.
    explicit DensityMatrix(const Mat4& rho);
    DensityMatrix(const PureState& psi);

    /// Skips validation; used on propagation results, which are checked
    /// separately where it matters.
    static DensityMatrix unchecked(const Mat4& rho);

    const Mat4& matrix() const { return rho_; }
    cplx operator()(int i, int j) const { return rho_(i, j); }
    StateCheck check() const { return check_state(rho_); }

private:
    struct Unchecked {};
    DensityMatrix(const Mat4& rho, Unchecked) : rho_(rho) {}
    Mat4 rho_;
};

/// Reduced qubit state, memory traced out.
Mat2 partial_trace_memory(const Mat4& rho);

SuperVec vectorize(const Mat4& m);
Mat4 unvectorize(const SuperVec& v);

struct CollapseOp {
    Mat4 op;
    double rate;
};

/// Column-stacked Lindblad generator
///   L = -i (I kron H - H^T kron I)
///       + sum rate * [conj(C) kron C - 1/2 (I kron C^dag C + (C^dag C)^T kron I)]
/// Throws std::invalid_argument on a negative rate.
SuperOp liouvillian(const Mat4& h, const std::vector<CollapseOp>& collapse_ops);

/// Same construction for an arbitrary dimension, n^2 x n^2 output.
MatX liouvillian(const MatX& h, const std::vector<std::pair<MatX, double>>& collapse_ops);

double max_abs(const MatX& m);

} // namespace t1echo
