#include "tomography.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace t1echo {

const std::array<Mat2, 4>& chi_basis() {
    static const std::array<Mat2, 4> b{pauli::identity(), pauli::x(), pauli::y(), pauli::z()};
    return b;
}

ChiMatrix chi_analytic(double gamma_plus, double epsilon, double t) {
    const double e = std::exp(-gamma_plus * t);
    const double h = std::exp(-0.5 * gamma_plus * t);
    const double c = std::cos(epsilon * t);
    const double s = std::sin(epsilon * t);
    ChiMatrix chi = ChiMatrix::Zero();
    chi(0, 0) = 1.0 + e - 2.0 * h * c;
    chi(0, 3) = cplx(1.0 - e, -2.0 * h * s);
    chi(1, 1) = 1.0 - e;
    chi(1, 2) = cplx(0.0, -(1.0 - e));
    chi(2, 1) = cplx(0.0, 1.0 - e);
    chi(2, 2) = 1.0 - e;
    chi(3, 0) = cplx(1.0 - e, 2.0 * h * s);
    chi(3, 3) = 1.0 + e + 2.0 * h * c;
    return 0.25 * chi;
}

namespace {

Mat2 unit(int i, int j) {
    Mat2 m = Mat2::Zero();
    m(i, j) = 1.0;
    return m;
}

Mat2 projector(cplx a, cplx b) {
    Eigen::Vector2cd v(a, b);
    v.normalize();
    return v * v.adjoint();
}

} // namespace

ChiMatrix chi_from_channel(const QubitChannel& channel) {
    const double r = 1.0 / std::sqrt(2.0);
    const Mat2 out0 = channel(projector(1.0, 0.0));
    const Mat2 out1 = channel(projector(0.0, 1.0));
    const Mat2 out_plus = channel(projector(r, r));
    const Mat2 out_plus_i = channel(projector(r, kI * r));

    // images of the matrix units |i><j|
    std::array<Mat2, 4> images;
    images[0] = out0;
    images[3] = out1;
    images[1] = out_plus + kI * out_plus_i - 0.5 * (1.0 + kI) * (out0 + out1);
    images[2] = out_plus - kI * out_plus_i - 0.5 * (1.0 - kI) * (out0 + out1);
    const std::array<Mat2, 4> inputs{unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)};

    // rows: (input j, output entry k); columns: (m, n)
    Eigen::Matrix<cplx, 16, 16> beta;
    Eigen::Matrix<cplx, 16, 1> lambda;
    const auto& e = chi_basis();
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
            const int row = 4 * j + k;
            lambda(row) = images[j](k % 2, k / 2);
            for (int m = 0; m < 4; ++m) {
                for (int n = 0; n < 4; ++n) {
                    const Mat2 term = e[m] * inputs[j] * e[n].adjoint();
                    beta(row, 4 * m + n) = term(k % 2, k / 2);
                }
            }
        }
    }
    Eigen::FullPivLU<Eigen::Matrix<cplx, 16, 16>> lu(beta);
    if (!lu.isInvertible()) {
        throw std::logic_error("chi_from_channel: tomography system is singular");
    }
    const Eigen::Matrix<cplx, 16, 1> flat = lu.solve(lambda);
    ChiMatrix chi;
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            chi(m, n) = flat(4 * m + n);
        }
    }
    return chi;
}

ChiMatrix chi_from_kraus(const std::vector<Mat2>& kraus) {
    const auto& e = chi_basis();
    ChiMatrix chi = ChiMatrix::Zero();
    for (const auto& k : kraus) {
        Eigen::Vector4cd c;
        for (int m = 0; m < 4; ++m) {
            c(m) = 0.5 * (e[m].adjoint() * k).trace();
        }
        chi += c * c.adjoint();
    }
    return chi;
}

Mat2 apply_chi(const ChiMatrix& chi, const Mat2& rho) {
    const auto& e = chi_basis();
    Mat2 out = Mat2::Zero();
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            out += chi(m, n) * e[m] * rho * e[n].adjoint();
        }
    }
    return out;
}

Mat2 trace_condition(const ChiMatrix& chi) {
    const auto& e = chi_basis();
    Mat2 out = Mat2::Zero();
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            out += chi(m, n) * e[n].adjoint() * e[m];
        }
    }
    return out;
}

ChiCheck check_chi(const ChiMatrix& chi) {
    ChiCheck c{};
    c.hermiticity_error = max_abs(chi - chi.adjoint());
    c.min_diagonal = chi.diagonal().real().minCoeff();
    c.diagonal_sum_error = std::abs(chi.trace() - cplx(1.0));
    c.trace_condition_error = max_abs(trace_condition(chi) - Mat2::Identity());
    return c;
}

QubitChannel sequence_channel(const TomographySetup& setup) {
    const PulseSchedule schedule =
        echo_schedule(setup.params, setup.free_time, setup.sequence);
    const double angle = setup.epsilon * schedule.duration();
    Mat2 lab = Mat2::Identity();
    if (angle != 0.0) {
        lab(0, 0) = std::exp(-0.5 * kI * angle);
        lab(1, 1) = std::exp(0.5 * kI * angle);
    }
    auto cache = std::make_shared<PropagatorCache>(setup.params.v_perp(), setup.model, setup.noise);
    return [schedule, lab, cache](const Mat2& rho_q) {
        const Mat4 rho = kron(rho_q, Mat2(pauli::identity() - pauli::excited()));
        const DensityMatrix out = propagate(schedule, DensityMatrix::unchecked(rho), *cache);
        return Mat2(lab * partial_trace_memory(out.matrix()) * lab.adjoint());
    };
}

ChiMatrix chi_reconstruct(const TomographySetup& setup) {
    return chi_from_channel(sequence_channel(setup));
}

double process_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
    const double ab = (a * b).trace().real();
    const double aa = (a * a).trace().real();
    const double bb = (b * b).trace().real();
    if (aa <= 0.0 || bb <= 0.0) {
        return 0.0;
    }
    return std::clamp(ab / std::sqrt(aa * bb), 0.0, 1.0);
}

} // namespace t1echo
