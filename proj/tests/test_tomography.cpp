#include <doctest.h>

#include "test_util.hpp"
#include "tomography.hpp"

#include <cmath>

using namespace t1echo;
namespace tt = t1echo::testing;

namespace {

std::vector<Mat2> amplitude_damping(double p) {
    Mat2 k0 = Mat2::Zero();
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - p);
    Mat2 k1 = Mat2::Zero();
    k1(0, 1) = std::sqrt(p);
    return {k0, k1};
}

Mat2 rz(double angle) {
    Mat2 r = Mat2::Zero();
    r(0, 0) = std::exp(-0.5 * kI * angle);
    r(1, 1) = std::exp(0.5 * kI * angle);
    return r;
}

QubitChannel kraus_channel(const std::vector<Mat2>& kraus) {
    return [kraus](const Mat2& rho) {
        Mat2 out = Mat2::Zero();
        for (const auto& k : kraus) {
            out += k * rho * k.adjoint();
        }
        return out;
    };
}

TomographySetup relaxation_setup(double dw, double t, double eps = 0.0) {
    return {SystemParams(5.0, dw), NoiseRates{1.0, 0.0, 0.0, 0.0}, NoiseModel::SecularDressed, {}, t, eps};
}

} // namespace

TEST_CASE("identity channel") {
    const ChiMatrix chi = chi_from_channel([](const Mat2& r) { return r; });
    CHECK(std::abs(chi(0, 0) - 1.0) < 1e-14);
    CHECK(max_abs(chi) == doctest::Approx(1.0));
}

TEST_CASE("Pauli channels land on the diagonal") {
    const auto& e = chi_basis();
    for (int k = 0; k < 4; ++k) {
        const ChiMatrix chi = chi_from_channel([&](const Mat2& r) { return Mat2(e[k] * r * e[k]); });
        CHECK(std::abs(chi(k, k) - 1.0) < 1e-14);
        CHECK(std::abs(chi.trace() - 1.0) < 1e-14);
    }
}

TEST_CASE("analytic chi at t = 0 is a Z gate") {
    const ChiMatrix chi = chi_analytic(0.5, 3.0, 0.0);
    CHECK(std::abs(chi(3, 3) - 1.0) < 1e-15);
    CHECK(max_abs(chi - chi_from_kraus({pauli::z()})) < 1e-15);
}

TEST_CASE("analytic chi equals Z after Rz after amplitude damping") {
    for (double gp : {0.0, 0.5, 1.3}) {
        for (double eps : {0.0, 1.0, -2.5}) {
            for (double t : {0.2, 1.0, 3.0}) {
                std::vector<Mat2> kraus;
                for (const auto& k : amplitude_damping(1.0 - std::exp(-gp * t))) {
                    kraus.push_back(pauli::z() * rz(eps * t) * k);
                }
                CHECK(max_abs(chi_analytic(gp, eps, t) - chi_from_kraus(kraus)) < 1e-12);
                CHECK(max_abs(chi_analytic(gp, eps, t) - chi_from_channel(kraus_channel(kraus))) < 1e-12);
            }
        }
    }
}

TEST_CASE("property: analytic chi satisfies the process invariants") {
    for (int trial = 0; trial < 50; ++trial) {
        const ChiCheck c = check_chi(chi_analytic(tt::uniform(0, 3), tt::uniform(-5, 5), tt::uniform(0, 10)));
        CHECK(c.hermiticity_error < 1e-14);
        CHECK(c.min_diagonal >= -1e-14);
        CHECK(c.diagonal_sum_error < 1e-14);
        CHECK(c.trace_condition_error < 1e-14);
    }
}

TEST_CASE("property: tomography is linear in the channel") {
    for (int trial = 0; trial < 10; ++trial) {
        const double w = tt::uniform(0, 1);
        const auto a = amplitude_damping(tt::uniform(0, 1));
        const std::vector<Mat2> b{Mat2(tt::random_matrix(2))};
        const auto ca = kraus_channel(a);
        const auto cb = kraus_channel(b);
        const ChiMatrix mix =
            chi_from_channel([&](const Mat2& r) { return Mat2(w * ca(r) + (1 - w) * cb(r)); });
        CHECK(max_abs(mix - (w * chi_from_channel(ca) + (1 - w) * chi_from_channel(cb))) < 1e-12);
    }
}

TEST_CASE("apply_chi reproduces the channel") {
    const auto k = amplitude_damping(0.3);
    const ChiMatrix chi = chi_from_kraus(k);
    for (int trial = 0; trial < 5; ++trial) {
        const Mat2 a = tt::random_matrix(2);
        CHECK(max_abs(apply_chi(chi, a) - kraus_channel(k)(a)) < 1e-14);
    }
}

TEST_CASE("reconstructed sequence channel matches the closed form") {
    for (double dw : {0.0, 5.0}) {
        for (double t : {0.2, 1.0, 3.0}) {
            for (double eps : {0.0, 3.0}) {
                const ChiMatrix chi = chi_reconstruct(relaxation_setup(dw, t, eps));
                CHECK(max_abs(chi - chi_analytic(0.5, eps, t)) < 1e-9);
                CHECK(process_fidelity(chi, chi_analytic(0.5, eps, t)) > 0.999);
            }
        }
    }
}

TEST_CASE("property: reconstructed chi is trace preserving") {
    for (int trial = 0; trial < 6; ++trial) {
        TomographySetup s{SystemParams(tt::uniform(1, 8), tt::uniform(-5, 5)),
                          NoiseRates{tt::uniform(0, 2), tt::uniform(0, 1), tt::uniform(0, 1), 0.0},
                          trial % 2 ? NoiseModel::LindbladLocal : NoiseModel::SecularDressed,
                          {PulseMode::Hamiltonian, true, ClampedPulse::Clamp},
                          tt::uniform(0, 3),
                          0.0};
        const ChiCheck c = check_chi(chi_reconstruct(s));
        CHECK(c.hermiticity_error < 1e-10);
        CHECK(c.diagonal_sum_error < 1e-10);
        CHECK(c.trace_condition_error < 1e-10);
        CHECK(c.min_diagonal > -1e-10);
    }
}

TEST_CASE("noiseless sequence is a Z gate") {
    TomographySetup s = relaxation_setup(2.0, 1.7);
    s.noise = NoiseRates::none();
    const ChiMatrix chi = chi_reconstruct(s);
    CHECK(std::abs(chi(3, 3) - 1.0) < 1e-10);
}

TEST_CASE("process fidelity") {
    const ChiMatrix a = chi_analytic(0.5, 0.0, 1.0);
    CHECK(process_fidelity(a, a) == doctest::Approx(1.0));
    const ChiMatrix x = chi_from_kraus({pauli::x()});
    const ChiMatrix z = chi_from_kraus({pauli::z()});
    CHECK(process_fidelity(x, z) == 0.0);
    CHECK(process_fidelity(ChiMatrix::Zero(), z) == 0.0);
}
