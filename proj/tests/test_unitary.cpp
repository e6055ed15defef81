#include <doctest.h>

#include "test_util.hpp"
#include "unitary.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace t1echo;
namespace tt = t1echo::testing;
using std::numbers::pi;

namespace {

Mat2 subspace_block(const Mat4& m) {
    Mat2 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out(i, j) = m(basis::kSubspace[i], basis::kSubspace[j]);
        }
    }
    return out;
}

SystemParams params_for_angle(double xi, double w0 = 5.0) {
    return SystemParams(w0 * std::sin(xi), w0 * std::cos(xi));
}

} // namespace

TEST_CASE("Hamiltonian is Hermitian, traceless and excitation conserving") {
    const Mat4 h = hamiltonian(SystemParams(5.0, 2.0));
    CHECK(max_abs(h - h.adjoint()) == 0.0);
    CHECK(std::abs(h.trace()) < 1e-15);
    CHECK(h.row(basis::kGround).norm() == 0.0);
    CHECK(h.row(basis::kBoth).norm() == 0.0);
    const Eigen::SelfAdjointEigenSolver<Mat4> es(h);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-0.5 * std::hypot(5.0, 2.0)));
}

TEST_CASE("closed-form propagator matches the exponential of H") {
    for (double dw : {-7.0, -1.0, 0.0, 0.3, 5.0, 40.0}) {
        const SystemParams p(5.0, dw);
        for (double t : {0.0, 0.1, 1.3, 10.0}) {
            const Mat4 ref = expm(Mat4(-kI * hamiltonian(p) * t));
            CHECK(max_abs(embed(free_propagator(t, p)) - ref) < 1e-12);
        }
    }
}

TEST_CASE("resonant free evolution swaps after t_swap") {
    const SystemParams p(5.0, 0.0);
    const Mat2 u = free_propagator(pi / 5.0, p);
    CHECK(std::abs(std::abs(u(1, 0)) - 1.0) < 1e-15);
    CHECK(std::abs(u(0, 0)) < 1e-15);
}

TEST_CASE("echo pulse squares to minus the identity") {
    for (double dw : {-5.0, 0.0, 1.0, 15.0}) {
        const Mat2 u = echo_pulse(SystemParams(5.0, dw));
        CHECK(max_abs(u * u + Mat2::Identity()) < 1e-15);
        CHECK(max_abs(u * u.adjoint() - Mat2::Identity()) < 1e-15);
    }
}

TEST_CASE("property: echo identity over a grid of angles and times") {
    for (int i = 0; i < 20; ++i) {
        const double xi = pi * (i + 0.5) / 20.0;
        const SystemParams p = params_for_angle(xi);
        const Mat2 pulse = echo_pulse(p);
        for (int j = 0; j < 10; ++j) {
            const double t = 0.37 * j;
            const Mat2 half = free_propagator(0.5 * t, p);
            CHECK((half * pulse * half - pulse).norm() < 1e-12);
        }
    }
}

TEST_CASE("full sequence is minus the identity on the subspace") {
    for (double dw : {0.0, 2.0, -9.0}) {
        const SystemParams p(5.0, dw);
        for (double t : {0.0, 0.9, 3.3}) {
            const auto sched = echo_schedule(p, t);
            Mat4 total = Mat4::Identity();
            for (const auto& s : sched.segments()) {
                total = segment_unitary(s, sched.v_perp()) * total;
            }
            CHECK(max_abs(subspace_block(total) + Mat2::Identity()) < 1e-12);
            CHECK(std::abs(total(basis::kGround, basis::kGround) - 1.0) < 1e-15);
        }
    }
}

TEST_CASE("state before recovery is independent of T") {
    const SequenceOptions no_recovery{PulseMode::Ideal, false, ClampedPulse::Clamp};
    const auto psi0 = PureState::basis_state(basis::kQubit);
    for (double xi : {0.3, pi / 4, pi / 2, 2.0}) {
        const SystemParams p = params_for_angle(xi);
        for (double t : {0.0, 0.5, 2.0, 7.1}) {
            const BlochVector b = state_to_bloch(run_schedule(echo_schedule(p, t, no_recovery), psi0));
            CHECK(std::abs(b.y) < 1e-12);
            CHECK(std::abs(b.z + std::cos(2 * xi)) < 1e-12);
            CHECK(std::abs(b.norm() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("pulse and free axes are perpendicular") {
    for (double dw : {-20.0, -1.0, 0.0, 1.0, 5.0, 20.0}) {
        const SystemParams p(5.0, dw);
        const BlochVector free_axis = rotation_axis(free_propagator(0.1, p));
        const BlochVector pulse_axis = rotation_axis(echo_pulse(p));
        CHECK(std::abs(free_axis.dot(pulse_axis)) < 1e-12);
        CHECK(std::abs(free_axis.y) < 1e-12);
        CHECK(std::abs(pulse_axis.y) < 1e-12);
    }
}

TEST_CASE("Hamiltonian pulse equals the ideal pulse up to phase") {
    for (double ratio : {0.2, 0.5, 1.0, 2.0, 5.0, 20.0}) {
        for (double sign : {-1.0, 1.0}) {
            const SystemParams p(5.0, sign * ratio * 5.0);
            CHECK(phase_aligned_distance(pulse_via_detuning(p), echo_pulse(p)) < 1e-12);
        }
    }
}

TEST_CASE("clamped pulse misses by a small angle") {
    const SystemParams p(5.0, 0.0);
    const double d = phase_aligned_distance(pulse_via_detuning(p), echo_pulse(p));
    CHECK(d > 1e-3);
    CHECK(d < 0.05);
}

TEST_CASE("phase aligned distance ignores global phase") {
    const Mat2 u = free_propagator(0.4, 5.0, 1.0);
    CHECK(phase_aligned_distance(u, std::exp(kI * 1.3) * u) < 1e-14);
    CHECK(phase_aligned_distance(u, Mat2(-u)) < 1e-14);
}

TEST_CASE("property: free propagator is a one-parameter group") {
    for (int trial = 0; trial < 30; ++trial) {
        const double v = tt::uniform(0.1, 10.0);
        const double dw = tt::uniform(-10.0, 10.0);
        const double s = tt::uniform(0.0, 3.0);
        const double t = tt::uniform(0.0, 3.0);
        const Mat2 lhs = free_propagator(s, v, dw) * free_propagator(t, v, dw);
        CHECK(max_abs(lhs - free_propagator(s + t, v, dw)) < 1e-12);
    }
}

TEST_CASE("schedule layout") {
    const SystemParams p(5.0, 5.0);
    const auto ideal = echo_schedule(p, 2.0);
    REQUIRE(ideal.segments().size() == 4);
    CHECK(ideal.duration() == 2.0);
    CHECK(std::holds_alternative<IdealGate>(ideal.segments()[1]));

    const auto ham = echo_schedule(p, 2.0, {PulseMode::Hamiltonian, true, ClampedPulse::Clamp});
    CHECK(ham.duration() == doctest::Approx(2.0 + 2.0 * pi / std::sqrt(50.0)));

    const auto none = echo_schedule(p, 2.0, {PulseMode::None, true, ClampedPulse::Clamp});
    CHECK(none.segments().size() == 1);

    const SystemParams res(5.0, 0.0);
    const auto z = echo_schedule(res, 1.0, {PulseMode::Hamiltonian, true, ClampedPulse::IdealZ});
    CHECK(std::holds_alternative<IdealGate>(z.segments()[1]));
    CHECK(pulses_only_schedule(p, {}).segments().size() == 2);
}

TEST_CASE("schedule validation") {
    CHECK_THROWS_AS(PulseSchedule(0.0), std::invalid_argument);
    CHECK_THROWS_AS(PulseSchedule(1.0, {FreeSegment{-1.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(PulseSchedule(1.0, {FreeSegment{1.0, INFINITY}}), std::invalid_argument);
    CHECK_THROWS_AS(PulseSchedule(1.0, {IdealGate{Mat2::Constant(1.0)}}), std::invalid_argument);
    CHECK_THROWS_AS(echo_schedule(SystemParams(1.0, 0.0), -0.1), std::invalid_argument);
}

TEST_CASE("bloch mapping of basis states") {
    const auto up = state_to_bloch(PureState::basis_state(basis::kQubit));
    CHECK(up.z == 1.0);
    const auto down = state_to_bloch(PureState::basis_state(basis::kMemory));
    CHECK(down.z == -1.0);
    CHECK_THROWS_AS(state_to_bloch(PureState::basis_state(basis::kGround)), std::domain_error);
    Vec4 v = Vec4::Zero();
    v(basis::kQubit) = 1.0 / std::sqrt(2.0);
    v(basis::kMemory) = kI / std::sqrt(2.0);
    const auto b = state_to_bloch(PureState(v));
    CHECK(std::abs(b.x) < 1e-15);
    CHECK(std::abs(std::abs(b.y) - 1.0) < 1e-15);
}

TEST_CASE("trajectory sampling") {
    const SystemParams p(5.0, 0.0);
    const double t = 2 * pi / (3 * 5.0);
    const auto sched = echo_schedule(p, t, {PulseMode::Ideal, false, ClampedPulse::Clamp});
    const auto pts = trajectory(sched, PureState::basis_state(basis::kQubit), 0.01);
    REQUIRE(!pts.empty());
    CHECK(pts.front().time == 0.0);
    CHECK(pts.front().bloch.z == 1.0);
    CHECK(pts.back().time == doctest::Approx(t));
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].time >= pts[i - 1].time);
        CHECK(std::abs(pts[i].bloch.norm() - 1.0) < 1e-12);
        CHECK(std::abs(pts[i].p_excited_qubit - 0.5 * (1.0 + pts[i].bloch.z)) < 1e-12);
    }
    // the final state is the T-independent one, z = -cos(2 xi) = 1 at resonance
    CHECK(std::abs(pts.back().bloch.z - 1.0) < 1e-12);
    CHECK_THROWS_AS(trajectory(sched, PureState::basis_state(basis::kQubit), 0.0), std::invalid_argument);
}

TEST_CASE("trajectory with recovery returns to the start") {
    const SystemParams p(5.0, -5.0);
    const double t = 2 * pi / std::hypot(5.0, 5.0);
    const auto pts = trajectory(echo_schedule(p, t), PureState::basis_state(basis::kQubit), 0.02);
    CHECK(std::abs(pts.back().bloch.z - 1.0) < 1e-12);
    CHECK(pts.back().p_excited_qubit == doctest::Approx(1.0));
}
