#include "unitary.hpp"

#include <cmath>
#include <stdexcept>

namespace t1echo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_duration(double d) {
    if (!std::isfinite(d) || d < 0.0) {
        throw std::invalid_argument("schedule: segment duration must be finite and >= 0");
    }
}

} // namespace

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

Mat4 hamiltonian(const SystemParams& params, std::optional<double> detuning_override) {
    const double dw = detuning_override.value_or(params.delta_omega());
    const double v = params.v_perp();
    Mat4 h = Mat4::Zero();
    h(basis::kQubit, basis::kQubit) = -0.5 * dw;
    h(basis::kMemory, basis::kMemory) = 0.5 * dw;
    h(basis::kQubit, basis::kMemory) = 0.5 * v;
    h(basis::kMemory, basis::kQubit) = 0.5 * v;
    return h;
}

SubspaceUnitary free_propagator(double t, double v_perp, double detuning) {
    const double w0 = std::hypot(v_perp, detuning);
    const double xi = detuning_angle(v_perp, detuning);
    const double c = std::cos(xi);
    const double s = std::sin(xi);
    Mat2 axis;
    axis << -c, s, s, c;
    return std::cos(0.5 * w0 * t) * Mat2::Identity() - kI * std::sin(0.5 * w0 * t) * axis;
}

SubspaceUnitary free_propagator(double t, const SystemParams& params) {
    return free_propagator(t, params.v_perp(), params.delta_omega());
}

SubspaceUnitary echo_pulse(const SystemParams& params) {
    const double xi = detuning_angle(params.v_perp(), params.delta_omega());
    const double c = std::cos(xi);
    const double s = std::sin(xi);
    Mat2 m;
    m << s, c, c, -s;
    return kI * m;
}

SubspaceUnitary pulse_via_detuning(const SystemParams& params) {
    const DerivedParams d = derive(params, NoiseRates::none());
    return free_propagator(d.t_pi, params.v_perp(), d.delta_omega_1);
}

Mat4 embed(const SubspaceUnitary& u) {
    Mat4 out = Mat4::Identity();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out(basis::kSubspace[i], basis::kSubspace[j]) = u(i, j);
        }
    }
    return out;
}

double phase_aligned_distance(const MatX& a, const MatX& b) {
    const cplx overlap = (b.adjoint() * a).trace();
    const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0);
    return (a - phase * b).norm();
}

BlochVector rotation_axis(const SubspaceUnitary& u) {
    const Mat2 su = u / std::sqrt(u.determinant());
    // su = cos(a) I - i sin(a) n.sigma  =>  i tr(su sigma_k) / 2 = sin(a) n_k
    auto component = [&](const Mat2& sigma) { return (0.5 * kI * (su * sigma).trace()).real(); };
    BlochVector n{component(pauli::x()), component(pauli::y()), component(pauli::z())};
    const double len = n.norm();
    if (len < 1e-14) {
        return {};
    }
    return {n.x / len, n.y / len, n.z / len};
}

PulseSchedule::PulseSchedule(double v_perp, std::vector<Segment> segments)
    : v_perp_(v_perp), segments_(std::move(segments)) {
    if (!std::isfinite(v_perp) || v_perp <= 0.0) {
        throw std::invalid_argument("schedule: v_perp must be > 0");
    }
    for (const auto& seg : segments_) {
        std::visit(overloaded{
                       [](const FreeSegment& s) {
                           require_duration(s.duration);
                           if (!std::isfinite(s.detuning)) {
                               throw std::invalid_argument("schedule: non-finite detuning");
                           }
                       },
                       [](const DetunedPulse& s) {
                           require_duration(s.duration);
                           if (!std::isfinite(s.detuning)) {
                               throw std::invalid_argument("schedule: non-finite detuning");
                           }
                       },
                       [](const IdealGate& g) {
                           if (!g.unitary.allFinite() ||
                               max_abs(g.unitary * g.unitary.adjoint() - Mat2::Identity()) > 1e-10) {
                               throw std::invalid_argument("schedule: gate is not unitary");
                           }
                       },
                   },
                   seg);
    }
}

double PulseSchedule::duration() const {
    double total = 0.0;
    for (const auto& seg : segments_) {
        std::visit(overloaded{
                       [&](const FreeSegment& s) { total += s.duration; },
                       [&](const DetunedPulse& s) { total += s.duration; },
                       [](const IdealGate&) {},
                   },
                   seg);
    }
    return total;
}

namespace {

std::optional<Segment> pulse_segment(const SystemParams& params, const SequenceOptions& options) {
    switch (options.pulses) {
    case PulseMode::None:
        return std::nullopt;
    case PulseMode::Ideal:
        return IdealGate{echo_pulse(params)};
    case PulseMode::Hamiltonian: {
        const DerivedParams d = derive(params, NoiseRates::none());
        if (d.clamp_engaged && options.clamped == ClampedPulse::IdealZ) {
            return IdealGate{echo_pulse(params)};
        }
        return DetunedPulse{d.t_pi, d.delta_omega_1};
    }
    }
    return std::nullopt;
}

} // namespace

PulseSchedule echo_schedule(const SystemParams& params, double free_time,
                            const SequenceOptions& options) {
    if (!std::isfinite(free_time) || free_time < 0.0) {
        throw std::invalid_argument("echo_schedule: free time must be >= 0");
    }
    const double dw = params.delta_omega();
    const auto pulse = pulse_segment(params, options);
    if (!pulse) {
        return PulseSchedule(params.v_perp(), {FreeSegment{free_time, dw}});
    }
    std::vector<Segment> segs{FreeSegment{0.5 * free_time, dw}, *pulse,
                              FreeSegment{0.5 * free_time, dw}};
    if (options.recovery) {
        segs.push_back(*pulse);
    }
    return PulseSchedule(params.v_perp(), std::move(segs));
}

PulseSchedule pulses_only_schedule(const SystemParams& params, const SequenceOptions& options) {
    const auto pulse = pulse_segment(params, options);
    if (!pulse) {
        return PulseSchedule(params.v_perp());
    }
    return PulseSchedule(params.v_perp(), {*pulse, *pulse});
}

Mat4 segment_unitary(const Segment& segment, double v_perp) {
    return std::visit(overloaded{
                          [&](const FreeSegment& s) {
                              return embed(free_propagator(s.duration, v_perp, s.detuning));
                          },
                          [&](const DetunedPulse& s) {
                              return embed(free_propagator(s.duration, v_perp, s.detuning));
                          },
                          [](const IdealGate& g) { return embed(g.unitary); },
                      },
                      segment);
}

PureState run_schedule(const PulseSchedule& schedule, const PureState& psi0) {
    Vec4 psi = psi0.amplitudes();
    for (const auto& seg : schedule.segments()) {
        psi = segment_unitary(seg, schedule.v_perp()) * psi;
    }
    // renormalize the accumulated rounding so the result passes PureState checks
    return PureState(psi / psi.norm());
}

BlochVector state_to_bloch(const PureState& psi) {
    const double leak = std::hypot(std::abs(psi[basis::kGround]), std::abs(psi[basis::kBoth]));
    if (leak > 1e-9) {
        throw std::domain_error("state_to_bloch: state leaves the one-excitation subspace");
    }
    const cplx a = psi[basis::kQubit];
    const cplx b = psi[basis::kMemory];
    return {2.0 * (a * std::conj(b)).real(), 2.0 * (b * std::conj(a)).imag(),
            std::norm(a) - std::norm(b)};
}

double excited_population(const PureState& psi) {
    return std::norm(psi[basis::kQubit]) + std::norm(psi[basis::kBoth]);
}

std::vector<TrajectoryPoint> trajectory(const PulseSchedule& schedule, const PureState& psi0,
                                        double sample_dt) {
    if (!std::isfinite(sample_dt) || sample_dt <= 0.0) {
        throw std::invalid_argument("trajectory: sample_dt must be > 0");
    }
    std::vector<TrajectoryPoint> out;
    double t = 0.0;
    Vec4 psi = psi0.amplitudes();
    auto record = [&](double time, const Vec4& amps) {
        const PureState s(amps / amps.norm());
        out.push_back({time, state_to_bloch(s), excited_population(s)});
    };
    record(0.0, psi);

    const double v = schedule.v_perp();
    for (const auto& seg : schedule.segments()) {
        if (const auto* gate = std::get_if<IdealGate>(&seg)) {
            psi = embed(gate->unitary) * psi;
            record(t, psi);
            continue;
        }
        const auto [duration, detuning] = std::visit(
            overloaded{
                [](const FreeSegment& s) { return std::pair{s.duration, s.detuning}; },
                [](const DetunedPulse& s) { return std::pair{s.duration, s.detuning}; },
                [](const IdealGate&) { return std::pair{0.0, 0.0}; },
            },
            seg);
        const Vec4 start = psi;
        for (long k = 1;; ++k) {
            const double local = static_cast<double>(k) * sample_dt;
            if (local >= duration) {
                break;
            }
            record(t + local, embed(free_propagator(local, v, detuning)) * start);
        }
        psi = embed(free_propagator(duration, v, detuning)) * start;
        t += duration;
        if (duration > 0.0) {
            record(t, psi);
        }
    }
    return out;
}

} // namespace t1echo
