#include "open_dynamics.hpp"

#include <algorithm>
#include <array>
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

struct Evolution {
    double duration;
    double detuning;
};

std::optional<Evolution> as_evolution(const Segment& seg) {
    return std::visit(overloaded{
                          [](const FreeSegment& s) -> std::optional<Evolution> {
                              return Evolution{s.duration, s.detuning};
                          },
                          [](const DetunedPulse& s) -> std::optional<Evolution> {
                              return Evolution{s.duration, s.detuning};
                          },
                          [](const IdealGate&) -> std::optional<Evolution> { return std::nullopt; },
                      },
                      seg);
}

Mat4 apply_gate(const IdealGate& gate, const Mat4& rho) {
    const Mat4 u = embed(gate.unitary);
    return u * rho * u.adjoint();
}

// Eigenbasis of the segment Hamiltonian, built block by block so that the
// degenerate zero-energy pair |0q 0m>, |1q 1m> is never mixed.
struct DressedBasis {
    Mat4 vectors;                 // columns are eigenvectors
    std::array<double, 4> energy;
};

DressedBasis dressed_basis(const Mat4& h) {
    Eigen::Matrix2cd block;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            block(i, j) = h(basis::kSubspace[i], basis::kSubspace[j]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);

    DressedBasis b;
    b.vectors = Mat4::Zero();
    b.vectors(basis::kGround, 0) = 1.0;
    b.energy[0] = h(basis::kGround, basis::kGround).real();
    b.vectors(basis::kBoth, 3) = 1.0;
    b.energy[3] = h(basis::kBoth, basis::kBoth).real();
    for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < 2; ++i) {
            b.vectors(basis::kSubspace[i], 1 + k) = es.eigenvectors()(i, k);
        }
        b.energy[1 + k] = es.eigenvalues()(k);
    }
    return b;
}

struct FrequencyComponent {
    double frequency;
    Mat4 op;
};

// Splits c into components c(w) = sum over E_b - E_a = w of c_ab |a><b|.
std::vector<FrequencyComponent> frequency_components(const Mat4& c, const DressedBasis& b,
                                                     double tol) {
    const Mat4 ct = b.vectors.adjoint() * c * b.vectors;
    std::vector<FrequencyComponent> parts;
    for (int a = 0; a < 4; ++a) {
        for (int bb = 0; bb < 4; ++bb) {
            if (std::abs(ct(a, bb)) < 1e-15) {
                continue;
            }
            const double w = b.energy[bb] - b.energy[a];
            auto it = std::find_if(parts.begin(), parts.end(), [&](const FrequencyComponent& p) {
                return std::abs(p.frequency - w) <= tol;
            });
            if (it == parts.end()) {
                parts.push_back({w, Mat4::Zero()});
                it = parts.end() - 1;
            }
            it->op(a, bb) = ct(a, bb);
        }
    }
    for (auto& p : parts) {
        p.op = b.vectors * p.op * b.vectors.adjoint();
    }
    return parts;
}

} // namespace

std::vector<CollapseOp> local_collapse_ops(const NoiseRates& noise) {
    noise.validate();
    const Mat2 id = pauli::identity();
    return {
        {kron(pauli::lower(), id), noise.gamma1_q},
        {kron(id, pauli::lower()), noise.gamma1_m},
        {kron(pauli::z(), id), 0.5 * noise.gammaphi_q},
        {kron(id, pauli::z()), 0.5 * noise.gammaphi_m},
    };
}

SuperOp generator(double v_perp, double detuning, NoiseModel model, const NoiseRates& noise) {
    const SystemParams params(v_perp, detuning);
    const Mat4 h = hamiltonian(params);
    const auto local = local_collapse_ops(noise);
    if (model == NoiseModel::LindbladLocal) {
        return liouvillian(h, local);
    }
    const DressedBasis b = dressed_basis(h);
    const double tol = 1e-9 * std::max(1.0, std::hypot(v_perp, detuning));
    std::vector<CollapseOp> secular;
    for (std::size_t k = 0; k < local.size(); ++k) {
        if (local[k].rate == 0.0) {
            continue;
        }
        const bool dephasing = k >= 2;
        for (auto& part : frequency_components(local[k].op, b, tol)) {
            // pure dephasing noise is slow: no weight at dressed transitions
            if (dephasing && std::abs(part.frequency) > tol) {
                continue;
            }
            secular.push_back({part.op, local[k].rate});
        }
    }
    return liouvillian(h, secular);
}

SuperOp generator(const SystemParams& params, std::optional<double> detuning_override,
                  NoiseModel model, const NoiseRates& noise) {
    return generator(params.v_perp(), detuning_override.value_or(params.delta_omega()), model,
                     noise);
}

std::pair<double, double> dressed_decay_rates(double v_perp, double detuning,
                                              const NoiseRates& noise) {
    const DressedBasis b = dressed_basis(hamiltonian(SystemParams(v_perp, detuning)));
    auto rate = [&](int col) {
        return noise.gamma1_q * std::norm(b.vectors(basis::kQubit, col)) +
               noise.gamma1_m * std::norm(b.vectors(basis::kMemory, col));
    };
    // eigenvalues come out ascending: column 1 lower, column 2 upper
    return {rate(2), rate(1)};
}

PropagatorCache::PropagatorCache(double v_perp, NoiseModel model, NoiseRates noise)
    : v_perp_(v_perp), model_(model), noise_(noise) {
    noise_.validate();
}

const SuperOp& PropagatorCache::generator(double detuning) {
    auto it = generators_.find(detuning);
    if (it == generators_.end()) {
        it = generators_.emplace(detuning, t1echo::generator(v_perp_, detuning, model_, noise_))
                 .first;
    }
    return it->second;
}

const SuperOp& PropagatorCache::propagator(double detuning, double duration) {
    const auto key = std::make_pair(detuning, duration);
    auto it = propagators_.find(key);
    if (it == propagators_.end()) {
        const SuperOp l = generator(detuning);
        it = propagators_.emplace(key, expm(SuperOp(l * duration))).first;
    }
    return it->second;
}

DensityMatrix propagate(const PulseSchedule& schedule, const DensityMatrix& rho0,
                        PropagatorCache& cache, const StateObserver& observe) {
    if (cache.v_perp() != schedule.v_perp()) {
        throw std::invalid_argument("propagate: cache built for a different coupling");
    }
    Mat4 rho = rho0.matrix();
    double t = 0.0;
    if (observe) {
        observe(t, rho);
    }
    for (const auto& seg : schedule.segments()) {
        if (const auto ev = as_evolution(seg)) {
            rho = unvectorize(cache.propagator(ev->detuning, ev->duration) * vectorize(rho));
            t += ev->duration;
        } else {
            rho = apply_gate(std::get<IdealGate>(seg), rho);
        }
        if (observe) {
            observe(t, rho);
        }
    }
    return DensityMatrix::unchecked(rho);
}

DensityMatrix propagate(const PulseSchedule& schedule, const DensityMatrix& rho0,
                        NoiseModel model, const NoiseRates& noise, const StateObserver& observe) {
    PropagatorCache cache(schedule.v_perp(), model, noise);
    return propagate(schedule, rho0, cache, observe);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Integrates the autonomous system dy/dt = l y over [0, duration].
SuperVec integrate_segment(const SuperOp& l, SuperVec y, double duration,
                           const OdeOptions& opt, OdeStats& stats) {
    if (duration == 0.0) {
        return y;
    }
    const double norm_l = std::max(l.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    double h = std::min(duration, 0.1 / norm_l);
    const double h_min = opt.min_step_fraction * duration;
    double t = 0.0;

    SuperVec k1 = l * y;
    while (t < duration) {
        if (t + h > duration) {
            h = duration - t;
        }
        const SuperVec k2 = l * (y + h * (a21 * k1));
        const SuperVec k3 = l * (y + h * (a31 * k1 + a32 * k2));
        const SuperVec k4 = l * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const SuperVec k5 = l * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const SuperVec k6 = l * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const SuperVec y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const SuperVec k7 = l * y_new;
        const SuperVec err =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err_norm = 0.0;
        for (int i = 0; i < err.size(); ++i) {
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
            err_norm = std::max(err_norm, std::abs(err(i)) / scale);
        }

        if (err_norm <= 1.0) {
            t += h;
            y = y_new;
            k1 = k7;
            ++stats.accepted;
        } else {
            ++stats.rejected;
        }
        const double factor =
            err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        h *= factor;
        if (t < duration && h < h_min) {
            throw std::runtime_error("propagate_ode: step size underflow");
        }
    }
    return y;
}

} // namespace

DensityMatrix propagate_ode(const PulseSchedule& schedule, const DensityMatrix& rho0,
                            NoiseModel model, const NoiseRates& noise, const OdeOptions& options,
                            OdeStats* stats) {
    if (!(options.rel_tol > 0.0) || !(options.abs_tol > 0.0)) {
        throw std::invalid_argument("propagate_ode: tolerances must be > 0");
    }
    OdeStats local;
    Mat4 rho = rho0.matrix();
    for (const auto& seg : schedule.segments()) {
        if (const auto ev = as_evolution(seg)) {
            const SuperOp l = generator(schedule.v_perp(), ev->detuning, model, noise);
            rho = unvectorize(integrate_segment(l, vectorize(rho), ev->duration, options, local));
        } else {
            rho = apply_gate(std::get<IdealGate>(seg), rho);
        }
    }
    if (stats) {
        *stats = local;
    }
    return DensityMatrix::unchecked(rho);
}

double excited_population(const Mat4& rho) {
    return (rho(basis::kQubit, basis::kQubit) + rho(basis::kBoth, basis::kBoth)).real();
}

double excited_population(const DensityMatrix& rho) { return excited_population(rho.matrix()); }

std::vector<DecayPoint> decay_curve(const SystemParams& params, const NoiseRates& noise,
                                    const SequenceOptions& options, NoiseModel model,
                                    const std::vector<double>& t_grid,
                                    const StateObserver& observe) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || (i > 0 && t_grid[i] < t_grid[i - 1])) {
            throw std::invalid_argument("decay_curve: time grid must be ascending and >= 0");
        }
    }
    PropagatorCache cache(params.v_perp(), model, noise);
    const DensityMatrix rho0(PureState::basis_state(basis::kQubit));
    std::vector<DecayPoint> out;
    out.reserve(t_grid.size());
    for (double free_time : t_grid) {
        const PulseSchedule schedule = echo_schedule(params, free_time, options);
        const DensityMatrix rho = propagate(schedule, rho0, cache, observe);
        out.push_back({schedule.duration(), free_time, excited_population(rho)});
    }
    return out;
}

std::vector<PulseLossPoint> pulse_loss_curve(const SystemParams& base,
                                             const std::vector<double>& detunings,
                                             const NoiseRates& noise, NoiseModel model,
                                             ClampedPulse clamped, const StateObserver& observe) {
    const DensityMatrix rho0(PureState::basis_state(basis::kQubit));
    const SequenceOptions options{PulseMode::Hamiltonian, true, clamped};
    const double gp = gamma_plus(noise);
    std::vector<PulseLossPoint> out;
    out.reserve(detunings.size());
    for (double dw : detunings) {
        const SystemParams params = base.with_detuning(dw);
        const DerivedParams d = derive(params, noise);
        const PulseSchedule schedule = pulses_only_schedule(params, options);
        const DensityMatrix rho = propagate(schedule, rho0, model, noise, observe);
        out.push_back({dw, d.t_pi, excited_population(rho),
                       std::exp(-noise.gamma1_q * 2.0 * d.t_pi),
                       std::exp(-gp * 2.0 * d.t_pi)});
    }
    return out;
}

} // namespace t1echo
