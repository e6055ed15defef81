#include "t1echo/t1echo.h"

#include "model.hpp"
#include "open_dynamics.hpp"
#include "tomography.hpp"
#include "unitary.hpp"

#include <exception>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

struct t1e_system {
    t1echo::SystemParams params;
    t1echo::NoiseRates noise;
    t1echo::NoiseModel model;
    std::vector<std::string> warnings;
};

struct t1e_trajectory {
    std::vector<t1echo::TrajectoryPoint> points;
};

namespace {

thread_local std::string g_last_error;

t1e_status fail(t1e_status status, const char* what) {
    g_last_error = what;
    return status;
}

// Maps the exception currently being handled onto a status code.
t1e_status translate_exception() {
    try {
        throw;
    } catch (const std::invalid_argument& e) {
        return fail(T1E_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(T1E_ERR_OUT_OF_RANGE, e.what());
    } catch (const std::domain_error& e) {
        return fail(T1E_ERR_NUMERICAL, e.what());
    } catch (const std::runtime_error& e) {
        return fail(T1E_ERR_NUMERICAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(T1E_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(T1E_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(T1E_ERR_INTERNAL, "unknown error");
    }
}

template <typename F>
t1e_status guarded(F&& body) {
    try {
        body();
        return T1E_OK;
    } catch (...) {
        return translate_exception();
    }
}

t1echo::NoiseModel to_model(t1e_model m) {
    switch (m) {
    case T1E_MODEL_LINDBLAD:
        return t1echo::NoiseModel::LindbladLocal;
    case T1E_MODEL_SECULAR:
        return t1echo::NoiseModel::SecularDressed;
    }
    throw std::invalid_argument("unknown noise model");
}

t1echo::SequenceOptions to_options(const t1e_sequence& s) {
    t1echo::SequenceOptions o;
    switch (s.pulses) {
    case T1E_PULSES_NONE:
        o.pulses = t1echo::PulseMode::None;
        break;
    case T1E_PULSES_IDEAL:
        o.pulses = t1echo::PulseMode::Ideal;
        break;
    case T1E_PULSES_HAMILTONIAN:
        o.pulses = t1echo::PulseMode::Hamiltonian;
        break;
    default:
        throw std::invalid_argument("unknown pulse mode");
    }
    o.recovery = s.recovery != 0;
    o.clamped = s.clamped == T1E_CLAMPED_IDEAL_Z ? t1echo::ClampedPulse::IdealZ
                                                  : t1echo::ClampedPulse::Clamp;
    return o;
}

void write_chi(const t1echo::ChiMatrix& chi, t1e_chi* out) {
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            out->re[4 * m + n] = chi(m, n).real();
            out->im[4 * m + n] = chi(m, n).imag();
        }
    }
}

t1echo::ChiMatrix read_chi(const t1e_chi& in) {
    t1echo::ChiMatrix chi;
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            chi(m, n) = t1echo::cplx(in.re[4 * m + n], in.im[4 * m + n]);
        }
    }
    return chi;
}

} // namespace

extern "C" {

const char* t1e_version(void) { return "1.0.0"; }

const char* t1e_status_string(t1e_status status) {
    switch (status) {
    case T1E_OK:
        return "ok";
    case T1E_ERR_NULL_ARGUMENT:
        return "null argument";
    case T1E_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case T1E_ERR_NUMERICAL:
        return "numerical failure";
    case T1E_ERR_OUT_OF_RANGE:
        return "out of range";
    case T1E_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char* t1e_last_error_message(void) { return g_last_error.c_str(); }

void t1e_params_init(t1e_params* params) {
    if (!params) {
        return;
    }
    params->v_perp = 5.0;
    params->delta_omega = 0.0;
    params->clamp_factor = t1echo::kDefaultClampFactor;
    params->has_epsilon = 0;
    params->epsilon = 0.0;
}

void t1e_noise_init(t1e_noise* noise) {
    if (!noise) {
        return;
    }
    noise->gamma1_q = 1.0;
    noise->gamma1_m = 0.0;
    noise->gammaphi_q = 0.0;
    noise->gammaphi_m = 0.0;
}

void t1e_sequence_init(t1e_sequence* sequence) {
    if (!sequence) {
        return;
    }
    sequence->pulses = T1E_PULSES_IDEAL;
    sequence->recovery = 1;
    sequence->clamped = T1E_CLAMPED_DETUNING;
}

t1e_status t1e_system_create(const t1e_params* params, const t1e_noise* noise, t1e_model model,
                             t1e_system** out) {
    if (!params || !noise || !out) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_system_create: null argument");
    }
    return guarded([&] {
        std::optional<double> eps;
        if (params->has_epsilon) {
            eps = params->epsilon;
        }
        t1echo::SystemParams p(params->v_perp, params->delta_omega, eps, params->clamp_factor);
        t1echo::NoiseRates n{noise->gamma1_q, noise->gamma1_m, noise->gammaphi_q,
                             noise->gammaphi_m};
        n.validate();
        auto warnings = p.warnings();
        *out = new t1e_system{p, n, to_model(model), std::move(warnings)};
    });
}

void t1e_system_destroy(t1e_system* system) { delete system; }

size_t t1e_system_warning_count(const t1e_system* system) {
    return system ? system->warnings.size() : 0;
}

const char* t1e_system_warning(const t1e_system* system, size_t index) {
    if (!system || index >= system->warnings.size()) {
        return nullptr;
    }
    return system->warnings[index].c_str();
}

t1e_status t1e_system_derive(const t1e_system* system, t1e_derived* out) {
    if (!system || !out) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_system_derive: null argument");
    }
    return guarded([&] {
        const auto d = t1echo::derive(system->params, system->noise);
        *out = {d.omega0, d.xi0,   d.delta_omega_1, d.xi1,          d.omega1,
                d.t_pi,   d.t_swap, d.gamma_plus,   d.clamp_engaged ? 1 : 0};
    });
}

t1e_status t1e_decay_curve(const t1e_system* system, const t1e_sequence* sequence,
                           const double* free_times, size_t n, t1e_decay_point* out) {
    if (!system || !sequence || (n > 0 && (!free_times || !out))) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_decay_curve: null argument");
    }
    return guarded([&] {
        const std::vector<double> grid(free_times, free_times + n);
        const auto curve = t1echo::decay_curve(system->params, system->noise,
                                               to_options(*sequence), system->model, grid);
        for (size_t i = 0; i < n; ++i) {
            out[i] = {curve[i].time, curve[i].free_time, curve[i].p1q};
        }
    });
}

t1e_status t1e_pulse_loss_curve(const t1e_system* system, t1e_clamped_pulse clamped,
                                const double* detunings, size_t n, t1e_pulse_loss_point* out) {
    if (!system || (n > 0 && (!detunings || !out))) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_pulse_loss_curve: null argument");
    }
    return guarded([&] {
        const std::vector<double> grid(detunings, detunings + n);
        const auto mode = clamped == T1E_CLAMPED_IDEAL_Z ? t1echo::ClampedPulse::IdealZ
                                                         : t1echo::ClampedPulse::Clamp;
        const auto curve =
            t1echo::pulse_loss_curve(system->params, grid, system->noise, system->model, mode);
        for (size_t i = 0; i < n; ++i) {
            out[i] = {curve[i].delta_omega, curve[i].t_pi, curve[i].p1q,
                      curve[i].reference_qubit, curve[i].reference_gamma_plus};
        }
    });
}

t1e_status t1e_trajectory_compute(const t1e_system* system, const t1e_sequence* sequence,
                                  double free_time, double sample_dt, t1e_trajectory** out) {
    if (!system || !sequence || !out) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_trajectory_compute: null argument");
    }
    return guarded([&] {
        const auto schedule =
            t1echo::echo_schedule(system->params, free_time, to_options(*sequence));
        const auto psi0 = t1echo::PureState::basis_state(t1echo::basis::kQubit);
        *out = new t1e_trajectory{t1echo::trajectory(schedule, psi0, sample_dt)};
    });
}

size_t t1e_trajectory_size(const t1e_trajectory* trajectory) {
    return trajectory ? trajectory->points.size() : 0;
}

t1e_status t1e_trajectory_point_at(const t1e_trajectory* trajectory, size_t index,
                                   t1e_trajectory_point* out) {
    if (!trajectory || !out) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_trajectory_point_at: null argument");
    }
    if (index >= trajectory->points.size()) {
        return fail(T1E_ERR_OUT_OF_RANGE, "t1e_trajectory_point_at: index out of range");
    }
    const auto& p = trajectory->points[index];
    *out = {p.time, p.bloch.x, p.bloch.y, p.bloch.z, p.p_excited_qubit};
    return T1E_OK;
}

void t1e_trajectory_destroy(t1e_trajectory* trajectory) { delete trajectory; }

t1e_status t1e_chi_reconstruct(const t1e_system* system, const t1e_sequence* sequence,
                               double free_time, double epsilon, t1e_chi* out) {
    if (!system || !sequence || !out) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_chi_reconstruct: null argument");
    }
    return guarded([&] {
        const t1echo::TomographySetup setup{system->params, system->noise, system->model,
                                            to_options(*sequence), free_time, epsilon};
        write_chi(t1echo::chi_reconstruct(setup), out);
    });
}

t1e_status t1e_chi_analytic(double gamma_plus, double epsilon, double t, t1e_chi* out) {
    if (!out) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_chi_analytic: null argument");
    }
    return guarded([&] { write_chi(t1echo::chi_analytic(gamma_plus, epsilon, t), out); });
}

t1e_status t1e_chi_validate(const t1e_chi* chi, t1e_chi_check* out) {
    if (!chi || !out) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_chi_validate: null argument");
    }
    return guarded([&] {
        const auto c = t1echo::check_chi(read_chi(*chi));
        *out = {c.hermiticity_error, c.min_diagonal, c.diagonal_sum_error,
                c.trace_condition_error};
    });
}

t1e_status t1e_process_fidelity(const t1e_chi* a, const t1e_chi* b, double* out) {
    if (!a || !b || !out) {
        return fail(T1E_ERR_NULL_ARGUMENT, "t1e_process_fidelity: null argument");
    }
    return guarded([&] { *out = t1echo::process_fidelity(read_chi(*a), read_chi(*b)); });
}

} // extern "C"
