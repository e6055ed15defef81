#ifndef T1ECHO_T1ECHO_H
#define T1ECHO_T1ECHO_H

/*
 * C interface of the t1echo simulator: a qubit coupled to a two-level memory
 * under the T1-echo pulse sequence.
 *
 * Conventions
 *   - Rates are in units of the qubit relaxation rate, times in its inverse.
 *   - The pair starts in |1q 0m> unless stated otherwise.
 *   - Every function returning t1e_status leaves its outputs untouched on
 *     failure. t1e_last_error_message() then describes the failure; the
 *     message is stored per thread and valid until the next failing call on
 *     that thread.
 *   - Handles are immutable after creation and may be shared read-only
 *     between threads.
 *   - chi matrices are stored row-major over the basis (I, X, Y, Z).
 */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(T1ECHO_BUILDING_LIBRARY)
#    define T1E_API __declspec(dllexport)
#  else
#    define T1E_API __declspec(dllimport)
#  endif
#else
#  define T1E_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum t1e_status {
    T1E_OK = 0,
    T1E_ERR_NULL_ARGUMENT = 1,
    T1E_ERR_INVALID_ARGUMENT = 2,
    T1E_ERR_NUMERICAL = 3,
    T1E_ERR_OUT_OF_RANGE = 4,
    T1E_ERR_INTERNAL = 5
} t1e_status;

typedef enum t1e_model {
    T1E_MODEL_LINDBLAD = 0, /* local collapse operators */
    T1E_MODEL_SECULAR = 1   /* secular master equation in the dressed basis */
} t1e_model;

typedef enum t1e_pulse_mode {
    T1E_PULSES_NONE = 0,
    T1E_PULSES_IDEAL = 1,      /* instantaneous gates */
    T1E_PULSES_HAMILTONIAN = 2 /* detuned free evolution for t_pi */
} t1e_pulse_mode;

/* Pulse realization when the pulse detuning is limited by the clamp. */
typedef enum t1e_clamped_pulse {
    T1E_CLAMPED_DETUNING = 0, /* evolve at the clamped detuning */
    T1E_CLAMPED_IDEAL_Z = 1   /* exact instantaneous gate instead */
} t1e_clamped_pulse;

typedef struct t1e_params {
    double v_perp;
    double delta_omega;
    double clamp_factor;
    int has_epsilon;
    double epsilon;
} t1e_params;

typedef struct t1e_noise {
    double gamma1_q;
    double gamma1_m;
    double gammaphi_q;
    double gammaphi_m;
} t1e_noise;

typedef struct t1e_sequence {
    t1e_pulse_mode pulses;
    int recovery; /* apply the recovery pulse */
    t1e_clamped_pulse clamped;
} t1e_sequence;

typedef struct t1e_derived {
    double omega0;
    double xi0;
    double delta_omega_1;
    double xi1;
    double omega1;
    double t_pi;
    double t_swap;
    double gamma_plus;
    int clamp_engaged;
} t1e_derived;

typedef struct t1e_decay_point {
    double time;      /* elapsed time including pulses */
    double free_time;
    double p1q;
} t1e_decay_point;

typedef struct t1e_pulse_loss_point {
    double delta_omega;
    double t_pi;
    double p1q;
    double reference_qubit;
    double reference_gamma_plus;
} t1e_pulse_loss_point;

typedef struct t1e_trajectory_point {
    double time;
    double x;
    double y;
    double z;
    double p_excited_qubit;
} t1e_trajectory_point;

typedef struct t1e_chi {
    double re[16];
    double im[16];
} t1e_chi;

typedef struct t1e_chi_check {
    double hermiticity_error;
    double min_diagonal;
    double diagonal_sum_error;
    double trace_condition_error;
} t1e_chi_check;

typedef struct t1e_system t1e_system;
typedef struct t1e_trajectory t1e_trajectory;

T1E_API const char* t1e_version(void);
T1E_API const char* t1e_status_string(t1e_status status);
T1E_API const char* t1e_last_error_message(void);

T1E_API void t1e_params_init(t1e_params* params);
T1E_API void t1e_noise_init(t1e_noise* noise);
T1E_API void t1e_sequence_init(t1e_sequence* sequence);

T1E_API t1e_status t1e_system_create(const t1e_params* params, const t1e_noise* noise,
                                     t1e_model model, t1e_system** out);
T1E_API void t1e_system_destroy(t1e_system* system);

T1E_API size_t t1e_system_warning_count(const t1e_system* system);
/* NULL when index is out of range. */
T1E_API const char* t1e_system_warning(const t1e_system* system, size_t index);

T1E_API t1e_status t1e_system_derive(const t1e_system* system, t1e_derived* out);

/* out must hold n points. */
T1E_API t1e_status t1e_decay_curve(const t1e_system* system, const t1e_sequence* sequence,
                                   const double* free_times, size_t n, t1e_decay_point* out);

/* The system's own detuning is ignored; out must hold n points. */
T1E_API t1e_status t1e_pulse_loss_curve(const t1e_system* system, t1e_clamped_pulse clamped,
                                        const double* detunings, size_t n,
                                        t1e_pulse_loss_point* out);

/* Closed-system Bloch trajectory of the sequence. */
T1E_API t1e_status t1e_trajectory_compute(const t1e_system* system, const t1e_sequence* sequence,
                                          double free_time, double sample_dt,
                                          t1e_trajectory** out);
T1E_API size_t t1e_trajectory_size(const t1e_trajectory* trajectory);
T1E_API t1e_status t1e_trajectory_point_at(const t1e_trajectory* trajectory, size_t index,
                                           t1e_trajectory_point* out);
T1E_API void t1e_trajectory_destroy(t1e_trajectory* trajectory);

/* epsilon = 0 gives the rotating-frame channel. */
T1E_API t1e_status t1e_chi_reconstruct(const t1e_system* system, const t1e_sequence* sequence,
                                       double free_time, double epsilon, t1e_chi* out);
T1E_API t1e_status t1e_chi_analytic(double gamma_plus, double epsilon, double t, t1e_chi* out);
T1E_API t1e_status t1e_chi_validate(const t1e_chi* chi, t1e_chi_check* out);
T1E_API t1e_status t1e_process_fidelity(const t1e_chi* a, const t1e_chi* b, double* out);

#ifdef __cplusplus
}
#endif

#endif /* T1ECHO_T1ECHO_H */
