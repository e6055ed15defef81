#pragma once

// Dissipative evolution of the pair. Two noise models share the same rates:
//
//  - LindbladLocal: collapse operators act on qubit and memory separately,
//    sigma_- (gamma1_q), tau_- (gamma1_m), sigma_z (gammaphi_q / 2) and
//    tau_z (gammaphi_m / 2). The factor 1/2 makes pure dephasing decay
//    coherences at exactly gammaphi, so gamma2 = gamma1 / 2 + gammaphi.
//
//  - SecularDressed: every local collapse operator is split into its
//    components between eigenstates of the segment Hamiltonian, grouped by
//    transition frequency, and terms coupling different frequencies are
//    dropped. Relaxation sees a flat zero-temperature spectrum, so every
//    component keeps the full rate. Pure dephasing comes from slow level
//    fluctuations and keeps only its zero-frequency component.
//
// Segments are propagated with exp(L * duration). propagate_ode integrates
// the same generator with an adaptive Runge-Kutta method and exists to
// cross-check the exponential path.

#include "linalg.hpp"
#include "model.hpp"
#include "unitary.hpp"

#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace t1echo {

enum class NoiseModel { LindbladLocal, SecularDressed };

/// Order: qubit relaxation, memory relaxation, qubit dephasing, memory dephasing.
std::vector<CollapseOp> local_collapse_ops(const NoiseRates& noise);

SuperOp generator(double v_perp, double detuning, NoiseModel model, const NoiseRates& noise);
SuperOp generator(const SystemParams& params, std::optional<double> detuning_override,
                  NoiseModel model, const NoiseRates& noise);

/// Population decay rates of the two dressed one-excitation states, ordered
/// (upper, lower) in energy.
std::pair<double, double> dressed_decay_rates(double v_perp, double detuning, const NoiseRates& noise);

/// Segment propagators for one (v_perp, noise, model). Not synchronized:
/// use one instance per worker thread.
class PropagatorCache {
public:
    PropagatorCache(double v_perp, NoiseModel model, NoiseRates noise);

    double v_perp() const { return v_perp_; }

    const SuperOp& generator(double detuning);
    const SuperOp& propagator(double detuning, double duration);

    std::size_t size() const { return propagators_.size(); }

private:
    double v_perp_;
    NoiseModel model_;
    NoiseRates noise_;
    std::map<double, SuperOp> generators_;
    std::map<std::pair<double, double>, SuperOp> propagators_;
};

/// Called with the elapsed time and the state after every segment, and once
/// with the initial state.
using StateObserver = std::function<void(double, const Mat4&)>;

DensityMatrix propagate(const PulseSchedule& schedule, const DensityMatrix& rho0,
                        NoiseModel model, const NoiseRates& noise,
                        const StateObserver& observe = {});

/// Variant that reuses propagators between calls. Throws
/// std::invalid_argument if the cache was built for another coupling.
DensityMatrix propagate(const PulseSchedule& schedule, const DensityMatrix& rho0,
                        PropagatorCache& cache, const StateObserver& observe = {});

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    /// Throw once a proposed step falls below this fraction of the segment.
    double min_step_fraction = 1e-14;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
};

/// Throws std::invalid_argument on non-positive tolerances and
/// std::runtime_error on step-size underflow.
DensityMatrix propagate_ode(const PulseSchedule& schedule, const DensityMatrix& rho0,
                            NoiseModel model, const NoiseRates& noise,
                            const OdeOptions& options = {}, OdeStats* stats = nullptr);

/// <1q| Tr_m rho |1q>.
double excited_population(const DensityMatrix& rho);
double excited_population(const Mat4& rho);

struct DecayPoint {
    double time;       // elapsed time including pulse durations
    double free_time;  // T, the free evolution time
    double p1q;
};

/// P1q after the echo sequence (or plain free evolution) for each free time
/// in t_grid, starting from |1q 0m>.
std::vector<DecayPoint> decay_curve(const SystemParams& params, const NoiseRates& noise,
                                    const SequenceOptions& options, NoiseModel model,
                                    const std::vector<double>& t_grid,
                                    const StateObserver& observe = {});

struct PulseLossPoint {
    double delta_omega;
    double t_pi;
    double p1q;
    double reference_qubit;       // exp(-gamma1_q * 2 t_pi)
    double reference_gamma_plus;  // exp(-gamma_plus * 2 t_pi)
};

/// P1q after both Hamiltonian-realized pulses and no free evolution, one
/// row per detuning.
std::vector<PulseLossPoint> pulse_loss_curve(const SystemParams& base,
                                             const std::vector<double>& detunings,
                                             const NoiseRates& noise, NoiseModel model,
                                             ClampedPulse clamped = ClampedPulse::Clamp,
                                             const StateObserver& observe = {});

} // namespace t1echo
