#pragma once

// Closed-system evolution of the coupled pair in the frame rotating with the
// qubit splitting. On the one-excitation subspace, ordered
// (|1q 0m>, |0q 1m>), the Hamiltonian is
//
//   H1 = [[-dw/2, v/2], [v/2, +dw/2]] = (w0/2) * [[-cos xi, sin xi], [sin xi, cos xi]]
//
// with w0 = hypot(v, dw) and xi = atan2(v, dw). |0q 0m> and |1q 1m> are
// zero-energy eigenstates.

#include "linalg.hpp"
#include "model.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace t1echo {

/// 2x2 unitary on the one-excitation subspace.
using SubspaceUnitary = Mat2;

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
    double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
};

Mat4 hamiltonian(const SystemParams& params, std::optional<double> detuning_override = std::nullopt);

/// exp(-i H1 t) in closed form.
SubspaceUnitary free_propagator(double t, const SystemParams& params);
SubspaceUnitary free_propagator(double t, double v_perp, double detuning);

/// pi rotation about the in-plane axis perpendicular to the free axis.
SubspaceUnitary echo_pulse(const SystemParams& params);

/// Free evolution for t_pi at the pulse detuning; equals echo_pulse up to a
/// global phase when the clamp is not engaged.
SubspaceUnitary pulse_via_detuning(const SystemParams& params);

/// Identity on |0q 0m> and |1q 1m>, u on the one-excitation subspace.
Mat4 embed(const SubspaceUnitary& u);

/// min over phi of the Frobenius norm |a - e^{i phi} b|.
double phase_aligned_distance(const MatX& a, const MatX& b);

/// Unit rotation axis of a 2x2 unitary, global phase removed. The sign is
/// arbitrary for a pi rotation.
BlochVector rotation_axis(const SubspaceUnitary& u);

struct FreeSegment {
    double duration;
    double detuning;
};

struct DetunedPulse {
    double duration;
    double detuning;
};

struct IdealGate {
    SubspaceUnitary unitary;
};

using Segment = std::variant<FreeSegment, DetunedPulse, IdealGate>;

class PulseSchedule {
public:
    PulseSchedule(double v_perp, std::vector<Segment> segments = {});

    double v_perp() const { return v_perp_; }
    const std::vector<Segment>& segments() const { return segments_; }
    double duration() const;
    bool empty() const { return segments_.empty(); }

private:
    double v_perp_;
    std::vector<Segment> segments_;
};

enum class PulseMode { None, Ideal, Hamiltonian };

/// What a Hamiltonian-realized pulse becomes when the pulse detuning would
/// exceed the clamp.
enum class ClampedPulse { Clamp, IdealZ };

struct SequenceOptions {
    PulseMode pulses = PulseMode::Ideal;
    bool recovery = true;
    ClampedPulse clamped = ClampedPulse::Clamp;
};

/// [Free(T/2), pulse, Free(T/2), pulse] (or [Free(T)] without pulses).
PulseSchedule echo_schedule(const SystemParams& params, double free_time,
                            const SequenceOptions& options = {});

/// Only the two pulses, no free evolution.
PulseSchedule pulses_only_schedule(const SystemParams& params, const SequenceOptions& options);

/// Full-space unitary of one segment.
Mat4 segment_unitary(const Segment& segment, double v_perp);

PureState run_schedule(const PulseSchedule& schedule, const PureState& psi0);

/// Throws std::domain_error when amplitude outside the subspace exceeds 1e-9.
BlochVector state_to_bloch(const PureState& psi);

double excited_population(const PureState& psi);

struct TrajectoryPoint {
    double time;
    BlochVector bloch;
    double p_excited_qubit;
};

std::vector<TrajectoryPoint> trajectory(const PulseSchedule& schedule, const PureState& psi0,
                                        double sample_dt);

} // namespace t1echo
