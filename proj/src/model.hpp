#pragma once

// Physical parameters of the qubit/memory pair and the quantities derived
// from them. Rates are in units of the qubit relaxation rate, times in its
// inverse.

#include <optional>
#include <string>
#include <vector>

namespace t1echo {

inline constexpr double kDefaultClampFactor = 50.0;

class SystemParams {
public:
    /// Throws std::invalid_argument when v_perp <= 0, a value is non-finite,
    /// or clamp_factor <= 0.
    SystemParams(double v_perp, double delta_omega,
                 std::optional<double> epsilon = std::nullopt,
                 double clamp_factor = kDefaultClampFactor);

    double v_perp() const { return v_perp_; }
    double delta_omega() const { return delta_omega_; }
    const std::optional<double>& epsilon() const { return epsilon_; }
    double clamp_factor() const { return clamp_factor_; }

    /// Same coupling, different qubit-memory detuning.
    SystemParams with_detuning(double delta_omega) const;

    /// Non-fatal diagnostics, e.g. a coupling that is not small compared to
    /// the lab-frame splitting.
    std::vector<std::string> warnings() const;

private:
    double v_perp_;
    double delta_omega_;
    std::optional<double> epsilon_;
    double clamp_factor_;
};

struct NoiseRates {
    double gamma1_q = 1.0;
    double gamma1_m = 0.0;
    double gammaphi_q = 0.0;
    double gammaphi_m = 0.0;

    /// Throws std::invalid_argument on a negative or non-finite rate.
    void validate() const;

    double gamma2_q() const { return 0.5 * gamma1_q + gammaphi_q; }
    double gamma2_m() const { return 0.5 * gamma1_m + gammaphi_m; }

    static NoiseRates none() { return {0.0, 0.0, 0.0, 0.0}; }
};

struct DerivedParams {
    double omega0;        // free vacuum-Rabi frequency
    double xi0;           // free precession axis angle, in (0, pi)
    double delta_omega_1; // detuning during a Hamiltonian-realized pulse
    double xi1;           // pulse axis angle
    double omega1;
    double t_pi;
    double t_swap;
    double gamma_plus;
    bool clamp_engaged;   // |delta_omega_1| was limited to clamp_factor * v_perp
};

/// Mean of the two relaxation rates.
double gamma_plus(const NoiseRates& noise);

/// Detuning that tilts the rotation axis by a right angle. Limited to
/// clamp_factor * v_perp in magnitude; the sign convention at zero detuning
/// is the one of a small positive detuning.
double pulse_detuning(const SystemParams& params, bool* clamped = nullptr);

double detuning_angle(double v_perp, double delta_omega);

DerivedParams derive(const SystemParams& params, const NoiseRates& noise);

} // namespace t1echo
