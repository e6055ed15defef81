#include "model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace t1echo {

namespace {

void require_finite(double value, const char* key) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(key) + " must be finite");
    }
}

void require_rate(double value, const char* key) {
    require_finite(value, key);
    if (value < 0.0) {
        throw std::invalid_argument(std::string(key) + " must be >= 0");
    }
}

} // namespace

SystemParams::SystemParams(double v_perp, double delta_omega,
                           std::optional<double> epsilon, double clamp_factor)
    : v_perp_(v_perp), delta_omega_(delta_omega), epsilon_(epsilon),
      clamp_factor_(clamp_factor) {
    require_finite(v_perp, "v_perp");
    require_finite(delta_omega, "delta_omega");
    require_finite(clamp_factor, "clamp_factor");
    if (v_perp <= 0.0) {
        throw std::invalid_argument("v_perp must be > 0");
    }
    if (clamp_factor <= 0.0) {
        throw std::invalid_argument("clamp_factor must be > 0");
    }
    if (epsilon) {
        require_finite(*epsilon, "epsilon");
    }
}

SystemParams SystemParams::with_detuning(double delta_omega) const {
    return SystemParams(v_perp_, delta_omega, epsilon_, clamp_factor_);
}

std::vector<std::string> SystemParams::warnings() const {
    std::vector<std::string> out;
    if (!epsilon_) {
        return out;
    }
    const double limit = 0.1 * std::abs(*epsilon_);
    if (v_perp_ > limit) {
        std::ostringstream msg;
        msg << "rotating-wave approximation questionable: v_perp = " << v_perp_
            << " exceeds 0.1*epsilon = " << limit;
        out.push_back(msg.str());
    }
    if (std::abs(delta_omega_) > limit) {
        std::ostringstream msg;
        msg << "rotating-wave approximation questionable: |delta_omega| = "
            << std::abs(delta_omega_) << " exceeds 0.1*epsilon = " << limit;
        out.push_back(msg.str());
    }
    return out;
}

void NoiseRates::validate() const {
    require_rate(gamma1_q, "gamma1_q");
    require_rate(gamma1_m, "gamma1_m");
    require_rate(gammaphi_q, "gammaphi_q");
    require_rate(gammaphi_m, "gammaphi_m");
}

double gamma_plus(const NoiseRates& noise) {
    return 0.5 * (noise.gamma1_q + noise.gamma1_m);
}

double detuning_angle(double v_perp, double delta_omega) {
    return std::atan2(v_perp, delta_omega);
}

double pulse_detuning(const SystemParams& params, bool* clamped) {
    const double v = params.v_perp();
    const double dw = params.delta_omega();
    const double limit = params.clamp_factor() * v;
    const double sign = std::signbit(dw) ? -1.0 : 1.0;
    // |v^2/dw| > K v  <=>  |dw| < v/K
    const bool engage = std::abs(dw) * params.clamp_factor() < v;
    if (clamped) {
        *clamped = engage;
    }
    if (engage) {
        return -sign * limit;
    }
    return -v * v / dw;
}

DerivedParams derive(const SystemParams& params, const NoiseRates& noise) {
    const double v = params.v_perp();
    const double dw = params.delta_omega();

    DerivedParams d{};
    d.omega0 = std::hypot(v, dw);
    d.xi0 = detuning_angle(v, dw);
    d.delta_omega_1 = pulse_detuning(params, &d.clamp_engaged);
    d.xi1 = detuning_angle(v, d.delta_omega_1);
    d.omega1 = std::hypot(v, d.delta_omega_1);
    d.t_pi = std::numbers::pi / d.omega1;
    d.t_swap = std::numbers::pi / v;
    d.gamma_plus = gamma_plus(noise);
    return d;
}

} // namespace t1echo
