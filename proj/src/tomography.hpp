#pragma once

// The whole echo sequence viewed as a qubit channel
//   E(rho) = sum_mn chi_mn E_m rho E_n^dag,   {E_n} = {I, sigma_x, sigma_y, sigma_z}.

#include "linalg.hpp"
#include "model.hpp"
#include "open_dynamics.hpp"
#include "unitary.hpp"

#include <array>
#include <functional>

namespace t1echo {

using ChiMatrix = Mat4;

/// Pauli operator basis in chi index order.
const std::array<Mat2, 4>& chi_basis();

/// Closed-form chi for relaxation with rate gamma_plus, lab-frame
/// precession epsilon and free time t.
ChiMatrix chi_analytic(double gamma_plus, double epsilon, double t);

using QubitChannel = std::function<Mat2(const Mat2&)>;

/// Linear-inversion tomography from the outputs on |0>, |1>, |+>, |+i>.
ChiMatrix chi_from_channel(const QubitChannel& channel);

/// chi_mn from a Kraus decomposition.
ChiMatrix chi_from_kraus(const std::vector<Mat2>& kraus);

/// Applies chi to a qubit state.
Mat2 apply_chi(const ChiMatrix& chi, const Mat2& rho);

/// sum_mn chi_mn E_n^dag E_m, which is the identity for trace-preserving maps.
Mat2 trace_condition(const ChiMatrix& chi);

struct ChiCheck {
    double hermiticity_error;
    double min_diagonal;
    double diagonal_sum_error;
    double trace_condition_error;
};

ChiCheck check_chi(const ChiMatrix& chi);

struct TomographySetup {
    SystemParams params;
    NoiseRates noise;
    NoiseModel model = NoiseModel::SecularDressed;
    SequenceOptions sequence;
    double free_time = 0.0;
    /// Lab-frame splitting; a z rotation by epsilon * t is composed after
    /// the rotating-frame channel. 0 keeps the rotating frame.
    double epsilon = 0.0;
};

/// The sequence as a qubit channel, memory prepared in |0m> and traced out.
QubitChannel sequence_channel(const TomographySetup& setup);

ChiMatrix chi_reconstruct(const TomographySetup& setup);

/// Normalized overlap Re tr(a b) / sqrt(tr(a^2) tr(b^2)), clamped to [0, 1].
double process_fidelity(const ChiMatrix& a, const ChiMatrix& b);

} // namespace t1echo
