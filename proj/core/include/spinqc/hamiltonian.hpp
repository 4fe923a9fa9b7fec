#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "spinqc/pulse.hpp"
#include "spinqc/spinbasis.hpp"

namespace spinqc {

// Static chain model: omega_k = omega0 + a k, nearest-neighbour Ising J.
// All quantities are dimensionless angular frequencies (hbar = 1).
struct ChainParams {
    int L = 6;
    double omega0 = 0.0;
    double a = 100.0;
    double J = 1.0;

    double larmor(int k) const noexcept { return omega0 + a * k; }

    // Throws ArgumentError/CapacityError on a <= 0, J < 0, non-finite values
    // or L outside [1, kMaxQubits].
    void validate() const;
};

// Diagonal energy of a basis index in the frame rotating at `nu` (nu = 0 is
// the lab frame):  -sum_k (omega_k - nu) I^z_k - 2J sum_k I^z_k I^z_{k+1}.
double diagonal_energy(std::uint32_t index, const ChainParams& p, double nu) noexcept;

// Lab-frame eigenvalue of H_0 for a basis state.
double h0_energy(const BasisState& s, const ChainParams& p);

struct FlipDelta {
    int qubit;
    double delta;  // |E_0(flip(s,k)) - E_0(s)|
};

// Lab-frame energy change for each single-spin flip of s, in qubit order.
std::vector<FlipDelta> single_flip_deltas(const BasisState& s, const ChainParams& p);

// Stationary Hamiltonian of one pulse in the frame rotating with the carrier.
// Stored as its diagonal plus the implicit hypercube of single-flip couplings;
// only dense() materialises the full matrix.
class RotFrameHam {
public:
    RotFrameHam(const ChainParams& params, double nu, double omega, double phi);

    const ChainParams& params() const noexcept { return params_; }
    double nu() const noexcept { return nu_; }
    double omega() const noexcept { return omega_; }
    double phi() const noexcept { return phi_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    // xi_k = omega_k - nu
    double detuning(int k) const noexcept { return params_.larmor(k) - nu_; }

    std::size_t size() const noexcept { return diag_.size(); }
    const std::vector<double>& diagonal() const noexcept { return diag_; }

    // <to|H|from> for from/to differing in exactly one bit; zero otherwise.
    Complex coupling(std::uint32_t to, std::uint32_t from) const noexcept;

    // True when phi == 0 and the matrix is real symmetric.
    bool is_real() const noexcept { return beta_ == 0.0; }

    Eigen::MatrixXcd dense() const;
    Eigen::MatrixXd dense_real() const;  // requires is_real()

    // y = H x, without densifying.
    void apply(std::span<const Complex> x, std::span<Complex> y) const;

private:
    ChainParams params_;
    double nu_, omega_, phi_, alpha_, beta_;
    std::vector<double> diag_;
};

RotFrameHam build_rot_ham(const ChainParams& p, const Pulse& pulse);

// Couplings J at which an unwanted single-flip transition becomes degenerate
// with a protocol transition:
//   a k/4, a k/2 for k = 1..L-3;  a k, a k/3 for k = 1..L-2.
// Sorted, deduplicated. Requires L >= 3.
std::vector<double> fake_transitions(const ChainParams& p);

struct ChaosEstimate {
    int M_f = 0;            // states directly coupled to any basis state
    double DeltaE_f = 0.0;  // widest coupled energy difference
    double delta_f = 0.0;   // DeltaE_f / M_f
    double omega_cr = 0.0;  // 2 delta_f: drive at which Omega/2 reaches delta_f
    double omega_cr_approx = 0.0;  // a + J/L

    bool chaotic(double omega) const noexcept { return omega > omega_cr; }
};

// Closed-form border with the carrier tuned to omega_0.
ChaosEstimate chaos_border(const ChainParams& p);

// Exhaustive enumeration of the same quantities over every basis state, with
// the carrier at `nu`. M_f is reported as both the minimum and maximum count.
struct CouplingCensus {
    int min_coupled = 0;
    int max_coupled = 0;
    double mean_coupled = 0.0;
    double max_delta = 0.0;
};
CouplingCensus coupled_state_census(const ChainParams& p, double nu);

}  // namespace spinqc
