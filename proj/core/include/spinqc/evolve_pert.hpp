#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "spinqc/evolve_exact.hpp"
#include "spinqc/hamiltonian.hpp"
#include "spinqc/protocol.hpp"

namespace spinqc {

// Two basis states joined by a resonant or near-resonant single flip of
// `qubit`. `m` has that qubit in the ground state, `partner` has it excited.
struct TwoLevelBlock {
    std::uint32_t m = 0;
    std::uint32_t partner = 0;
    int qubit = 0;
    double delta = 0.0;   // E_rot(partner) - E_rot(m)
    double lambda = 0.0;  // sqrt(Omega^2 + delta^2)
};

struct BlockPartition {
    std::vector<TwoLevelBlock> blocks;
    std::vector<std::uint32_t> singletons;

    // Block containing `index` (as m or partner), if any.
    const TwoLevelBlock* find(std::uint32_t index) const;

private:
    friend BlockPartition partition_blocks(const Pulse&, const ChainParams&, std::optional<double>);
    std::vector<std::int32_t> block_of_;
};

// Pairs every basis state with its single-flip partner of smallest
// rotating-frame detuning, provided |delta| <= threshold (default a/2) and
// the choice is mutual. Everything else is a singleton. Throws PairingError
// when a state's best partner prefers a different state.
BlockPartition partition_blocks(const Pulse& pulse, const ChainParams& p,
                                std::optional<double> threshold = std::nullopt);

// Closed-form 2x2 evolution for time tau of amplitudes (c_m, c_p) with
// rotating-frame energies E_m, E_p and drive coupling -Omega e^{i phi}/2:
//   U_mm = [cos(lt/2) + i (D/l) sin(lt/2)] e^{-i (E_m+E_p) t/2}
//   U_pm = [i (Omega/l) e^{-i phi} sin(lt/2)] e^{-i (E_m+E_p) t/2}
// with D = E_p - E_m and l = sqrt(Omega^2 + D^2).
std::pair<Complex, Complex> block_evolve(Complex c_m, Complex c_p, double tau, double omega,
                                         double E_m, double E_p, double phi = 0.0);
std::pair<Complex, Complex> block_evolve(const TwoLevelBlock& block, Complex c_m, Complex c_p,
                                         double tau, double omega, double E_m, double E_p);

// Transition probability of a detuned two-level pulse,
// (Omega^2/lambda^2) sin^2(lambda tau / 2).
double epsilon_param(double omega, double delta, double tau);

// Non-resonant transition probability Omega^2 / (4 a^2).
double eta_param(double omega, double a);

struct ErrorParams {
    double epsilon = 0.0;
    double eta = 0.0;
};

enum class PertOrder { block, block_pt1 };

struct PertOptions {
    PertOrder order = PertOrder::block;
    std::optional<double> threshold;
    // Blocks other than the pulse's annotated target keep only the phase of
    // their diagonal elements: no leakage. Used to build the ideal state.
    bool phase_only_off_target = false;
};

struct PertDiagnostics {
    std::size_t skipped_degenerate = 0;  // first-order terms dropped
};

// Pulse-by-pulse block propagation with the same frame handling as the
// exact propagator. Optionally dresses each pulse with first-order
// eigenvector corrections from the couplings left outside the blocks;
// the dressed step is renormalised to the input norm.
StateVector propagate_pulse_pert(const StateVector& psi, const Pulse& pulse, const ChainParams& p,
                                 const PertOptions& opts = {}, PertDiagnostics* diag = nullptr);

StateVector run_protocol_pert(const StateVector& psi0, const Protocol& prot,
                              const PertOptions& opts = {}, const PulseObserver& observer = {},
                              PertDiagnostics* diag = nullptr);

}  // namespace spinqc
