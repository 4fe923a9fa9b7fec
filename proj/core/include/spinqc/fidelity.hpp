#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spinqc/evolve_pert.hpp"
#include "spinqc/protocol.hpp"

namespace spinqc {

// Target of an annotated single-flip protocol with the phases the protocol
// itself imprints: the annotated transitions evolve as exact two-level
// rotations, every other block keeps only its diagonal phase. For the
// entanglement protocol this is (|0...0> + e^{i theta}|1,0,...,0,1>)/sqrt(2).
// Throws ProtocolError for pulses without targets or a broken branch chain.
StateVector build_ideal_state(const Protocol& prot);

// |<a|b>|^2. Both states must share L, frame and time.
double dynamical_fidelity(const StateVector& ideal, const StateVector& real);

struct PredictedFidelity {
    int M = 0;              // near-resonant pulses, 2L - 3
    double epsilon = 0.0;   // Omega^2 / (4 J^2)
    double F_ansatz = 0.0;  // (2 - M eps + 2 sqrt(1 - M eps)) / 4
    double F_linear = 0.0;  // -eps L + (1 + 3 Omega^2 / (8 J^2))
    double slope = 0.0;     // -Omega^2 / (4 J^2)
};

// Leakage-accumulation model of F(L). Throws ValidityError if M eps >= 1.
PredictedFidelity predicted_fidelity(int L, double omega, double J);

// Predicted slope dF/dL = -Omega^2 / (4 J^2).
double predicted_slope(double omega, double J);

// J at which the 2J-detuned spectator completes k full Rabi cycles,
// (Omega/2) sqrt(4k^2 - 1). Inverse of two_pi_k_omega.
double fidelity_minima_J(double omega, int k);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

// Unweighted least squares y = slope x + intercept. Needs >= 2 points;
// stderr is 0 for exactly two points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

enum class Propagator { exact, pert, both };

struct EvaluationOptions {
    Propagator propagator = Propagator::exact;
    PertOrder order = PertOrder::block;
    // Called with (pulse index, norm) after each pulse of the exact run.
    std::function<void(std::size_t, double)> norm_observer;
};

struct FidelityReport {
    int L = 0;
    int pulses = 0;
    std::optional<double> F;       // exact propagator
    std::optional<double> F_pert;  // perturbative propagator
    std::vector<double> spectator_detunings;
    int M = 0;
    double m_th = 0.0;
    double T = 0.0;
    double epsilon_worst = 0.0;
    double eta = 0.0;
    std::size_t skipped_degenerate = 0;

    // 1 - F of the primary propagator (exact when available).
    double one_minus_F() const;
};

// Builds the entanglement protocol for (params, omega), runs the selected
// propagators from |0...0> and compares against the ideal state.
FidelityReport evaluate_protocol(const ChainParams& params, double omega,
                                 const EvaluationOptions& opts = {});

// Same, for a protocol already built (e.g. replayed from a pulse table).
FidelityReport evaluate_protocol(const Protocol& prot, const EvaluationOptions& opts = {});

}  // namespace spinqc
