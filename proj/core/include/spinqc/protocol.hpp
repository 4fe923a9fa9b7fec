#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spinqc/hamiltonian.hpp"
#include "spinqc/pulse.hpp"

namespace spinqc {

// An ordered sequence of abutting pulses acting on one chain.
struct Protocol {
    ChainParams params;
    std::vector<Pulse> pulses;

    double total_time() const noexcept {
        return pulses.empty() ? 0.0 : pulses.back().t_end();
    }

    // Throws ProtocolError unless durations are positive, the first pulse
    // starts at 0, and each pulse starts where the previous one ended.
    void check_contiguous(double tol = 1e-9) const;
};

// Carrier frequency that drives the flip of qubit k in state s: the H_0
// energy of the configuration with qubit k excited minus the one with it in
// the ground state, evaluated exactly. Equals |E_0(flip(s,k)) - E_0(s)|
// whenever omega_k > 2J.
double resonance_frequency(const BasisState& s, int k, const ChainParams& p);

// Which end of the chain the entanglement walk starts from.
enum class WalkStart {
    last_qubit,   // qubit L-1 (highest Larmor frequency) first, walking down
    first_qubit,  // qubit 0 first, walking up the gradient
};

// The remote-entanglement walk from |0...0>: a pi/2 pulse on the starting
// qubit, a pi pulse on its neighbour, then repeatedly a pi pulse exciting the
// next qubit followed by a pi pulse returning the previous one to ground.
// 2L-2 pulses; the moving branch ends with qubits 0 and L-1 excited.
// Requires L >= 3, omega > 0.
Protocol build_entanglement_protocol(const ChainParams& p, double omega,
                                     WalkStart start = WalkStart::last_qubit);

// Moving-branch basis index before each pulse, plus the final one.
std::vector<std::uint32_t> branch_states(const Protocol& prot);

// Rotating-frame detuning of the |0...0> spectator's own flip of the pulse's
// target qubit, E_rot(flip) - E_rot(0) under the pulse carrier. Pulses without
// a target report NaN.
std::vector<double> spectator_detunings(const Protocol& prot);

// Omega_k = 2J / sqrt(4k^2 - 1): the drive at which a pi pulse detuned by 2J
// completes k full Rabi cycles and leaves no leakage.
double two_pi_k_omega(double J, int k);

struct RatioCheck {
    std::string name;
    double value;   // should be << 1
    bool pass;      // value < strong_limit
    bool warn;      // strong_limit <= value < 1
};

struct SelectiveReport {
    std::vector<RatioCheck> ratios;
    bool near_fake_transition = false;
    double nearest_fake_J = 0.0;
    double fake_relative_distance = 0.0;

    // All ratios pass and no fake transition is within the window.
    bool ok() const noexcept;
    bool any_fail() const noexcept;  // some ratio >= 1 or fake transition hit
};

struct SelectiveOptions {
    double strong_limit = 0.3;   // "<<" threshold for a ratio
    double fake_window = 0.02;   // relative |J - J_fake| / J_fake
};

// Ratios Omega/J, J/a, 4J/a, Omega sqrt(L/2)/J, Omega sqrt(L/2)/a and the
// fake-transition proximity flag. Never throws.
SelectiveReport validate_selective(const ChainParams& p, double omega,
                                   const SelectiveOptions& opts = {});

// Plain-text pulse table, one pulse per line:
//   index nu omega phi duration t_start source_bits qubit
// source_bits is written qubit 0 first; "-" marks a pulse with no target.
void write_protocol_table(std::ostream& os, const Protocol& prot);
// Parses the table written above (comment lines start with '#').
std::vector<Pulse> read_protocol_table(std::istream& is, int L);

}  // namespace spinqc
