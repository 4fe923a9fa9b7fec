#pragma once

#include <functional>
#include <map>
#include <memory>
#include <tuple>

#include "spinqc/hamiltonian.hpp"
#include "spinqc/protocol.hpp"
#include "spinqc/spinbasis.hpp"

namespace spinqc {

// |psi>_rot = exp(-i nu t sum_k I^z_k) |psi>_lab. `psi` must be in the lab
// frame; the result is tagged rotating(nu).
StateVector to_rotating(const StateVector& psi, double nu, double t);
// Inverse of to_rotating; `psi` must be tagged rotating(nu).
StateVector from_rotating(const StateVector& psi, double nu, double t);

// exp(-i H tau) for one stationary rotating-frame Hamiltonian, held as its
// spectral decomposition so any duration can be applied.
class PulsePropagator {
public:
    explicit PulsePropagator(const RotFrameHam& h);

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    const Eigen::VectorXd& eigenvalues() const noexcept { return values_; }

    // In-place psi <- exp(-i H tau) psi.
    void apply(std::span<Complex> psi, double tau) const;

    // Dense exp(-i H tau); for tests and small chains.
    Eigen::MatrixXcd unitary(double tau) const;

private:
    Eigen::VectorXd values_;
    bool real_;
    Eigen::MatrixXd vectors_real_;
    Eigen::MatrixXcd vectors_;
};

// Per-worker cache of spectral decompositions keyed by the full Hamiltonian
// definition. Not thread-safe; give each worker its own.
class PropagatorCache {
public:
    const PulsePropagator& get(const ChainParams& p, const Pulse& pulse);
    std::size_t size() const noexcept { return cache_.size(); }
    void clear() noexcept { cache_.clear(); }

private:
    using Key = std::tuple<int, double, double, double, double, double, double>;
    std::map<Key, std::unique_ptr<PulsePropagator>> cache_;
};

// Called after every pulse with its index and the lab-frame state.
using PulseObserver = std::function<void(std::size_t, const StateVector&)>;

// One pulse: rotate into the carrier frame at t_start, evolve for the pulse
// duration, rotate back at t_start + duration. `psi.time()` must equal
// `pulse.t_start`.
StateVector propagate_pulse(const StateVector& psi, const Pulse& pulse, const ChainParams& p,
                            PropagatorCache* cache = nullptr);

// Time-ordered product over every pulse of the protocol.
StateVector run_protocol(const StateVector& psi0, const Protocol& prot,
                         const PulseObserver& observer = {}, PropagatorCache* cache = nullptr);

// Plain-text dump: index bits Re Im |c|^2, one row per basis state.
void write_state_dump(std::ostream& os, const StateVector& psi);

}  // namespace spinqc
