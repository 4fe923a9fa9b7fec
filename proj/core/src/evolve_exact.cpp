#include "spinqc/evolve_exact.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "spinqc/errors.hpp"

namespace spinqc {

namespace {

void check_time(const StateVector& psi, double t) {
    if (std::abs(psi.time() - t) > 1e-9 * std::max(1.0, std::abs(t))) {
        throw ContractError("state time " + std::to_string(psi.time()) +
                            " does not match pulse start " + std::to_string(t));
    }
}

StateVector rotate_phases(const StateVector& psi, double angle, Frame frame) {
    StateVector out = psi;
    const int L = psi.qubits();
    auto amps = out.amplitudes();
    for (std::uint32_t i = 0; i < amps.size(); ++i) {
        amps[i] *= std::polar(1.0, angle * total_spin_z_bits(i, L));
    }
    out.set_frame(frame);
    return out;
}

}  // namespace

StateVector to_rotating(const StateVector& psi, double nu, double t) {
    if (!psi.frame().is_lab()) throw ContractError("to_rotating expects a lab-frame state");
    return rotate_phases(psi, -nu * t, Frame::rotating(nu));
}

StateVector from_rotating(const StateVector& psi, double nu, double t) {
    if (psi.frame() != Frame::rotating(nu)) {
        throw ContractError("from_rotating: state is not in the frame rotating at nu");
    }
    return rotate_phases(psi, nu * t, Frame::lab());
}

PulsePropagator::PulsePropagator(const RotFrameHam& h) : real_(h.is_real()) {
    if (h.params().L > kMaxExactQubits) {
        throw CapacityError("exact propagator supports L <= " + std::to_string(kMaxExactQubits));
    }
    if (real_) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense_real());
        if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
        values_ = es.eigenvalues();
        vectors_real_ = es.eigenvectors();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense());
        if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
        values_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
    }
}

void PulsePropagator::apply(std::span<Complex> psi, double tau) const {
    const auto n = values_.size();
    if (static_cast<Eigen::Index>(psi.size()) != n) throw ArgumentError("propagator size mismatch");
    Eigen::Map<Eigen::VectorXcd> v(psi.data(), n);
    if (real_) {
        Eigen::MatrixXd parts(n, 2);
        parts.col(0) = v.real();
        parts.col(1) = v.imag();
        Eigen::MatrixXd coeff = vectors_real_.transpose() * parts;
        for (Eigen::Index q = 0; q < n; ++q) {
            const Complex c = Complex(coeff(q, 0), coeff(q, 1)) * std::polar(1.0, -values_(q) * tau);
            coeff(q, 0) = c.real();
            coeff(q, 1) = c.imag();
        }
        parts = vectors_real_ * coeff;
        v.real() = parts.col(0);
        v.imag() = parts.col(1);
    } else {
        Eigen::VectorXcd coeff = vectors_.adjoint() * v;
        for (Eigen::Index q = 0; q < n; ++q) coeff(q) *= std::polar(1.0, -values_(q) * tau);
        v = vectors_ * coeff;
    }
}

Eigen::MatrixXcd PulsePropagator::unitary(double tau) const {
    const auto n = values_.size();
    Eigen::VectorXcd phases(n);
    for (Eigen::Index q = 0; q < n; ++q) phases(q) = std::polar(1.0, -values_(q) * tau);
    if (real_) {
        const Eigen::MatrixXcd v = vectors_real_.cast<Complex>();
        return v * phases.asDiagonal() * v.adjoint();
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

const PulsePropagator& PropagatorCache::get(const ChainParams& p, const Pulse& pulse) {
    const Key key{p.L, p.omega0, p.a, p.J, pulse.nu, pulse.omega, pulse.phi};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        it = cache_.emplace(key, std::make_unique<PulsePropagator>(build_rot_ham(p, pulse))).first;
    }
    return *it->second;
}

StateVector propagate_pulse(const StateVector& psi, const Pulse& pulse, const ChainParams& p,
                            PropagatorCache* cache) {
    if (psi.qubits() != p.L) throw ArgumentError("state and chain disagree on L");
    if (p.L > kMaxExactQubits) {
        throw CapacityError("exact propagator supports L <= " + std::to_string(kMaxExactQubits));
    }
    check_time(psi, pulse.t_start);
    StateVector rot = to_rotating(psi, pulse.nu, pulse.t_start);
    if (cache) {
        cache->get(p, pulse).apply(rot.amplitudes(), pulse.duration);
    } else {
        PulsePropagator(build_rot_ham(p, pulse)).apply(rot.amplitudes(), pulse.duration);
    }
    const double t_end = pulse.t_end();
    StateVector out = from_rotating(rot, pulse.nu, t_end);
    out.set_time(t_end);
    return out;
}

StateVector run_protocol(const StateVector& psi0, const Protocol& prot, const PulseObserver& observer,
                         PropagatorCache* cache) {
    PropagatorCache local;
    PropagatorCache& c = cache ? *cache : local;
    StateVector psi = psi0;
    for (std::size_t i = 0; i < prot.pulses.size(); ++i) {
        psi = propagate_pulse(psi, prot.pulses[i], prot.params, &c);
        if (observer) observer(i, psi);
    }
    return psi;
}

void write_state_dump(std::ostream& os, const StateVector& psi) {
    os << "# t=" << std::setprecision(17) << psi.time() << '\n';
    os << "# index bits re im prob\n";
    for (std::uint32_t i = 0; i < psi.size(); ++i) {
        const Complex c = psi[i];
        os << i << ' ' << BasisState(i, psi.qubits()).label() << ' ' << std::setprecision(17)
           << c.real() << ' ' << c.imag() << ' ' << std::norm(c) << '\n';
    }
}

}  // namespace spinqc
