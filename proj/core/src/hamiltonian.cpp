#include "spinqc/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "spinqc/errors.hpp"

namespace spinqc {

void ChainParams::validate() const {
    check_capacity(L);
    if (!std::isfinite(omega0) || !std::isfinite(a) || !std::isfinite(J)) {
        throw ArgumentError("chain parameters must be finite");
    }
    if (a <= 0.0) throw ArgumentError("field-gradient step a must be positive");
    if (J < 0.0) throw ArgumentError("Ising coupling J must be non-negative");
}

double diagonal_energy(std::uint32_t index, const ChainParams& p, double nu) noexcept {
    double zeeman = 0.0;
    double ising = 0.0;
    for (int k = 0; k < p.L; ++k) {
        const double sz = spin_z_bit(index, k);
        zeeman += (p.larmor(k) - nu) * sz;
        if (k + 1 < p.L) ising += sz * spin_z_bit(index, k + 1);
    }
    return -zeeman - 2.0 * p.J * ising;
}

double h0_energy(const BasisState& s, const ChainParams& p) {
    if (s.qubits() != p.L) throw ArgumentError("basis state and chain disagree on L");
    return diagonal_energy(s.index(), p, 0.0);
}

std::vector<FlipDelta> single_flip_deltas(const BasisState& s, const ChainParams& p) {
    const double e0 = h0_energy(s, p);
    std::vector<FlipDelta> out;
    out.reserve(static_cast<std::size_t>(p.L));
    for (int k = 0; k < p.L; ++k) {
        out.push_back({k, std::abs(h0_energy(s.flip(k), p) - e0)});
    }
    return out;
}

RotFrameHam::RotFrameHam(const ChainParams& params, double nu, double omega, double phi)
    : params_(params), nu_(nu), omega_(omega), phi_(phi),
      alpha_(omega * std::cos(phi)), beta_(omega * std::sin(phi)) {
    params_.validate();
    if (!std::isfinite(nu) || !std::isfinite(omega) || !std::isfinite(phi)) {
        throw ArgumentError("pulse fields must be finite");
    }
    if (phi == 0.0) beta_ = 0.0;
    diag_.resize(dimension(params_.L));
    for (std::uint32_t i = 0; i < diag_.size(); ++i) diag_[i] = diagonal_energy(i, params_, nu_);
}

Complex RotFrameHam::coupling(std::uint32_t to, std::uint32_t from) const noexcept {
    const std::uint32_t diff = to ^ from;
    if (diff == 0 || (diff & (diff - 1)) != 0) return {};
    // -(alpha + i beta)/2 I^+ - (alpha - i beta)/2 I^-; I^+ takes an excited
    // bit back to ground.
    const bool lowering_to_ground = (from & diff) != 0;
    return lowering_to_ground ? Complex(-0.5 * alpha_, -0.5 * beta_)
                              : Complex(-0.5 * alpha_, 0.5 * beta_);
}

Eigen::MatrixXcd RotFrameHam::dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (std::uint32_t i = 0; i < size(); ++i) {
        h(i, i) = diag_[i];
        for (int k = 0; k < params_.L; ++k) {
            const std::uint32_t j = i ^ (1U << k);
            h(j, i) = coupling(j, i);
        }
    }
    return h;
}

Eigen::MatrixXd RotFrameHam::dense_real() const {
    if (!is_real()) throw ContractError("dense_real() requires a zero carrier phase");
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (std::uint32_t i = 0; i < size(); ++i) {
        h(i, i) = diag_[i];
        for (int k = 0; k < params_.L; ++k) h(i ^ (1U << k), i) = -0.5 * alpha_;
    }
    return h;
}

void RotFrameHam::apply(std::span<const Complex> x, std::span<Complex> y) const {
    if (x.size() != size() || y.size() != size()) {
        throw ArgumentError("RotFrameHam::apply: vector size mismatch");
    }
    for (std::uint32_t i = 0; i < size(); ++i) {
        Complex acc = diag_[i] * x[i];
        for (int k = 0; k < params_.L; ++k) {
            const std::uint32_t j = i ^ (1U << k);
            acc += coupling(i, j) * x[j];
        }
        y[i] = acc;
    }
}

RotFrameHam build_rot_ham(const ChainParams& p, const Pulse& pulse) {
    return RotFrameHam(p, pulse.nu, pulse.omega, pulse.phi);
}

std::vector<double> fake_transitions(const ChainParams& p) {
    if (p.L < 3) throw ArgumentError("fake transitions need at least 3 qubits");
    std::vector<double> js;
    for (int k = 1; k <= p.L - 3; ++k) {
        js.push_back(p.a * k / 4.0);
        js.push_back(p.a * k / 2.0);
    }
    for (int k = 1; k <= p.L - 2; ++k) {
        js.push_back(p.a * k);
        js.push_back(p.a * k / 3.0);
    }
    std::sort(js.begin(), js.end());
    auto same = [&](double x, double y) { return std::abs(x - y) <= 1e-12 * p.a; };
    js.erase(std::unique(js.begin(), js.end(), same), js.end());
    return js;
}

ChaosEstimate chaos_border(const ChainParams& p) {
    p.validate();
    if (p.L < 2) throw ArgumentError("chaos border needs at least 2 qubits");
    ChaosEstimate est;
    est.M_f = p.L;
    est.DeltaE_f = p.larmor(p.L - 1) - p.larmor(0) + p.J;
    est.delta_f = est.DeltaE_f / est.M_f;
    est.omega_cr = 2.0 * est.delta_f;
    est.omega_cr_approx = p.a + p.J / p.L;
    return est;
}

CouplingCensus coupled_state_census(const ChainParams& p, double nu) {
    const RotFrameHam h(p, nu, 1.0, 0.0);
    CouplingCensus c;
    c.min_coupled = p.L + 1;
    long total = 0;
    const auto& d = h.diagonal();
    for (std::uint32_t s = 0; s < h.size(); ++s) {
        int count = 0;
        for (int k = 0; k < p.L; ++k) {
            const std::uint32_t t = s ^ (1U << k);
            if (h.coupling(t, s) == Complex{}) continue;
            ++count;
            c.max_delta = std::max(c.max_delta, std::abs(d[t] - d[s]));
        }
        c.min_coupled = std::min(c.min_coupled, count);
        c.max_coupled = std::max(c.max_coupled, count);
        total += count;
    }
    c.mean_coupled = static_cast<double>(total) / static_cast<double>(h.size());
    return c;
}

}  // namespace spinqc
