#include "spinqc/evolve_pert.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "spinqc/errors.hpp"

namespace spinqc {

namespace {

void check_time(const StateVector& psi, double t) {
    if (std::abs(psi.time() - t) > 1e-9 * std::max(1.0, std::abs(t))) {
        throw ContractError("state time does not match pulse start");
    }
}

// sin(x t / 2) / x, finite as x -> 0.
double sinc_half(double x, double t) {
    const double arg = 0.5 * x * t;
    if (std::abs(arg) < 1e-8) return 0.5 * t;
    return std::sin(arg) / x;
}

// Spectral data of one group (block or singleton) of the unperturbed
// per-pulse Hamiltonian. Columns of `vec` are eigenvectors over the group's
// slots (slot 0 = m or the singleton, slot 1 = partner).
struct Group {
    std::array<std::uint32_t, 2> states{};
    int size = 1;
    std::array<double, 2> value{};
    std::array<std::array<Complex, 2>, 2> vec{};  // vec[slot][q]
};

Group diagonalize_block(const TwoLevelBlock& b, double Em, double Ep, Complex g) {
    Group gr;
    gr.states = {b.m, b.partner};
    gr.size = 2;
    const double d = Ep - Em;
    const double lam = std::sqrt(d * d + 4.0 * std::norm(g));
    const double mean = 0.5 * (Em + Ep);
    gr.value = {mean + 0.5 * lam, mean - 0.5 * lam};
    const double h = 0.5 * (d + lam);  // mu_+ - E_m
    const double n = std::sqrt(std::norm(g) + h * h);
    if (n < 1e-300) {
        // g = 0 and E_p < E_m: eigenvectors are the basis states themselves.
        gr.vec[0] = {Complex(0.0), Complex(1.0)};
        gr.vec[1] = {Complex(1.0), Complex(0.0)};
        return gr;
    }
    // v+ = (g, h)/n, v- = (-h, conj g)/n
    gr.vec[0][0] = g / n;
    gr.vec[1][0] = h / n;
    gr.vec[0][1] = -h / n;
    gr.vec[1][1] = std::conj(g) / n;
    return gr;
}

// Annotated transition as an exact two-level rotation; every other state
// keeps only the phase of its diagonal element in the 2x2 problem with its
// nearest-detuned partner (or its bare phase if none is within threshold).
// Nothing is transferred, so pairing need not be mutual.
void phase_only_step(std::span<Complex> c, const RotFrameHam& h, const Pulse& pulse, double thr) {
    if (!pulse.target) throw ProtocolError("phase-only propagation needs an annotated pulse");
    const auto& d = h.diagonal();
    const int L = h.params().L;
    const double tau = pulse.duration;
    const std::uint32_t src = pulse.target->source;
    const std::uint32_t dst = src ^ (1U << pulse.target->qubit);
    const std::uint32_t tm = (src >> pulse.target->qubit) & 1U ? dst : src;
    const std::uint32_t tp = tm ^ (1U << pulse.target->qubit);

    std::vector<Complex> out(c.begin(), c.end());
    for (std::uint32_t s = 0; s < c.size(); ++s) {
        if (s == tm || s == tp || c[s] == Complex{}) continue;
        int best = -1;
        double best_abs = std::numeric_limits<double>::infinity();
        for (int k = 0; k < L; ++k) {
            const double delta = std::abs(d[s ^ (1U << k)] - d[s]);
            if (delta < best_abs) {
                best_abs = delta;
                best = k;
            }
        }
        if (best_abs > thr) {
            out[s] = c[s] * std::polar(1.0, -d[s] * tau);
            continue;
        }
        const std::uint32_t t = s ^ (1U << best);
        const bool s_is_m = ((s >> best) & 1U) == 0;
        const double Em = s_is_m ? d[s] : d[t];
        const double Ep = s_is_m ? d[t] : d[s];
        const auto [um, up] = s_is_m ? block_evolve(1.0, 0.0, tau, pulse.omega, Em, Ep, pulse.phi)
                                     : block_evolve(0.0, 1.0, tau, pulse.omega, Em, Ep, pulse.phi);
        const Complex diag = s_is_m ? um : up;
        const double mag = std::abs(diag);
        out[s] = c[s] * (mag > 0.0 ? diag / mag : std::polar(1.0, -d[s] * tau));
    }
    const auto [cm, cp] = block_evolve(c[tm], c[tp], tau, pulse.omega, d[tm], d[tp], pulse.phi);
    out[tm] = cm;
    out[tp] = cp;
    std::copy(out.begin(), out.end(), c.begin());
}

}  // namespace

const TwoLevelBlock* BlockPartition::find(std::uint32_t index) const {
    if (index >= block_of_.size() || block_of_[index] < 0) return nullptr;
    return &blocks[static_cast<std::size_t>(block_of_[index])];
}

BlockPartition partition_blocks(const Pulse& pulse, const ChainParams& p, std::optional<double> threshold) {
    const RotFrameHam h = build_rot_ham(p, pulse);
    const double thr = threshold.value_or(0.5 * p.a);
    const auto& d = h.diagonal();
    const std::size_t n = d.size();

    std::vector<int> best(n, -1);
    for (std::uint32_t s = 0; s < n; ++s) {
        double best_abs = std::numeric_limits<double>::infinity();
        for (int k = 0; k < p.L; ++k) {
            const double delta = std::abs(d[s ^ (1U << k)] - d[s]);
            if (delta < best_abs) {
                best_abs = delta;
                best[s] = k;
            }
        }
        if (best_abs > thr) best[s] = -1;
    }

    BlockPartition part;
    part.block_of_.assign(n, -1);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (best[s] < 0) {
            part.singletons.push_back(s);
            continue;
        }
        const std::uint32_t t = s ^ (1U << best[s]);
        if (best[t] != best[s]) {
            throw PairingError("state " + BasisState(s, p.L).label() + " pairs with " +
                               BasisState(t, p.L).label() + " but not vice versa (pulse nu=" +
                               std::to_string(pulse.nu) + ")");
        }
        if (part.block_of_[s] >= 0) continue;
        TwoLevelBlock b;
        b.qubit = best[s];
        b.m = (s >> b.qubit) & 1U ? t : s;
        b.partner = b.m ^ (1U << b.qubit);
        b.delta = d[b.partner] - d[b.m];
        b.lambda = std::hypot(pulse.omega, b.delta);
        const auto id = static_cast<std::int32_t>(part.blocks.size());
        part.blocks.push_back(b);
        part.block_of_[s] = id;
        part.block_of_[t] = id;
    }
    return part;
}

std::pair<Complex, Complex> block_evolve(Complex c_m, Complex c_p, double tau, double omega, double E_m,
                                         double E_p, double phi) {
    const double delta = E_p - E_m;
    const double lambda = std::hypot(omega, delta);
    const double c = std::cos(0.5 * lambda * tau);
    const double s = sinc_half(lambda, tau);  // sin(lambda tau/2)/lambda
    const Complex i(0.0, 1.0);
    const Complex global = std::polar(1.0, -0.5 * (E_m + E_p) * tau);
    const Complex u_mm = (c + i * delta * s) * global;
    const Complex u_pp = (c - i * delta * s) * global;
    const Complex u_pm = i * omega * s * std::polar(1.0, -phi) * global;
    const Complex u_mp = i * omega * s * std::polar(1.0, phi) * global;
    return {u_mm * c_m + u_mp * c_p, u_pm * c_m + u_pp * c_p};
}

std::pair<Complex, Complex> block_evolve(const TwoLevelBlock& /*block*/, Complex c_m, Complex c_p,
                                         double tau, double omega, double E_m, double E_p) {
    return block_evolve(c_m, c_p, tau, omega, E_m, E_p, 0.0);
}

double epsilon_param(double omega, double delta, double tau) {
    if (tau < 0.0) throw ArgumentError("pulse duration must be non-negative");
    const double s = omega * sinc_half(std::hypot(omega, delta), tau);
    return s * s;
}

double eta_param(double omega, double a) {
    if (!(a > 0.0)) throw ArgumentError("eta needs a > 0");
    return omega * omega / (4.0 * a * a);
}

StateVector propagate_pulse_pert(const StateVector& psi, const Pulse& pulse, const ChainParams& p,
                                 const PertOptions& opts, PertDiagnostics* diag) {
    if (psi.qubits() != p.L) throw ArgumentError("state and chain disagree on L");
    check_time(psi, pulse.t_start);

    const RotFrameHam h = build_rot_ham(p, pulse);
    const auto& d = h.diagonal();
    const double tau = pulse.duration;

    StateVector rot = to_rotating(psi, pulse.nu, pulse.t_start);
    auto c = rot.amplitudes();

    if (opts.phase_only_off_target) {
        if (opts.order != PertOrder::block) throw ArgumentError("phase-only mode is defined for block order only");
        phase_only_step(c, h, pulse, opts.threshold.value_or(0.5 * p.a));
        const double t_end = pulse.t_end();
        StateVector out = from_rotating(rot, pulse.nu, t_end);
        out.set_time(t_end);
        return out;
    }

    const BlockPartition part = partition_blocks(pulse, p, opts.threshold);

    if (opts.order == PertOrder::block) {
        for (const TwoLevelBlock& b : part.blocks) {
            const double Em = d[b.m], Ep = d[b.partner];
            const auto [cm, cp] = block_evolve(c[b.m], c[b.partner], tau, pulse.omega, Em, Ep, pulse.phi);
            c[b.m] = cm;
            c[b.partner] = cp;
        }
        for (std::uint32_t s : part.singletons) c[s] *= std::polar(1.0, -d[s] * tau);
    } else {
        // Group spectral data, indexed so eigen-coefficient q of a group lives
        // at the basis index of the group's slot q.
        const std::size_t n = c.size();
        const std::vector<Complex> in_amps(c.begin(), c.end());
        std::vector<Group> groups;
        groups.reserve(part.blocks.size() + part.singletons.size());
        std::vector<std::uint32_t> group_of(n);
        std::vector<int> slot_of(n);
        for (const TwoLevelBlock& b : part.blocks) {
            const auto gid = static_cast<std::uint32_t>(groups.size());
            groups.push_back(diagonalize_block(b, d[b.m], d[b.partner], h.coupling(b.m, b.partner)));
            group_of[b.m] = gid;
            slot_of[b.m] = 0;
            group_of[b.partner] = gid;
            slot_of[b.partner] = 1;
        }
        for (std::uint32_t s : part.singletons) {
            Group gr;
            gr.states = {s, s};
            gr.size = 1;
            gr.value = {d[s], d[s]};
            gr.vec[0][0] = 1.0;
            const auto gid = static_cast<std::uint32_t>(groups.size());
            groups.push_back(gr);
            group_of[s] = gid;
            slot_of[s] = 0;
        }
        auto value_at = [&](std::uint32_t idx) { return groups[group_of[idx]].value[slot_of[idx]]; };

        // basis -> eigen coefficients
        std::vector<Complex> a(n);
        for (const Group& gr : groups) {
            for (int q = 0; q < gr.size; ++q) {
                Complex acc = 0.0;
                for (int s = 0; s < gr.size; ++s) acc += std::conj(gr.vec[s][q]) * c[gr.states[s]];
                a[gr.states[q]] = acc;
            }
        }

        const double degenerate = 1e-9 * p.a;
        std::size_t skipped = 0;
        // out = K a, K_{q'q} = <q'|V|q> / (mu_q - mu_q')
        auto apply_k = [&](const std::vector<Complex>& in) {
            std::vector<Complex> out(n);
            for (std::uint32_t s = 0; s < n; ++s) {
                const Group& gs = groups[group_of[s]];
                for (int k = 0; k < p.L; ++k) {
                    const std::uint32_t t = s ^ (1U << k);
                    if (group_of[t] == group_of[s]) continue;
                    const Group& gt = groups[group_of[t]];
                    const Complex v = h.coupling(t, s);
                    for (int q = 0; q < gs.size; ++q) {
                        const Complex src = gs.vec[slot_of[s]][q] * in[gs.states[q]];
                        if (src == Complex{}) continue;
                        const double mu_q = gs.value[q];
                        for (int qp = 0; qp < gt.size; ++qp) {
                            const double den = mu_q - gt.value[qp];
                            if (std::abs(den) < degenerate) {
                                ++skipped;
                                continue;
                            }
                            out[gt.states[qp]] += std::conj(gt.vec[slot_of[t]][qp]) * v * src / den;
                        }
                    }
                }
            }
            return out;
        };

        std::vector<Complex> ka = apply_k(a);
        for (std::size_t i = 0; i < n; ++i) a[i] = (a[i] - ka[i]) * std::polar(1.0, -value_at(static_cast<std::uint32_t>(i)) * tau);
        ka = apply_k(a);
        for (std::size_t i = 0; i < n; ++i) a[i] += ka[i];

        for (const Group& gr : groups) {
            for (int s = 0; s < gr.size; ++s) {
                Complex acc = 0.0;
                for (int q = 0; q < gr.size; ++q) acc += gr.vec[s][q] * a[gr.states[q]];
                c[gr.states[s]] = acc;
            }
        }
        // (I+K)(I-K) = I - K^2 leaves a second-order norm error; restore the
        // input norm so the dressed step stays unitary on the state.
        double before = 0.0, after = 0.0;
        for (const Complex& x : in_amps) before += std::norm(x);
        for (const Complex& x : c) after += std::norm(x);
        if (after > 0.0) {
            const double scale = std::sqrt(before / after);
            for (Complex& x : c) x *= scale;
        }
        if (diag) diag->skipped_degenerate += skipped;
    }

    const double t_end = pulse.t_end();
    StateVector out = from_rotating(rot, pulse.nu, t_end);
    out.set_time(t_end);
    return out;
}

StateVector run_protocol_pert(const StateVector& psi0, const Protocol& prot, const PertOptions& opts,
                              const PulseObserver& observer, PertDiagnostics* diag) {
    StateVector psi = psi0;
    for (std::size_t i = 0; i < prot.pulses.size(); ++i) {
        psi = propagate_pulse_pert(psi, prot.pulses[i], prot.params, opts, diag);
        if (observer) observer(i, psi);
    }
    return psi;
}

}  // namespace spinqc
