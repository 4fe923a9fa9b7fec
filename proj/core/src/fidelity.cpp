#include "spinqc/fidelity.hpp"

#include <cmath>
#include <numeric>

#include "spinqc/errors.hpp"

namespace spinqc {

StateVector build_ideal_state(const Protocol& prot) {
    // Validates that every pulse is annotated and the branch is unbroken.
    std::uint32_t branch = 0;
    for (std::size_t i = 0; i < prot.pulses.size(); ++i) {
        const auto& tgt = prot.pulses[i].target;
        if (!tgt) throw ProtocolError("pulse " + std::to_string(i + 1) + " has no target transition");
        if (tgt->source != branch) {
            throw ProtocolError("pulse " + std::to_string(i + 1) +
                                " does not act on the state left by the previous pulse");
        }
        branch ^= 1U << tgt->qubit;
    }
    PertOptions opts;
    opts.phase_only_off_target = true;
    return run_protocol_pert(ground_state(prot.params.L), prot, opts);
}

double dynamical_fidelity(const StateVector& ideal, const StateVector& real) {
    if (ideal.qubits() != real.qubits()) throw ContractError("fidelity: states differ in L");
    if (ideal.frame() != real.frame()) throw ContractError("fidelity: states are in different frames");
    if (std::abs(ideal.time() - real.time()) > 1e-9 * std::max(1.0, std::abs(ideal.time()))) {
        throw ContractError("fidelity: states refer to different times");
    }
    Complex overlap = 0.0;
    const auto a = ideal.amplitudes();
    const auto b = real.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) overlap += std::conj(a[i]) * b[i];
    return std::norm(overlap);
}

double predicted_slope(double omega, double J) {
    if (!(J > 0.0)) throw ArgumentError("predicted slope needs J > 0");
    return -omega * omega / (4.0 * J * J);
}

PredictedFidelity predicted_fidelity(int L, double omega, double J) {
    if (L < 3) throw ArgumentError("predicted fidelity needs L >= 3");
    PredictedFidelity out;
    out.M = 2 * L - 3;
    out.slope = predicted_slope(omega, J);
    out.epsilon = -out.slope;
    const double me = out.M * out.epsilon;
    if (me >= 1.0) {
        throw ValidityError("M*epsilon = " + std::to_string(me) + " >= 1: leakage model not valid");
    }
    out.F_ansatz = 0.25 * (2.0 - me + 2.0 * std::sqrt(1.0 - me));
    out.F_linear = out.slope * L + (1.0 + 3.0 * omega * omega / (8.0 * J * J));
    return out;
}

double fidelity_minima_J(double omega, int k) {
    if (k < 1) throw ArgumentError("fidelity minima need k >= 1");
    return 0.5 * omega * std::sqrt(4.0 * k * k - 1.0);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_line needs >= 2 paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ArgumentError("fit_line: all x values coincide");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (fit.slope * x[i] + fit.intercept);
            ssr += r * r;
        }
        fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    }
    return fit;
}

double FidelityReport::one_minus_F() const {
    if (F) return 1.0 - *F;
    if (F_pert) return 1.0 - *F_pert;
    throw ContractError("fidelity report holds no result");
}

FidelityReport evaluate_protocol(const ChainParams& params, double omega, const EvaluationOptions& opts) {
    return evaluate_protocol(build_entanglement_protocol(params, omega), opts);
}

FidelityReport evaluate_protocol(const Protocol& prot, const EvaluationOptions& opts) {
    const ChainParams& p = prot.params;
    FidelityReport rep;
    rep.L = p.L;
    rep.pulses = static_cast<int>(prot.pulses.size());
    rep.M = std::max(0, rep.pulses - 1);
    rep.T = prot.total_time();
    rep.spectator_detunings = spectator_detunings(prot);
    const double omega = prot.pulses.empty() ? 0.0 : prot.pulses.front().omega;
    if (p.J > 0.0) {
        rep.m_th = predicted_slope(omega, p.J);
        rep.epsilon_worst = -rep.m_th;
    }
    rep.eta = eta_param(omega, p.a);

    const StateVector psi0 = ground_state(p.L);
    const StateVector ideal = build_ideal_state(prot);

    if (opts.propagator != Propagator::pert) {
        PulseObserver obs;
        if (opts.norm_observer) {
            obs = [&](std::size_t i, const StateVector& s) { opts.norm_observer(i, s.norm()); };
        }
        rep.F = dynamical_fidelity(ideal, run_protocol(psi0, prot, obs));
    }
    if (opts.propagator != Propagator::exact) {
        PertOptions po;
        po.order = opts.order;
        PertDiagnostics diag;
        rep.F_pert = dynamical_fidelity(ideal, run_protocol_pert(psi0, prot, po, {}, &diag));
        rep.skipped_degenerate = diag.skipped_degenerate;
    }
    return rep;
}

}  // namespace spinqc
