#include "spinqc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "spinqc/errors.hpp"

namespace spinqc {

void Protocol::check_contiguous(double tol) const {
    double t = 0.0;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const Pulse& pl = pulses[i];
        if (!(pl.duration > 0.0)) {
            throw ProtocolError("pulse " + std::to_string(i + 1) + " has non-positive duration");
        }
        if (std::abs(pl.t_start - t) > tol * std::max(1.0, t)) {
            throw ProtocolError("pulse " + std::to_string(i + 1) +
                                " does not start where the previous pulse ended");
        }
        t = pl.t_end();
    }
}

double resonance_frequency(const BasisState& s, int k, const ChainParams& p) {
    const double gap = h0_energy(s.flip(k), p) - h0_energy(s, p);
    return s.excited(k) ? -gap : gap;
}

Protocol build_entanglement_protocol(const ChainParams& p, double omega, WalkStart start) {
    p.validate();
    if (p.L < 3) {
        throw ProtocolError("entanglement protocol needs L >= 3 (got L=" + std::to_string(p.L) + ")");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw ArgumentError("Rabi frequency must be positive and finite");
    }

    // Sequence of (qubit flipped, pulse area in units of pi).
    std::vector<std::pair<int, double>> steps{{0, 0.5}, {1, 1.0}};
    for (int j = 2; j < p.L; ++j) {
        steps.emplace_back(j, 1.0);
        steps.emplace_back(j - 1, 1.0);
    }
    if (start == WalkStart::last_qubit) {
        for (auto& step : steps) step.first = p.L - 1 - step.first;
    }

    Protocol prot{p, {}};
    std::uint32_t branch = 0;
    double t = 0.0;
    for (const auto& [qubit, area] : steps) {
        const BasisState src(branch, p.L);
        Pulse pl;
        pl.nu = resonance_frequency(src, qubit, p);
        pl.omega = omega;
        pl.phi = 0.0;
        pl.duration = area * std::numbers::pi / omega;
        pl.t_start = t;
        pl.target = Transition{branch, qubit};
        prot.pulses.push_back(pl);
        t = pl.t_end();
        branch ^= 1U << qubit;
    }
    return prot;
}

std::vector<std::uint32_t> branch_states(const Protocol& prot) {
    std::vector<std::uint32_t> out;
    if (prot.pulses.empty()) return {0};
    for (const Pulse& pl : prot.pulses) {
        if (!pl.target) throw ProtocolError("pulse without a target transition");
        out.push_back(pl.target->source);
    }
    const auto& last = *prot.pulses.back().target;
    out.push_back(last.source ^ (1U << last.qubit));
    return out;
}

std::vector<double> spectator_detunings(const Protocol& prot) {
    std::vector<double> out;
    out.reserve(prot.pulses.size());
    for (const Pulse& pl : prot.pulses) {
        if (!pl.target) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const std::uint32_t partner = 1U << pl.target->qubit;
        out.push_back(diagonal_energy(partner, prot.params, pl.nu) -
                      diagonal_energy(0, prot.params, pl.nu));
    }
    return out;
}

double two_pi_k_omega(double J, int k) {
    if (k < 1) throw ArgumentError("2 pi k condition needs k >= 1");
    return 2.0 * J / std::sqrt(4.0 * k * k - 1.0);
}

bool SelectiveReport::ok() const noexcept {
    return !near_fake_transition &&
           std::all_of(ratios.begin(), ratios.end(), [](const RatioCheck& r) { return r.pass; });
}

bool SelectiveReport::any_fail() const noexcept {
    return near_fake_transition ||
           std::any_of(ratios.begin(), ratios.end(), [](const RatioCheck& r) { return !r.pass && !r.warn; });
}

SelectiveReport validate_selective(const ChainParams& p, double omega, const SelectiveOptions& opts) {
    SelectiveReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    auto ratio = [&](const char* name, double num, double den) {
        const double v = den > 0.0 ? num / den : inf;
        const bool finite = std::isfinite(v);
        rep.ratios.push_back({name, v, finite && v < opts.strong_limit,
                              finite && v >= opts.strong_limit && v < 1.0});
    };
    const double root = std::sqrt(std::max(p.L, 0) / 2.0);
    ratio("Omega/J", omega, p.J);
    ratio("J/a", p.J, p.a);
    ratio("4J/a", 4.0 * p.J, p.a);
    ratio("Omega*sqrt(L/2)/J", omega * root, p.J);
    ratio("Omega*sqrt(L/2)/a", omega * root, p.a);

    if (p.L >= 3 && p.a > 0.0) {
        double best = inf;
        for (double jf : fake_transitions(p)) {
            const double rel = std::abs(p.J - jf) / jf;
            if (rel < best) {
                best = rel;
                rep.nearest_fake_J = jf;
            }
        }
        rep.fake_relative_distance = best;
        rep.near_fake_transition = best < opts.fake_window;
    }
    return rep;
}

void write_protocol_table(std::ostream& os, const Protocol& prot) {
    os << "# L=" << prot.params.L << " omega0=" << std::setprecision(17) << prot.params.omega0
       << " a=" << prot.params.a << " J=" << prot.params.J << '\n';
    os << "# index nu omega phi duration t_start source qubit\n";
    for (std::size_t i = 0; i < prot.pulses.size(); ++i) {
        const Pulse& pl = prot.pulses[i];
        os << (i + 1) << ' ' << std::setprecision(17) << pl.nu << ' ' << pl.omega << ' ' << pl.phi
           << ' ' << pl.duration << ' ' << pl.t_start << ' ';
        if (pl.target) {
            os << BasisState(pl.target->source, prot.params.L).label() << ' ' << pl.target->qubit;
        } else {
            os << "- -";
        }
        os << '\n';
    }
}

std::vector<Pulse> read_protocol_table(std::istream& is, int L) {
    check_capacity(L);
    std::vector<Pulse> pulses;
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos || raw[first] == '#') continue;
        std::istringstream in(raw);
        long index = 0;
        Pulse pl;
        std::string bits, qubit;
        if (!(in >> index)) throw ParseError(lineno, "index", "expected an integer");
        if (!(in >> pl.nu)) throw ParseError(lineno, "nu", "expected a number");
        if (!(in >> pl.omega)) throw ParseError(lineno, "omega", "expected a number");
        if (!(in >> pl.phi)) throw ParseError(lineno, "phi", "expected a number");
        if (!(in >> pl.duration) || !(pl.duration > 0.0)) {
            throw ParseError(lineno, "duration", "expected a positive number");
        }
        if (!(in >> pl.t_start)) throw ParseError(lineno, "t_start", "expected a number");
        if (!(in >> bits >> qubit)) throw ParseError(lineno, "source", "missing source/qubit columns");
        if (bits != "-") {
            if (bits.size() != static_cast<std::size_t>(L) ||
                bits.find_first_not_of("01") != std::string::npos) {
                throw ParseError(lineno, "source", "expected " + std::to_string(L) + " bits");
            }
            std::uint32_t src = 0;
            for (int k = 0; k < L; ++k) {
                if (bits[static_cast<std::size_t>(k)] == '1') src |= 1U << k;
            }
            int q = -1;
            try {
                q = std::stoi(qubit);
            } catch (const std::exception&) {
                throw ParseError(lineno, "qubit", "expected an integer");
            }
            if (q < 0 || q >= L) throw ParseError(lineno, "qubit", "outside [0, L)");
            pl.target = Transition{src, q};
        }
        if (index != static_cast<long>(pulses.size()) + 1) {
            throw ParseError(lineno, "index", "pulses must be numbered consecutively from 1");
        }
        pulses.push_back(pl);
    }
    return pulses;
}

}  // namespace spinqc
