#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "spinqc/errors.hpp"
#include "spinqc/evolve_pert.hpp"
#include "spinqc/fidelity.hpp"

using namespace spinqc;

namespace {

ChainParams chain6(double J = 1.0, int L = 6) {
    ChainParams p;
    p.L = L;
    p.a = 100.0;
    p.J = J;
    return p;
}

// Closed-form two-level amplitudes for c_m(0) = 1, c_p(0) = 0, written with
// the detuning and mean-energy phases split out.
std::pair<Complex, Complex> rabi(double omega, double Em, double Ep, double tau) {
    const double D = Ep - Em, l = std::sqrt(omega * omega + D * D);
    const Complex i(0.0, 1.0);
    const Complex ph = std::exp(-i * D * tau / 2.0 - i * Em * tau);
    return {(std::cos(l * tau / 2) + i * D / l * std::sin(l * tau / 2)) * ph,
            i * omega / l * std::sin(l * tau / 2) * ph};
}

}  // namespace

TEST_CASE("partition of protocol pulses") {
    const ChainParams p = chain6(1.945);
    const Protocol prot = build_entanglement_protocol(p, 0.118);
    const std::uint32_t first = 1U << (p.L - 1);

    const BlockPartition b0 = partition_blocks(prot.pulses[0], p);
    const TwoLevelBlock* blk = b0.find(0);
    REQUIRE(blk != nullptr);
    CHECK(blk->m == 0U);
    CHECK(blk->partner == first);
    CHECK(std::abs(blk->delta) < 1e-9);

    for (std::size_t i = 0; i < prot.pulses.size(); ++i) {
        const BlockPartition part = partition_blocks(prot.pulses[i], p);
        CHECK(part.blocks.size() <= dimension(p.L) / 2);
        std::set<std::uint32_t> seen;
        for (const auto& b : part.blocks) {
            CHECK(seen.insert(b.m).second);
            CHECK(seen.insert(b.partner).second);
            CHECK(b.partner == (b.m ^ (1U << b.qubit)));
            CHECK_FALSE(((b.m >> b.qubit) & 1U));
            CHECK(part.find(b.m) == part.find(b.partner));
        }
        for (std::uint32_t s : part.singletons) CHECK(seen.insert(s).second);
        CHECK(seen.size() == dimension(p.L));

        // the annotated transition is a resonant block
        const auto& tgt = *prot.pulses[i].target;
        const TwoLevelBlock* t = part.find(tgt.source);
        REQUIRE(t != nullptr);
        CHECK(t->qubit == tgt.qubit);
        CHECK(std::abs(t->delta) < 1e-9);

        if (i > 0) {
            const TwoLevelBlock* s = part.find(0);
            REQUIRE(s != nullptr);
            const double r = std::abs(s->delta) / p.J;
            CHECK((std::abs(r - 2.0) < 1e-9 || std::abs(r - 4.0) < 1e-9));
        }
    }
}

TEST_CASE("pairing is symmetric for J in [0.3, 20]") {
    int broken = 0, total = 0;
    double first_broken = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double J = 0.3 + i * (20.0 - 0.3) / 400;
        const ChainParams p = chain6(J);
        if (validate_selective(p, 0.118).near_fake_transition) continue;
        ++total;
        const Protocol prot = build_entanglement_protocol(p, 0.118);
        bool ok = true;
        for (const Pulse& pl : prot.pulses) {
            try {
                partition_blocks(pl, p);
            } catch (const PairingError&) {
                ok = false;
            }
        }
        if (!ok && broken++ == 0) first_broken = J;
    }
    INFO("non-mutual pairings at " << broken << " of " << total << " J values, first at J = " << first_broken);
    CHECK(broken == 0);
}

TEST_CASE("pairing holds in the selective part of the range") {
    for (int i = 0; i <= 200; ++i) {
        const double J = 0.3 + i * (12.0 - 0.3) / 200;
        const ChainParams p = chain6(J);
        const Protocol prot = build_entanglement_protocol(p, 0.118);
        for (const Pulse& pl : prot.pulses) CHECK_NOTHROW(partition_blocks(pl, p));
    }
}

TEST_CASE("non-mutual pairing is reported") {
    const ChainParams p = chain6(20.0);
    const Protocol prot = build_entanglement_protocol(p, 0.118);
    bool thrown = false;
    for (const Pulse& pl : prot.pulses) {
        try {
            partition_blocks(pl, p);
        } catch (const PairingError&) {
            thrown = true;
        }
    }
    CHECK(thrown);
}

TEST_CASE("block_evolve") {
    const double omega = 0.2;
    SUBCASE("resonant pi/2 and pi pulses") {
        auto [cm, cp] = block_evolve(1.0, 0.0, std::numbers::pi / (2 * omega), omega, 3.0, 3.0);
        CHECK(std::norm(cm) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(std::norm(cp) == doctest::Approx(0.5).epsilon(1e-14));
        std::tie(cm, cp) = block_evolve(1.0, 0.0, std::numbers::pi / omega, omega, 3.0, 3.0);
        CHECK(std::norm(cp) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::norm(cm) < 1e-28);
    }

    SUBCASE("weak drive is a pure phase") {
        const auto [cm, cp] = block_evolve(0.6, Complex(0.0, 0.8), 10.0, 1e-12, -2.0, 5.0);
        CHECK(std::abs(std::abs(cm) - 0.6) < 1e-12);
        CHECK(std::abs(std::abs(cp) - 0.8) < 1e-12);
    }

    SUBCASE("matches the two-level formula and is unitary") {
        std::mt19937 rng(21);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const double w = 0.05 + std::abs(u(rng)), Em = 10 * u(rng), Ep = Em + 3 * u(rng);
            const double tau = 20 * std::abs(u(rng));
            const auto [cm, cp] = block_evolve(1.0, 0.0, tau, w, Em, Ep);
            const auto [rm, rp] = rabi(w, Em, Ep, tau);
            CHECK(std::abs(cm - rm) < 1e-12);
            CHECK(std::abs(cp - rp) < 1e-12);

            const Complex a(u(rng), u(rng)), b(u(rng), u(rng));
            const double phi = 3 * u(rng);
            const auto [x, y] = block_evolve(a, b, tau, w, Em, Ep, phi);
            CHECK(std::norm(x) + std::norm(y) == doctest::Approx(std::norm(a) + std::norm(b)).epsilon(1e-13));
        }
    }
}

TEST_CASE("epsilon") {
    const double omega = 0.118;
    CHECK(epsilon_param(omega, 0.0, std::numbers::pi / omega) == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 1; k <= 10; ++k) {
        const double J = 1.0, w = 2 * J / std::sqrt(4.0 * k * k - 1);
        CHECK(epsilon_param(w, 2 * J, std::numbers::pi / w) < 1e-12);
    }
    for (double J : {1.0, 1.945, 5.01}) {
        const double eps = epsilon_param(omega, 2 * J, std::numbers::pi / omega);
        CHECK(eps <= omega * omega / (4 * J * J));
    }
    CHECK_THROWS_AS(epsilon_param(omega, 1.0, -1.0), ArgumentError);

    // agrees with block_evolve on a random grid
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double w = 1e-3 + 2 * u(rng), D = 20 * (u(rng) - 0.5), tau = 100 * u(rng);
        const auto [cm, cp] = block_evolve(1.0, 0.0, tau, w, 0.0, D);
        CHECK(std::abs(std::norm(cp) - epsilon_param(w, D, tau)) < 1e-12);
    }
}

TEST_CASE("eta") {
    CHECK(eta_param(0.118, 100.0) == doctest::Approx(3.481e-7).epsilon(1e-12));
    CHECK(eta_param(0.0, 100.0) == 0.0);
    CHECK_THROWS_AS(eta_param(0.1, 0.0), ArgumentError);
    // eta << eps away from the 2 pi k points
    for (double J : {0.5, 1.0, 1.945, 5.01, 9.99}) {
        const double eps = epsilon_param(0.118, 2 * J, std::numbers::pi / 0.118);
        CHECK(eps > 10 * eta_param(0.118, 100.0));
    }
}

TEST_CASE("block propagation is unitary") {
    for (double J : {0.5, 1.945, 9.99}) {
        const Protocol prot = build_entanglement_protocol(chain6(J, 8), 0.118);
        std::vector<double> norms;
        run_protocol_pert(ground_state(8), prot, {}, [&](std::size_t, const StateVector& s) { norms.push_back(s.norm()); });
        for (double n : norms) CHECK(std::abs(n - 1.0) < 1e-12);
    }
}

TEST_CASE("first pulse alone gives an exact superposition") {
    const ChainParams p = chain6(1.945);
    const Protocol prot = build_entanglement_protocol(p, 0.118);
    const StateVector out = propagate_pulse_pert(ground_state(6), prot.pulses[0], p);
    const std::uint32_t first = 1U << (p.L - 1);
    for (std::uint32_t i = 0; i < out.size(); ++i) {
        if (i == 0 || i == first) {
            CHECK(out.probability(i) == doctest::Approx(0.5).epsilon(1e-14));
        } else {
            CHECK(out.probability(i) == 0.0);
        }
    }
}

TEST_CASE("zero drive: perturbative and exact agree") {
    ChainParams p = chain6(1.3, 5);
    Pulse pl;
    pl.nu = 240.0;
    pl.omega = 0.0;
    pl.duration = 7.0;
    std::mt19937 rng(1);
    std::normal_distribution<double> g;
    std::vector<Complex> amps(dimension(5));
    double n = 0;
    for (auto& c : amps) {
        c = Complex(g(rng), g(rng));
        n += std::norm(c);
    }
    for (auto& c : amps) c /= std::sqrt(n);
    const StateVector psi(5, amps);
    const StateVector a = propagate_pulse(psi, pl, p);
    const StateVector b = propagate_pulse_pert(psi, pl, p);
    for (std::size_t i = 0; i < psi.size(); ++i) CHECK(std::abs(std::abs(b[i]) - std::abs(psi[i])) < 1e-14);
    CHECK(dynamical_fidelity(a, b) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("first-order mode") {
    const Protocol prot = build_entanglement_protocol(chain6(1.945), 0.118);
    PertOptions o;
    o.order = PertOrder::block_pt1;
    PertDiagnostics diag;
    std::vector<double> norms;
    const StateVector pt1 = run_protocol_pert(ground_state(6), prot, o,
                                              [&](std::size_t, const StateVector& s) { norms.push_back(s.norm()); },
                                              &diag);
    for (double x : norms) CHECK(std::abs(x - 1.0) < 1e-10);
    const StateVector exact = run_protocol(ground_state(6), prot);
    const StateVector blk = run_protocol_pert(ground_state(6), prot);
    CHECK(dynamical_fidelity(exact, pt1) > dynamical_fidelity(exact, blk));
    CHECK_THROWS_AS(([&] {
                        PertOptions bad;
                        bad.order = PertOrder::block_pt1;
                        bad.phase_only_off_target = true;
                        propagate_pulse_pert(ground_state(6), prot.pulses[0], prot.params, bad);
                    }()),
                    ArgumentError);
}

namespace {

// Overlap deficit in units of L eta, calibrated at L = 6.
double leakage_constant(PertOrder order, double J, int L) {
    const Protocol prot = build_entanglement_protocol(chain6(J, L), 0.118);
    PertOptions o;
    o.order = order;
    const StateVector exact = run_protocol(ground_state(L), prot);
    const StateVector pert = run_protocol_pert(ground_state(L), prot, o);
    return (1.0 - dynamical_fidelity(exact, pert)) / (L * eta_param(0.118, 100.0));
}

void check_leakage_bound(PertOrder order) {
    double C = 0.0;
    for (double J : {0.5, 1.0, 1.945, 3.0, 5.01, 7.0, 9.99}) C = std::max(C, leakage_constant(order, J, 6));
    INFO("calibrated C = " << C);
    CHECK(C <= 10.0);
    for (int L : {4, 5, 7, 8})
        for (double J : {1.0, 1.945, 5.01}) {
            INFO("L = " << L << ", J = " << J);
            CHECK(leakage_constant(order, J, L) <= C);
        }
}

}  // namespace

TEST_CASE("leakage bound in block-only mode") { check_leakage_bound(PertOrder::block); }

TEST_CASE("leakage bound in first-order mode") { check_leakage_bound(PertOrder::block_pt1); }
