#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "spinqc/errors.hpp"
#include "spinqc/evolve_exact.hpp"
#include "spinqc/fidelity.hpp"

using namespace spinqc;

namespace {

StateVector random_state(int L, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Complex> amps(dimension(L));
    double n = 0.0;
    for (auto& c : amps) {
        c = Complex(g(rng), g(rng));
        n += std::norm(c);
    }
    for (auto& c : amps) c /= std::sqrt(n);
    return StateVector(L, std::move(amps));
}

Pulse make_pulse(double nu, double omega, double phi, double tau, double t0 = 0.0) {
    Pulse pl;
    pl.nu = nu;
    pl.omega = omega;
    pl.phi = phi;
    pl.duration = tau;
    pl.t_start = t0;
    return pl;
}

}  // namespace

TEST_CASE("frame transforms") {
    const StateVector psi = random_state(5, 1);
    const StateVector same = to_rotating(psi, 321.0, 0.0);
    for (std::size_t i = 0; i < psi.size(); ++i) CHECK(same[i] == psi[i]);
    CHECK(same.frame() == Frame::rotating(321.0));

    const StateVector back = from_rotating(to_rotating(psi, 321.0, 17.25), 321.0, 17.25);
    CHECK(back.frame().is_lab());
    for (std::size_t i = 0; i < psi.size(); ++i) CHECK(std::abs(back[i] - psi[i]) < 1e-14);

    // all-ground state: Sum I^z = L/2
    const double nu = 3.0, t = 0.7;
    const StateVector g = to_rotating(ground_state(4), nu, t);
    CHECK(std::abs(g[0] - std::polar(1.0, -nu * t * 2.0)) < 1e-15);

    CHECK_THROWS_AS(to_rotating(same, 321.0, 1.0), ContractError);
    CHECK_THROWS_AS(from_rotating(psi, 321.0, 1.0), ContractError);
    CHECK_THROWS_AS(from_rotating(same, 320.0, 1.0), ContractError);
}

TEST_CASE("pulse propagator is unitary and a semigroup") {
    ChainParams p;
    p.L = 5;
    p.J = 1.3;
    for (double phi : {0.0, 0.9}) {
        const PulsePropagator prop(RotFrameHam(p, 201.0, 0.4, phi));
        const double tau = 12.3;
        const Eigen::MatrixXcd u = prop.unitary(tau);
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
        CHECK((u.adjoint() * u - id).norm() < 1e-10);
        const Eigen::MatrixXcd half = prop.unitary(tau / 2);
        CHECK((half * half - u).norm() < 1e-10);
    }
}

TEST_CASE("energy is conserved within a pulse") {
    ChainParams p;
    p.L = 4;
    p.J = 2.0;
    const RotFrameHam h(p, 151.0, 0.5, 0.0);
    const Eigen::MatrixXcd hd = h.dense();
    const PulsePropagator prop(h);
    const StateVector psi = random_state(4, 2);
    std::vector<Complex> x(psi.amplitudes().begin(), psi.amplitudes().end());
    auto expect = [&](const std::vector<Complex>& v) {
        const Eigen::Map<const Eigen::VectorXcd> m(v.data(), static_cast<Eigen::Index>(v.size()));
        return (m.adjoint() * hd * m)(0, 0).real();
    };
    const double e0 = expect(x);
    prop.apply(x, 3.1);
    const double e1 = expect(x);
    prop.apply(x, 3.1);
    CHECK(std::abs(e1 - e0) < 1e-8);
    CHECK(std::abs(expect(x) - e0) < 1e-8);
}

TEST_CASE("exact pulse agrees with a small-step integrator") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int L = 1; L <= 4; ++L) {
        for (int trial = 0; trial < 3; ++trial) {
            ChainParams p;
            p.L = L;
            p.omega0 = 5.0 * u(rng);
            p.a = 10.0 + 40.0 * u(rng);
            p.J = 3.0 * u(rng);
            const double nu = p.larmor(L - 1) + p.J * (u(rng) - 0.5);
            const double omega = 0.2 + u(rng), phi = 2.0 * u(rng);
            const double t0 = 1.7, tau = 2.0 + 3.0 * u(rng);
            StateVector psi = random_state(L, 100 + static_cast<unsigned>(trial));
            psi.set_time(t0);

            const StateVector out = propagate_pulse(psi, make_pulse(nu, omega, phi, tau, t0), p);

            // lab -> rotating, integrate, rotating -> lab, all by hand
            const Eigen::Index n = Eigen::Index{1} << L;
            Eigen::VectorXcd v(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                double sz = 0.0;
                for (int k = 0; k < L; ++k) sz += ((i >> k) & 1) ? -0.5 : 0.5;
                v[i] = psi[static_cast<std::size_t>(i)] * std::polar(1.0, -nu * t0 * sz);
            }
            v = oracle::rk4(oracle::rot_ham(L, p.omega0, p.a, p.J, nu, omega, phi), v, tau, 20000);
            for (Eigen::Index i = 0; i < n; ++i) {
                double sz = 0.0;
                for (int k = 0; k < L; ++k) sz += ((i >> k) & 1) ? -0.5 : 0.5;
                v[i] *= std::polar(1.0, nu * (t0 + tau) * sz);
                CHECK(std::abs(out[static_cast<std::size_t>(i)] - v[i]) < 1e-6);
            }
            CHECK(out.time() == doctest::Approx(t0 + tau));
        }
    }
}

TEST_CASE("propagate_pulse examples") {
    SUBCASE("zero drive only changes phases") {
        ChainParams p;
        p.L = 4;
        const StateVector psi = random_state(4, 3);
        const StateVector out = propagate_pulse(psi, make_pulse(160.0, 0.0, 0.0, 5.0), p);
        for (std::size_t i = 0; i < psi.size(); ++i)
            CHECK(std::abs(std::abs(out[i]) - std::abs(psi[i])) < 1e-12);
    }

    SUBCASE("resonant pi/2 pulse on one qubit") {
        ChainParams p;
        p.L = 1;
        p.omega0 = 10.0;
        const double omega = 0.3;
        const StateVector out =
            propagate_pulse(ground_state(1), make_pulse(10.0, omega, 0.0, std::numbers::pi / (2 * omega)), p);
        CHECK(std::abs(out.probability(0) - 0.5) < 1e-10);
        CHECK(std::abs(out.probability(1) - 0.5) < 1e-10);
        CHECK(std::abs(out.norm() - 1.0) < 1e-10);
    }

    SUBCASE("contract and capacity errors") {
        ChainParams p;
        p.L = 3;
        CHECK_THROWS_AS(propagate_pulse(ground_state(3), make_pulse(1.0, 0.1, 0.0, 1.0, 2.0), p),
                        ContractError);
        p.L = kMaxExactQubits + 1;
        CHECK_THROWS_AS(propagate_pulse(ground_state(p.L), make_pulse(1.0, 0.1, 0.0, 1.0), p),
                        CapacityError);
    }
}

TEST_CASE("run_protocol") {
    ChainParams p;
    p.L = 6;
    p.J = 1.945;

    const StateVector psi0 = random_state(6, 4);
    const StateVector same = run_protocol(psi0, Protocol{p, {}});
    for (std::size_t i = 0; i < psi0.size(); ++i) CHECK(same[i] == psi0[i]);

    const Protocol prot = build_entanglement_protocol(p, 0.118);
    std::vector<double> norms;
    PropagatorCache cache;
    const StateVector out =
        run_protocol(ground_state(6), prot, [&](std::size_t, const StateVector& s) { norms.push_back(s.norm()); },
                     &cache);
    REQUIRE(norms.size() == 10);
    for (double n : norms) CHECK(std::abs(n - 1.0) < 1e-10);
    CHECK(cache.size() <= prot.pulses.size());
    CHECK(out.time() == doctest::Approx(prot.total_time()));

    const StateVector uncached = run_protocol(ground_state(6), prot);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == uncached[i]);

    const double F = dynamical_fidelity(build_ideal_state(prot), out);
    CHECK(1.0 - F > 5e-4);
    CHECK(1.0 - F < 5e-2);
}

TEST_CASE("state dump") {
    std::ostringstream os;
    write_state_dump(os, ground_state(2));
    CHECK(os.str() == "# t=0\n# index bits re im prob\n0 00 1 0 1\n1 10 0 0 0\n2 01 0 0 0\n3 11 0 0 0\n");
}
