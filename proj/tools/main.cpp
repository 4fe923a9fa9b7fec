// spinqc: command-line front end for protocol runs, parameter sweeps, slope
// fits, chaos-border reports and regime validation.
//
// Exit codes: 0 ok, 1 usage, 2 validation failure under --strict,
// 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinqc/errors.hpp"
#include "spinqc/sweep.hpp"

using namespace spinqc;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kNumerical = 3 };

struct Options {
    ChainParams chain;
    double omega = 0.118;
    std::string propagator = "exact";
    std::string order = "block";
    std::string walk = "last";
    std::string out;
    std::string config;
    bool strict = false;
    unsigned threads = 0;

    // run
    std::string dump;
    std::string pulses;

    // sweep
    std::string param = "J";
    double from = 0.0, to = 0.0;
    int steps = 0;
    std::vector<double> values;
    double fake_window = 0.02;

    // slope
    int L_min = 4, L_max = 10;
};

// Numeric/string options that may also come from a config file; anything set
// on the command line wins.
struct Registry {
    struct Entry {
        CLI::App* app;
        std::string name;
        CLI::Option* option;
    };
    std::vector<Entry> options;
};

template <class T>
void add(CLI::App* app, Registry& reg, const std::string& name, T& target, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + name, target, help);
    reg.options.push_back({app, name, opt});
}

void add_chain_options(CLI::App* app, Registry& reg, Options& o) {
    add(app, reg, "L", o.chain.L, "number of qubits");
    add(app, reg, "J", o.chain.J, "nearest-neighbour Ising coupling");
    add(app, reg, "a", o.chain.a, "Larmor frequency step between neighbouring qubits");
    add(app, reg, "omega", o.omega, "Rabi frequency");
    add(app, reg, "omega0", o.chain.omega0, "Larmor frequency of qubit 0");
    add(app, reg, "walk", o.walk, "which end the entanglement walk starts from: last or first");
    app->add_option("--config", o.config, "key=value file; command-line flags take precedence");
    app->add_option("--out", o.out, "write output to FILE instead of stdout");
    app->add_flag("--strict", o.strict, "exit with status 2 when the selective-regime check fails");
}

void add_propagation_options(CLI::App* app, Registry& reg, Options& o) {
    add(app, reg, "propagator", o.propagator, "exact, pert or both");
    add(app, reg, "order", o.order, "perturbative order: block or block+pt1");
    add(app, reg, "threads", o.threads, "worker threads (0: all cores)");
}

void apply_config(const Options& o, const Registry& reg) {
    if (o.config.empty()) return;
    std::ifstream in(o.config);
    if (!in) throw ArgumentError("cannot open config file '" + o.config + "'");
    const auto kv = parse_config(in);
    std::map<std::string, CLI::Option*> known;
    for (const auto& e : reg.options)
        if (e.app->parsed()) known[e.name] = e.option;
    for (const auto& [key, value] : kv) {
        const auto it = known.find(key);
        if (it == known.end()) throw ArgumentError("config file: unknown key '" + key + "'");
        if (it->second->count() > 0) continue;
        try {
            it->second->add_result(value);
            it->second->run_callback();
        } catch (const CLI::Error& e) {
            throw ArgumentError("config file: bad value for '" + key + "': " + e.what());
        }
    }
}

Propagator parse_propagator(const std::string& s) {
    if (s == "exact") return Propagator::exact;
    if (s == "pert") return Propagator::pert;
    if (s == "both") return Propagator::both;
    throw ArgumentError("--propagator must be exact, pert or both");
}

PertOrder parse_order(const std::string& s) {
    if (s == "block") return PertOrder::block;
    if (s == "block+pt1") return PertOrder::block_pt1;
    throw ArgumentError("--order must be block or block+pt1");
}

WalkStart parse_walk(const std::string& s) {
    if (s == "last") return WalkStart::last_qubit;
    if (s == "first") return WalkStart::first_qubit;
    throw ArgumentError("--walk must be last or first");
}

// Output sink: --out FILE or stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw ArgumentError("cannot open '" + path + "' for writing");
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

// Reports are for reading; CSV output keeps format_number's 17 digits.
std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void print_selective(std::ostream& os, const SelectiveReport& r) {
    for (const RatioCheck& c : r.ratios) {
        os << "  " << std::left << std::setw(18) << c.name << ' ' << std::setw(24) << num(c.value) << ' '
           << (c.pass ? "pass" : c.warn ? "warn" : "FAIL") << '\n';
    }
    os << "  nearest fake J    " << num(r.nearest_fake_J) << " (relative distance "
       << num(r.fake_relative_distance) << ")" << (r.near_fake_transition ? "  NEAR FAKE TRANSITION" : "")
       << '\n';
}

int cmd_run(const Options& o) {
    const ChainParams& p = o.chain;
    p.validate();
    Protocol prot;
    if (!o.pulses.empty()) {
        std::ifstream in(o.pulses);
        if (!in) throw ArgumentError("cannot open pulse table '" + o.pulses + "'");
        prot = Protocol{p, read_protocol_table(in, p.L)};
        prot.check_contiguous();
    } else {
        prot = build_entanglement_protocol(p, o.omega, parse_walk(o.walk));
    }

    EvaluationOptions eo;
    eo.propagator = parse_propagator(o.propagator);
    eo.order = parse_order(o.order);
    double worst_norm = 0.0;
    eo.norm_observer = [&](std::size_t, double n) { worst_norm = std::max(worst_norm, std::abs(n - 1.0)); };
    const FidelityReport r = evaluate_protocol(prot, eo);
    const SelectiveReport sel = validate_selective(p, o.omega);

    Sink sink(o.out);
    std::ostream& os = sink.os();
    os << "L                 " << r.L << '\n'
       << "J                 " << num(p.J) << '\n'
       << "a                 " << num(p.a) << '\n'
       << "omega             " << num(o.omega) << '\n'
       << "pulses            " << r.pulses << '\n'
       << "T                 " << num(r.T) << '\n';
    if (r.F) os << "F_exact           " << num(*r.F) << '\n';
    if (r.F_pert) os << "F_pert            " << num(*r.F_pert) << '\n';
    os << "one_minus_F       " << num(r.one_minus_F()) << '\n'
       << "M                 " << r.M << '\n'
       << "m_th              " << num(r.m_th) << '\n'
       << "epsilon_worst     " << num(r.epsilon_worst) << '\n'
       << "eta               " << num(r.eta) << '\n';
    if (r.F) os << "max |norm-1|      " << num(worst_norm) << '\n';
    os << "spectator detunings (units of J):";
    for (double d : r.spectator_detunings) os << ' ' << num(p.J > 0 ? d / p.J : d);
    os << '\n';
    os << "selective regime:\n";
    print_selective(os, sel);
    if (r.skipped_degenerate > 0)
        std::cerr << "warning: " << r.skipped_degenerate << " degenerate first-order terms skipped\n";

    if (!o.dump.empty()) {
        std::ofstream d(o.dump);
        if (!d) throw ArgumentError("cannot open '" + o.dump + "' for writing");
        write_state_dump(d, run_protocol(ground_state(p.L), prot));
    }
    if (o.strict && !sel.ok()) return kInvalid;
    return kOk;
}

int cmd_sweep(const Options& o) {
    SweepSpec spec;
    spec.param = parse_sweep_param(o.param);
    if (!o.values.empty()) {
        spec.values = o.values;
    } else {
        spec.values = linspace(o.from, o.to, o.steps);
    }
    spec.base = o.chain;
    spec.omega = o.omega;
    spec.propagator = parse_propagator(o.propagator);
    spec.order = parse_order(o.order);
    spec.fake_window = o.fake_window;
    spec.threads = o.threads;
    spec.validate();

    const std::vector<SweepRow> rows = run_sweep(spec);
    Sink sink(o.out);
    write_csv(sink.os(), spec.param, rows);

    bool invalid = false, failed = false;
    for (const SweepRow& row : rows) {
        if (row.status != "ok") failed = true;
        const auto [p, w] = sweep_point(spec, row.value);
        if (!validate_selective(p, w).ok()) invalid = true;
    }
    if (failed) std::cerr << "warning: some sweep points failed; see the status column\n";
    if (o.strict && invalid) return kInvalid;
    return kOk;
}

int cmd_slope(const Options& o) {
    if (o.L_max - o.L_min < 2) throw ArgumentError("slope fit needs at least 3 chain lengths");
    std::vector<int> Ls;
    for (int L = o.L_min; L <= o.L_max; ++L) Ls.push_back(L);
    const SlopeResult r = slope_scan(o.chain, o.omega, Ls, parse_propagator(o.propagator), o.threads);

    Sink sink(o.out);
    std::ostream& os = sink.os();
    os << "L,F\n";
    for (std::size_t i = 0; i < r.Ls.size(); ++i) os << r.Ls[i] << ',' << format_number(r.F[i]) << '\n';
    os << "# slope " << num(r.fit.slope) << " +- " << num(r.fit.slope_stderr) << '\n'
       << "# intercept " << num(r.fit.intercept) << '\n'
       << "# m_th " << num(r.m_th) << '\n'
       << "# relative deviation " << num(r.relative_deviation) << '\n'
       << "# relative stderr " << num(r.relative_stderr) << '\n';
    if (r.weak_coupling) os << "# warning: J is within a factor 5 of Omega; the slope law is not expected to hold\n";
    if (o.strict && !validate_selective(o.chain, o.omega).ok()) return kInvalid;
    return kOk;
}

int cmd_chaos(const Options& o) {
    const ChaosEstimate c = chaos_border(o.chain);
    Sink sink(o.out);
    std::ostream& os = sink.os();
    os << "M_f               " << c.M_f << '\n'
       << "DeltaE_f          " << num(c.DeltaE_f) << '\n'
       << "delta_f           " << num(c.delta_f) << '\n'
       << "Omega_cr          " << num(c.omega_cr) << '\n'
       << "Omega_cr (a+J/L)  " << num(c.omega_cr_approx) << '\n';
    if (o.chain.L <= kMaxExactQubits) {
        const CouplingCensus n = coupled_state_census(o.chain, o.chain.omega0);
        os << "brute force M_f   min " << n.min_coupled << ", max " << n.max_coupled << ", mean "
           << num(n.mean_coupled) << '\n'
           << "brute force dE_f  " << num(n.max_delta) << '\n';
    }
    const bool chaotic = c.chaotic(o.omega);
    os << "verdict           Omega=" << num(o.omega) << (chaotic ? " above the border: chaos possible\n"
                                                                 : " below the border: no chaos\n");
    if (o.strict && chaotic) return kInvalid;
    return kOk;
}

int cmd_validate(const Options& o) {
    o.chain.validate();
    const SelectiveReport r = validate_selective(o.chain, o.omega);
    Sink sink(o.out);
    print_selective(sink.os(), r);
    sink.os() << "verdict           " << (r.ok() ? "selective" : r.any_fail() ? "not selective" : "marginal") << '\n';
    if (o.strict && !r.ok()) return kInvalid;
    return kOk;
}

int cmd_protocol_dump(const Options& o) {
    const Protocol prot = build_entanglement_protocol(o.chain, o.omega, parse_walk(o.walk));
    Sink sink(o.out);
    write_protocol_table(sink.os(), prot);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Selective-excitation entanglement protocol on an Ising spin chain"};
    app.require_subcommand(1);
    Options o;
    Registry reg;

    CLI::App* run = app.add_subcommand("run", "run the entanglement protocol once and report the fidelity");
    add_chain_options(run, reg, o);
    add_propagation_options(run, reg, o);
    run->add_option("--dump", o.dump, "write the final exact state to FILE");
    run->add_option("--pulses", o.pulses, "replay a pulse table instead of building the protocol");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one parameter and write CSV");
    add_chain_options(sweep, reg, o);
    add_propagation_options(sweep, reg, o);
    add(sweep, reg, "param", o.param, "swept parameter: J, a, Omega or L");
    add(sweep, reg, "from", o.from, "first value");
    add(sweep, reg, "to", o.to, "last value");
    add(sweep, reg, "steps", o.steps, "number of values, inclusive of both ends");
    sweep->add_option("--values", o.values, "explicit increasing list instead of from/to/steps");
    add(sweep, reg, "fake-window", o.fake_window, "relative window for the fake_transition flag");

    CLI::App* slope = app.add_subcommand("slope", "fit F against L and compare with -Omega^2/(4J^2)");
    add_chain_options(slope, reg, o);
    add_propagation_options(slope, reg, o);
    add(slope, reg, "Lmin", o.L_min, "smallest chain");
    add(slope, reg, "Lmax", o.L_max, "largest chain");

    CLI::App* chaos = app.add_subcommand("chaos", "chaos-border estimate and brute-force coupling census");
    add_chain_options(chaos, reg, o);

    CLI::App* validate = app.add_subcommand("validate", "check the selective-excitation inequalities");
    add_chain_options(validate, reg, o);

    CLI::App* dump = app.add_subcommand("protocol-dump", "write the pulse table");
    add_chain_options(dump, reg, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        apply_config(o, reg);
        if (run->parsed()) return cmd_run(o);
        if (sweep->parsed()) {
            if (o.values.empty() && o.steps == 0)
                throw ArgumentError("sweep needs --from, --to and --steps, or --values");
            return cmd_sweep(o);
        }
        if (slope->parsed()) return cmd_slope(o);
        if (chaos->parsed()) return cmd_chaos(o);
        if (validate->parsed()) return cmd_validate(o);
        if (dump->parsed()) return cmd_protocol_dump(o);
    } catch (const ProtocolError& e) {
        std::cerr << "error: protocol undefined: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
