#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spinqc/fidelity.hpp"

namespace spinqc {

enum class SweepParam { J, a, Omega, L };

std::string to_string(SweepParam p);
SweepParam parse_sweep_param(const std::string& name);  // J, a, Omega/omega, L

// `steps` evenly spaced values from..to inclusive. steps >= 2, or steps == 1
// with from == to.
std::vector<double> linspace(double from, double to, int steps);

struct SweepSpec {
    SweepParam param = SweepParam::J;
    std::vector<double> values;  // strictly increasing
    ChainParams base;
    double omega = 0.118;
    Propagator propagator = Propagator::exact;
    PertOrder order = PertOrder::block;
    double fake_window = 0.02;
    double two_pi_k_window = 0.01;
    unsigned threads = 0;  // 0: hardware concurrency

    void validate() const;  // throws ArgumentError
};

struct SweepRow {
    double value = 0.0;
    std::optional<double> f_exact;
    std::optional<double> f_pert;
    std::optional<double> one_minus_f;
    std::string status = "ok";
    std::vector<std::string> flags;
};

// Applies the swept value to a copy of (base, omega).
std::pair<ChainParams, double> sweep_point(const SweepSpec& spec, double value);

// Evaluates every point on a worker pool; rows come back in input order.
// A failing point records its error in `status` and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Single-point evaluation shared by run_sweep and the `run` command.
SweepRow evaluate_point(const SweepSpec& spec, double value);

// Fixed CSV schema: param,value,f_exact,f_pert,one_minus_f,status,flags
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, SweepParam param, const SweepRow& row);
void write_csv(std::ostream& os, SweepParam param, std::span<const SweepRow> rows);

// %.17g, locale independent.
std::string format_number(double x);

struct SlopeResult {
    std::vector<int> Ls;
    std::vector<double> F;
    LinearFit fit;
    double m_th = 0.0;
    double relative_deviation = 0.0;  // |slope - m_th| / |m_th|
    double relative_stderr = 0.0;     // stderr / |slope|; inf for a flat F(L)
    bool weak_coupling = false;       // J within a factor 5 of Omega
};

// F(L) over `Ls` at fixed (J, a, omega), least-squares slope and comparison
// with -Omega^2/(4J^2). Needs >= 3 chain lengths.
SlopeResult slope_scan(const ChainParams& base, double omega, std::span<const int> Ls,
                       Propagator propagator = Propagator::exact, unsigned threads = 0);

// key=value lines; '#' starts a comment. Throws ParseError with the line.
std::map<std::string, std::string> parse_config(std::istream& is);

}  // namespace spinqc
