#include "spinqc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "spinqc/errors.hpp"

namespace spinqc {

std::string to_string(SweepParam p) {
    switch (p) {
        case SweepParam::J: return "J";
        case SweepParam::a: return "a";
        case SweepParam::Omega: return "Omega";
        case SweepParam::L: return "L";
    }
    return "?";
}

SweepParam parse_sweep_param(const std::string& name) {
    if (name == "J") return SweepParam::J;
    if (name == "a") return SweepParam::a;
    if (name == "Omega" || name == "omega") return SweepParam::Omega;
    if (name == "L") return SweepParam::L;
    throw ArgumentError("unknown sweep parameter '" + name + "' (expected J, a, Omega or L)");
}

std::vector<double> linspace(double from, double to, int steps) {
    if (steps == 1 && from == to) return {from};
    if (steps < 2) throw ArgumentError("a range needs at least 2 steps");
    if (!(to > from)) throw ArgumentError("range end must exceed range start");
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = from + (to - from) * i / (steps - 1);
    out.back() = to;
    return out;
}

void SweepSpec::validate() const {
    if (values.empty()) throw ArgumentError("sweep has no values");
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) throw ArgumentError("swept values must be strictly increasing");
    }
    if (param == SweepParam::L) {
        for (double v : values) {
            if (v != std::floor(v)) throw ArgumentError("L values must be integers");
        }
    }
}

std::pair<ChainParams, double> sweep_point(const SweepSpec& spec, double value) {
    ChainParams p = spec.base;
    double omega = spec.omega;
    switch (spec.param) {
        case SweepParam::J: p.J = value; break;
        case SweepParam::a: p.a = value; break;
        case SweepParam::Omega: omega = value; break;
        case SweepParam::L: p.L = static_cast<int>(value); break;
    }
    return {p, omega};
}

namespace {

std::vector<std::string> point_flags(const SweepSpec& spec, const ChainParams& p, double omega) {
    std::vector<std::string> flags;
    if (p.L >= 3 && p.J > 0.0) {
        for (double jf : fake_transitions(p)) {
            if (std::abs(p.J - jf) / jf < spec.fake_window) {
                flags.push_back("fake_transition");
                break;
            }
        }
    }
    if (omega > 0.0 && p.J > 0.0) {
        // nearest k with Omega_k ~ Omega
        const double kf = 0.5 * std::sqrt(4.0 * p.J * p.J / (omega * omega) + 1.0);
        const int k0 = std::max(1, static_cast<int>(std::lround(kf)));
        for (int k = std::max(1, k0 - 1); k <= k0 + 1; ++k) {
            if (std::abs(omega - two_pi_k_omega(p.J, k)) / two_pi_k_omega(p.J, k) < spec.two_pi_k_window) {
                flags.push_back("two_pi_k=" + std::to_string(k));
                break;
            }
        }
    }
    return flags;
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                try {
                    for (std::size_t i = next++; i < n; i = next++) fn(i);
                } catch (...) {
                    const std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

SweepRow evaluate_point(const SweepSpec& spec, double value) {
    SweepRow row;
    row.value = value;
    try {
        const auto [p, omega] = sweep_point(spec, value);
        row.flags = point_flags(spec, p, omega);
        EvaluationOptions opts;
        opts.propagator = spec.propagator;
        opts.order = spec.order;
        const FidelityReport rep = evaluate_protocol(p, omega, opts);
        row.f_exact = rep.F;
        row.f_pert = rep.F_pert;
        row.one_minus_f = rep.one_minus_F();
    } catch (const std::exception& e) {
        row.status = sanitize(std::string("error: ") + e.what());
    }
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<SweepRow> rows(spec.values.size());
    parallel_for(rows.size(), spec.threads, [&](std::size_t i) { rows[i] = evaluate_point(spec, spec.values[i]); });
    return rows;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& os) { os << "param,value,f_exact,f_pert,one_minus_f,status,flags\n"; }

void write_csv_row(std::ostream& os, SweepParam param, const SweepRow& row) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    std::string flags;
    for (std::size_t i = 0; i < row.flags.size(); ++i) flags += (i ? ";" : "") + row.flags[i];
    os << to_string(param) << ',' << format_number(row.value) << ',' << opt(row.f_exact) << ','
       << opt(row.f_pert) << ',' << opt(row.one_minus_f) << ',' << row.status << ',' << flags << '\n';
}

void write_csv(std::ostream& os, SweepParam param, std::span<const SweepRow> rows) {
    write_csv_header(os);
    for (const SweepRow& r : rows) write_csv_row(os, param, r);
}

SlopeResult slope_scan(const ChainParams& base, double omega, std::span<const int> Ls, Propagator propagator,
                       unsigned threads) {
    if (Ls.size() < 3) throw ArgumentError("slope fit needs at least 3 chain lengths");
    SlopeResult out;
    out.Ls.assign(Ls.begin(), Ls.end());
    out.F.resize(Ls.size());
    parallel_for(Ls.size(), threads, [&](std::size_t i) {
        ChainParams p = base;
        p.L = Ls[i];
        EvaluationOptions opts;
        opts.propagator = propagator == Propagator::both ? Propagator::exact : propagator;
        const FidelityReport rep = evaluate_protocol(p, omega, opts);
        out.F[i] = rep.F ? *rep.F : *rep.F_pert;
    });
    std::vector<double> xs(Ls.begin(), Ls.end());
    out.fit = fit_line(xs, out.F);
    out.m_th = predicted_slope(omega, base.J);
    out.relative_deviation = std::abs(out.fit.slope - out.m_th) / std::abs(out.m_th);
    out.relative_stderr = out.fit.slope == 0.0 ? std::numeric_limits<double>::infinity()
                                               : out.fit.slope_stderr / std::abs(out.fit.slope);
    out.weak_coupling = base.J < 5.0 * omega;
    return out;
}

std::map<std::string, std::string> parse_config(std::istream& is) {
    std::map<std::string, std::string> out;
    std::string raw;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(is, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, line, "expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, key, "empty key");
        if (value.empty()) throw ParseError(lineno, key, "empty value");
        if (out.count(key)) throw ParseError(lineno, key, "duplicate key");
        out[key] = value;
    }
    return out;
}

}  // namespace spinqc
