#pragma once

// Command implementations behind the `revhilbert` tool. Each command turns a
// RunConfig into a CommandResult holding the same numbers in a nested JSON
// form and a flat CSV table; render() serializes either one.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "revhilbert/error.hpp"
#include "revhilbert/hilbert.hpp"
#include "revhilbert/kernel_approx.hpp"
#include "revhilbert/numerics.hpp"
#include "revhilbert/optimality.hpp"

namespace revhilbert::cli {

enum class Command { check, approx, sweep, lemmas };
enum class Format { json, csv };

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

inline std::string_view to_string(Command c) {
    switch (c) {
        case Command::check: return "check";
        case Command::approx: return "approx";
        case Command::sweep: return "sweep";
        case Command::lemmas: return "lemmas";
    }
    return "?";
}

inline std::string_view to_string(Format f) {
    return f == Format::json ? "json" : "csv";
}

struct RunConfig {
    Command command = Command::check;
    std::optional<std::filesystem::path> input_path;
    std::optional<std::filesystem::path> output_path;
    std::vector<double> h_list{1.0, 0.75, 0.5};
    double lambda = kTwoSqrtTwo;
    double t_max = 100.0;
    std::size_t grid_points = 400;
    Format format = Format::json;
    double lambda_scale = 1.0;  // lemmas: majorant checked at lambda_scale * lambda0
};

inline void validate(const RunConfig& config) {
    for (const double h : config.h_list) {
        if (!(h >= kMinSweepStep && h <= kMaxSweepStep)) {
            throw InvalidInput("h = " + std::to_string(h) + " outside [0.05, 2]");
        }
    }
    if (config.grid_points < 2) {
        throw InvalidInput("grid must have at least 2 points");
    }
    if (!(config.t_max > 0.0) || !std::isfinite(config.t_max)) {
        throw InvalidInput("t-max must be finite and > 0");
    }
    if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
        throw InvalidInput("lambda must be finite and >= 0");
    }
    if (!(config.lambda_scale > 0.0) || !std::isfinite(config.lambda_scale)) {
        throw InvalidInput("lambda-scale must be finite and > 0");
    }
    if (config.command == Command::check && !config.input_path) {
        throw InvalidInput("check requires --input");
    }
    if ((config.command == Command::approx || config.command == Command::sweep) && config.h_list.empty()) {
        throw InvalidInput("--h needs at least one value");
    }
}

using Cell = std::variant<double, long long, bool, std::string>;

struct CommandResult {
    nlohmann::json results = nlohmann::json::array();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    bool pass = true;
    std::optional<std::string> error;  // set when the command aborted part way
};

// ---------------------------------------------------------------------------
// Input

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_number(std::string_view field, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError("cannot parse '" + std::string(field) + "' as a number", line);
    }
    return value;
}

} // namespace detail

/// Reads vector pairs from CSV: header `a,b`, one (weight, node) row per
/// line, pairs separated by blank lines.
inline std::vector<WeightVectorPair> read_pairs(std::istream& in) {
    std::vector<WeightVectorPair> pairs;
    std::vector<double> a;
    std::vector<double> b;
    std::size_t block_start = 0;
    auto flush = [&] {
        if (a.empty()) return;
        try {
            pairs.emplace_back(std::move(a), std::move(b));
        } catch (const InvalidInput& e) {
            throw InvalidInput("block starting at line " + std::to_string(block_start) + ": " + e.what());
        }
        a.clear();
        b.clear();
    };

    std::string raw;
    std::size_t line = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = detail::trim(raw);
        if (!header_seen) {
            if (text.empty()) continue;
            if (text != "a,b") {
                throw ParseError("expected header 'a,b', got '" + std::string(text) + "'", line);
            }
            header_seen = true;
            continue;
        }
        if (text.empty()) {
            flush();
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
            throw ParseError("expected two comma-separated fields", line);
        }
        const double av = detail::parse_number(text.substr(0, comma), line);
        const double bv = detail::parse_number(text.substr(comma + 1), line);
        if (!(av > 0.0) || !(bv > 0.0) || !std::isfinite(av) || !std::isfinite(bv)) {
            throw InvalidInput("line " + std::to_string(line) + ": entries must be finite and positive");
        }
        if (a.empty()) block_start = line;
        a.push_back(av);
        b.push_back(bv);
    }
    if (!header_seen) {
        throw ParseError("missing header 'a,b'", line + 1);
    }
    flush();
    if (pairs.empty()) {
        throw ParseError("no data rows", line);
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Commands

inline CommandResult cmd_check(const RunConfig& config, const std::vector<WeightVectorPair>& pairs) {
    CommandResult out;
    out.columns = {"block", "n", "T", "S1", "S2", "S3", "lambda_emp", "lhs", "rhs", "holds", "margin"};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto q = compute_quantities(pairs[i]);
        const auto r = check_reverse_hilbert(q, config.lambda);
        out.pass = out.pass && r.holds;
        out.results.push_back({{"block", i},
                               {"n", pairs[i].size()},
                               {"T", q.T},
                               {"S1", q.S1},
                               {"S2", q.S2},
                               {"S3", q.S3},
                               {"lambda_emp", q.lambda_emp},
                               {"lhs", r.lhs},
                               {"rhs", r.rhs},
                               {"holds", r.holds},
                               {"margin", r.margin}});
        out.rows.push_back({static_cast<long long>(i), static_cast<long long>(pairs[i].size()), q.T, q.S1, q.S2,
                            q.S3, q.lambda_emp, r.lhs, r.rhs, r.holds, r.margin});
    }
    return out;
}

inline CommandResult cmd_approx(const RunConfig& config) {
    CommandResult out;
    out.columns = {"h",   "nu",    "delta", "tail_tol", "mass", "max_relative_error", "argmax_t", "bound",
                   "holds", "n", "a_n", "b_n"};
    const auto grid = log_spaced_grid(config.t_max, config.grid_points);
    for (const double h : config.h_list) {
        const auto approx = make_grid_approximation(h, config.t_max);
        const auto scan = approx_error_scan(approx, grid);
        out.pass = out.pass && scan.holds;
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& term : approx.terms) {
            terms.push_back({{"n", term.n}, {"a_n", term.weight}, {"b_n", term.rate}});
            out.rows.push_back({h, static_cast<long long>(approx.nu), approx.delta, approx.tail_tol, approx.mass,
                                scan.max_relative_error, scan.argmax_t, scan.bound, scan.holds,
                                static_cast<long long>(term.n), term.weight, term.rate});
        }
        out.results.push_back({{"h", h},
                               {"nu", approx.nu},
                               {"delta", approx.delta},
                               {"tail_tol", approx.tail_tol},
                               {"mass", approx.mass},
                               {"max_relative_error", scan.max_relative_error},
                               {"argmax_t", scan.argmax_t},
                               {"bound", scan.bound},
                               {"holds", scan.holds},
                               {"terms", std::move(terms)}});
    }
    return out;
}

namespace detail {

inline void append_certificate(CommandResult& out, const LambdaCertificate& c) {
    out.results.push_back({{"h", c.h},
                           {"nu", c.nu},
                           {"delta", c.delta},
                           {"T", c.T},
                           {"S1", c.S1},
                           {"S2", c.S2},
                           {"S3", c.S3},
                           {"lambda_emp", c.lambda_emp},
                           {"lower_bound_g", c.lower_bound_g},
                           {"upper_bound", c.upper_bound},
                           {"gap", c.gap},
                           {"saturated", c.saturated()},
                           {"sandwich", c.sandwich_holds()}});
    out.rows.push_back({c.h, static_cast<long long>(c.nu), c.delta, c.T, c.S1, c.S2, c.S3, c.lambda_emp,
                        c.lower_bound_g, c.upper_bound, c.gap, c.saturated(), c.sandwich_holds()});
}

} // namespace detail

inline CommandResult cmd_sweep(const RunConfig& config) {
    CommandResult out;
    out.columns = {"h",  "nu", "delta", "T", "S1", "S2", "S3", "lambda_emp", "g", "upper_bound", "gap", "saturated",
                   "sandwich"};
    try {
        const auto result = sweep(config.h_list);
        for (const auto& c : result.certificates) {
            detail::append_certificate(out, c);
        }
        out.pass = result.pass();
        if (!result.gap_monotone) {
            out.error = "gap is not monotone along the sweep";
        }
    } catch (const SweepAborted& e) {
        for (const auto& c : e.partial()) {
            detail::append_certificate(out, c);
        }
        out.pass = false;
        out.error = e.what();
    }
    return out;
}

namespace detail {

inline void lemma_row(CommandResult& out, std::string section, std::string label, double value, bool holds) {
    out.pass = out.pass && holds;
    out.results.push_back({{"section", section}, {"label", label}, {"value", value}, {"holds", holds}});
    out.rows.push_back({std::move(section), std::move(label), value, holds});
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

} // namespace detail

namespace detail {

inline std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace detail

inline constexpr double kReferenceA2 = 0.96531;
inline constexpr double kReferenceRatio32 = 0.8177;
inline constexpr double kFourierOracleTol = 1e-8;

/// |int f_t(x) e^{-iwx} dx| from two real quadratures.
inline double fourier_oracle(double w, double t) {
    const QuadratureOptions opts{.abs_tol = 1e-12};
    const auto re = integrate_line([&](double x) { return ft_density(x, t) * std::cos(w * x); }, opts);
    const auto im = integrate_line([&](double x) { return ft_density(x, t) * std::sin(w * x); }, opts);
    return std::hypot(re.value, im.value);
}

inline CommandResult cmd_lemmas(const RunConfig& config) {
    using detail::lemma_row;
    CommandResult out;
    out.columns = {"section", "label", "value", "holds"};

    // Series coefficients: a_n in (0, 1), ratios strictly decreasing.
    constexpr int kLastN = 200;
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= kLastN; ++n) {
        const double a = lm0_coefficient(n).value;
        lemma_row(out, "lm0_coefficient", "n=" + std::to_string(n), a, a > 0.0 && a < 1.0);
    }
    for (int n = 2; n < kLastN; ++n) {
        const double ratio = lm0_coefficient(n + 1).value / lm0_coefficient(n).value;
        lemma_row(out, "lm0_ratio", "n=" + std::to_string(n), ratio, ratio < prev_ratio && ratio < 1.0);
        prev_ratio = ratio;
    }
    const double a2 = lm0_coefficient(2).value;
    const double r32 = lm0_coefficient(3).value / a2;
    lemma_row(out, "reference", "a2", a2, std::abs(a2 - kReferenceA2) <= 1e-5);
    lemma_row(out, "reference", "a3/a2", r32, std::abs(r32 - kReferenceRatio32) <= 1e-4);

    // Majorant at lambda_scale * lambda0: coarse grid on [-20, 20] plus a dense one near 0.
    std::vector<double> grid;
    for (const auto& part : {detail::uniform_grid(-20.0, 20.0, 1001), detail::uniform_grid(-0.5, 0.5, 201)}) {
        std::copy(part.begin(), part.end(), std::back_inserter(grid));
    }
    const double lambda = config.lambda_scale * lambda0();
    const auto major = lm0_majorant_check(grid, lambda);
    lemma_row(out, "lm0_majorant", "lambda=" + detail::short_number(lambda), major.max_violation, major.holds);

    double min_gap = std::numeric_limits<double>::infinity();
    for (const double x : detail::uniform_grid(-10.0, 10.0, 2001)) {
        min_gap = std::min(min_gap, lm0_gap(x));
    }
    lemma_row(out, "lm0_gap", "min on [-10,10]", min_gap, min_gap >= -1e-12);

    // Fourier transform modulus: closed form against quadrature, and the cosh majorant.
    for (const double t : {0.0, 1.0, 10.0}) {
        for (const double w : {0.0, 0.5, 1.0, 3.0}) {
            const std::string label = "t=" + detail::short_number(t) + ",w=" + detail::short_number(w);
            const double closed = ft_hat_magnitude(w, t);
            const double diff = std::abs(closed - fourier_oracle(w, t));
            lemma_row(out, "fourier_oracle", label, diff, diff <= kFourierOracleTol);
            const double majorant = target_kernel(t) / std::cosh(lambda0() * w);
            lemma_row(out, "fourier_majorant", label, majorant - closed, closed <= majorant * (1.0 + kCheckSlack));
        }
    }

    // Envelope f_t(x) <= e^{(2-e)|x|}.
    double worst = -std::numeric_limits<double>::infinity();
    for (const double t : {0.0, 0.5, 1.0, 10.0, 100.0}) {
        for (const double x : detail::uniform_grid(-30.0, 30.0, 1201)) {
            worst = std::max(worst, ft_density(x, t) - std::exp((2.0 - std::numbers::e) * std::abs(x)));
        }
    }
    lemma_row(out, "envelope", "max f_t - envelope", worst, worst <= 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Output

inline nlohmann::json config_json(const RunConfig& c) {
    nlohmann::json j;
    j["command"] = to_string(c.command);
    j["input_path"] = c.input_path ? nlohmann::json(c.input_path->string()) : nlohmann::json(nullptr);
    j["output_path"] = c.output_path ? nlohmann::json(c.output_path->string()) : nlohmann::json(nullptr);
    j["h_list"] = c.h_list;
    j["lambda"] = c.lambda;
    j["t_max"] = c.t_max;
    j["grid_points"] = c.grid_points;
    j["format"] = to_string(c.format);
    j["lambda_scale"] = c.lambda_scale;
    return j;
}

/// 17 significant digits; non-finite values as inf, -inf, nan.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_cell(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_number(v);
            } else if constexpr (std::is_same_v<T, long long>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return v;
            }
        },
        cell);
}

inline std::string render(const RunConfig& config, const CommandResult& result) {
    if (config.format == Format::csv) {
        std::ostringstream os;
        for (std::size_t i = 0; i < result.columns.size(); ++i) {
            os << (i ? "," : "") << result.columns[i];
        }
        os << '\n';
        for (const auto& row : result.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                os << (i ? "," : "") << format_cell(row[i]);
            }
            os << '\n';
        }
        return os.str();
    }
    nlohmann::json doc;
    doc["command"] = to_string(config.command);
    doc["config"] = config_json(config);
    doc["results"] = result.results;
    doc["pass"] = result.pass;
    if (result.error) {
        doc["error"] = *result.error;
    }
    return doc.dump(2) + "\n";
}

/// Runs the configured command. Returns the exit status: kExitPass iff every
/// embedded check holds, kExitFail if a check failed, kExitError on bad
/// input or an aborted computation.
inline int run(const RunConfig& config, std::istream* input, std::ostream& out, std::ostream& err) {
    try {
        validate(config);
        CommandResult result;
        switch (config.command) {
            case Command::check: {
                if (input == nullptr) {
                    throw InvalidInput("check: no input stream");
                }
                result = cmd_check(config, read_pairs(*input));
                break;
            }
            case Command::approx: result = cmd_approx(config); break;
            case Command::sweep: result = cmd_sweep(config); break;
            case Command::lemmas: result = cmd_lemmas(config); break;
        }
        out << render(config, result);
        if (result.error) {
            err << "revhilbert " << to_string(config.command) << ": " << *result.error << '\n';
        }
        return result.pass ? kExitPass : kExitFail;
    } catch (const Error& e) {
        err << "revhilbert " << to_string(config.command) << ": " << e.what() << '\n';
        return kExitError;
    }
}

} // namespace revhilbert::cli
