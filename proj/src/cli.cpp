#include "critsys/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "critsys/algebraic.hpp"
#include "critsys/asymptotics.hpp"
#include "critsys/bubble.hpp"
#include "critsys/errors.hpp"
#include "critsys/params.hpp"
#include "critsys/regime.hpp"
#include "critsys/spectral.hpp"

namespace critsys::cli {

using Json = nlohmann::ordered_json;

std::string format17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// ---------------------------------------------------------------- output

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_json(std::ostream& os, const Json& j, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close(2 * depth, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) os << ",\n";
            first = false;
            os << pad << Json(key).dump() << ": ";
            write_json(os, value, depth + 1);
        }
        os << "\n" << close << "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            write_json(os, j[i], depth + 1);
        }
        os << "\n" << close << "]";
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        os << (std::isfinite(v) ? format17(v) : "null");
        return;
    }
    default:
        os << j.dump();
    }
}

std::string json_text(const Json& j) {
    std::ostringstream os;
    write_json(os, j, 0);
    os << "\n";
    return os.str();
}

Json number_or_null(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

enum class Format { json, csv };

/// --out accepts "json" / "csv" (stdout in that format) or a path whose
/// extension selects the format.
struct OutputTarget {
    std::string spec;

    Format format(Format fallback) const {
        if (spec == "json") return Format::json;
        if (spec == "csv") return Format::csv;
        auto ends_with = [&](const char* ext) {
            const std::string e(ext);
            return spec.size() >= e.size() && spec.compare(spec.size() - e.size(), e.size(), e) == 0;
        };
        if (ends_with(".csv")) return Format::csv;
        if (ends_with(".json")) return Format::json;
        return fallback;
    }

    void write(const std::string& text, std::ostream& out) const {
        if (spec.empty() || spec == "json" || spec == "csv") {
            out << text;
            return;
        }
        std::ofstream f(spec);
        if (!f) throw UsageError("cannot open output path " + spec);
        f << text;
    }
};

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << "\n";
    }

    std::string str() const { return os_.str(); }
    std::size_t width() const { return width_; }

private:
    std::size_t width_;
    std::ostringstream os_;
};

std::string csv_bool(bool b) { return b ? "true" : "false"; }
std::string csv_opt(const std::optional<double>& v) { return v ? format17(*v) : ""; }

// ---------------------------------------------------------------- params

struct ParamFlags {
    std::string file;
    int n = 0;
    double s = 0, alpha = 0, mu1 = 0, mu2 = 0, gamma = 0;
    CLI::Option* n_opt = nullptr;
    CLI::Option* s_opt = nullptr;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* mu1_opt = nullptr;
    CLI::Option* mu2_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;

    void attach(CLI::App* app, bool dimension_only = false) {
        app->add_option("--params", file, "JSON file {n, s, alpha, mu1, mu2, gamma}");
        n_opt = app->add_option("--n", n, "spatial dimension");
        s_opt = app->add_option("--s", s, "fractional order");
        if (dimension_only) return;
        alpha_opt = app->add_option("--alpha", alpha, "coupling exponent alpha");
        mu1_opt = app->add_option("--mu1", mu1, "self-interaction mu1");
        mu2_opt = app->add_option("--mu2", mu2, "self-interaction mu2");
        gamma_opt = app->add_option("--gamma", gamma, "coupling strength gamma");
    }

    Json file_object() const {
        if (file.empty()) return Json::object();
        std::ifstream f(file);
        if (!f) throw UsageError("cannot read params file " + file);
        Json j;
        try {
            j = Json::parse(f);
        } catch (const Json::parse_error& e) {
            throw UsageError("params file " + file + " is not valid JSON: " + e.what());
        }
        if (!j.is_object()) throw UsageError("params file must hold a JSON object");
        return j;
    }

    static double field(const Json& j, const char* key, CLI::Option* opt, double flag) {
        if (opt && opt->count() > 0) return flag;
        if (!j.contains(key)) {
            throw UsageError(std::string("missing parameter '") + key + "' (use --params or --" + key + ")");
        }
        if (!j.at(key).is_number()) throw UsageError(std::string("parameter '") + key + "' must be a number");
        return j.at(key).get<double>();
    }

    static int integer_dimension(double v) {
        if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 1e6) {
            throw DomainError("n_integer", format_value(v), "n must be an integer");
        }
        return static_cast<int>(v);
    }

    std::pair<int, double> dimension() const {
        const Json j = file_object();
        return {integer_dimension(field(j, "n", n_opt, n)), field(j, "s", s_opt, s)};
    }

    SystemParams resolve() const {
        const Json j = file_object();
        return make_params(integer_dimension(field(j, "n", n_opt, n)), field(j, "s", s_opt, s),
                           field(j, "alpha", alpha_opt, alpha), field(j, "mu1", mu1_opt, mu1),
                           field(j, "mu2", mu2_opt, mu2), field(j, "gamma", gamma_opt, gamma));
    }
};

Json params_json(const SystemParams& p) {
    return Json{{"n", p.n()},       {"s", p.s()},         {"alpha", p.alpha()},        {"beta", p.beta()},
                {"mu1", p.mu1()},   {"mu2", p.mu2()},     {"gamma", p.gamma()},        {"two_star", p.two_star()}};
}

Json residual_json(const ResidualReport& r) {
    return Json{{"rel_l2_core", r.rel_l2_core},
                {"rel_sup_core", r.rel_sup_core},
                {"truncation_flag", r.truncation_flag}};
}

bool solvable(RegimeLabel label) {
    return label == RegimeLabel::attained_a || label == RegimeLabel::attained_b ||
           label == RegimeLabel::small_gamma_candidate;
}

CouplingSolution solve_for(const SystemParams& p, double tol) {
    const Regime regime = classify(p);
    if (!solvable(regime.label)) {
        throw DomainError("regime", std::string(to_string(regime.label)),
                          "no synchronized (k0, l0) in regime " + std::string(to_string(regime.label)),
                          "regime_mismatch");
    }
    return find_k0_l0(p, tol);
}

// ---------------------------------------------------------------- commands

struct Common {
    ParamFlags params;
    std::string out;
    double tol = 1e-12;
    std::uint64_t seed = 0;
};

std::string cmd_classify(const Common& c) {
    const SystemParams p = c.params.resolve();
    const Regime r = classify(p);
    Json j{{"command", "classify"},
           {"params", params_json(p)},
           {"label", std::string(to_string(r.label))},
           {"gammaA", number_or_null(r.gamma_threshold_a)},
           {"gammaB", number_or_null(r.gamma_threshold_b)},
           {"notes", r.notes}};
    return json_text(j);
}

struct SolveOpts {
    std::string method = "bisection";
    std::size_t check_samples = 0;
};

std::string cmd_solve(const Common& c, const SolveOpts& o) {
    const SystemParams p = c.params.resolve();
    const Regime regime = classify(p);
    Json j{{"command", "solve"}, {"params", params_json(p)}, {"label", std::string(to_string(regime.label))}};

    CouplingSolution sol;
    if (o.method == "ratio") {
        if (regime.label != RegimeLabel::attained_a) {
            throw DomainError("regime", std::string(to_string(regime.label)),
                              "the ratio reduction needs regime ATTAINED_A", "regime_mismatch");
        }
        const RatioReduction rr = solve_ratio_reduction(p, c.tol);
        sol = rr.solution;
        j["x0"] = rr.x0;
        j["y0"] = rr.y0;
    } else {
        sol = solve_for(p, c.tol);
    }
    j["k0"] = sol.k;
    j["l0"] = sol.l;
    j["res1"] = sol.res1;
    j["res2"] = sol.res2;
    j["method"] = o.method;
    if (o.check_samples > 0) {
        const DominationReport d = check_domination(p, sol, o.check_samples, c.seed);
        j["domination"] = Json{{"samples", d.samples},
                               {"feasible", d.feasible},
                               {"violations", d.violations},
                               {"worst_margin", d.worst_margin},
                               {"worst_c", d.worst_c},
                               {"worst_d", d.worst_d},
                               {"seed", c.seed}};
    }
    return json_text(j);
}

std::string cmd_energy(const Common& c, std::optional<double> Ss) {
    const SystemParams p = c.params.resolve();
    const Regime regime = classify(p);
    std::optional<CouplingSolution> sol;
    if (regime.label == RegimeLabel::attained_a || regime.label == RegimeLabel::attained_b) {
        sol = find_k0_l0(p, c.tol);
    }
    const double S = Ss ? *Ss : sobolev_constant_closed_form(p).value;
    const EnergyReport e = least_energy(p, sol, S);
    Json j{{"command", "energy"},
           {"params", params_json(p)},
           {"label", std::string(to_string(e.label))},
           {"dimensionless_A", e.dimensionless_A},
           {"absolute_A", number_or_null(e.absolute_A)},
           {"attained", e.attained},
           {"sobolev_constant", S}};
    j["minimizer_coeffs"] = e.minimizer_coeffs ? Json{{"k", e.minimizer_coeffs->first}, {"l", e.minimizer_coeffs->second}}
                                               : Json(nullptr);
    return json_text(j);
}

struct GridOpts {
    double L = 30.0;
    int N = 128;
    double eps = 1.0;
    CLI::Option* eps_opt = nullptr;
};

std::string cmd_sobolev(const Common& c, const GridOpts& g, bool skip_spectral) {
    const auto [n, s] = c.params.dimension();
    const SobolevConstant cf = sobolev_constant_closed_form(n, s);
    Json j{{"command", "sobolev"},
           {"params", Json{{"n", n}, {"s", s}, {"two_star", critical_exponent(n, s)}}},
           {"closed_form", Json{{"value", cf.value}, {"method", "closed_form"}, {"est_error", cf.est_error}}}};
    if (skip_spectral) {
        j["spectral"] = nullptr;
    } else {
        const std::optional<double> eps = g.eps_opt && g.eps_opt->count() ? std::optional(g.eps) : std::nullopt;
        const SobolevConstant sp = sobolev_constant_spectral(n, s, g.L, g.N, eps);
        j["spectral"] = Json{{"value", sp.value},
                             {"method", "spectral_estimate"},
                             {"est_error", sp.est_error},
                             {"L", g.L},
                             {"N", g.N},
                             {"epsilon", eps.value_or(g.L / 30.0)}};
        j["rel_diff"] = sp.value / cf.value - 1.0;
    }
    return json_text(j);
}

struct VerifyOpts {
    bool skip_doubling = false;
    std::string dump;
    double k = 0, l = 0;
    CLI::Option* k_opt = nullptr;
    CLI::Option* l_opt = nullptr;
};

std::string cmd_verify(const Common& c, const GridOpts& g, const VerifyOpts& o) {
    const SystemParams p = c.params.resolve();
    double k, l;
    const bool given = o.k_opt->count() > 0 || o.l_opt->count() > 0;
    if (given) {
        if (!(o.k_opt->count() && o.l_opt->count())) throw UsageError("--k and --l must be given together");
        k = o.k;
        l = o.l;
    } else {
        const CouplingSolution sol = solve_for(p, c.tol);
        k = sol.k;
        l = sol.l;
    }
    VerifyConfig cfg{g.L, g.N, g.eps, !o.skip_doubling};
    const VerifyResult r = verify_synchronized(p, k, l, cfg);
    if (!o.dump.empty()) dump_field(o.dump, r.bubble, p.s());
    Json j{{"command", "verify"},
           {"params", params_json(p)},
           {"k", k},
           {"l", l},
           {"source", given ? "flags" : "find_k0_l0"},
           {"sobolev_constant", r.sobolev},
           {"grid", Json{{"L", g.L}, {"N", g.N}, {"epsilon", g.eps}, {"doubling", cfg.check_doubling}}},
           {"single", residual_json(r.single)},
           {"first", residual_json(r.first)},
           {"second", residual_json(r.second)}};
    const double ref = r.single.rel_l2_core;
    j["first_vs_single"] = std::abs(r.first.rel_l2_core - ref) / ref;
    j["second_vs_single"] = std::abs(r.second.rel_l2_core - ref) / ref;
    if (!o.dump.empty()) j["dump"] = o.dump;
    return json_text(j);
}

std::string cmd_perturb(const Common& c, const std::vector<double>& Rs, double eps) {
    const SystemParams p = c.params.resolve();
    QuadratureSpec q;
    q.epsilon = eps;
    const auto rows = energy_gap_vs_R(p, Rs, q);
    if (OutputTarget{c.out}.format(Format::json) == Format::csv) {
        Csv csv({"R", "theta1", "theta2", "tR", "sR", "bound", "limit", "rel_gap", "iterations"});
        for (const GapRow& r : rows) {
            csv.row({format17(r.R), format17(r.theta1), format17(r.theta2), format17(r.tR), format17(r.sR),
                     format17(r.bound), format17(r.limit), format17(r.rel_gap), std::to_string(r.iterations)});
        }
        return csv.str();
    }
    Json arr = Json::array();
    for (const GapRow& r : rows) {
        arr.push_back(Json{{"R", r.R},
                           {"theta1", r.theta1},
                           {"theta2", r.theta2},
                           {"tR", r.tR},
                           {"sR", r.sR},
                           {"bound", r.bound},
                           {"limit", r.limit},
                           {"rel_gap", r.rel_gap},
                           {"iterations", r.iterations}});
    }
    return json_text(Json{{"command", "perturb"}, {"params", params_json(p)}, {"epsilon", eps}, {"rows", arr}});
}

std::string cmd_continue(const Common& c, double gamma_max, const std::string& step_text) {
    const SystemParams p = c.params.resolve();
    double step = 0.0;
    if (step_text != "auto") {
        try {
            std::size_t used = 0;
            step = std::stod(step_text, &used);
            if (used != step_text.size()) throw std::invalid_argument(step_text);
        } catch (const std::exception&) {
            throw UsageError("--step must be 'auto' or a number");
        }
        if (!(step > 0.0)) throw DomainError("step_positive", format_value(step), "step must be positive");
    }
    const ContinuationPath path = continuation_branch(p, gamma_max, step, c.tol);
    if (OutputTarget{c.out}.format(Format::json) == Format::csv) {
        Csv csv({"gamma", "k", "l", "k+l", "ordering_ok", "jac_cond", "res1", "res2"});
        for (const auto& s : path.samples) {
            csv.row({format17(s.gamma), format17(s.k), format17(s.l), format17(s.k + s.l), csv_bool(s.ordering_ok),
                     format17(s.jac_cond), format17(s.res1), format17(s.res2)});
        }
        return csv.str();
    }
    Json samples = Json::array();
    for (const auto& s : path.samples) {
        samples.push_back(Json{{"gamma", s.gamma},
                               {"k", s.k},
                               {"l", s.l},
                               {"k+l", s.k + s.l},
                               {"ordering_ok", s.ordering_ok},
                               {"jac_cond", s.jac_cond},
                               {"res1", s.res1},
                               {"res2", s.res2}});
    }
    Json j{{"command", "continue"},
           {"params", params_json(p)},
           {"gamma_max", gamma_max},
           {"initial_step", path.initial_step},
           {"fold_detected", path.fold_detected}};
    j["gamma1_bracket"] = path.gamma1_bracket ? Json::array({path.gamma1_bracket->first, path.gamma1_bracket->second})
                                              : Json(nullptr);
    j["samples"] = samples;
    return json_text(j);
}

// ---------------------------------------------------------------- sweep

constexpr const char* kAxisNames[] = {"n", "s", "alpha", "mu1", "mu2", "gamma"};

std::vector<double> axis_values(const std::string& name, const Json& spec) {
    auto spaced = [&](const Json& a, bool log) {
        if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number_integer()) {
            throw UsageError("axis '" + name + "': expected [start, stop, count]");
        }
        const double lo = a[0].get<double>();
        const double hi = a[1].get<double>();
        const long num = a[2].get<long>();
        if (num < 1) throw UsageError("axis '" + name + "': count must be >= 1");
        if (log && !(lo > 0.0 && hi > 0.0)) throw UsageError("axis '" + name + "': logspace needs positive ends");
        std::vector<double> v(static_cast<std::size_t>(num));
        for (long i = 0; i < num; ++i) {
            const double t = num == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(num - 1);
            v[i] = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
        }
        if (num > 1) v.back() = hi;
        return v;
    };
    if (spec.is_array()) {
        std::vector<double> v;
        for (const auto& x : spec) {
            if (!x.is_number()) throw UsageError("axis '" + name + "': values must be numbers");
            v.push_back(x.get<double>());
        }
        if (v.empty()) throw UsageError("axis '" + name + "' is empty");
        return v;
    }
    if (spec.is_object() && spec.contains("linspace")) return spaced(spec["linspace"], false);
    if (spec.is_object() && spec.contains("logspace")) return spaced(spec["logspace"], true);
    throw UsageError("axis '" + name + "': expected a list, {\"linspace\": [...]} or {\"logspace\": [...]}");
}

struct SweepPoint {
    std::array<double, 6> values{};
};

std::vector<std::string> sweep_row(std::size_t index, const SweepPoint& pt, double tol) {
    std::vector<std::string> row(17);
    row[0] = std::to_string(index);
    for (int i = 0; i < 6; ++i) row[i < 3 ? i + 1 : i + 2] = format17(pt.values[i]);
    try {
        const SystemParams p = make_params(ParamFlags::integer_dimension(pt.values[0]), pt.values[1], pt.values[2],
                                           pt.values[3], pt.values[4], pt.values[5]);
        row[4] = format17(p.beta());
        const Regime r = classify(p);
        row[8] = "ok";
        row[9] = std::string(to_string(r.label));
        row[10] = csv_opt(r.gamma_threshold_a);
        row[11] = csv_opt(r.gamma_threshold_b);
        if (r.label == RegimeLabel::negative_gamma) {
            row[14] = format17(least_energy(p, std::nullopt).dimensionless_A);
        } else if (solvable(r.label)) {
            const CouplingSolution sol = find_k0_l0(p, tol);
            row[12] = format17(sol.k);
            row[13] = format17(sol.l);
            if (r.label != RegimeLabel::small_gamma_candidate) {
                row[14] = format17(least_energy(p, sol).dimensionless_A);
            }
        }
    } catch (const DomainError& e) {
        row[8] = row[9].empty() ? "invalid" : "error";
        row[15] = e.code();
        row[16] = e.constraint();
    } catch (const Error& e) {
        row[8] = "error";
        row[15] = e.code();
        row[16] = e.constraint();
    }
    return row;
}

std::size_t worker_count(std::size_t jobs) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CRITSYS_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

std::string cmd_sweep(const Common& c, const std::string& grid_path) {
    std::ifstream f(grid_path);
    if (!f) throw UsageError("cannot read grid file " + grid_path);
    Json grid;
    try {
        grid = Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw UsageError("grid file is not valid JSON: " + std::string(e.what()));
    }
    if (!grid.is_object() || !grid.contains("axes") || !grid["axes"].is_object()) {
        throw UsageError("grid file needs an \"axes\" object");
    }
    const Json fixed = grid.value("fixed", Json::object());
    double cap = 1e6;
    if (grid.contains("cap")) {
        if (!grid["cap"].is_number()) throw UsageError("grid \"cap\" must be a number");
        cap = grid["cap"].get<double>();
    }
    for (const auto& [key, _] : grid["axes"].items()) {
        if (std::find(std::begin(kAxisNames), std::end(kAxisNames), key) == std::end(kAxisNames)) {
            throw UsageError("unknown axis '" + key + "' (beta is derived from alpha)");
        }
    }

    std::vector<std::vector<double>> axes(6);
    for (int i = 0; i < 6; ++i) {
        const char* name = kAxisNames[i];
        if (grid["axes"].contains(name)) {
            if (fixed.contains(name)) throw UsageError(std::string("'") + name + "' is both an axis and fixed");
            axes[i] = axis_values(name, grid["axes"][name]);
        } else if (fixed.contains(name) && fixed[name].is_number()) {
            axes[i] = {fixed[name].get<double>()};
        } else {
            throw UsageError(std::string("grid is missing '") + name + "' in axes or fixed");
        }
    }

    double total = 1.0;
    for (const auto& a : axes) total *= static_cast<double>(a.size());
    if (total > cap) throw DomainError("grid_cap", format_value(total), "sweep size exceeds cap " + format_value(cap));

    // Cartesian product in (n, s, alpha, mu1, mu2, gamma) order, last axis fastest.
    std::vector<SweepPoint> points(static_cast<std::size_t>(total));
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
        std::size_t rem = idx;
        for (int i = 5; i >= 0; --i) {
            points[idx].values[i] = axes[i][rem % axes[i].size()];
            rem /= axes[i].size();
        }
    }

    std::vector<std::vector<std::string>> rows(points.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) rows[i] = sweep_row(i, points[i], c.tol);
    };
    std::vector<std::thread> pool;
    const std::size_t workers = worker_count(points.size());
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    const std::vector<std::string> header{"index", "n", "s", "alpha", "beta", "mu1", "mu2", "gamma", "status",
                                          "label", "gamma_threshold_a", "gamma_threshold_b", "k0", "l0",
                                          "dimensionless_A", "error", "constraint"};
    if (OutputTarget{c.out}.format(Format::csv) == Format::json) {
        Json arr = Json::array();
        for (const auto& row : rows) {
            Json o = Json::object();
            for (std::size_t i = 0; i < header.size(); ++i) o[header[i]] = row[i];
            arr.push_back(o);
        }
        return json_text(Json{{"command", "sweep"}, {"grid", grid_path}, {"rows", arr}});
    }
    Csv csv(header);
    for (const auto& row : rows) csv.row(row);
    return csv.str();
}

void print_error(std::ostream& err, const std::string& code, const std::string& constraint, const std::string& value,
                 const std::string& message) {
    err << json_text(Json{{"error", code}, {"constraint", constraint}, {"value", value}, {"message", message}});
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Solver and verifier for the coupled critical fractional system", "critsys"};
    app.require_subcommand(1);

    Common c;
    GridOpts grid;
    SolveOpts solve;
    VerifyOpts verify;
    std::optional<double> Ss;
    double Ss_value = 0;
    bool skip_spectral = false;
    std::vector<double> Rs{10.0, 20.0, 40.0};
    double perturb_eps = 1.0;
    double gamma_max = 0.0;
    std::string step = "auto";
    std::string grid_path;

    auto with_output = [&](CLI::App* sub) {
        sub->add_option("--out", c.out, "'json', 'csv', or an output path");
    };
    auto with_tol = [&](CLI::App* sub) { sub->add_option("--tol", c.tol, "residual tolerance"); };

    // One ParamFlags per subcommand; options bind to its members, so the
    // vector is sized once and never reallocated.
    std::vector<ParamFlags> flags(7);

    CLI::App* classify_cmd = app.add_subcommand("classify", "Regime label and thresholds");
    flags[0].attach(classify_cmd);
    with_output(classify_cmd);

    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the algebraic system for (k0, l0)");
    flags[1].attach(solve_cmd);
    with_output(solve_cmd);
    with_tol(solve_cmd);
    solve_cmd->add_option("--method", solve.method, "bisection or ratio")
        ->check(CLI::IsMember({"bisection", "ratio"}));
    solve_cmd->add_option("--check-samples", solve.check_samples, "random (c, d) domination samples");
    solve_cmd->add_option("--seed", c.seed, "seed for randomized checks");

    CLI::App* energy_cmd = app.add_subcommand("energy", "Least energy level");
    flags[2].attach(energy_cmd);
    with_output(energy_cmd);
    with_tol(energy_cmd);
    CLI::Option* Ss_opt = energy_cmd->add_option("--Ss", Ss_value, "Sobolev constant (default: closed form)");

    CLI::App* sobolev_cmd = app.add_subcommand("sobolev", "Sharp Sobolev constant, closed form and spectral");
    flags[3].attach(sobolev_cmd, true);
    with_output(sobolev_cmd);
    sobolev_cmd->add_option("--L", grid.L, "box half-width");
    sobolev_cmd->add_option("--N", grid.N, "points per axis");
    CLI::Option* sob_eps = sobolev_cmd->add_option("--eps", grid.eps, "bubble scale (default L/30)");
    sobolev_cmd->add_flag("--skip-spectral", skip_spectral, "closed form only");

    CLI::App* verify_cmd = app.add_subcommand("verify", "Pseudospectral residuals of the synchronized pair");
    flags[4].attach(verify_cmd);
    with_output(verify_cmd);
    with_tol(verify_cmd);
    verify_cmd->add_option("--L", grid.L, "box half-width");
    verify_cmd->add_option("--N", grid.N, "points per axis");
    verify_cmd->add_option("--eps", grid.eps, "bubble scale");
    verify_cmd->add_flag("--skip-doubling", verify.skip_doubling, "skip the (2L, 2N) truncation check");
    verify_cmd->add_option("--dump", verify.dump, "write the bubble field to a binary file");
    verify.k_opt = verify_cmd->add_option("--k", verify.k, "use this k instead of solving");
    verify.l_opt = verify_cmd->add_option("--l", verify.l, "use this l instead of solving");

    CLI::App* perturb_cmd = app.add_subcommand("perturb", "Separated-bubble energy gap against R");
    flags[5].attach(perturb_cmd);
    with_output(perturb_cmd);
    perturb_cmd->add_option("--R", Rs, "comma-separated separations")->delimiter(',');
    perturb_cmd->add_option("--eps", perturb_eps, "bubble scale");

    CLI::App* continue_cmd = app.add_subcommand("continue", "Continuation branch from gamma = 0");
    flags[6].attach(continue_cmd);
    with_output(continue_cmd);
    with_tol(continue_cmd);
    continue_cmd->add_option("--gamma-max", gamma_max, "end of the branch")->required();
    continue_cmd->add_option("--step", step, "'auto' or a positive step");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep to CSV");
    sweep_cmd->add_option("--grid", grid_path, "grid JSON {axes, fixed, cap}")->required();
    with_output(sweep_cmd);
    with_tol(sweep_cmd);

    std::vector<const char*> argv{"critsys"};
    for (const auto& a : args) argv.push_back(a.c_str());

    CLI::App* active = &app;
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        active = app.get_subcommands().front();
        const CLI::App* subs[] = {classify_cmd, solve_cmd, energy_cmd, sobolev_cmd,
                                  verify_cmd,   perturb_cmd, continue_cmd};
        for (std::size_t i = 0; i < std::size(subs); ++i) {
            if (active == subs[i]) c.params = flags[i];
        }
        grid.eps_opt = sob_eps;
        if (Ss_opt->count()) Ss = Ss_value;

        const bool tabular = active == perturb_cmd || active == continue_cmd || active == sweep_cmd;
        const OutputTarget target{c.out};
        if (!tabular && target.format(Format::json) == Format::csv) {
            throw UsageError("csv output is only available for perturb, continue and sweep");
        }

        std::string text;
        if (active == classify_cmd) text = cmd_classify(c);
        else if (active == solve_cmd) text = cmd_solve(c, solve);
        else if (active == energy_cmd) text = cmd_energy(c, Ss);
        else if (active == sobolev_cmd) text = cmd_sobolev(c, grid, skip_spectral);
        else if (active == verify_cmd) text = cmd_verify(c, grid, verify);
        else if (active == perturb_cmd) text = cmd_perturb(c, Rs, perturb_eps);
        else if (active == continue_cmd) text = cmd_continue(c, gamma_max, step);
        else text = cmd_sweep(c, grid_path);
        target.write(text, out);
        return kExitOk;
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        print_error(err, "usage", e.get_name(), "", e.what());
        err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitUsage;
    } catch (const UsageError& e) {
        print_error(err, "usage", "arguments", "", e.what());
        err << active->help();
        return kExitUsage;
    } catch (const DomainError& e) {
        print_error(err, e.code(), e.constraint(), e.value(), e.what());
        return kExitDomain;
    } catch (const Error& e) {
        print_error(err, e.code(), e.constraint(), e.value(), e.what());
        return kExitNumerical;
    } catch (const std::bad_alloc&) {
        print_error(err, "resources", "memory", "", "out of memory");
        return kExitNumerical;
    }
}

} // namespace critsys::cli
