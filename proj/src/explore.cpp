#include "qcausal/explore.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "qcausal/sampling.hpp"

#ifndef QCAUSAL_DATA_DIR
#define QCAUSAL_DATA_DIR "data"
#endif

namespace qcausal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Robustness at or below this value counts as zero when locating crossings.
constexpr double kZeroRobustness = 1e-7;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (trim(s.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
}

int parse_int(const std::string& s, const std::string& what) {
    double v = parse_double(s, what);
    if (v != std::floor(v)) throw std::invalid_argument(what + " must be an integer");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& s, const std::string& what) {
    std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
}

cplx parse_complex(const std::string& s, const std::string& what) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    double re = 0.0, im = 0.0;
    if (!(in >> re)) throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
    if (!(in >> im)) im = 0.0;
    std::string rest;
    if (in >> rest) throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
    return {re, im};
}

SolverStatus status_from_string(const std::string& s) {
    if (s == "optimal") return SolverStatus::optimal;
    if (s == "infeasible") return SolverStatus::infeasible;
    if (s == "inaccurate") return SolverStatus::inaccurate;
    throw std::invalid_argument("unknown solver status '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::string pretty(CausalOrder o) {
    switch (o) {
        case CausalOrder::a_before_b: return "A≺B";
        case CausalOrder::b_before_a: return "B≺A";
        case CausalOrder::a_parallel_b: return "A∥B";
        case CausalOrder::none: return "indefinite";
    }
    return "?";
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

void SweepConfig::validate() const {
    if (grid_q < 2 || grid_theta < 2) throw std::invalid_argument("grid sizes must be at least 2");
    if (jobs < 1) throw std::invalid_argument("jobs must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (!coefficients.within_bound())
        throw std::invalid_argument("coefficients violate the positivity bound (" + format_value(coefficients.bound_value()) +
                                    " > 1/8)");
}

double SweepConfig::q_at(int i) const { return i == grid_q - 1 ? 1.0 : static_cast<double>(i) / (grid_q - 1); }

double SweepConfig::theta_at(int j) const {
    return j == grid_theta - 1 ? kTwoPi : kTwoPi * static_cast<double>(j) / (grid_theta - 1);
}

SolverOptions SweepConfig::solver_options() const {
    SolverOptions o;
    o.tolerance = tolerance;
    return o;
}

std::map<std::string, std::string> parse_config_text(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(n) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(n) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::pair<int, int> parse_grid(const std::string& s) {
    auto x = s.find_first_of("xX");
    if (x == std::string::npos) throw std::invalid_argument("grid must look like NxM, got '" + s + "'");
    return {parse_int(s.substr(0, x), "grid"), parse_int(s.substr(x + 1), "grid")};
}

void apply_config(SweepConfig& cfg, const std::map<std::string, std::string>& kv) {
    // preset first so explicit coefficients override it
    if (auto it = kv.find("preset"); it != kv.end()) {
        cfg.preset = it->second;
        cfg.coefficients = FCoefficients::preset(it->second);
        cfg.preset_given = true;
    }
    bool explicit_c = kv.count("c11") || kv.count("c15") || kv.count("c51");
    if (explicit_c && !cfg.preset_given) cfg.coefficients = FCoefficients{};
    for (const auto& [key, value] : kv) {
        if (key == "preset") continue;
        if (key == "c11" || key == "c15" || key == "c51") {
            cplx c = parse_complex(value, key);
            if (key == "c11") cfg.coefficients.c11 = c;
            if (key == "c15") cfg.coefficients.c15 = c;
            if (key == "c51") cfg.coefficients.c51 = c;
            cfg.preset.clear();
        } else if (key == "grid") {
            std::tie(cfg.grid_q, cfg.grid_theta) = parse_grid(value);
        } else if (key == "grid_q") {
            cfg.grid_q = parse_int(value, key);
        } else if (key == "grid_theta") {
            cfg.grid_theta = parse_int(value, key);
        } else if (key == "tol") {
            cfg.tolerance = parse_double(value, key);
        } else if (key == "jobs") {
            cfg.jobs = parse_int(value, key);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "long") {
            if (parse_bool(value, key)) cfg.grid_q = cfg.grid_theta = 100;
        } else if (key == "keep_going") {
            cfg.keep_going = parse_bool(value, key);
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    SweepConfig cfg;
    apply_config(cfg, parse_config_text(in));
    return cfg;
}

bool SweepResult::all_optimal() const {
    return std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.status == SolverStatus::optimal; });
}

double SweepResult::min_robustness() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : cells) m = std::min(m, c.robustness);
    return m;
}

double SweepResult::max_robustness() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : cells) m = std::max(m, c.robustness);
    return m;
}

double SweepResult::row_variation(int iq) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j < config.grid_theta; ++j) {
        lo = std::min(lo, at(iq, j).robustness);
        hi = std::max(hi, at(iq, j).robustness);
    }
    return hi - lo;
}

SweepFailure::SweepFailure(SweepCell cell)
    : std::runtime_error("solver failed at cell (q = " + format_value(cell.q) + ", theta = " + format_value(cell.theta) +
                         "): " + to_string(cell.status) + (cell.message.empty() ? "" : ", " + cell.message)),
      cell_(std::move(cell)) {}

SweepCell solve_cell(const FCoefficients& c, double q, double theta, const SolverOptions& options) {
    auto t0 = std::chrono::steady_clock::now();
    SweepCell cell;
    cell.q = q;
    cell.theta = theta;
    ProcessMatrix w = conditioned_W(c, q, theta);
    SolverReport report = solve_interior_point(robustness_program(w.op()), options);
    cell.status = report.status;
    cell.raw = report.objective;
    cell.robustness = std::max(report.objective, 0.0);
    cell.message = report.message;
    cell.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return cell;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    std::atomic<int> next{0};
    std::mutex mu;
    int failed_index = n;
    std::exception_ptr failure;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    int t = std::max(1, std::min(jobs, n));
    if (t == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < t; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

SweepResult sweep(const SweepConfig& cfg, const std::function<void(const SweepCell&)>& progress) {
    cfg.validate();
    SweepResult r;
    r.config = cfg;
    const int n = cfg.grid_q * cfg.grid_theta;
    r.cells.resize(n);
    std::mutex mu;
    SolverOptions options = cfg.solver_options();
    parallel_for(n, cfg.jobs, [&](int k) {
        int iq = k / cfg.grid_theta, it = k % cfg.grid_theta;
        SweepCell cell = solve_cell(cfg.coefficients, cfg.q_at(iq), cfg.theta_at(it), options);
        cell.iq = iq;
        cell.itheta = it;
        r.cells[k] = cell;
        if (progress) {
            std::lock_guard<std::mutex> lock(mu);
            progress(cell);
        }
    });
    if (!cfg.keep_going) {
        for (const auto& c : r.cells)
            if (c.status != SolverStatus::optimal) throw SweepFailure(c);
    }
    return r;
}

std::string format_value(double v) { return fmt("%.12g", v); }

void write_csv(const SweepResult& r, std::ostream& out) {
    out << "q,theta,robustness,status,wall_ms\n";
    for (const auto& c : r.cells)
        out << format_value(c.q) << ',' << format_value(c.theta) << ',' << format_value(c.robustness) << ','
            << to_string(c.status) << ',' << fmt("%.3f", c.wall_ms) << '\n';
}

std::vector<SweepCell> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "q,theta,robustness,status,wall_ms")
        throw std::invalid_argument("unexpected CSV header");
    std::vector<SweepCell> cells;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto f = split(line, ',');
        if (f.size() != 5) throw std::invalid_argument("malformed CSV row: " + line);
        SweepCell c;
        c.q = parse_double(f[0], "q");
        c.theta = parse_double(f[1], "theta");
        c.robustness = parse_double(f[2], "robustness");
        c.raw = c.robustness;
        c.status = status_from_string(f[3]);
        c.wall_ms = parse_double(f[4], "wall_ms");
        cells.push_back(c);
    }
    return cells;
}

void write_svg(const SweepResult& r, std::ostream& out, const std::string& title) {
    const int nq = r.config.grid_q, nt = r.config.grid_theta;
    const double cell = std::max(4.0, std::floor(600.0 / std::max(nq, nt)));
    const double left = 70, top = 40, w = cell * nt, h = cell * nq;
    const double lo = r.min_robustness(), hi = r.max_robustness();
    // linear ramp between two fixed endpoint colors
    const double c0[3] = {40, 30, 120}, c1[3] = {250, 220, 40};
    auto color = [&](double v) {
        double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c0[0] + t * (c1[0] - c0[0]))),
                      static_cast<int>(std::lround(c0[1] + t * (c1[1] - c0[1]))),
                      static_cast<int>(std::lround(c0[2] + t * (c1[2] - c0[2]))));
        return std::string(buf);
    };
    const double width = left + w + 140, height = top + h + 60;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
        << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
        << "<stop offset=\"0\" stop-color=\"" << color(lo) << "\"/><stop offset=\"1\" stop-color=\"" << color(hi)
        << "\"/></linearGradient></defs>\n";
    if (!title.empty()) out << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
    out << "<g id=\"cells\" shape-rendering=\"crispEdges\">\n";
    for (const auto& c : r.cells) {
        double x = left + c.itheta * cell, y = top + (nq - 1 - c.iq) * cell;  // q grows upward
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
            << color(c.robustness) << "\" data-q=\"" << format_value(c.q) << "\" data-theta=\"" << format_value(c.theta)
            << "\" data-value=\"" << format_value(c.robustness) << "\" data-status=\"" << to_string(c.status)
            << "\"/>\n";
    }
    out << "</g>\n";
    out << "<text x=\"" << left + w / 2 << "\" y=\"" << top + h + 35 << "\" text-anchor=\"middle\">theta in [0, 2pi]</text>\n";
    out << "<text x=\"20\" y=\"" << top + h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << top + h / 2
        << ")\">q in [0, 1]</text>\n";
    out << "<text x=\"" << left - 5 << "\" y=\"" << top + h << "\" text-anchor=\"end\">0</text>\n";
    out << "<text x=\"" << left - 5 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">1</text>\n";
    const double lx = left + w + 30;
    out << "<g id=\"legend\" data-min=\"" << format_value(lo) << "\" data-max=\"" << format_value(hi) << "\">\n";
    out << "<rect x=\"" << lx << "\" y=\"" << top << "\" width=\"20\" height=\"" << h << "\" fill=\"url(#ramp)\"/>\n";
    out << "<text x=\"" << lx + 25 << "\" y=\"" << top + 10 << "\">max " << format_value(hi) << "</text>\n";
    out << "<text x=\"" << lx + 25 << "\" y=\"" << top + h << "\">min " << format_value(lo) << "</text>\n";
    out << "</g>\n</svg>\n";
}

std::vector<double> robustness_crossings(const SweepResult& r, int itheta, double tol) {
    if (itheta < 0 || itheta >= r.config.grid_theta) throw std::out_of_range("theta index out of range");
    SolverOptions options = r.config.solver_options();
    const double theta = r.config.theta_at(itheta);
    auto positive = [&](double q) {
        SweepCell c = solve_cell(r.config.coefficients, q, theta, options);
        if (c.status != SolverStatus::optimal) throw SweepFailure(c);
        return c.robustness > kZeroRobustness;
    };
    std::vector<double> out;
    for (int i = 0; i + 1 < r.config.grid_q; ++i) {
        bool a = r.at(i, itheta).robustness > kZeroRobustness;
        bool b = r.at(i + 1, itheta).robustness > kZeroRobustness;
        if (a == b) continue;
        double lo = r.config.q_at(i), hi = r.config.q_at(i + 1);
        while (hi - lo > tol) {
            double mid = 0.5 * (lo + hi);
            (positive(mid) == a ? lo : hi) = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

std::string default_anchor_path() { return std::string(QCAUSAL_DATA_DIR) + "/witness_anchors.csv"; }

std::vector<Anchor> load_anchors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open anchor file " + path);
    std::vector<Anchor> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            if (trim(line) != "label,q,theta") throw std::invalid_argument("anchor file must start with label,q,theta");
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 3) throw std::invalid_argument("malformed anchor row: " + line);
        Anchor a{f[0], parse_double(f[1], "q"), parse_double(f[2], "theta")};
        if (a.q < 0.0 || a.q > 1.0) throw std::invalid_argument("anchor q outside [0, 1]: " + line);
        out.push_back(a);
    }
    return out;
}

int AnchorRegion::count() const { return static_cast<int>(std::count(mask.begin(), mask.end(), 1)); }

CoverageReport witness_cover(const FCoefficients& c, const std::vector<Anchor>& anchors, int grid_q, int grid_theta,
                             const SolverOptions& options, int jobs) {
    SweepConfig grid;
    grid.coefficients = c;
    grid.grid_q = grid_q;
    grid.grid_theta = grid_theta;
    grid.jobs = std::max(1, jobs);
    grid.validate();
    for (const auto& a : anchors)
        if (a.q < 0.0 || a.q > 1.0) throw std::invalid_argument("anchor " + a.label + " has q outside [0, 1]");

    const int n = grid_q * grid_theta;
    std::vector<Matrix> ws(n);
    for (int k = 0; k < n; ++k) ws[k] = conditioned_W(c, grid.q_at(k / grid_theta), grid.theta_at(k % grid_theta)).matrix();

    CoverageReport rep;
    rep.grid_q = grid_q;
    rep.grid_theta = grid_theta;
    rep.regions.resize(anchors.size());
    parallel_for(static_cast<int>(anchors.size()), grid.jobs, [&](int i) {
        const Anchor& a = anchors[i];
        WitnessResult wr = optimal_witness(conditioned_W(c, a.q, a.theta), options);
        AnchorRegion& reg = rep.regions[i];
        reg.anchor = a;
        reg.witness_id = i + 1;
        reg.certified = wr.witness.certified;
        reg.anchor_value = wr.value;
        reg.values.resize(n);
        reg.mask.resize(n);
        for (int k = 0; k < n; ++k) {
            reg.values[k] = (wr.witness.op.matrix() * ws[k]).trace().real();
            reg.mask[k] = reg.values[k] < 0.0 ? 1 : 0;
        }
        reg.witness = std::move(wr.witness);
    });
    for (int k = 0; k < n; ++k) {
        bool hit = std::any_of(rep.regions.begin(), rep.regions.end(), [&](const AnchorRegion& r) { return r.mask[k] != 0; });
        if (!hit) rep.uncovered.emplace_back(k / grid_theta, k % grid_theta);
    }
    return rep;
}

std::string DemoReport::text() const {
    std::string s = "[" + name + "]\n";
    for (const auto& l : lines) s += "  " + l + "\n";
    s += passed ? "  result: pass\n" : "  result: FAIL\n";
    return s;
}

const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names = {"heralded", "opposing", "delayed-choice", "nogo", "classical3", "povm"};
    return names;
}

namespace {

Effect basis_effect(int dim, int k) {
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return Effect::from_vector(v);
}

Effect plus_minus(int sign) {
    Vector v(2);
    v << 1.0, static_cast<double>(sign);
    return Effect::from_vector(v);
}

DemoReport demo_heralded() {
    DemoReport r{"heralded", {}, false};
    HeraldedComb hc = heralded_comb(w_ocb());
    ConditionResult c0 = condition(hc.comb, basis_effect(2, 0));
    ConditionResult c1 = condition(hc.comb, basis_effect(2, 1));
    bool complement_sharp = hc.complement && distance(hc.complement->op(), w_sharp().op()) < 1e-9;
    bool valid = c0.validity.valid && c1.validity.valid;
    bool branch0 = distance(c0.process, w_ocb().op()) < 1e-9;
    r.lines.push_back("input: W_OCB, success probability " + fmt("%.6g", hc.p));
    r.lines.push_back("outcome 0: probability " + fmt("%.6g", c0.probability) + ", process = W_OCB: " + (branch0 ? "yes" : "no"));
    r.lines.push_back("outcome 1: probability " + fmt("%.6g", c1.probability) +
                      ", process = W#: " + (distance(c1.process, w_sharp().op()) < 1e-9 ? "yes" : "no"));
    r.passed = std::abs(hc.p - 0.5) < 1e-9 && complement_sharp && valid && branch0;
    r.lines.push_back("p = " + fmt("%.6g", hc.p) + ", complement = " + (complement_sharp ? "W#" : "other") + ", " +
                      (valid ? "both branches valid" : "invalid branch"));
    return r;
}

Comb opposing_example(double* p_out) {
    ProcessMatrix w_ab = markovian_full_rank(0.5);
    ProcessMatrix w_ba(swap_parties(w_ab.op()));
    double p = max_opposing_weight(w_ba, w_ab);
    if (p_out) *p_out = p;
    return opposing_orders_comb(w_ba, w_ab, p);
}

DemoReport demo_opposing() {
    DemoReport r{"opposing", {}, false};
    double p = 0.0;
    Comb comb = opposing_example(&p);
    ConditionResult z0 = condition(comb, basis_effect(2, 0));
    ConditionResult z1 = condition(comb, basis_effect(2, 1));
    ConditionResult xp = condition(comb, plus_minus(+1));
    CausalClass k0 = classify_causal_order(z0.process), k1 = classify_causal_order(z1.process), kp = classify_causal_order(xp.process);
    r.lines.push_back("A≺B input: Markovian full-rank process, r = 0.5; B≺A input: its party swap");
    r.lines.push_back("largest weight p = " + fmt("%.10f", p));
    r.lines.push_back("|0>: probability " + fmt("%.6g", z0.probability) + ", order " + pretty(k0.order));
    r.lines.push_back("|+>: probability " + fmt("%.6g", xp.probability) + ", order " + pretty(kp.order));
    r.lines.push_back("|1>: probability " + fmt("%.6g", z1.probability) + ", order " + pretty(k1.order) +
                      (k1.strictly_a_before_b() ? " (A≺B only)" : " (not A≺B only)"));
    r.passed = k0.strictly_b_before_a() && kp.strictly_a_before_b() && !k1.strictly_a_before_b() && p > 0.0;
    return r;
}

DemoReport demo_delayed_choice() {
    DemoReport r{"delayed-choice", {}, false};
    const double alpha = 0.1, beta = 0.1;
    Comb comb = delayed_choice_comb(alpha, beta);
    CausalClass z[2], x[2];
    for (int k = 0; k < 2; ++k) {
        z[k] = classify_causal_order(condition(comb, basis_effect(2, k)).process);
        x[k] = classify_causal_order(condition(comb, plus_minus(k == 0 ? 1 : -1)).process);
    }
    CausalClass marginal = classify_causal_order(comb.marginal());
    double closed = delayed_choice_lambda_min(alpha, beta);
    double numeric = min_eigenvalue(comb.op());
    r.lines.push_back("alpha = 0.1, beta = 0.1");
    r.lines.push_back("z-basis: " + pretty(z[0].order) + ", " + pretty(z[1].order) + "; x-basis: " + pretty(x[0].order) + ", " +
                      pretty(x[1].order) + "; λ_min = " + fmt("%.3f", closed));
    r.lines.push_back("marginal: " + pretty(marginal.order));
    r.lines.push_back("λ_min closed form " + fmt("%.12f", closed) + ", numeric " + fmt("%.12f", numeric));
    r.passed = z[0].strictly_a_before_b() && z[1].strictly_a_before_b() && x[0].strictly_b_before_a() &&
               x[1].strictly_b_before_a() && marginal.order == CausalOrder::a_parallel_b && std::abs(closed - numeric) < 1e-10;
    return r;
}

DemoReport demo_nogo() {
    DemoReport r{"nogo", {}, false};
    Rng rng(20240611);
    const int trials = 500;
    int consistent = 0, one_strict = 0;
    for (int t = 0; t < trials; ++t) {
        Comb comb = t % 3 == 0   ? random_ordered_comb(CombOrder::a_b_c, rng)
                    : t % 3 == 1 ? random_ordered_comb(CombOrder::b_a_c, rng)
                                 : adversarial_ordered_comb(rng);
        Matrix basis = t % 2 == 0 ? random_unitary(2, rng) : Matrix::Identity(2, 2);
        NoGoReport rep = no_go_check(comb, basis);
        if (rep.consistent) ++consistent;
        for (const auto& c : rep.classes)
            if (c.strictly_a_before_b() || c.strictly_b_before_a()) {
                ++one_strict;
                break;
            }
    }
    r.lines.push_back("random causally ordered combs, random and computational two-outcome bases");
    r.lines.push_back("trials with a strictly ordered outcome: " + std::to_string(one_strict));
    r.lines.push_back(std::to_string(consistent) + "/" + std::to_string(trials) + " trials consistent");
    r.passed = consistent == trials;
    return r;
}

DemoReport demo_classical3() {
    DemoReport r{"classical3", {}, false};
    ThreeOutcomeClassical c = three_outcome_classical(classical_dephasing_process(), 0.5);
    r.lines.push_back("q = " + fmt("%.6g", c.q) + ", p = " + fmt("%.10f", c.p));
    bool ok = std::abs(c.p - 0.5) < 1e-9;
    const bool want_ab[3] = {true, false, false};
    for (int k = 0; k < 3; ++k) {
        ConditionResult res = condition(c.comb, basis_effect(3, k));
        CausalClass cls = classify_causal_order(res.process);
        bool diag = (res.process.matrix() - Matrix(res.process.matrix().diagonal().asDiagonal())).norm() < 1e-12;
        r.lines.push_back("outcome " + std::to_string(k) + ": probability " + fmt("%.6g", res.probability) + ", order " +
                          pretty(cls.order) + (diag ? ", diagonal" : ", not diagonal"));
        ok = ok && diag && (want_ab[k] ? cls.strictly_a_before_b() : cls.strictly_b_before_a());
    }
    r.passed = ok;
    return r;
}

DemoReport demo_povm() {
    DemoReport r{"povm", {}, false};
    Comb comb = opposing_example(nullptr);
    auto effects = two_basis_povm();
    double total = 0.0;
    HermitianOperator sum = HermitianOperator::zero(SpaceLayout::process());
    CausalClass cls[3];
    for (int k = 0; k < 3; ++k) {
        ConditionResult res = condition(comb, effects[k]);
        cls[k] = classify_causal_order(res.process);
        total += res.probability;
        sum = sum + res.process * res.probability;
        r.lines.push_back("E" + std::to_string(k) + ": probability " + fmt("%.6g", res.probability) + ", order " +
                          pretty(cls[k].order) + (res.validity.valid ? ", valid" : ", invalid"));
    }
    double recon = distance(sum, comb.marginal());
    r.lines.push_back("total probability " + fmt("%.12f", total) + ", marginal reconstruction error " + fmt("%.2e", recon));
    r.passed = cls[0].strictly_b_before_a() && cls[1].strictly_a_before_b() && std::abs(total - 1.0) < 1e-9 && recon < 1e-9;
    return r;
}

}  // namespace

DemoReport demo(const std::string& name) {
    if (name == "heralded") return demo_heralded();
    if (name == "opposing") return demo_opposing();
    if (name == "delayed-choice") return demo_delayed_choice();
    if (name == "nogo") return demo_nogo();
    if (name == "classical3") return demo_classical3();
    if (name == "povm") return demo_povm();
    throw std::invalid_argument("unknown demo '" + name + "'");
}

}  // namespace qcausal
