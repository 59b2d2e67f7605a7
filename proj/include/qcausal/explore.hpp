#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qcausal/causal_sdp.hpp"
#include "qcausal/conditioning.hpp"

namespace qcausal {

// Parameters of a (q, theta) experiment. Grids are uniform with inclusive
// endpoints: q in [0, 1], theta in [0, 2 pi].
struct SweepConfig {
    std::string preset = "star";  // empty when coefficients were given explicitly
    FCoefficients coefficients = FCoefficients::preset("star");
    bool preset_given = false;    // explicit coefficients start from zero unless a preset was named
    int grid_q = 20;
    int grid_theta = 20;
    double tolerance = 1e-8;
    int jobs = 1;
    std::string out_dir = ".";
    bool keep_going = false;  // record failing cells instead of aborting

    void validate() const;  // throws std::invalid_argument
    double q_at(int i) const;
    double theta_at(int j) const;
    SolverOptions solver_options() const;
};

// Flat key = value format, one pair per line. '#' starts a comment; blank
// lines are ignored. Keys: preset, c11, c15, c51 (each "re im" or "re,im"),
// grid ("NxM"), grid_q, grid_theta, tol, jobs, out, long (true/false),
// keep_going (true/false). Unknown keys are an error. Coefficients given
// without any preset start from zero; with a preset they override its values.
std::map<std::string, std::string> parse_config_text(std::istream& in);
void apply_config(SweepConfig& cfg, const std::map<std::string, std::string>& kv);
SweepConfig load_config(const std::string& path);

// "NxM" -> {N, M}
std::pair<int, int> parse_grid(const std::string& s);

struct SweepCell {
    int iq = 0;
    int itheta = 0;
    double q = 0.0;
    double theta = 0.0;
    double robustness = 0.0;  // max(raw, 0)
    double raw = 0.0;         // solver objective before clamping
    SolverStatus status = SolverStatus::inaccurate;
    double wall_ms = 0.0;
    std::string message;
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepCell> cells;  // q-major: index iq * grid_theta + itheta

    const SweepCell& at(int iq, int itheta) const { return cells.at(iq * config.grid_theta + itheta); }
    bool all_optimal() const;
    double min_robustness() const;
    double max_robustness() const;
    // max over theta minus min over theta of the robustness in row iq
    double row_variation(int iq) const;
};

class SweepFailure : public std::runtime_error {
public:
    explicit SweepFailure(SweepCell cell);
    const SweepCell& cell() const { return cell_; }

private:
    SweepCell cell_;
};

// Robustness of W(q, theta) for the given coefficients.
SweepCell solve_cell(const FCoefficients& c, double q, double theta, const SolverOptions& options);

// Runs `fn(i)` for i in [0, n) on `jobs` worker threads. Exceptions are
// rethrown after all workers finish (the one with the lowest index wins).
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

// Solves every grid cell. Throws SweepFailure with the first failing cell in
// index order unless cfg.keep_going is set.
SweepResult sweep(const SweepConfig& cfg, const std::function<void(const SweepCell&)>& progress = {});

// Values in the CSV and SVG outputs use this exact formatting.
std::string format_value(double v);

void write_csv(const SweepResult& r, std::ostream& out);
std::vector<SweepCell> read_csv(std::istream& in);
void write_svg(const SweepResult& r, std::ostream& out, const std::string& title = "");

// q values where the robustness of W(q, theta_j) switches between zero and
// positive along grid column j, refined by bisection to `tol`.
std::vector<double> robustness_crossings(const SweepResult& r, int itheta, double tol = 1e-5);

struct Anchor {
    std::string label;
    double q = 0.0;
    double theta = 0.0;
};

std::vector<Anchor> load_anchors(const std::string& path);
std::string default_anchor_path();

struct AnchorRegion {
    Anchor anchor;
    int witness_id = 0;
    bool certified = false;
    double anchor_value = 0.0;   // tr(S W) at the anchor itself
    Witness witness;
    std::vector<double> values;  // tr(S W(q, theta)) per grid cell
    std::vector<char> mask;      // values < 0
    int count() const;
};

struct CoverageReport {
    int grid_q = 0;
    int grid_theta = 0;
    std::vector<AnchorRegion> regions;
    std::vector<std::pair<int, int>> uncovered;  // (iq, itheta)
};

CoverageReport witness_cover(const FCoefficients& c, const std::vector<Anchor>& anchors, int grid_q, int grid_theta,
                             const SolverOptions& options = {}, int jobs = 1);

struct DemoReport {
    std::string name;
    std::vector<std::string> lines;
    bool passed = false;
    std::string text() const;
};

const std::vector<std::string>& demo_names();
DemoReport demo(const std::string& name);

}  // namespace qcausal
