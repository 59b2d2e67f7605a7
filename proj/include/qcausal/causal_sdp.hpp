#pragma once

#include <stdexcept>

#include "qcausal/interior_point.hpp"
#include "qcausal/process.hpp"

namespace qcausal {

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, SolverReport report) : std::runtime_error(what), report_(std::move(report)) {}
    const SolverReport& report() const { return report_; }

private:
    SolverReport report_;
};

struct RobustnessResult {
    double value = 0.0;  // max(raw, 0)
    double raw = 0.0;
    HermitianOperator w_ab;  // unnormalized A<B certificate
    HermitianOperator w_ba;  // unnormalized B<A certificate
    SolverReport report;
};

// Program variables: W_AB and W_BA; see causal_robustness.
ConicProgram robustness_program(const HermitianOperator& w);

// min (tr W_AB + tr W_BA)/4 - 1 over ordered W_AB, W_BA >= 0 with
// W_AB + W_BA - W >= 0. Throws SolverError unless the solver reports optimal.
RobustnessResult causal_robustness(const ProcessMatrix& w, const SolverOptions& options = {});

struct CertificateAudit {
    double structure_residual = 0.0;  // ordered-form equalities, Frobenius
    double psd_violation = 0.0;       // max negative eigenvalue over the three PSD conditions
    double objective_mismatch = 0.0;  // |(tr W_AB + tr W_BA)/4 - 1 - raw|
    double worst() const { return std::max({structure_residual, psd_violation, objective_mismatch}); }
};

// Re-checks the robustness certificates outside the solver.
CertificateAudit audit_certificates(const RobustnessResult& r, const ProcessMatrix& w);

struct Witness {
    HermitianOperator op;
    bool certified = false;
};

struct WitnessResult {
    Witness witness;
    double value = 0.0;  // tr(S W)
    SolverReport report;
};

ConicProgram witness_program(const HermitianOperator& w);

// min tr(S W) over witnesses S = L_V(S_P), 1/4 - S = L_V(Sigma_P) with
// T_AO(S_P) >= 0, T_BO(S_P) >= 0, Sigma_P >= 0.
WitnessResult optimal_witness(const ProcessMatrix& w, const SolverOptions& options = {});

double witness_value(const Witness& s, const HermitianOperator& w);

struct WitnessCheck {
    bool feasible = false;
    double slack = 0.0;  // smallest t making the side conditions hold
    SolverReport report;
};

// Solves min t s.t. L_V(S_P) = S, L_V(Sigma_P) = 1/4 - S, and
// T_AO(S_P) + t, T_BO(S_P) + t, Sigma_P + t all PSD. Feasible iff t <= tol.
WitnessCheck check_witness(const HermitianOperator& s, double tol = 1e-6, const SolverOptions& options = {});
bool verify_witness(const Witness& s);

}  // namespace qcausal
