#include "qcausal/causal_sdp.hpp"

#include <cmath>

namespace qcausal {

namespace {

LinearMap tr_map(std::set<std::string> xs) {
    return [xs](const HermitianOperator& h) { return trace_and_replace(h, xs); };
}

LinearMap lv_map() {
    return [](const HermitianOperator& h) { return project_LV(h); };
}

LinearMap times(const HermitianOperator& m) {
    return [m](const HermitianOperator& s) { return m * s.matrix()(0, 0).real(); };
}

void add_ordered_structure(ProgramBuilder& b, Var v, CausalOrder order, const std::string& name) {
    const SpaceLayout l = SpaceLayout::process();
    if (order == CausalOrder::a_before_b) {
        // W = T_BO(W), T_{BI BO}(W) = T_{AO BI BO}(W)
        b.add_equality(name + ".B_O", AffineExpr::of(v, l).add(v, tr_map({kBO}), -1.0));
        b.add_equality(name + ".marginal", AffineExpr::of(v, l, tr_map({kBI, kBO})).add(v, tr_map({kAO, kBI, kBO}), -1.0));
    } else {
        b.add_equality(name + ".A_O", AffineExpr::of(v, l).add(v, tr_map({kAO}), -1.0));
        b.add_equality(name + ".marginal", AffineExpr::of(v, l, tr_map({kAI, kAO})).add(v, tr_map({kAI, kAO, kBO}), -1.0));
    }
}

struct RobustnessModel {
    ProgramBuilder builder;
    Var ab, ba;
};

RobustnessModel robustness_model(const HermitianOperator& w) {
    const SpaceLayout l = SpaceLayout::process();
    if (!(w.layout() == l)) throw std::invalid_argument("robustness needs an operator on [A_I, A_O, B_I, B_O]");
    RobustnessModel m;
    m.ab = m.builder.add_variable("W_AB", l);
    m.ba = m.builder.add_variable("W_BA", l);
    add_ordered_structure(m.builder, m.ab, CausalOrder::a_before_b, "W_AB");
    add_ordered_structure(m.builder, m.ba, CausalOrder::b_before_a, "W_BA");
    m.builder.add_psd("W_AB", AffineExpr::of(m.ab, l));
    m.builder.add_psd("W_BA", AffineExpr::of(m.ba, l));
    m.builder.add_psd("noise", AffineExpr::of(m.ab, l).add(m.ba).add_constant(-w));
    HermitianOperator quarter = HermitianOperator::identity(l) * 0.25;
    m.builder.add_objective(m.ab, quarter);
    m.builder.add_objective(m.ba, quarter);
    m.builder.add_objective_offset(-1.0);
    return m;
}

struct WitnessModel {
    ProgramBuilder builder;
    Var sp, sigma;
};

WitnessModel witness_model(const HermitianOperator& w) {
    const SpaceLayout l = SpaceLayout::process();
    if (!(w.layout() == l)) throw std::invalid_argument("witness needs an operator on [A_I, A_O, B_I, B_O]");
    WitnessModel m;
    m.sp = m.builder.add_variable("S_P", l);
    m.sigma = m.builder.add_variable("Sigma_P", l);
    m.builder.add_equality("normalization", AffineExpr::of(m.sp, l, lv_map())
                                                 .add(m.sigma, lv_map())
                                                 .add_constant(HermitianOperator::identity(l) * -0.25));
    m.builder.add_psd("T_AO(S_P)", AffineExpr::of(m.sp, l, tr_map({kAO})));
    m.builder.add_psd("T_BO(S_P)", AffineExpr::of(m.sp, l, tr_map({kBO})));
    m.builder.add_psd("Sigma_P", AffineExpr::of(m.sigma, l));
    m.builder.add_objective(m.sp, w, lv_map());
    return m;
}

}  // namespace

ConicProgram robustness_program(const HermitianOperator& w) { return robustness_model(w).builder.build(); }

RobustnessResult causal_robustness(const ProcessMatrix& w, const SolverOptions& options) {
    RobustnessModel m = robustness_model(w.op());
    ConicProgram p = m.builder.build();
    SolverReport report = solve_interior_point(p, options);
    if (report.status != SolverStatus::optimal)
        throw SolverError("causal robustness solve failed (" + to_string(report.status) + "): " + report.message, report);
    RobustnessResult r;
    r.raw = report.objective;
    r.value = std::max(r.raw, 0.0);
    r.w_ab = m.builder.value(m.ab, report.x);
    r.w_ba = m.builder.value(m.ba, report.x);
    r.report = std::move(report);
    return r;
}

CertificateAudit audit_certificates(const RobustnessResult& r, const ProcessMatrix& w) {
    CertificateAudit a;
    a.structure_residual = std::max(distance(r.w_ab, project_a_before_b(r.w_ab)), distance(r.w_ba, project_b_before_a(r.w_ba)));
    double v = std::min({min_eigenvalue(r.w_ab), min_eigenvalue(r.w_ba), min_eigenvalue(r.w_ab + r.w_ba - w.op())});
    a.psd_violation = std::max(0.0, -v);
    a.objective_mismatch = std::abs((r.w_ab.trace() + r.w_ba.trace()) / 4.0 - 1.0 - r.raw);
    return a;
}

ConicProgram witness_program(const HermitianOperator& w) { return witness_model(w).builder.build(); }

WitnessResult optimal_witness(const ProcessMatrix& w, const SolverOptions& options) {
    WitnessModel m = witness_model(w.op());
    ConicProgram p = m.builder.build();
    SolverReport report = solve_interior_point(p, options);
    if (report.status != SolverStatus::optimal)
        throw SolverError("witness solve failed (" + to_string(report.status) + "): " + report.message, report);
    WitnessResult r;
    HermitianOperator sp = m.builder.value(m.sp, report.x);
    HermitianOperator sigma = m.builder.value(m.sigma, report.x);
    r.witness.op = project_LV(sp);
    double side = std::min({min_eigenvalue(trace_and_replace(sp, kAO)), min_eigenvalue(trace_and_replace(sp, kBO)), min_eigenvalue(sigma)});
    double norm_residual = distance(project_LV(sigma), HermitianOperator::identity(SpaceLayout::process()) * 0.25 - r.witness.op);
    r.witness.certified = side >= -1e-7 && norm_residual <= 1e-7;
    r.value = witness_value(r.witness, w.op());
    r.report = std::move(report);
    return r;
}

double witness_value(const Witness& s, const HermitianOperator& w) { return (s.op.matrix() * w.matrix()).trace().real(); }

WitnessCheck check_witness(const HermitianOperator& s, double tol, const SolverOptions& options) {
    const SpaceLayout l = SpaceLayout::process();
    if (!(s.layout() == l)) throw std::invalid_argument("witness must act on [A_I, A_O, B_I, B_O]");
    ProgramBuilder b;
    Var sp = b.add_variable("S_P", l);
    Var sigma = b.add_variable("Sigma_P", l);
    Var t = b.add_scalar("t");
    HermitianOperator id = HermitianOperator::identity(l);
    b.add_equality("S", AffineExpr::of(sp, l, lv_map()).add_constant(-s));
    b.add_equality("complement", AffineExpr::of(sigma, l, lv_map()).add_constant(s - id * 0.25));
    b.add_psd("T_AO(S_P)", AffineExpr::of(sp, l, tr_map({kAO})).add(t, times(id)));
    b.add_psd("T_BO(S_P)", AffineExpr::of(sp, l, tr_map({kBO})).add(t, times(id)));
    b.add_psd("Sigma_P", AffineExpr::of(sigma, l).add(t, times(id)));
    b.add_objective(t, HermitianOperator::identity(SpaceLayout({{"scalar", 1}})));

    WitnessCheck c;
    c.report = solve_interior_point(b.build(), options);
    if (c.report.status == SolverStatus::infeasible) {
        c.feasible = false;
        c.slack = std::numeric_limits<double>::infinity();
        return c;
    }
    if (c.report.status != SolverStatus::optimal)
        throw SolverError("witness verification solve failed: " + c.report.message, c.report);
    c.slack = b.scalar_value(t, c.report.x);
    c.feasible = c.slack <= tol;
    return c;
}

bool verify_witness(const Witness& s) { return check_witness(s.op).feasible; }

}  // namespace qcausal
