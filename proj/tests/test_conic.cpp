#include "doctest.h"
#include "oracles.hpp"
#include "qcausal/interior_point.hpp"
#include "qcausal/sampling.hpp"

using namespace qcausal;

namespace {

const SpaceLayout kScalar({{"scalar", 1}});

HermitianOperator scalar(double v) { return HermitianOperator(kScalar, Matrix::Constant(1, 1, v)); }

LinearMap trace_map() {
    return [](const HermitianOperator& h) { return scalar(h.trace()); };
}

// min tr(C X) subject to tr X = 1, X >= 0.
ConicProgram min_eig_program(const HermitianOperator& c) {
    ProgramBuilder b;
    Var x = b.add_variable("X", c.layout());
    b.add_psd("X", AffineExpr::of(x, c.layout()));
    b.add_equality("trace", AffineExpr::of(x, kScalar, trace_map()).add_constant(scalar(-1.0)));
    b.add_objective(x, c);
    return b.build();
}

}  // namespace

TEST_CASE("program validation") {
    ConicProgram p;
    p.num_variables = 1;
    p.objective = Eigen::VectorXd::Ones(1);
    p.blocks.push_back({"b", 1, {{0, 0, 0, 1.0}}});
    CHECK_NOTHROW(p.validate());
    p.blocks[0].entries.push_back({3, 0, 0, 1.0});
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.blocks[0].entries.pop_back();
    p.blocks.push_back({"c", 2, {{0, 1, 0, 1.0}}});
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.blocks.pop_back();
    p.num_equalities = 1;
    p.equalities.push_back({1, 0, 1.0});
    p.equality_rhs = Eigen::VectorXd::Zero(1);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("scalar linear program") {
    // min x s.t. x - 1 >= 0, 3 - x >= 0
    ProgramBuilder b;
    Var x = b.add_scalar("x");
    b.add_psd("lower", AffineExpr::of(x, kScalar).add_constant(scalar(-1.0)));
    b.add_psd("upper", AffineExpr::of(x, kScalar, identity_map, -1.0).add_constant(scalar(3.0)));
    b.add_objective(x, scalar(1.0));
    b.add_objective_offset(0.5);
    SolverReport r = solve_interior_point(b.build());
    CHECK(r.status == SolverStatus::optimal);
    CHECK(r.objective == doctest::Approx(1.5).epsilon(1e-7));
    CHECK(b.scalar_value(x, r.x) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.dual_gap < 1e-7);
    CHECK(r.primal_residual < 1e-7);
}

TEST_CASE("smallest eigenvalue SDP on qubit and non-qubit layouts") {
    Rng rng(31);
    for (const SpaceLayout& l : {SpaceLayout::qubits({"a", "b"}), SpaceLayout({{"t", 3}}), SpaceLayout::process()}) {
        for (int trial = 0; trial < 3; ++trial) {
            HermitianOperator c = random_hermitian(l, rng);
            SolverReport r = solve_interior_point(min_eig_program(c));
            INFO(r.message);
            CHECK(r.status == SolverStatus::optimal);
            CHECK(std::abs(r.objective - oracle::eigenvalues(c.matrix())[0]) < 1e-7);
        }
    }
}

TEST_CASE("largest eigenvalue through a constant block") {
    Rng rng(32);
    SpaceLayout l = SpaceLayout::qubits({"a", "b", "c"});
    HermitianOperator c = random_hermitian(l, rng);
    HermitianOperator id = HermitianOperator::identity(l);
    ProgramBuilder b;
    Var t = b.add_scalar("t");
    b.add_psd("t - C", AffineExpr::of(t, l, [id](const HermitianOperator& s) { return id * s.trace(); }).add_constant(-c));
    b.add_objective(t, scalar(1.0));
    SolverReport r = solve_interior_point(b.build());
    CHECK(r.status == SolverStatus::optimal);
    CHECK(std::abs(r.objective - oracle::eigenvalues(c.matrix()).back()) < 1e-7);
    REQUIRE(r.block_duals.size() == 1);
    // dual is a density matrix on the top eigenvector
    CHECK(r.block_duals[0].trace().real() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("infeasible program is reported") {
    SpaceLayout l = SpaceLayout::qubits({"a"});
    ProgramBuilder b;
    Var x = b.add_variable("X", l);
    b.add_psd("X", AffineExpr::of(x, l));
    b.add_equality("trace", AffineExpr::of(x, kScalar, trace_map()).add_constant(scalar(1.0)));
    b.add_objective(x, HermitianOperator::identity(l));
    SolverReport r = solve_interior_point(b.build());
    CHECK(r.status != SolverStatus::optimal);

    // inconsistent equalities
    ProgramBuilder e;
    Var y = e.add_scalar("y");
    e.add_equality("one", AffineExpr::of(y, kScalar).add_constant(scalar(-1.0)));
    e.add_equality("two", AffineExpr::of(y, kScalar).add_constant(scalar(-2.0)));
    e.add_psd("y", AffineExpr::of(y, kScalar));
    e.add_objective(y, scalar(1.0));
    CHECK(solve_interior_point(e.build()).status == SolverStatus::infeasible);
}

TEST_CASE("solver is deterministic") {
    Rng rng(33);
    HermitianOperator c = random_hermitian(SpaceLayout::process(), rng);
    SolverReport a = solve_interior_point(min_eig_program(c));
    SolverReport b = solve_interior_point(min_eig_program(c));
    CHECK(a.objective == b.objective);
    CHECK((a.x - b.x).norm() == 0.0);
}

TEST_CASE("block values, residuals and variable recovery") {
    Rng rng(34);
    SpaceLayout l = SpaceLayout::qubits({"a", "b"});
    HermitianOperator c = random_hermitian(l, rng);
    ProgramBuilder b;
    Var x = b.add_variable("X", l);
    b.add_psd("X", AffineExpr::of(x, l));
    b.add_equality("trace", AffineExpr::of(x, kScalar, trace_map()).add_constant(scalar(-1.0)));
    b.add_objective(x, c);
    ConicProgram p = b.build();
    SolverReport r = solve_interior_point(p);
    HermitianOperator xv = b.value(x, r.x);
    CHECK(xv.trace() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK((p.block_value(0, r.x) - xv.matrix()).norm() < 1e-12);
    CHECK(p.equality_residual(r.x).norm() < 1e-8);
    CHECK(std::abs((c.matrix() * xv.matrix()).trace().real() - r.objective) < 1e-8);
    CHECK(p.variables.size() == 1);
    CHECK(p.variables[0].basis == "pauli");
    CHECK(p.variables[0].count == 16);
}

TEST_CASE("real coordinates") {
    Rng rng(35);
    HermitianOperator h = random_hermitian(SpaceLayout::qubits({"a", "b"}), rng);
    Eigen::VectorXd v = real_coordinates(h);
    PauliCoefficients w = pauli_expand(h);
    REQUIRE(v.size() == 16);
    for (int k = 0; k < 16; ++k) CHECK(v(k) == doctest::Approx(w.coeffs[k].real()));

    HermitianOperator t = random_hermitian(SpaceLayout({{"t", 3}}), rng);
    Eigen::VectorXd u = real_coordinates(t);
    REQUIRE(u.size() == 9);
    for (int k = 0; k < 3; ++k) CHECK(u(k) == doctest::Approx(t.matrix()(k, k).real()));
    CHECK(u(3) == doctest::Approx(t.matrix()(0, 1).real()));
    CHECK(u(4) == doctest::Approx(t.matrix()(0, 1).imag()));
}

TEST_CASE("program JSON roundtrip") {
    Rng rng(36);
    HermitianOperator c = random_hermitian(SpaceLayout::qubits({"a", "b"}), rng);
    ConicProgram p = min_eig_program(c);
    nlohmann::json j = to_json(p);
    CHECK(j["format"] == "qcausal-conic-1");
    ConicProgram q = program_from_json(nlohmann::json::parse(j.dump()));
    CHECK(q.num_variables == p.num_variables);
    CHECK(q.blocks.size() == p.blocks.size());
    CHECK(q.num_equalities == p.num_equalities);
    CHECK((q.objective - p.objective).norm() == 0.0);
    SolverReport a = solve_interior_point(p), b = solve_interior_point(q);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-12));
    nlohmann::json rep = to_json(a);
    CHECK(rep["status"] == "optimal");
    CHECK_THROWS(program_from_json(nlohmann::json{{"format", "other"}}));
}

TEST_CASE("builder rejects mismatched layouts") {
    SpaceLayout l = SpaceLayout::qubits({"a"});
    ProgramBuilder b;
    Var x = b.add_variable("X", l);
    ProgramBuilder bad;
    Var y = bad.add_variable("Y", l);
    bad.add_psd("bad", AffineExpr::of(y, SpaceLayout::qubits({"a", "b"})));
    CHECK_THROWS_AS(bad.build(), std::invalid_argument);
    CHECK_THROWS_AS(AffineExpr::of(x, l).add_constant(HermitianOperator::identity(SpaceLayout::qubits({"b"}))), std::invalid_argument);
    CHECK_THROWS_AS(b.layout(Var{5}), std::invalid_argument);
    CHECK_THROWS_AS(b.scalar_value(x, Eigen::VectorXd::Zero(4)), std::invalid_argument);
}
