#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcausal/tensor.hpp"

namespace qcausal {

// Solver-agnostic conic program over real variables x:
//
//   minimize    c^T x + offset
//   subject to  C_b + sum_i x_i A_{b,i}  >= 0   for every PSD block b
//               E x = e
//
// Block matrices are Hermitian and stored as upper-triangle triplets; the
// lower triangle is implied by conjugation.
struct BlockEntry {
    int var = -1;  // -1 marks the constant term C_b
    int row = 0;
    int col = 0;
    cplx value = 0.0;
};

struct PsdBlock {
    std::string name;
    int dim = 0;
    std::vector<BlockEntry> entries;
};

struct EqualityEntry {
    int row = 0;
    int var = 0;
    double value = 0.0;
};

// A Hermitian matrix variable expanded in a fixed real basis: Pauli strings
// for qubit layouts, the unit Hermitian basis otherwise, [1] for scalars.
struct VariableGroup {
    std::string name;
    SpaceLayout layout;
    std::string basis;  // "pauli", "unit" or "scalar"
    int offset = 0;
    int count = 0;
};

struct ConicProgram {
    int num_variables = 0;
    std::vector<VariableGroup> variables;
    Eigen::VectorXd objective;
    double objective_offset = 0.0;
    std::vector<PsdBlock> blocks;
    int num_equalities = 0;
    std::vector<EqualityEntry> equalities;
    Eigen::VectorXd equality_rhs;

    // Throws std::invalid_argument on inconsistent dimensions or indices.
    void validate() const;

    Matrix block_value(std::size_t b, const Eigen::VectorXd& x) const;
    Eigen::VectorXd equality_residual(const Eigen::VectorXd& x) const;
};

nlohmann::json to_json(const ConicProgram& p);
ConicProgram program_from_json(const nlohmann::json& j);

enum class SolverStatus { optimal, infeasible, inaccurate };

std::string to_string(SolverStatus s);

struct SolverReport {
    SolverStatus status = SolverStatus::inaccurate;
    double objective = 0.0;        // primal objective c^T x + offset
    double dual_objective = 0.0;
    double primal_residual = 0.0;  // max of PSD violation and equality residual
    double dual_residual = 0.0;
    double dual_gap = 0.0;         // |primal - dual objective|
    int iterations = 0;
    std::string message;
    Eigen::VectorXd x;
    std::vector<Matrix> block_duals;
};

nlohmann::json to_json(const SolverReport& r);

struct SolverOptions {
    double tolerance = 1e-8;
    int max_iterations = 100;
};

// Modeling layer: Hermitian matrix variables, affine operator expressions,
// PSD and equality constraints, linear objective.
using LinearMap = std::function<HermitianOperator(const HermitianOperator&)>;

struct Var {
    int id = -1;
};

HermitianOperator identity_map(const HermitianOperator& h);

class AffineExpr {
public:
    struct Term {
        Var var;
        LinearMap map;
        double scale = 1.0;
    };

    explicit AffineExpr(SpaceLayout layout) : layout_(std::move(layout)) {}

    static AffineExpr of(Var v, const SpaceLayout& layout, LinearMap map = identity_map, double scale = 1.0);
    static AffineExpr constant(const HermitianOperator& c);

    AffineExpr& add(Var v, LinearMap map = identity_map, double scale = 1.0);
    AffineExpr& add_constant(const HermitianOperator& c);

    const SpaceLayout& layout() const { return layout_; }
    const std::vector<Term>& terms() const { return terms_; }
    const HermitianOperator* constant_term() const { return has_constant_ ? &constant_ : nullptr; }

private:
    SpaceLayout layout_;
    std::vector<Term> terms_;
    HermitianOperator constant_;
    bool has_constant_ = false;
};

class ProgramBuilder {
public:
    Var add_variable(const std::string& name, const SpaceLayout& layout);
    Var add_scalar(const std::string& name);
    const SpaceLayout& layout(Var v) const;

    void add_psd(const std::string& name, const AffineExpr& e);
    // e == 0, imposed on every real coordinate of the output operator.
    void add_equality(const std::string& name, const AffineExpr& e);
    // objective += scale * Re tr(weight * map(v))
    void add_objective(Var v, const HermitianOperator& weight, LinearMap map = identity_map, double scale = 1.0);
    void add_objective_offset(double c) { offset_ += c; }

    ConicProgram build() const;

    HermitianOperator value(Var v, const Eigen::VectorXd& x) const;
    // Scalar variables: the single coordinate.
    double scalar_value(Var v, const Eigen::VectorXd& x) const;

private:
    struct Variable {
        VariableGroup group;
        std::vector<HermitianOperator> basis;
    };
    struct Constraint {
        std::string name;
        AffineExpr expr;
    };
    struct ObjectiveTerm {
        Var var;
        HermitianOperator weight;
        LinearMap map;
        double scale;
    };

    const Variable& variable(Var v) const;

    std::vector<Variable> vars_;
    std::vector<Constraint> psd_;
    std::vector<Constraint> eq_;
    std::vector<ObjectiveTerm> objective_;
    double offset_ = 0.0;
    int num_variables_ = 0;
};

// Real coordinates of a Hermitian operator used for equality rows: Pauli
// coefficients for qubit layouts, otherwise diagonal then upper-triangle
// real and imaginary parts.
Eigen::VectorXd real_coordinates(const HermitianOperator& h);

}  // namespace qcausal
