#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qcausal/process.hpp"

namespace qcausal {

// Coherent cross-block coefficients of F = sum_ij c_ij |Psi_i><Psi_perp_j|.
// Three free parameters; the remaining nonzero c_ij follow from them.
struct FCoefficients {
    cplx c11 = 0.0;
    cplx c15 = 0.0;
    cplx c51 = 0.0;

    // Full 8x8 table, zero-based: element (i-1, j-1) is c_ij.
    Eigen::Matrix<cplx, 8, 8> table() const;

    double norm_n() const;   // 2|c11|^2 + |c15|^2 + |c51|^2
    cplx pairing() const;    // c11^2 + c15 c51
    double bound_value() const;  // N + sqrt(N^2 - 4|P|^2), at most 1/8 for positivity
    bool within_bound(double tol = 1e-12) const { return bound_value() <= 0.125 + tol; }

    static FCoefficients preset(const std::string& name);
    static const std::vector<std::string>& preset_names();
};

nlohmann::json to_json(const FCoefficients& c);
FCoefficients coefficients_from_json(const nlohmann::json& j);

class Effect {
public:
    // Throws unless 0 <= op <= 1 within tolerance. op lives on C_I.
    explicit Effect(HermitianOperator op);

    // |Phi(q, theta)><Phi(q, theta)| with |Phi> = sqrt(q)|0> + sqrt(1-q) e^{i theta}|1>.
    static Effect pure(double q, double theta);
    static Effect from_vector(const Vector& v);

    const HermitianOperator& op() const { return op_; }
    const std::optional<std::pair<double, double>>& pure_params() const { return params_; }

private:
    HermitianOperator op_;
    std::optional<std::pair<double, double>> params_;
};

struct ConditionResult {
    double probability = 0.0;
    HermitianOperator process;  // normalized to trace 4
    ValidityReport validity;

    // Throws if the conditioned operator is not a valid process.
    ProcessMatrix as_process() const { return ProcessMatrix(process); }
};

// raw = tr_C[Upsilon (1 (x) e)], p = tr(raw) / tr(Upsilon).
ConditionResult condition(const HermitianOperator& upsilon, const Effect& e);
ConditionResult condition(const Comb& upsilon, const Effect& e);

struct OcbEigenbasis {
    std::array<Vector, 8> psi;       // eigenvalue 1/2 of W_OCB
    std::array<Vector, 8> psi_perp;  // eigenvalue 1/2 of W#
};

// Computational-basis support of |Psi_i> and |Psi_perp_i> (zero-based i):
// the pair {s, s | B_I}.
std::pair<int, int> ocb_support(int i);

const OcbEigenbasis& eigenbasis_ocb();

struct CoefficientNullspace {
    int dimension = 0;
    // 64 x 3 matrix; row 8*(i-1)+(j-1) gives c_ij in terms of (c11, c15, c51).
    Eigen::MatrixXcd relations;
    // max |c_ij - table(c)_ij| over the three unit coordinate vectors
    double table_residual = 0.0;
};

CoefficientNullspace solve_coefficient_nullspace();

// F itself (not Hermitian).
Matrix f_matrix(const FCoefficients& c);

Comb build_upsilon_F(const FCoefficients& c);

double lambda_min_bound(const FCoefficients& c);

// Smallest eigenvalue of the comb compressed to the support of its diagonal
// C_I blocks.
double support_lambda_min(const HermitianOperator& upsilon);

ProcessMatrix conditioned_W(const FCoefficients& c, double q, double theta);

struct HeraldedComb {
    double p = 1.0;
    Comb comb;
    std::optional<ProcessMatrix> complement;
};

HeraldedComb heralded_comb(const ProcessMatrix& w);

// Largest p in [0, 1] with a - p b >= 0, by bisection to 1e-10.
double max_weight(const HermitianOperator& a, const HermitianOperator& b);

// Largest p with w_ab - p w_ba >= 0.
double max_opposing_weight(const ProcessMatrix& w_ba, const ProcessMatrix& w_ab);

Comb opposing_orders_comb(const ProcessMatrix& w_ba, const ProcessMatrix& w_ab, double p);

struct DelayedChoiceParts {
    HermitianOperator w;        // 1/4 + alpha XXX on A_I A_O B_I
    HermitianOperator w_tilde;  // 1/4 - alpha XXX
    HermitianOperator f;        // beta X_AI X_BI X_BO
};

DelayedChoiceParts delayed_choice_parts(double alpha, double beta);
Comb delayed_choice_comb(double alpha, double beta);
double delayed_choice_lambda_min(double alpha, double beta);

struct ThreeOutcomeClassical {
    Comb comb;
    double q = 0.0;
    double p = 0.0;
    HermitianOperator w0, w1, w2;
};

// Diagonal three-outcome comb: outcome 0 gives w0, outcomes 1 and 2 give B<A
// processes built from the dephasing channel A_I <- B_O; p from bisection.
ThreeOutcomeClassical three_outcome_classical(const ProcessMatrix& w0, double q);

// Default A<B input for the classical example: 1/4 (1 + Z_AO Z_BI).
ProcessMatrix classical_dephasing_process();

std::array<Effect, 3> two_basis_povm();

struct NoGoReport {
    std::array<double, 2> probability{};
    std::array<CausalClass, 2> classes{};
    bool consistent = true;  // not (one strictly A<B and the other strictly B<A)
};

// basis columns are the two outcome vectors on C_I.
NoGoReport no_go_check(const Comb& upsilon, const Matrix& basis);

}  // namespace qcausal
