#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcausal/tensor.hpp"

namespace qcausal {

inline constexpr double kProcessTol = 1e-9;
inline constexpr double kStrictGap = 1e-6;

struct ValidityReport {
    bool valid = false;
    double min_eigenvalue = 0.0;
    double trace_error = 0.0;   // |tr W - d_AO d_BO|
    double lv_residual = 0.0;   // ||L_V(W) - W||_F
    std::string message;
};

// Validated two-party process matrix on [A_I, A_O, B_I, B_O].
class ProcessMatrix {
public:
    // Throws std::invalid_argument (with the validity residuals) if op is not
    // a valid process matrix.
    explicit ProcessMatrix(HermitianOperator op, double tol = kProcessTol);

    const HermitianOperator& op() const { return op_; }
    const Matrix& matrix() const { return op_.matrix(); }

private:
    HermitianOperator op_;
};

enum class CombOrder { a_b_c, b_a_c, parallel_c };

std::string to_string(CombOrder order);
CombOrder comb_order_from_string(const std::string& s);

// Conditioning comb on [A_I, A_O, B_I, B_O, C_I].
class Comb {
public:
    // Throws std::invalid_argument if op is not PSD or its C_I marginal does
    // not have the declared causal structure.
    Comb(HermitianOperator op, CombOrder order, double tol = kProcessTol);

    const HermitianOperator& op() const { return op_; }
    CombOrder order() const { return order_; }
    int conditioner_dim() const { return op_.layout().dim(kCI); }
    HermitianOperator marginal() const { return partial_trace(op_, {kCI}); }

private:
    HermitianOperator op_;
    CombOrder order_;
};

enum class CausalOrder { a_before_b, b_before_a, a_parallel_b, none };

std::string to_string(CausalOrder order);

struct CausalClass {
    CausalOrder order = CausalOrder::none;
    double dist_a_before_b = 0.0;  // ||W - P_{A<B}(W)||_F
    double dist_b_before_a = 0.0;
    // A<B strictly: A<B passes and B<A fails by more than kStrictGap.
    bool strictly_a_before_b() const;
    bool strictly_b_before_a() const;
};

// Frobenius-orthogonal projections onto the two ordered structures.
HermitianOperator project_a_before_b(const HermitianOperator& w);
HermitianOperator project_b_before_a(const HermitianOperator& w);

HermitianOperator project_LV(const HermitianOperator& w);

ValidityReport is_valid_process(const HermitianOperator& w, double tol = kProcessTol);

struct ForbiddenTerm {
    PauliString pauli;
    std::string type;  // e.g. "A_OB_O"
    double coefficient;
};

struct ForbiddenReport {
    bool ok = true;
    std::vector<ForbiddenTerm> violations;
};

// The 168 four-qubit Pauli strings that may not appear in a valid process.
const std::vector<PauliString>& forbidden_strings();
std::string forbidden_type(const PauliString& s);  // empty if allowed

ForbiddenReport forbidden_term_check(const HermitianOperator& w, double tol = kProcessTol);

// Structural classification of any Hermitian operator on the process layout.
CausalClass classify_structure(const HermitianOperator& w, double tol = kProcessTol);
CausalClass classify_causal_order(const ProcessMatrix& w, double tol = kProcessTol);
CausalClass classify_causal_order(const HermitianOperator& w, double tol = kProcessTol);

// tr[W (ma (x) mb)] with ma on [A_I, A_O] and mb on [B_I, B_O].
double born_rule(const ProcessMatrix& w, const HermitianOperator& ma, const HermitianOperator& mb);

// Choi matrix sum_ij |i><j| (x) K|i><j|K^dag summed over Kraus operators,
// on [in, out].
HermitianOperator choi_matrix(const std::vector<Matrix>& kraus, const std::string& in, const std::string& out);

ProcessMatrix w_ocb();
ProcessMatrix w_sharp();
ProcessMatrix identity_process();
ProcessMatrix markovian_full_rank(double r);

// A<->B exchange of a process (A_I<->B_I, A_O<->B_O).
HermitianOperator swap_parties(const HermitianOperator& w);

double success_probability(const ProcessMatrix& w);

// "w_ocb", "w_sharp", "identity", "markovian:r=0.5", "markovian_mirror:r=0.5".
ProcessMatrix named_process(const std::string& spec);

nlohmann::json to_json(const ProcessMatrix& w);
nlohmann::json to_json(const Comb& c);
ProcessMatrix process_from_json(const nlohmann::json& j);
Comb comb_from_json(const nlohmann::json& j);

}  // namespace qcausal
