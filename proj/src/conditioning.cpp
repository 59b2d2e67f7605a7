#include "qcausal/conditioning.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcausal {

namespace {

constexpr double kEffectTol = 1e-9;

Matrix basis_projector(int d, int k) {
    Matrix p = Matrix::Zero(d, d);
    p(k, k) = 1.0;
    return p;
}

Matrix outer(int d, int i, int j) {
    Matrix p = Matrix::Zero(d, d);
    p(i, j) = 1.0;
    return p;
}

SpaceLayout conditioner_layout(int d) { return SpaceLayout({{kCI, d}}); }

void require_comb_layout(const HermitianOperator& u) {
    const auto labels = u.layout().labels();
    if (labels != std::vector<std::string>{kAI, kAO, kBI, kBO, kCI})
        throw std::invalid_argument("comb layout must be [A_I, A_O, B_I, B_O, C_I]");
}

// Orthogonal projector onto the eigenvalue-1/2 eigenspace of a process.
Matrix half_eigenspace(const HermitianOperator& w) {
    Eigensystem es = eig_hermitian(w);
    Matrix p = Matrix::Zero(w.dim(), w.dim());
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        if (es.values(k) > 0.25) p += es.vectors.col(k) * es.vectors.col(k).adjoint();
    return p;
}

}  // namespace

Eigen::Matrix<cplx, 8, 8> FCoefficients::table() const {
    Eigen::Matrix<cplx, 8, 8> t = Eigen::Matrix<cplx, 8, 8>::Zero();
    auto set = [&](int i, int j, cplx v) { t(i - 1, j - 1) = v; };
    set(1, 1, c11);
    set(1, 5, c15);
    set(5, 1, c51);
    set(2, 2, -c11);
    set(2, 6, -c15);
    set(3, 3, c11);
    set(3, 7, c15);
    set(4, 4, -c11);
    set(4, 8, -c15);
    set(5, 5, -c11);
    set(6, 2, -c51);
    set(6, 6, c11);
    set(7, 3, c51);
    set(7, 7, -c11);
    set(8, 4, -c51);
    set(8, 8, c11);
    return t;
}

double FCoefficients::norm_n() const { return 2.0 * std::norm(c11) + std::norm(c15) + std::norm(c51); }

cplx FCoefficients::pairing() const { return c11 * c11 + c15 * c51; }

double FCoefficients::bound_value() const {
    double n = norm_n();
    double disc = std::max(0.0, n * n - 4.0 * std::norm(pairing()));
    return n + std::sqrt(disc);
}

const std::vector<std::string>& FCoefficients::preset_names() {
    static const std::vector<std::string> names = {"zero", "quarter", "uniform", "star"};
    return names;
}

FCoefficients FCoefficients::preset(const std::string& name) {
    if (name == "zero") return {};
    if (name == "quarter") return {0.25, 0.0, 0.0};
    if (name == "uniform") {
        const double u = 0.25 / std::sqrt(2.0);
        return {u, u, u};
    }
    if (name == "star") return {0.125, -0.125, 0.125};
    throw std::invalid_argument("unknown coefficient preset " + name);
}

nlohmann::json to_json(const FCoefficients& c) {
    return {{"c11", {c.c11.real(), c.c11.imag()}}, {"c15", {c.c15.real(), c.c15.imag()}}, {"c51", {c.c51.real(), c.c51.imag()}}};
}

FCoefficients coefficients_from_json(const nlohmann::json& j) {
    auto get = [&](const char* key) {
        const auto& v = j.at(key);
        return cplx(v.at(0).get<double>(), v.at(1).get<double>());
    };
    return {get("c11"), get("c15"), get("c51")};
}

Effect::Effect(HermitianOperator op) : op_(std::move(op)) {
    if (op_.layout().labels() != std::vector<std::string>{kCI}) throw std::invalid_argument("effect must act on C_I");
    Eigensystem es = eig_hermitian(op_);
    if (es.values(0) < -kEffectTol || es.values(es.values.size() - 1) > 1.0 + kEffectTol)
        throw std::invalid_argument("effect must satisfy 0 <= E <= 1");
}

Effect Effect::pure(double q, double theta) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("q must lie in [0, 1]");
    Vector v(2);
    v(0) = std::sqrt(q);
    v(1) = std::sqrt(1.0 - q) * std::polar(1.0, theta);
    Effect e = from_vector(v);
    e.params_ = std::make_pair(q, theta);
    return e;
}

Effect Effect::from_vector(const Vector& v) {
    return Effect(HermitianOperator::projector(conditioner_layout(static_cast<int>(v.size())), v.normalized()));
}

ConditionResult condition(const HermitianOperator& upsilon, const Effect& e) {
    require_comb_layout(upsilon);
    int dc = upsilon.layout().dim(kCI);
    if (e.op().dim() != dc) throw std::invalid_argument("effect dimension does not match C_I");
    // tr_C[U (1 (x) E)] = tr_C[(1 (x) sqrt E) U (1 (x) sqrt E)]
    Matrix s = kron_matrix(Matrix::Identity(16, 16), psd_sqrt(e.op().matrix()));
    HermitianOperator sandwiched(upsilon.layout(), s * upsilon.matrix() * s, 1e-8);
    HermitianOperator raw = partial_trace(sandwiched, {kCI});
    double p = raw.trace() / upsilon.trace();
    if (p < 1e-12) throw std::invalid_argument("conditioning on an outcome with vanishing probability");
    ConditionResult r;
    r.probability = p;
    r.process = raw * (4.0 / raw.trace());
    r.validity = is_valid_process(r.process);
    return r;
}

ConditionResult condition(const Comb& upsilon, const Effect& e) { return condition(upsilon.op(), e); }

std::pair<int, int> ocb_support(int i) {
    static const int low[8] = {0b1101, 0b1100, 0b1001, 0b1000, 0b0101, 0b0100, 0b0001, 0b0000};
    if (i < 0 || i >= 8) throw std::out_of_range("eigenvector index");
    return {low[i], low[i] | 0b0010};
}

const OcbEigenbasis& eigenbasis_ocb() {
    static const OcbEigenbasis basis = [] {
        OcbEigenbasis b;
        Matrix p_ocb = half_eigenspace(w_ocb().op());
        Matrix p_sharp = half_eigenspace(w_sharp().op());
        for (int i = 0; i < 8; ++i) {
            auto [s0, s1] = ocb_support(i);
            // Project the B_I = 1 basis state; its amplitude stays real positive.
            Vector a = p_ocb.col(s1);
            Vector c = p_sharp.col(s1);
            b.psi[i] = a / a.norm();
            b.psi_perp[i] = c / c.norm();
            for (int k = 0; k < 16; ++k) {
                if (k == s0 || k == s1) continue;
                if (std::abs(b.psi[i](k)) > 1e-12 || std::abs(b.psi_perp[i](k)) > 1e-12)
                    throw std::logic_error("eigenvector support does not match the expected pair");
            }
        }
        return b;
    }();
    return basis;
}

CoefficientNullspace solve_coefficient_nullspace() {
    const OcbEigenbasis& b = eigenbasis_ocb();
    const auto& gammas = forbidden_strings();
    Matrix r(static_cast<Eigen::Index>(gammas.size()), 64);
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        Matrix sigma = pauli_matrix(gammas[g]);
        for (int i = 0; i < 8; ++i) {
            Vector si = sigma * b.psi[i];
            for (int j = 0; j < 8; ++j) r(static_cast<Eigen::Index>(g), 8 * i + j) = b.psi_perp[j].dot(si);
        }
    }
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    double cutoff = 1e-9 * sv(0);
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cutoff) ++rank;
    CoefficientNullspace out;
    out.dimension = 64 - rank;
    if (out.dimension != 3)
        throw std::runtime_error("coefficient nullspace has dimension " + std::to_string(out.dimension) +
                                 " instead of 3; check the eigenvector ordering and phases");
    Matrix null = svd.matrixV().rightCols(3);
    Matrix pin(3, 3);
    pin.row(0) = null.row(0);       // c11
    pin.row(1) = null.row(4);       // c15
    pin.row(2) = null.row(8 * 4);   // c51
    Eigen::FullPivLU<Matrix> lu(pin);
    if (!lu.isInvertible())
        throw std::runtime_error("nullspace does not fix (c11, c15, c51); check the eigenvector ordering");
    out.relations = null * lu.inverse();
    double resid = 0.0;
    for (int k = 0; k < 3; ++k) {
        FCoefficients unit;
        (k == 0 ? unit.c11 : k == 1 ? unit.c15 : unit.c51) = 1.0;
        auto t = unit.table();
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) resid = std::max(resid, std::abs(out.relations(8 * i + j, k) - t(i, j)));
    }
    out.table_residual = resid;
    return out;
}

Matrix f_matrix(const FCoefficients& c) {
    const OcbEigenbasis& b = eigenbasis_ocb();
    auto t = c.table();
    Matrix f = Matrix::Zero(16, 16);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (t(i, j) != cplx(0.0)) f += t(i, j) * b.psi[i] * b.psi_perp[j].adjoint();
    return f;
}

Comb build_upsilon_F(const FCoefficients& c) {
    if (!c.within_bound())
        throw std::invalid_argument("coefficients violate the positivity bound (N + sqrt(N^2 - 4|P|^2) = " +
                                    std::to_string(c.bound_value()) + " > 1/8)");
    Matrix f = f_matrix(c);
    Matrix u = kron_matrix(0.5 * w_ocb().matrix(), basis_projector(2, 0)) +
               kron_matrix(0.5 * w_sharp().matrix(), basis_projector(2, 1)) + kron_matrix(f, outer(2, 0, 1)) +
               kron_matrix(f.adjoint(), outer(2, 1, 0));
    return Comb(HermitianOperator(SpaceLayout::comb(), u), CombOrder::parallel_c);
}

double lambda_min_bound(const FCoefficients& c) { return 0.25 - std::sqrt(c.bound_value()) / std::sqrt(2.0); }

double support_lambda_min(const HermitianOperator& upsilon) {
    require_comb_layout(upsilon);
    int dc = upsilon.layout().dim(kCI);
    Matrix diag = Matrix::Zero(upsilon.dim(), upsilon.dim());
    for (int k = 0; k < dc; ++k) {
        Matrix p = kron_matrix(Matrix::Identity(16, 16), basis_projector(dc, k));
        diag += p * upsilon.matrix() * p;
    }
    Eigensystem es = eig_hermitian(diag);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        if (es.values(k) > 1e-9) cols.push_back(k);
    Matrix v(upsilon.dim(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = es.vectors.col(cols[k]);
    Matrix compressed = v.adjoint() * upsilon.matrix() * v;
    return eig_hermitian(compressed, 1e-9).values(0);
}

ProcessMatrix conditioned_W(const FCoefficients& c, double q, double theta) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("q must lie in [0, 1]");
    if (!c.within_bound()) throw std::invalid_argument("coefficients violate the positivity bound");
    Matrix f = f_matrix(c);
    cplx phase = std::polar(1.0, theta);
    Matrix w = q * w_ocb().matrix() + (1.0 - q) * w_sharp().matrix() +
               2.0 * std::sqrt(q * (1.0 - q)) * (phase * f + std::conj(phase) * f.adjoint());
    return ProcessMatrix(HermitianOperator(SpaceLayout::process(), w));
}

HeraldedComb heralded_comb(const ProcessMatrix& w) {
    double p = success_probability(w);
    Matrix u = kron_matrix(p * w.matrix(), basis_projector(2, 0));
    std::optional<ProcessMatrix> complement;
    if (1.0 - p >= 1e-12) {
        Matrix rest = 0.25 * Matrix::Identity(16, 16) - p * w.matrix();
        complement.emplace(HermitianOperator(SpaceLayout::process(), rest / (1.0 - p)));
        u += kron_matrix(rest, basis_projector(2, 1));
    } else {
        p = 1.0;
    }
    Comb comb(HermitianOperator(SpaceLayout::comb(), u), CombOrder::parallel_c);
    return HeraldedComb{p, std::move(comb), std::move(complement)};
}

double max_weight(const HermitianOperator& a, const HermitianOperator& b) {
    auto feasible = [&](double p) { return min_eigenvalue(a - b * p) >= -1e-13; };
    if (!feasible(0.0)) return 0.0;
    if (feasible(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

double max_opposing_weight(const ProcessMatrix& w_ba, const ProcessMatrix& w_ab) { return max_weight(w_ab.op(), w_ba.op()); }

Comb opposing_orders_comb(const ProcessMatrix& w_ba, const ProcessMatrix& w_ab, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("opposing-orders weight must lie in (0, 1)");
    CausalClass cab = classify_causal_order(w_ab);
    CausalClass cba = classify_causal_order(w_ba);
    if (cab.order != CausalOrder::a_before_b && cab.order != CausalOrder::a_parallel_b)
        throw std::invalid_argument("w_ab is not of order A<B");
    if (cba.order != CausalOrder::b_before_a && cba.order != CausalOrder::a_parallel_b)
        throw std::invalid_argument("w_ba is not of order B<A");
    HermitianOperator rest = w_ab.op() - w_ba.op() * p;
    double lmin = min_eigenvalue(rest);
    if (lmin < -kProcessTol)
        throw std::invalid_argument("w_ab - p w_ba is not positive semidefinite (min eigenvalue " + std::to_string(lmin) + ")");
    Matrix u = kron_matrix(p * w_ba.matrix(), basis_projector(2, 0)) + kron_matrix(rest.matrix(), basis_projector(2, 1));
    return Comb(HermitianOperator(SpaceLayout::comb(), u), CombOrder::a_b_c);
}

DelayedChoiceParts delayed_choice_parts(double alpha, double beta) {
    SpaceLayout l = SpaceLayout::process();
    HermitianOperator quarter = HermitianOperator::identity(l) * 0.25;
    HermitianOperator xxx(l, pauli_matrix("XXXI"));
    HermitianOperator f(l, pauli_matrix("XIXX"));
    return {quarter + xxx * alpha, quarter - xxx * alpha, f * beta};
}

double delayed_choice_lambda_min(double alpha, double beta) {
    return 0.125 * (1.0 - 4.0 * std::sqrt(alpha * alpha + beta * beta));
}

Comb delayed_choice_comb(double alpha, double beta) {
    if (alpha == 0.0 || beta == 0.0) throw std::invalid_argument("delayed-choice comb needs nonzero alpha and beta");
    if (!(std::sqrt(alpha * alpha + beta * beta) < 0.25))
        throw std::invalid_argument("delayed-choice comb needs sqrt(alpha^2 + beta^2) < 1/4");
    DelayedChoiceParts d = delayed_choice_parts(alpha, beta);
    Matrix u = 0.5 * (kron_matrix(d.w.matrix(), basis_projector(2, 0)) + kron_matrix(d.w_tilde.matrix(), basis_projector(2, 1)) +
                      kron_matrix(d.f.matrix(), outer(2, 1, 0)) + kron_matrix(d.f.matrix().adjoint(), outer(2, 0, 1)));
    return Comb(HermitianOperator(SpaceLayout::comb(), u), CombOrder::parallel_c);
}

ProcessMatrix classical_dephasing_process() {
    return ProcessMatrix(HermitianOperator(SpaceLayout::process(), 0.25 * (pauli_matrix("IIII") + pauli_matrix("IZZI"))));
}

ThreeOutcomeClassical three_outcome_classical(const ProcessMatrix& w0, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
    const Matrix& m0 = w0.matrix();
    Matrix off = m0;
    off.diagonal().setZero();
    if (off.norm() > 1e-12) throw std::invalid_argument("w0 must be diagonal in the computational basis");
    if (classify_causal_order(w0).order != CausalOrder::a_before_b) throw std::invalid_argument("w0 must be of order A<B");

    // 1_AO (x) D_{A_I B_O} (x) rho_BI with rho_BI = 1/2
    HermitianOperator w1(SpaceLayout::process(), 0.25 * (pauli_matrix("IIII") + pauli_matrix("ZIIZ")));
    HermitianOperator quarter = HermitianOperator::identity(SpaceLayout::process()) * 0.25;
    double p = max_weight(quarter, w1);
    HermitianOperator w2 = (quarter - w1 * p) * (1.0 / (1.0 - p));

    Matrix u = Matrix::Zero(48, 48);
    u += kron_matrix(q * m0, basis_projector(3, 0));
    u += kron_matrix((1.0 - q) * p * w1.matrix(), basis_projector(3, 1));
    u += kron_matrix((1.0 - q) * (1.0 - p) * w2.matrix(), basis_projector(3, 2));
    Comb comb(HermitianOperator(SpaceLayout::comb(3), u), CombOrder::a_b_c);
    return ThreeOutcomeClassical{std::move(comb), q, p, w0.op(), w1, w2};
}

std::array<Effect, 3> two_basis_povm() {
    const double k = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));
    SpaceLayout l = conditioner_layout(2);
    Vector zero(2), plus(2);
    zero << 1.0, 0.0;
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    HermitianOperator e0 = HermitianOperator::projector(l, zero) * k;
    HermitianOperator e1 = HermitianOperator::projector(l, plus) * k;
    HermitianOperator e2 = HermitianOperator::identity(l) - e0 - e1;
    return {Effect(e0), Effect(e1), Effect(e2)};
}

NoGoReport no_go_check(const Comb& upsilon, const Matrix& basis) {
    int dc = upsilon.conditioner_dim();
    if (basis.rows() != dc || basis.cols() != 2) throw std::invalid_argument("no-go check needs a two-outcome basis on C_I");
    if ((basis.adjoint() * basis - Matrix::Identity(2, 2)).norm() > 1e-10)
        throw std::invalid_argument("no-go basis vectors must be orthonormal");
    NoGoReport r;
    for (int k = 0; k < 2; ++k) {
        Effect e = Effect::from_vector(basis.col(k));
        Matrix s = kron_matrix(Matrix::Identity(16, 16), e.op().matrix());
        HermitianOperator raw = partial_trace(HermitianOperator(upsilon.op().layout(), s * upsilon.op().matrix() * s, 1e-8), {kCI});
        r.probability[k] = raw.trace() / upsilon.op().trace();
        if (r.probability[k] < 1e-12) {
            r.classes[k] = CausalClass{};
            continue;
        }
        r.classes[k] = classify_structure(raw * (4.0 / raw.trace()));
    }
    bool opposite = (r.classes[0].strictly_a_before_b() && r.classes[1].strictly_b_before_a()) ||
                    (r.classes[0].strictly_b_before_a() && r.classes[1].strictly_a_before_b());
    r.consistent = !opposite;
    return r;
}

}  // namespace qcausal
