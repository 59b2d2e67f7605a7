#include "qcausal/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace qcausal {

namespace {

double uniform(Rng& rng, double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng); }

int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

// Random PSD operator whose partial trace over `traced` equals `marginal`.
Matrix fix_marginal(const Matrix& r, const SpaceLayout& layout, const std::string& traced, const Matrix& marginal) {
    HermitianOperator rop(layout, r, 1e-8);
    Matrix t = partial_trace(rop, {traced}).matrix();
    Matrix k = psd_sqrt(marginal) * psd_inv_sqrt(t);
    int dt = layout.dim(traced);
    if (layout.index_of(traced) != static_cast<int>(layout.size()) - 1)
        throw std::logic_error("fix_marginal expects the traced subsystem last");
    Matrix kk = kron_matrix(k, Matrix::Identity(dt, dt));
    return kk * r * kk.adjoint();
}

}  // namespace

Matrix random_ginibre(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = cplx(n(rng), n(rng));
    return g;
}

Matrix random_unitary(int d, Rng& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_ginibre(d, d, rng));
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; ++k) q.col(k) *= std::polar(1.0, std::arg(r(k, k)));
    return q;
}

HermitianOperator random_hermitian(const SpaceLayout& layout, Rng& rng) {
    int d = layout.total_dim();
    Matrix g = random_ginibre(d, d, rng);
    return HermitianOperator(layout, 0.5 * (g + g.adjoint()));
}

HermitianOperator random_density(const SpaceLayout& layout, Rng& rng, int rank) {
    int d = layout.total_dim();
    if (rank <= 0) rank = d;
    Matrix g = random_ginibre(d, rank, rng);
    Matrix rho = g * g.adjoint();
    return HermitianOperator(layout, rho / rho.trace().real(), 1e-8);
}

ProcessMatrix random_ordered_process(CausalOrder order, Rng& rng) {
    if (order == CausalOrder::b_before_a) return ProcessMatrix(swap_parties(random_ordered_process(CausalOrder::a_before_b, rng).op()));
    if (order != CausalOrder::a_before_b) throw std::invalid_argument("random_ordered_process needs A<B or B<A");
    // W = W_{A_I A_O B_I} (x) 1_BO with tr_BI W_{A_I A_O B_I} = rho_AI (x) 1_AO
    SpaceLayout three = SpaceLayout::qubits({kAI, kAO, kBI});
    Matrix rho = random_density(SpaceLayout::qubits({kAI}), rng, uniform_int(rng, 1, 2)).matrix();
    Matrix marginal = kron_matrix(rho, Matrix::Identity(2, 2));
    Matrix r = random_density(three, rng, uniform_int(rng, 4, 8)).matrix();
    Matrix w3 = fix_marginal(r, three, kBI, marginal);
    HermitianOperator w(SpaceLayout::process(), kron_matrix(w3, Matrix::Identity(2, 2)), 1e-8);
    return ProcessMatrix(w);
}

ProcessMatrix random_valid_process(Rng& rng) {
    SpaceLayout l = SpaceLayout::process();
    HermitianOperator quarter = HermitianOperator::identity(l) * 0.25;
    switch (uniform_int(rng, 0, 4)) {
        case 0: return random_ordered_process(CausalOrder::a_before_b, rng);
        case 1: return random_ordered_process(CausalOrder::b_before_a, rng);
        case 2: {
            double t = uniform(rng);
            return ProcessMatrix(random_ordered_process(CausalOrder::a_before_b, rng).op() * t +
                                 random_ordered_process(CausalOrder::b_before_a, rng).op() * (1.0 - t));
        }
        case 3: {
            Matrix u = kron_matrix(kron_matrix(random_unitary(2, rng), random_unitary(2, rng)),
                                   kron_matrix(random_unitary(2, rng), random_unitary(2, rng)));
            HermitianOperator w(l, u * w_ocb().matrix() * u.adjoint(), 1e-8);
            double t = uniform(rng);
            return ProcessMatrix(w * (1.0 - t) + quarter * t);
        }
        default: {
            HermitianOperator v = project_LV(random_hermitian(l, rng));
            v -= HermitianOperator::identity(l) * (v.trace() / 16.0);
            double lmin = min_eigenvalue(v);
            double s = uniform(rng) * 0.25 / std::abs(lmin);
            return ProcessMatrix(quarter + v * s);
        }
    }
}

std::vector<std::vector<Matrix>> random_instrument(int din, int dout, int outcomes, Rng& rng) {
    const int per_outcome = 2;
    int rows = dout * outcomes * per_outcome;
    if (rows < din) throw std::invalid_argument("instrument too small for an isometry");
    Eigen::HouseholderQR<Matrix> qr(random_ginibre(rows, din, rng));
    Matrix v = qr.householderQ() * Matrix::Identity(rows, din);
    std::vector<std::vector<Matrix>> out(outcomes);
    for (int k = 0; k < outcomes; ++k)
        for (int j = 0; j < per_outcome; ++j) out[k].push_back(v.block((k * per_outcome + j) * dout, 0, dout, din));
    return out;
}

Comb random_ordered_comb(CombOrder order, Rng& rng) {
    Matrix gamma;
    switch (order) {
        case CombOrder::a_b_c: gamma = random_ordered_process(CausalOrder::a_before_b, rng).matrix(); break;
        case CombOrder::b_a_c: gamma = random_ordered_process(CausalOrder::b_before_a, rng).matrix(); break;
        case CombOrder::parallel_c: {
            Matrix rho = random_density(SpaceLayout::qubits({kAI, kBI}), rng).matrix();
            HermitianOperator w = kron(HermitianOperator(SpaceLayout::qubits({kAI, kBI}), rho, 1e-8),
                                       HermitianOperator::identity(SpaceLayout::qubits({kAO, kBO})));
            gamma = permute(w, {kAI, kAO, kBI, kBO}).matrix();
            break;
        }
    }
    SpaceLayout l = SpaceLayout::comb();
    Matrix r = random_density(l, rng, uniform_int(rng, 8, 32)).matrix();
    return Comb(HermitianOperator(l, fix_marginal(r, l, kCI, gamma), 1e-8), order);
}

Comb adversarial_ordered_comb(Rng& rng) {
    ProcessMatrix gamma = random_ordered_process(CausalOrder::a_before_b, rng);
    CausalOrder inner = uniform(rng) < 0.5 ? CausalOrder::b_before_a : CausalOrder::a_before_b;
    ProcessMatrix w0 = random_ordered_process(inner, rng);
    double q = max_weight(gamma.op(), w0.op());
    HermitianOperator rest = gamma.op() - w0.op() * q;
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    Matrix u = kron_matrix(q * w0.matrix(), p0) + kron_matrix(rest.matrix(), p1);
    return Comb(HermitianOperator(SpaceLayout::comb(), u), CombOrder::a_b_c);
}

FCoefficients random_coefficients(Rng& rng, double boundary) {
    Matrix g = random_ginibre(3, 1, rng);
    FCoefficients c{g(0, 0), g(1, 0), g(2, 0)};
    double scale = std::sqrt(0.125 / c.bound_value());
    if (uniform(rng) >= boundary) scale *= std::sqrt(uniform(rng));
    c.c11 *= scale;
    c.c15 *= scale;
    c.c51 *= scale;
    return c;
}

}  // namespace qcausal
