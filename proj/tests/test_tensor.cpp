#include "doctest.h"
#include "oracles.hpp"
#include "qcausal/conditioning.hpp"
#include "qcausal/sampling.hpp"

using namespace qcausal;

namespace {

SpaceLayout one(const std::string& label) { return SpaceLayout::qubits({label}); }

HermitianOperator pauli_op(const SpaceLayout& l, const std::string& s) { return HermitianOperator(l, oracle::pauli(s)); }

Vector phi_plus() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v;
}

}  // namespace

TEST_CASE("layout bookkeeping") {
    SpaceLayout l = SpaceLayout::comb(3);
    CHECK(l.total_dim() == 48);
    CHECK(l.labels() == std::vector<std::string>{kAI, kAO, kBI, kBO, kCI});
    CHECK(l.index_of(kCI) == 4);
    CHECK(l.strides() == std::vector<int>{24, 12, 6, 3, 1});
    CHECK_FALSE(l.all_qubits());
    CHECK(SpaceLayout::process().all_qubits());
    CHECK_THROWS_AS(SpaceLayout({{"X", 2}, {"X", 2}}), std::invalid_argument);
    CHECK_THROWS_AS(SpaceLayout({{"X", 0}}), std::invalid_argument);
}

TEST_CASE("Hermitian operators reject non-Hermitian input") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(HermitianOperator(one("X"), m), std::invalid_argument);
    CHECK_THROWS_AS(HermitianOperator(SpaceLayout::process(), Matrix::Identity(4, 4)), std::invalid_argument);
    Matrix near = oracle::pauli("X");
    near(0, 1) += 1e-12;
    HermitianOperator h(one("X"), near);
    CHECK((h.matrix() - h.matrix().adjoint()).norm() == 0.0);
}

TEST_CASE("kron examples") {
    HermitianOperator id = kron(HermitianOperator::identity(one("a")), HermitianOperator::identity(one("b")));
    CHECK((id.matrix() - Matrix::Identity(4, 4)).norm() == 0.0);

    HermitianOperator zz = kron(pauli_op(one("a"), "Z"), pauli_op(one("b"), "Z"));
    Eigen::Vector4cd diag(1, -1, -1, 1);
    CHECK((zz.matrix() - Matrix(diag.asDiagonal())).norm() == 0.0);

    HermitianOperator bell = HermitianOperator::projector(SpaceLayout::qubits({"a", "b"}), phi_plus());
    Vector zero = Vector::Zero(2);
    zero(0) = 1.0;
    HermitianOperator k = kron(bell, HermitianOperator::projector(one("c"), zero));
    CHECK(k.dim() == 8);
    CHECK(k.trace() == doctest::Approx(1.0));
    CHECK(eig_hermitian(k).values(7) == doctest::Approx(1.0));
    CHECK(eig_hermitian(k).values(6) == doctest::Approx(0.0));
    CHECK((k.matrix() - oracle::kron(bell.matrix(), zero * zero.adjoint())).norm() < 1e-15);
    CHECK(k.layout().labels() == std::vector<std::string>{"a", "b", "c"});

    CHECK_THROWS_AS(kron(bell, bell), std::invalid_argument);
}

TEST_CASE("partial trace examples") {
    Rng rng(1);
    HermitianOperator rho = random_density(SpaceLayout::qubits({kAI, kAO}), rng);
    Vector zero = Vector::Zero(2);
    zero(0) = 1.0;
    HermitianOperator prod = kron(rho, HermitianOperator::projector(one(kCI), zero));
    CHECK(distance(partial_trace(prod, {kCI}), rho) < 1e-15);

    HermitianOperator bell = HermitianOperator::projector(SpaceLayout::qubits({"a", "b"}), phi_plus());
    CHECK(distance(partial_trace(bell, {"b"}), HermitianOperator::identity(one("a")) * 0.5) < 1e-15);

    // incoherent comb built from W_OCB and W#
    HeraldedComb hc = heralded_comb(w_ocb());
    CHECK(distance(partial_trace(hc.comb.op(), {kCI}), HermitianOperator::identity(SpaceLayout::process()) * 0.25) < 1e-12);

    CHECK_THROWS_AS(partial_trace(bell, {"z"}), std::invalid_argument);
}

TEST_CASE("partial trace agrees with index-loop oracle, is linear and trace preserving") {
    Rng rng(2);
    SpaceLayout l = SpaceLayout::comb();
    const std::vector<std::string> labels = l.labels();
    for (int trial = 0; trial < 40; ++trial) {
        HermitianOperator a = random_hermitian(l, rng), b = random_hermitian(l, rng);
        std::set<std::string> drop;
        std::set<int> pos;
        for (int p = 0; p < 5; ++p)
            if (rng() % 2) {
                drop.insert(labels[p]);
                pos.insert(p);
            }
        if (drop.size() == 5) continue;
        HermitianOperator pa = partial_trace(a, drop);
        CHECK((pa.matrix() - oracle::partial_trace(a.matrix(), 5, pos)).norm() < 1e-12);
        CHECK(pa.trace() == doctest::Approx(a.trace()).epsilon(1e-12));
        HermitianOperator lin = partial_trace(a * 0.3 + b * -1.7, drop);
        CHECK(distance(lin, pa * 0.3 + partial_trace(b, drop) * -1.7) < 1e-12);
    }
}

TEST_CASE("trace_and_replace examples") {
    SpaceLayout l = SpaceLayout::process();
    HermitianOperator quarter = HermitianOperator::identity(l) * 0.25;
    CHECK(distance(trace_and_replace(quarter, kAO), quarter) < 1e-15);
    CHECK(trace_and_replace(pauli_op(l, "IZII"), kAO).norm() < 1e-15);
    CHECK_THROWS_AS(trace_and_replace(quarter, kCI), std::invalid_argument);
}

TEST_CASE("trace_and_replace is an idempotent self-adjoint projector matching the oracle") {
    Rng rng(3);
    SpaceLayout l = SpaceLayout::process();
    const std::vector<std::string> labels = l.labels();
    for (int trial = 0; trial < 50; ++trial) {
        HermitianOperator a = random_hermitian(l, rng), b = random_hermitian(l, rng);
        std::set<std::string> xs;
        std::set<int> pos;
        for (int p = 0; p < 4; ++p)
            if (rng() % 2 || (p == 3 && xs.empty())) {
                xs.insert(labels[p]);
                pos.insert(p);
            }
        HermitianOperator ta = trace_and_replace(a, xs);
        CHECK((ta.matrix() - oracle::trace_replace(a.matrix(), 4, pos)).norm() < 1e-12);
        CHECK(distance(trace_and_replace(ta, xs), ta) < 1e-12);
        cplx lhs = (ta.matrix() * b.matrix()).trace();
        cplx rhs = (a.matrix() * trace_and_replace(b, xs).matrix()).trace();
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("Pauli expansion examples") {
    PauliCoefficients id = pauli_expand(HermitianOperator::identity(SpaceLayout::process()));
    CHECK(std::abs(id.at("IIII") - 1.0) < 1e-15);
    for (std::size_t k = 1; k < id.coeffs.size(); ++k) CHECK(std::abs(id.coeffs[k]) < 1e-15);

    PauliCoefficients w = pauli_expand(w_ocb().op());
    const double s = 0.25 / std::sqrt(2.0);
    for (std::size_t k = 0; k < w.coeffs.size(); ++k) {
        PauliString p = pauli_string(k, 4);
        double expected = p == "IIII" ? 0.25 : (p == "IZZI" || p == "ZIXZ") ? s : 0.0;
        CHECK(std::abs(w.coeffs[k] - expected) < 1e-15);
    }
    // unit-trace convention: w_IIII = tr(W)/16
    CHECK(w.at("IIII").real() == doctest::Approx(w_ocb().op().trace() / 16.0));
    CHECK_THROWS_AS(pauli_expand(HermitianOperator::identity(SpaceLayout::comb(3))), std::invalid_argument);
}

TEST_CASE("Pauli indexing and matrices") {
    CHECK(pauli_index("IIII") == 0);
    CHECK(pauli_index("ZIXZ") == 3 * 64 + 1 * 4 + 3);
    CHECK(pauli_string(pauli_index("YXZI"), 4) == "YXZI");
    for (const char* s : {"X", "ZY", "IXYZ"}) CHECK((pauli_matrix(s) - oracle::pauli(s)).norm() == 0.0);
    CHECK_THROWS_AS(pauli_index("IQ"), std::invalid_argument);
}

TEST_CASE("Pauli roundtrip and coefficient oracle on random Hermitians") {
    Rng rng(4);
    SpaceLayout l = SpaceLayout::process();
    for (int trial = 0; trial < 20; ++trial) {
        HermitianOperator h = random_hermitian(l, rng);
        PauliCoefficients w = pauli_expand(h);
        CHECK(distance(pauli_assemble(w), h) < 1e-12);
        for (std::size_t k = 0; k < w.coeffs.size(); k += 17) {
            cplx ref = (h.matrix() * oracle::pauli(oracle::pauli_label(static_cast<int>(k), 4))).trace() / 16.0;
            CHECK(std::abs(w.coeffs[k] - ref) < 1e-12);
            CHECK(std::abs(w.coeffs[k].imag()) < 1e-10);
        }
        // assemble-then-expand
        PauliCoefficients v{l, std::vector<cplx>(256)};
        for (auto& c : v.coeffs) c = std::uniform_real_distribution<double>(-1, 1)(rng);
        PauliCoefficients back = pauli_expand(pauli_assemble(v));
        for (std::size_t k = 0; k < 256; ++k) CHECK(std::abs(back.coeffs[k] - v.coeffs[k]) < 1e-12);
    }
}

TEST_CASE("eigendecomposition examples") {
    Eigensystem e = eig_hermitian(w_ocb().op());
    for (int i = 0; i < 8; ++i) CHECK(std::abs(e.values(i)) < 1e-12);
    for (int i = 8; i < 16; ++i) CHECK(std::abs(e.values(i) - 0.5) < 1e-12);

    Eigensystem q = eig_hermitian(HermitianOperator::identity(SpaceLayout::process()) * 0.25);
    for (int i = 0; i < 16; ++i) CHECK(q.values(i) == doctest::Approx(0.25));

    const double a = 0.07, b = 0.11;
    double lmin = min_eigenvalue(delayed_choice_comb(a, b).op());
    CHECK(std::abs(lmin - 0.125 * (1.0 - 4.0 * std::sqrt(a * a + b * b))) < 1e-12);

    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(eig_hermitian(bad), std::invalid_argument);
}

TEST_CASE("eigendecomposition reconstructs and matches the general eigensolver") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        HermitianOperator h = random_hermitian(SpaceLayout::comb(), rng);
        Eigensystem e = eig_hermitian(h);
        Matrix v = e.vectors;
        CHECK((v.adjoint() * v - Matrix::Identity(32, 32)).norm() < 1e-10);
        Matrix rebuilt = v * e.values.cast<cplx>().asDiagonal() * v.adjoint();
        CHECK((rebuilt - h.matrix()).norm() < 1e-9);
        CHECK((h.matrix() * v - v * e.values.cast<cplx>().asDiagonal()).norm() < 1e-9);
        std::vector<double> ref = oracle::eigenvalues(h.matrix());
        for (int i = 0; i < 32; ++i) CHECK(std::abs(e.values(i) - ref[i]) < 1e-9);
        for (int i = 1; i < 32; ++i) CHECK(e.values(i) >= e.values(i - 1));
    }
}

TEST_CASE("psd square roots") {
    Rng rng(6);
    HermitianOperator rho = random_density(SpaceLayout::qubits({"a", "b"}), rng, 2);
    Matrix s = psd_sqrt(rho.matrix());
    CHECK((s * s - rho.matrix()).norm() < 1e-12);
    Matrix is = psd_inv_sqrt(rho.matrix());
    Matrix proj = is * rho.matrix() * is;
    CHECK((proj * proj - proj).norm() < 1e-9);
    CHECK(proj.trace().real() == doctest::Approx(2.0));
}

TEST_CASE("permute and swap_labels") {
    SpaceLayout l = SpaceLayout::process();
    HermitianOperator h = pauli_op(l, "XYZI");
    HermitianOperator p = permute(h, {kBO, kBI, kAO, kAI});
    CHECK(p.layout().labels() == std::vector<std::string>{kBO, kBI, kAO, kAI});
    CHECK((p.matrix() - oracle::pauli("IZYX")).norm() < 1e-15);
    HermitianOperator s = swap_labels(h, {{kAI, kBI}, {kAO, kBO}});
    CHECK(s.layout() == l);
    CHECK((s.matrix() - oracle::pauli("ZIXY")).norm() < 1e-15);
    CHECK_THROWS_AS(permute(h, {kAI, kAO, kBI}), std::invalid_argument);
}

TEST_CASE("operator JSON roundtrip") {
    Rng rng(7);
    HermitianOperator h = random_hermitian(SpaceLayout::comb(3), rng);
    nlohmann::json j = to_json(h);
    CHECK(j["layout"].size() == 5);
    CHECK(j["entries"].size() == 48 * 48);
    HermitianOperator back = operator_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.layout() == h.layout());
    CHECK((back.matrix() - h.matrix()).cwiseAbs().maxCoeff() <= 1e-15);
}
