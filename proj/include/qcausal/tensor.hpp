#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace qcausal {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;

inline const std::string kAI = "A_I";
inline const std::string kAO = "A_O";
inline const std::string kBI = "B_I";
inline const std::string kBO = "B_O";
inline const std::string kCI = "C_I";

struct Subsystem {
    std::string label;
    int dim = 2;
    bool operator==(const Subsystem&) const = default;
};

// Ordered list of labeled tensor factors; the first factor is the most
// significant digit of a computational-basis index.
class SpaceLayout {
public:
    SpaceLayout() = default;
    SpaceLayout(std::vector<Subsystem> subsystems);
    SpaceLayout(std::initializer_list<Subsystem> subsystems);

    static SpaceLayout qubits(const std::vector<std::string>& labels);
    static SpaceLayout process();                  // A_I A_O B_I B_O
    static SpaceLayout comb(int conditioner_dim = 2);  // ... C_I

    const std::vector<Subsystem>& subsystems() const { return subsystems_; }
    std::size_t size() const { return subsystems_.size(); }
    int total_dim() const { return total_dim_; }
    int dim(const std::string& label) const;
    int index_of(const std::string& label) const;  // -1 if absent
    bool contains(const std::string& label) const { return index_of(label) >= 0; }
    bool all_qubits() const;
    std::vector<std::string> labels() const;

    // Stride of each factor in the flattened index.
    std::vector<int> strides() const;

    SpaceLayout without(const std::set<std::string>& drop) const;
    SpaceLayout concat(const SpaceLayout& other) const;

    bool operator==(const SpaceLayout&) const = default;

private:
    std::vector<Subsystem> subsystems_;
    int total_dim_ = 1;
};

class HermitianOperator {
public:
    HermitianOperator() = default;
    // Throws std::invalid_argument if the matrix is not Hermitian within tol
    // or its size does not match the layout. The stored matrix is the exact
    // Hermitian part of the input.
    HermitianOperator(SpaceLayout layout, const Matrix& entries, double tol = kHermitianTol);

    static HermitianOperator identity(const SpaceLayout& layout);
    static HermitianOperator zero(const SpaceLayout& layout);
    static HermitianOperator projector(const SpaceLayout& layout, const Vector& v);

    const SpaceLayout& layout() const { return layout_; }
    const Matrix& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    double trace() const { return m_.trace().real(); }
    double norm() const { return m_.norm(); }

    HermitianOperator operator+(const HermitianOperator& o) const;
    HermitianOperator operator-(const HermitianOperator& o) const;
    HermitianOperator operator-() const;
    HermitianOperator operator*(double s) const;
    HermitianOperator& operator+=(const HermitianOperator& o);
    HermitianOperator& operator-=(const HermitianOperator& o);
    HermitianOperator& operator*=(double s);

    // Same entries, different labels; dimensions must agree.
    HermitianOperator relabel(const SpaceLayout& layout) const;

private:
    void require_same_layout(const HermitianOperator& o) const;

    SpaceLayout layout_;
    Matrix m_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

double distance(const HermitianOperator& a, const HermitianOperator& b);

// Tensor product; the result layout is a followed by b.
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);
Matrix kron_matrix(const Matrix& a, const Matrix& b);

HermitianOperator partial_trace(const HermitianOperator& m, const std::set<std::string>& drop);

// (1_x / d_x) (x) tr_x(m), with x kept in place.
HermitianOperator trace_and_replace(const HermitianOperator& m, const std::string& x);
HermitianOperator trace_and_replace(const HermitianOperator& m, const std::set<std::string>& xs);

// Reorders subsystems so the result layout follows `order` (a permutation of
// the layout labels).
HermitianOperator permute(const HermitianOperator& m, const std::vector<std::string>& order);

// Swaps the roles of the labels in each pair (for example A_I<->B_I and
// A_O<->B_O) and renormalizes the ordering to the original layout.
HermitianOperator swap_labels(const HermitianOperator& m,
                              const std::vector<std::pair<std::string, std::string>>& pairs);

// Pauli strings are written with the characters I, X, Y, Z, one per qubit,
// in layout order. Index digit 0..3 maps to I, X, Y, Z.
using PauliString = std::string;

Matrix pauli_matrix(const PauliString& s);
PauliString pauli_string(std::size_t index, int num_qubits);
std::size_t pauli_index(const PauliString& s);

struct PauliCoefficients {
    SpaceLayout layout;
    // Index is the base-4 number whose digits are the Pauli labels of each
    // qubit, first subsystem most significant.
    std::vector<cplx> coeffs;

    int num_qubits() const { return static_cast<int>(layout.size()); }
    cplx at(const PauliString& s) const { return coeffs.at(pauli_index(s)); }
    cplx& at(const PauliString& s) { return coeffs.at(pauli_index(s)); }
};

// w_s = tr(m P_s) / 2^n so that m = sum_s w_s P_s.
PauliCoefficients pauli_expand(const HermitianOperator& m);
HermitianOperator pauli_assemble(const PauliCoefficients& w);

struct Eigensystem {
    Eigen::VectorXd values;  // ascending
    Matrix vectors;          // columns
};

Eigensystem eig_hermitian(const HermitianOperator& m);
Eigensystem eig_hermitian(const Matrix& m, double tol = kHermitianTol);

double min_eigenvalue(const HermitianOperator& m);
double max_eigenvalue(const HermitianOperator& m);

// Operator square root and pseudo-inverse square root of a PSD operator.
Matrix psd_sqrt(const Matrix& m);
Matrix psd_inv_sqrt(const Matrix& m, double cutoff = 1e-12);

nlohmann::json to_json(const SpaceLayout& layout);
SpaceLayout layout_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HermitianOperator& m);
HermitianOperator operator_from_json(const nlohmann::json& j);

}  // namespace qcausal
