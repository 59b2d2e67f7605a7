#include "qcausal/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcausal {

namespace {

// Digit decomposition helper for flattened indices.
struct IndexCodec {
    std::vector<int> dims;
    std::vector<int> strides;

    explicit IndexCodec(const SpaceLayout& layout) {
        for (const auto& s : layout.subsystems()) dims.push_back(s.dim);
        strides = layout.strides();
    }
    int digit(int index, int k) const { return (index / strides[k]) % dims[k]; }
};

}  // namespace

SpaceLayout::SpaceLayout(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
    std::set<std::string> seen;
    for (const auto& s : subsystems_) {
        if (s.dim <= 0) throw std::invalid_argument("subsystem " + s.label + " has non-positive dimension");
        if (!seen.insert(s.label).second) throw std::invalid_argument("duplicate subsystem label " + s.label);
        total_dim_ *= s.dim;
    }
}

SpaceLayout::SpaceLayout(std::initializer_list<Subsystem> subsystems)
    : SpaceLayout(std::vector<Subsystem>(subsystems)) {}

SpaceLayout SpaceLayout::qubits(const std::vector<std::string>& labels) {
    std::vector<Subsystem> s;
    for (const auto& l : labels) s.push_back({l, 2});
    return SpaceLayout(s);
}

SpaceLayout SpaceLayout::process() { return qubits({kAI, kAO, kBI, kBO}); }

SpaceLayout SpaceLayout::comb(int conditioner_dim) {
    return SpaceLayout({{kAI, 2}, {kAO, 2}, {kBI, 2}, {kBO, 2}, {kCI, conditioner_dim}});
}

int SpaceLayout::index_of(const std::string& label) const {
    for (std::size_t k = 0; k < subsystems_.size(); ++k)
        if (subsystems_[k].label == label) return static_cast<int>(k);
    return -1;
}

int SpaceLayout::dim(const std::string& label) const {
    int k = index_of(label);
    if (k < 0) throw std::invalid_argument("unknown subsystem label " + label);
    return subsystems_[k].dim;
}

bool SpaceLayout::all_qubits() const {
    return std::all_of(subsystems_.begin(), subsystems_.end(), [](const Subsystem& s) { return s.dim == 2; });
}

std::vector<std::string> SpaceLayout::labels() const {
    std::vector<std::string> out;
    for (const auto& s : subsystems_) out.push_back(s.label);
    return out;
}

std::vector<int> SpaceLayout::strides() const {
    std::vector<int> st(subsystems_.size(), 1);
    for (int k = static_cast<int>(subsystems_.size()) - 2; k >= 0; --k)
        st[k] = st[k + 1] * subsystems_[k + 1].dim;
    return st;
}

SpaceLayout SpaceLayout::without(const std::set<std::string>& drop) const {
    for (const auto& l : drop)
        if (!contains(l)) throw std::invalid_argument("unknown subsystem label " + l);
    std::vector<Subsystem> kept;
    for (const auto& s : subsystems_)
        if (!drop.count(s.label)) kept.push_back(s);
    return SpaceLayout(kept);
}

SpaceLayout SpaceLayout::concat(const SpaceLayout& other) const {
    std::vector<Subsystem> all = subsystems_;
    for (const auto& s : other.subsystems()) {
        if (contains(s.label)) throw std::invalid_argument("label collision on " + s.label);
        all.push_back(s);
    }
    return SpaceLayout(all);
}

HermitianOperator::HermitianOperator(SpaceLayout layout, const Matrix& entries, double tol)
    : layout_(std::move(layout)) {
    if (entries.rows() != entries.cols() || entries.rows() != layout_.total_dim())
        throw std::invalid_argument("operator size does not match layout dimension");
    double asym = (entries - entries.adjoint()).norm();
    if (asym > tol) throw std::invalid_argument("operator is not Hermitian (residual " + std::to_string(asym) + ")");
    m_ = 0.5 * (entries + entries.adjoint());
}

HermitianOperator HermitianOperator::identity(const SpaceLayout& layout) {
    int d = layout.total_dim();
    return HermitianOperator(layout, Matrix::Identity(d, d));
}

HermitianOperator HermitianOperator::zero(const SpaceLayout& layout) {
    int d = layout.total_dim();
    return HermitianOperator(layout, Matrix::Zero(d, d));
}

HermitianOperator HermitianOperator::projector(const SpaceLayout& layout, const Vector& v) {
    return HermitianOperator(layout, v * v.adjoint());
}

void HermitianOperator::require_same_layout(const HermitianOperator& o) const {
    if (!(layout_ == o.layout_)) throw std::invalid_argument("layout mismatch in operator arithmetic");
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
    HermitianOperator r = *this;
    return r += o;
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
    HermitianOperator r = *this;
    return r -= o;
}

HermitianOperator HermitianOperator::operator-() const { return *this * -1.0; }

HermitianOperator HermitianOperator::operator*(double s) const {
    HermitianOperator r = *this;
    return r *= s;
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
    require_same_layout(o);
    m_ += o.m_;
    return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& o) {
    require_same_layout(o);
    m_ -= o.m_;
    return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
    m_ *= s;
    return *this;
}

HermitianOperator HermitianOperator::relabel(const SpaceLayout& layout) const {
    if (layout.total_dim() != layout_.total_dim()) throw std::invalid_argument("relabel changes dimension");
    return HermitianOperator(layout, m_);
}

double distance(const HermitianOperator& a, const HermitianOperator& b) { return (a - b).norm(); }

Matrix kron_matrix(const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
    SpaceLayout layout = a.layout().concat(b.layout());
    return HermitianOperator(layout, kron_matrix(a.matrix(), b.matrix()));
}

HermitianOperator partial_trace(const HermitianOperator& m, const std::set<std::string>& drop) {
    const SpaceLayout& in = m.layout();
    SpaceLayout out_layout = in.without(drop);
    IndexCodec codec(in);
    std::vector<int> out_strides = out_layout.strides();

    int d = in.total_dim();
    std::vector<int> kept(d, 0), traced(d, 0);
    for (int i = 0; i < d; ++i) {
        int ko = 0, tr = 0, tr_stride = 1;
        for (int k = static_cast<int>(in.size()) - 1; k >= 0; --k) {
            const std::string& label = in.subsystems()[k].label;
            int dig = codec.digit(i, k);
            if (drop.count(label)) {
                tr += dig * tr_stride;
                tr_stride *= codec.dims[k];
            } else {
                ko += dig * out_strides[out_layout.index_of(label)];
            }
        }
        kept[i] = ko;
        traced[i] = tr;
    }

    int dout = out_layout.total_dim();
    Matrix out = Matrix::Zero(dout, dout);
    const Matrix& a = m.matrix();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (traced[i] == traced[j]) out(kept[i], kept[j]) += a(i, j);
    return HermitianOperator(out_layout, out);
}

HermitianOperator trace_and_replace(const HermitianOperator& m, const std::string& x) {
    const SpaceLayout& layout = m.layout();
    int k = layout.index_of(x);
    if (k < 0) throw std::invalid_argument("unknown subsystem label " + x);
    int dx = layout.subsystems()[k].dim;
    int stride = layout.strides()[k];
    int d = layout.total_dim();
    const Matrix& a = m.matrix();
    Matrix out = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        int xi = (i / stride) % dx;
        int i0 = i - xi * stride;
        for (int j = 0; j < d; ++j) {
            int xj = (j / stride) % dx;
            if (xi != xj) continue;
            int j0 = j - xj * stride;
            cplx acc = 0.0;
            for (int t = 0; t < dx; ++t) acc += a(i0 + t * stride, j0 + t * stride);
            out(i, j) = acc / static_cast<double>(dx);
        }
    }
    return HermitianOperator(layout, out);
}

HermitianOperator trace_and_replace(const HermitianOperator& m, const std::set<std::string>& xs) {
    HermitianOperator r = m;
    for (const auto& x : xs) r = trace_and_replace(r, x);
    return r;
}

HermitianOperator permute(const HermitianOperator& m, const std::vector<std::string>& order) {
    const SpaceLayout& in = m.layout();
    if (order.size() != in.size()) throw std::invalid_argument("permutation has wrong length");
    std::vector<Subsystem> subs;
    for (const auto& l : order) {
        int k = in.index_of(l);
        if (k < 0) throw std::invalid_argument("unknown subsystem label " + l);
        subs.push_back(in.subsystems()[k]);
    }
    SpaceLayout out_layout(subs);
    IndexCodec codec(in);
    std::vector<int> out_strides = out_layout.strides();
    int d = in.total_dim();
    std::vector<int> map(d, 0);
    for (int i = 0; i < d; ++i) {
        int o = 0;
        for (std::size_t k = 0; k < in.size(); ++k)
            o += codec.digit(i, static_cast<int>(k)) * out_strides[out_layout.index_of(in.subsystems()[k].label)];
        map[i] = o;
    }
    Matrix out(d, d);
    const Matrix& a = m.matrix();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(map[i], map[j]) = a(i, j);
    return HermitianOperator(out_layout, out);
}

HermitianOperator swap_labels(const HermitianOperator& m,
                              const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<Subsystem> renamed = m.layout().subsystems();
    for (auto& s : renamed) {
        for (const auto& [a, b] : pairs) {
            if (s.label == a) { s.label = b; break; }
            if (s.label == b) { s.label = a; break; }
        }
    }
    HermitianOperator relabeled(SpaceLayout(renamed), m.matrix());
    return permute(relabeled, m.layout().labels());
}

namespace {

const char kPauliChars[4] = {'I', 'X', 'Y', 'Z'};

int pauli_digit(char c) {
    switch (c) {
        case 'I': return 0;
        case 'X': return 1;
        case 'Y': return 2;
        case 'Z': return 3;
    }
    throw std::invalid_argument(std::string("invalid Pauli character ") + c);
}

Eigen::Matrix2cd single_pauli(int p) {
    Eigen::Matrix2cd s;
    const cplx i(0.0, 1.0);
    switch (p) {
        case 0: s << 1, 0, 0, 1; break;
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, -i, i, 0; break;
        default: s << 1, 0, 0, -1; break;
    }
    return s;
}

}  // namespace

PauliString pauli_string(std::size_t index, int num_qubits) {
    PauliString s(num_qubits, 'I');
    for (int k = num_qubits - 1; k >= 0; --k) {
        s[k] = kPauliChars[index % 4];
        index /= 4;
    }
    return s;
}

std::size_t pauli_index(const PauliString& s) {
    std::size_t idx = 0;
    for (char c : s) idx = idx * 4 + pauli_digit(c);
    return idx;
}

Matrix pauli_matrix(const PauliString& s) {
    Matrix out = Matrix::Identity(1, 1);
    for (char c : s) out = kron_matrix(out, single_pauli(pauli_digit(c)));
    return out;
}

namespace {

// Row r of a Pauli string has a single nonzero entry at column r ^ flip with
// the returned phase.
cplx pauli_row(const std::vector<int>& digits, int r, int& col) {
    int n = static_cast<int>(digits.size());
    cplx phase = 1.0;
    col = r;
    for (int k = 0; k < n; ++k) {
        int bit_pos = n - 1 - k;
        int b = (r >> bit_pos) & 1;
        switch (digits[k]) {
            case 1: col ^= (1 << bit_pos); break;
            case 2: col ^= (1 << bit_pos); phase *= (b == 0) ? cplx(0, -1) : cplx(0, 1); break;
            case 3: if (b) phase = -phase; break;
            default: break;
        }
    }
    return phase;
}

void require_qubits(const SpaceLayout& layout) {
    if (!layout.all_qubits()) throw std::invalid_argument("Pauli decomposition requires qubit subsystems");
}

}  // namespace

PauliCoefficients pauli_expand(const HermitianOperator& m) {
    require_qubits(m.layout());
    int n = static_cast<int>(m.layout().size());
    int d = m.dim();
    std::size_t count = std::size_t(1) << (2 * n);
    PauliCoefficients w{m.layout(), std::vector<cplx>(count, 0.0)};
    const Matrix& a = m.matrix();
    std::vector<int> digits(n);
    for (std::size_t s = 0; s < count; ++s) {
        std::size_t t = s;
        for (int k = n - 1; k >= 0; --k) { digits[k] = static_cast<int>(t % 4); t /= 4; }
        cplx acc = 0.0;
        for (int r = 0; r < d; ++r) {
            int c;
            cplx ph = pauli_row(digits, r, c);
            acc += ph * a(c, r);
        }
        w.coeffs[s] = acc / static_cast<double>(d);
    }
    return w;
}

HermitianOperator pauli_assemble(const PauliCoefficients& w) {
    require_qubits(w.layout);
    int n = w.num_qubits();
    int d = w.layout.total_dim();
    if (w.coeffs.size() != (std::size_t(1) << (2 * n))) throw std::invalid_argument("coefficient count mismatch");
    Matrix out = Matrix::Zero(d, d);
    std::vector<int> digits(n);
    for (std::size_t s = 0; s < w.coeffs.size(); ++s) {
        if (w.coeffs[s] == cplx(0.0)) continue;
        std::size_t t = s;
        for (int k = n - 1; k >= 0; --k) { digits[k] = static_cast<int>(t % 4); t /= 4; }
        for (int r = 0; r < d; ++r) {
            int c;
            cplx ph = pauli_row(digits, r, c);
            out(r, c) += w.coeffs[s] * ph;
        }
    }
    return HermitianOperator(w.layout, out, 1e-8);
}

Eigensystem eig_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigendecomposition needs a square matrix");
    if ((m - m.adjoint()).norm() > tol) throw std::invalid_argument("eigendecomposition input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Eigensystem eig_hermitian(const HermitianOperator& m) { return eig_hermitian(m.matrix()); }

double min_eigenvalue(const HermitianOperator& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double max_eigenvalue(const HermitianOperator& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Matrix psd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix psd_inv_sqrt(const Matrix& m, double cutoff) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Eigen::VectorXd s = es.eigenvalues();
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = s(i) > cutoff ? 1.0 / std::sqrt(s(i)) : 0.0;
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

nlohmann::json to_json(const SpaceLayout& layout) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : layout.subsystems()) j.push_back({s.label, s.dim});
    return j;
}

SpaceLayout layout_from_json(const nlohmann::json& j) {
    std::vector<Subsystem> subs;
    for (const auto& e : j) subs.push_back({e.at(0).get<std::string>(), e.at(1).get<int>()});
    return SpaceLayout(subs);
}

nlohmann::json to_json(const HermitianOperator& m) {
    nlohmann::json entries = nlohmann::json::array();
    const Matrix& a = m.matrix();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) entries.push_back({a(i, j).real(), a(i, j).imag()});
    return {{"layout", to_json(m.layout())}, {"entries", entries}};
}

HermitianOperator operator_from_json(const nlohmann::json& j) {
    SpaceLayout layout = layout_from_json(j.at("layout"));
    int d = layout.total_dim();
    const auto& entries = j.at("entries");
    if (entries.size() != static_cast<std::size_t>(d) * d) throw std::invalid_argument("entry count does not match layout");
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const auto& e = entries[static_cast<std::size_t>(i) * d + k];
            a(i, k) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
        }
    return HermitianOperator(layout, a);
}

}  // namespace qcausal
