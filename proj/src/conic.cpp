#include "qcausal/conic.hpp"

#include <cmath>
#include <stdexcept>

namespace qcausal {

namespace {

constexpr double kDropTol = 1e-14;

std::vector<HermitianOperator> hermitian_basis(const SpaceLayout& layout, std::string& kind) {
    int n = layout.total_dim();
    std::vector<HermitianOperator> basis;
    if (n == 1) {
        kind = "scalar";
        basis.push_back(HermitianOperator::identity(layout));
    } else if (layout.all_qubits()) {
        kind = "pauli";
        int q = static_cast<int>(layout.size());
        std::size_t count = std::size_t(1) << (2 * q);
        for (std::size_t s = 0; s < count; ++s) basis.emplace_back(layout, pauli_matrix(pauli_string(s, q)));
    } else {
        kind = "unit";
        for (int k = 0; k < n; ++k) {
            Matrix m = Matrix::Zero(n, n);
            m(k, k) = 1.0;
            basis.emplace_back(layout, m);
        }
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                Matrix re = Matrix::Zero(n, n), im = Matrix::Zero(n, n);
                re(j, k) = re(k, j) = 1.0;
                im(j, k) = cplx(0.0, -1.0);
                im(k, j) = cplx(0.0, 1.0);
                basis.emplace_back(layout, re);
                basis.emplace_back(layout, im);
            }
    }
    return basis;
}

void append_upper(std::vector<BlockEntry>& out, int var, const Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r <= c; ++r)
            if (std::abs(m(r, c)) > kDropTol) out.push_back({var, static_cast<int>(r), static_cast<int>(c), m(r, c)});
}

}  // namespace

Eigen::VectorXd real_coordinates(const HermitianOperator& h) {
    int n = h.dim();
    if (n > 1 && h.layout().all_qubits()) {
        PauliCoefficients w = pauli_expand(h);
        Eigen::VectorXd v(static_cast<Eigen::Index>(w.coeffs.size()));
        for (std::size_t k = 0; k < w.coeffs.size(); ++k) v(static_cast<Eigen::Index>(k)) = w.coeffs[k].real();
        return v;
    }
    Eigen::VectorXd v(n * n);
    int idx = 0;
    for (int k = 0; k < n; ++k) v(idx++) = h.matrix()(k, k).real();
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            v(idx++) = h.matrix()(j, k).real();
            v(idx++) = h.matrix()(j, k).imag();
        }
    return v;
}

void ConicProgram::validate() const {
    if (objective.size() != num_variables) throw std::invalid_argument("objective length differs from variable count");
    int covered = 0;
    for (const auto& g : variables) {
        if (g.offset != covered) throw std::invalid_argument("variable groups must be contiguous");
        covered += g.count;
    }
    if (!variables.empty() && covered != num_variables) throw std::invalid_argument("variable groups do not cover all variables");
    for (const auto& b : blocks) {
        if (b.dim <= 0) throw std::invalid_argument("block " + b.name + " has non-positive dimension");
        for (const auto& e : b.entries) {
            if (e.var < -1 || e.var >= num_variables) throw std::invalid_argument("block entry variable out of range");
            if (e.row < 0 || e.col < 0 || e.row >= b.dim || e.col >= b.dim || e.row > e.col)
                throw std::invalid_argument("block entry must lie in the upper triangle");
            if (e.row == e.col && std::abs(e.value.imag()) > 1e-12)
                throw std::invalid_argument("diagonal block entries must be real");
        }
    }
    if (equality_rhs.size() != num_equalities) throw std::invalid_argument("equality rhs length mismatch");
    for (const auto& e : equalities)
        if (e.row < 0 || e.row >= num_equalities || e.var < 0 || e.var >= num_variables)
            throw std::invalid_argument("equality entry out of range");
}

Matrix ConicProgram::block_value(std::size_t b, const Eigen::VectorXd& x) const {
    const PsdBlock& blk = blocks.at(b);
    Matrix m = Matrix::Zero(blk.dim, blk.dim);
    for (const auto& e : blk.entries) {
        cplx v = e.var < 0 ? e.value : e.value * x(e.var);
        m(e.row, e.col) += v;
        if (e.row != e.col) m(e.col, e.row) += std::conj(v);
    }
    return m;
}

Eigen::VectorXd ConicProgram::equality_residual(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r = -equality_rhs;
    for (const auto& e : equalities) r(e.row) += e.value * x(e.var);
    return r;
}

std::string to_string(SolverStatus s) {
    switch (s) {
        case SolverStatus::optimal: return "optimal";
        case SolverStatus::infeasible: return "infeasible";
        case SolverStatus::inaccurate: return "inaccurate";
    }
    return "?";
}

nlohmann::json to_json(const ConicProgram& p) {
    nlohmann::json j;
    j["format"] = "qcausal-conic-1";
    j["num_variables"] = p.num_variables;
    j["variables"] = nlohmann::json::array();
    for (const auto& g : p.variables)
        j["variables"].push_back({{"name", g.name}, {"layout", to_json(g.layout)}, {"basis", g.basis}, {"offset", g.offset}, {"count", g.count}});
    j["objective"] = {{"c", std::vector<double>(p.objective.data(), p.objective.data() + p.objective.size())},
                      {"offset", p.objective_offset}};
    j["blocks"] = nlohmann::json::array();
    for (const auto& b : p.blocks) {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& e : b.entries) entries.push_back({e.var, e.row, e.col, e.value.real(), e.value.imag()});
        j["blocks"].push_back({{"name", b.name}, {"dim", b.dim}, {"entries", entries}});
    }
    nlohmann::json eq = nlohmann::json::array();
    for (const auto& e : p.equalities) eq.push_back({e.row, e.var, e.value});
    j["equalities"] = {{"rows", p.num_equalities},
                       {"entries", eq},
                       {"rhs", std::vector<double>(p.equality_rhs.data(), p.equality_rhs.data() + p.equality_rhs.size())}};
    return j;
}

ConicProgram program_from_json(const nlohmann::json& j) {
    if (j.value("format", std::string()) != "qcausal-conic-1") throw std::invalid_argument("unknown conic program format");
    ConicProgram p;
    p.num_variables = j.at("num_variables").get<int>();
    for (const auto& g : j.value("variables", nlohmann::json::array()))
        p.variables.push_back({g.at("name").get<std::string>(), layout_from_json(g.at("layout")), g.at("basis").get<std::string>(),
                               g.at("offset").get<int>(), g.at("count").get<int>()});
    auto c = j.at("objective").at("c").get<std::vector<double>>();
    p.objective = Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    p.objective_offset = j.at("objective").value("offset", 0.0);
    for (const auto& b : j.at("blocks")) {
        PsdBlock blk{b.at("name").get<std::string>(), b.at("dim").get<int>(), {}};
        for (const auto& e : b.at("entries"))
            blk.entries.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>(), cplx(e.at(3).get<double>(), e.at(4).get<double>())});
        p.blocks.push_back(std::move(blk));
    }
    const auto& eq = j.at("equalities");
    p.num_equalities = eq.at("rows").get<int>();
    for (const auto& e : eq.at("entries")) p.equalities.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    auto rhs = eq.at("rhs").get<std::vector<double>>();
    p.equality_rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    p.validate();
    return p;
}

nlohmann::json to_json(const SolverReport& r) {
    return {{"status", to_string(r.status)},
            {"objective", r.objective},
            {"dual_objective", r.dual_objective},
            {"primal_residual", r.primal_residual},
            {"dual_residual", r.dual_residual},
            {"dual_gap", r.dual_gap},
            {"iterations", r.iterations},
            {"message", r.message},
            {"x", std::vector<double>(r.x.data(), r.x.data() + r.x.size())}};
}

HermitianOperator identity_map(const HermitianOperator& h) { return h; }

AffineExpr AffineExpr::of(Var v, const SpaceLayout& layout, LinearMap map, double scale) {
    AffineExpr e(layout);
    e.add(v, std::move(map), scale);
    return e;
}

AffineExpr AffineExpr::constant(const HermitianOperator& c) {
    AffineExpr e(c.layout());
    e.add_constant(c);
    return e;
}

AffineExpr& AffineExpr::add(Var v, LinearMap map, double scale) {
    terms_.push_back({v, std::move(map), scale});
    return *this;
}

AffineExpr& AffineExpr::add_constant(const HermitianOperator& c) {
    if (!(c.layout() == layout_)) throw std::invalid_argument("constant term layout mismatch");
    if (has_constant_) constant_ += c;
    else constant_ = c;
    has_constant_ = true;
    return *this;
}

Var ProgramBuilder::add_variable(const std::string& name, const SpaceLayout& layout) {
    Variable v;
    v.group.name = name;
    v.group.layout = layout;
    v.basis = hermitian_basis(layout, v.group.basis);
    v.group.offset = num_variables_;
    v.group.count = static_cast<int>(v.basis.size());
    num_variables_ += v.group.count;
    vars_.push_back(std::move(v));
    return Var{static_cast<int>(vars_.size()) - 1};
}

Var ProgramBuilder::add_scalar(const std::string& name) { return add_variable(name, SpaceLayout({{"scalar", 1}})); }

const ProgramBuilder::Variable& ProgramBuilder::variable(Var v) const {
    if (v.id < 0 || v.id >= static_cast<int>(vars_.size())) throw std::invalid_argument("unknown variable");
    return vars_[v.id];
}

const SpaceLayout& ProgramBuilder::layout(Var v) const { return variable(v).group.layout; }

void ProgramBuilder::add_psd(const std::string& name, const AffineExpr& e) { psd_.push_back({name, e}); }

void ProgramBuilder::add_equality(const std::string& name, const AffineExpr& e) { eq_.push_back({name, e}); }

void ProgramBuilder::add_objective(Var v, const HermitianOperator& weight, LinearMap map, double scale) {
    variable(v);
    objective_.push_back({v, weight, std::move(map), scale});
}

ConicProgram ProgramBuilder::build() const {
    ConicProgram p;
    p.num_variables = num_variables_;
    for (const auto& v : vars_) p.variables.push_back(v.group);
    p.objective = Eigen::VectorXd::Zero(num_variables_);
    p.objective_offset = offset_;

    auto evaluate = [&](const AffineExpr::Term& t, const HermitianOperator& b, const SpaceLayout& out) {
        HermitianOperator r = t.map(b);
        if (!(r.layout() == out)) throw std::invalid_argument("linear map output layout does not match the constraint");
        return r * t.scale;
    };

    for (const auto& c : psd_) {
        PsdBlock blk{c.name, c.expr.layout().total_dim(), {}};
        if (const HermitianOperator* k = c.expr.constant_term()) append_upper(blk.entries, -1, k->matrix());
        for (const auto& t : c.expr.terms()) {
            const Variable& v = variable(t.var);
            for (std::size_t k = 0; k < v.basis.size(); ++k)
                append_upper(blk.entries, v.group.offset + static_cast<int>(k), evaluate(t, v.basis[k], c.expr.layout()).matrix());
        }
        p.blocks.push_back(std::move(blk));
    }

    std::vector<double> rhs;
    for (const auto& c : eq_) {
        int base = static_cast<int>(rhs.size());
        Eigen::VectorXd constant = c.expr.constant_term() ? real_coordinates(*c.expr.constant_term())
                                                          : real_coordinates(HermitianOperator::zero(c.expr.layout()));
        for (Eigen::Index r = 0; r < constant.size(); ++r) rhs.push_back(-constant(r));
        for (const auto& t : c.expr.terms()) {
            const Variable& v = variable(t.var);
            for (std::size_t k = 0; k < v.basis.size(); ++k) {
                Eigen::VectorXd coords = real_coordinates(evaluate(t, v.basis[k], c.expr.layout()));
                for (Eigen::Index r = 0; r < coords.size(); ++r)
                    if (std::abs(coords(r)) > kDropTol)
                        p.equalities.push_back({base + static_cast<int>(r), v.group.offset + static_cast<int>(k), coords(r)});
            }
        }
    }
    p.num_equalities = static_cast<int>(rhs.size());
    p.equality_rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

    for (const auto& o : objective_) {
        const Variable& v = variable(o.var);
        for (std::size_t k = 0; k < v.basis.size(); ++k) {
            HermitianOperator r = o.map(v.basis[k]);
            p.objective(v.group.offset + static_cast<int>(k)) += o.scale * (o.weight.matrix() * r.matrix()).trace().real();
        }
    }
    p.validate();
    return p;
}

HermitianOperator ProgramBuilder::value(Var v, const Eigen::VectorXd& x) const {
    const Variable& var = variable(v);
    Matrix m = Matrix::Zero(var.group.layout.total_dim(), var.group.layout.total_dim());
    for (std::size_t k = 0; k < var.basis.size(); ++k) m += x(var.group.offset + static_cast<int>(k)) * var.basis[k].matrix();
    return HermitianOperator(var.group.layout, m);
}

double ProgramBuilder::scalar_value(Var v, const Eigen::VectorXd& x) const {
    const Variable& var = variable(v);
    if (var.group.count != 1) throw std::invalid_argument("not a scalar variable");
    return x(var.group.offset);
}

}  // namespace qcausal
