#include "qcausal/process.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qcausal {

namespace {

void require_process_layout(const HermitianOperator& w) {
    if (!(w.layout() == SpaceLayout::process()))
        throw std::invalid_argument("expected layout [A_I, A_O, B_I, B_O] of qubits");
}

HermitianOperator tr(const HermitianOperator& w, std::set<std::string> xs) { return trace_and_replace(w, xs); }

}  // namespace

ProcessMatrix::ProcessMatrix(HermitianOperator op, double tol) : op_(std::move(op)) {
    ValidityReport r = is_valid_process(op_, tol);
    if (!r.valid) throw std::invalid_argument("not a valid process matrix: " + r.message);
}

std::string to_string(CombOrder order) {
    switch (order) {
        case CombOrder::a_b_c: return "A<B<C";
        case CombOrder::b_a_c: return "B<A<C";
        case CombOrder::parallel_c: return "A|B<C";
    }
    return "?";
}

CombOrder comb_order_from_string(const std::string& s) {
    if (s == "A<B<C") return CombOrder::a_b_c;
    if (s == "B<A<C") return CombOrder::b_a_c;
    if (s == "A|B<C") return CombOrder::parallel_c;
    throw std::invalid_argument("unknown comb order " + s);
}

Comb::Comb(HermitianOperator op, CombOrder order, double tol) : op_(std::move(op)), order_(order) {
    const SpaceLayout& l = op_.layout();
    if (l.size() != 5 || l.labels() != std::vector<std::string>{kAI, kAO, kBI, kBO, kCI} ||
        !SpaceLayout(std::vector<Subsystem>(l.subsystems().begin(), l.subsystems().end() - 1)).all_qubits())
        throw std::invalid_argument("comb layout must be [A_I, A_O, B_I, B_O, C_I]");
    double lmin = min_eigenvalue(op_);
    if (lmin < -tol) throw std::invalid_argument("comb is not positive semidefinite (min eigenvalue " + std::to_string(lmin) + ")");
    HermitianOperator m = marginal();
    if (std::abs(m.trace() - 4.0) > tol) throw std::invalid_argument("comb marginal does not have trace 4");
    double da = distance(m, project_a_before_b(m));
    double db = distance(m, project_b_before_a(m));
    bool ok = false;
    switch (order) {
        case CombOrder::a_b_c: ok = da <= tol; break;
        case CombOrder::b_a_c: ok = db <= tol; break;
        case CombOrder::parallel_c: ok = da <= tol && db <= tol; break;
    }
    if (!ok) throw std::invalid_argument("comb marginal does not have the declared order " + to_string(order));
}

std::string to_string(CausalOrder order) {
    switch (order) {
        case CausalOrder::a_before_b: return "A<B";
        case CausalOrder::b_before_a: return "B<A";
        case CausalOrder::a_parallel_b: return "A|B";
        case CausalOrder::none: return "none";
    }
    return "?";
}

bool CausalClass::strictly_a_before_b() const {
    return order == CausalOrder::a_before_b && dist_b_before_a > kStrictGap;
}

bool CausalClass::strictly_b_before_a() const {
    return order == CausalOrder::b_before_a && dist_a_before_b > kStrictGap;
}

// W = 1_BO (x) W_{A B_I} with tr_{B_I} W_{A B_I} = 1_AO (x) rho_AI.
HermitianOperator project_a_before_b(const HermitianOperator& w) {
    require_process_layout(w);
    return tr(w, {kBO}) - tr(w, {kBI, kBO}) + tr(w, {kAO, kBI, kBO});
}

HermitianOperator project_b_before_a(const HermitianOperator& w) {
    require_process_layout(w);
    return tr(w, {kAO}) - tr(w, {kAI, kAO}) + tr(w, {kAO, kAI, kBO});
}

HermitianOperator project_LV(const HermitianOperator& w) {
    require_process_layout(w);
    return tr(w, {kAO}) + tr(w, {kBO}) - tr(w, {kAO, kBO}) - tr(w, {kBI, kBO}) + tr(w, {kAO, kBI, kBO}) -
           tr(w, {kAI, kAO}) + tr(w, {kAI, kAO, kBO});
}

ValidityReport is_valid_process(const HermitianOperator& w, double tol) {
    require_process_layout(w);
    ValidityReport r;
    r.min_eigenvalue = min_eigenvalue(w);
    r.trace_error = std::abs(w.trace() - w.layout().dim(kAO) * w.layout().dim(kBO));
    r.lv_residual = distance(project_LV(w), w);
    r.valid = r.min_eigenvalue >= -tol && r.trace_error <= tol && r.lv_residual <= tol;
    std::ostringstream os;
    os << "min eigenvalue " << r.min_eigenvalue << ", trace error " << r.trace_error << ", L_V residual " << r.lv_residual;
    r.message = os.str();
    return r;
}

std::string forbidden_type(const PauliString& s) {
    if (s.size() != 4) throw std::invalid_argument("forbidden types are defined for four-qubit strings");
    static const char* names[4] = {"A_I", "A_O", "B_I", "B_O"};
    std::string type;
    int mask = 0;
    for (int k = 0; k < 4; ++k)
        if (s[k] != 'I') { mask |= 1 << (3 - k); type += names[k]; }
    // bit 3: A_I, bit 2: A_O, bit 1: B_I, bit 0: B_O
    static const std::set<int> forbidden = {
        0b0100,  // A_O
        0b0001,  // B_O
        0b0101,  // A_O B_O
        0b1100,  // A_I A_O
        0b0011,  // B_I B_O
        0b1101,  // A_I A_O B_O
        0b0111,  // A_O B_I B_O
        0b1111,  // A_I A_O B_I B_O
    };
    return forbidden.count(mask) ? type : std::string();
}

const std::vector<PauliString>& forbidden_strings() {
    static const std::vector<PauliString> strings = [] {
        std::vector<PauliString> out;
        for (std::size_t i = 0; i < 256; ++i) {
            PauliString s = pauli_string(i, 4);
            if (!forbidden_type(s).empty()) out.push_back(s);
        }
        if (out.size() != 168) throw std::logic_error("forbidden Pauli list must contain 168 strings");
        return out;
    }();
    return strings;
}

ForbiddenReport forbidden_term_check(const HermitianOperator& w, double tol) {
    require_process_layout(w);
    PauliCoefficients c = pauli_expand(w);
    ForbiddenReport r;
    for (const auto& s : forbidden_strings()) {
        double v = c.at(s).real();
        // Coefficients are scaled by 4 so the threshold matches the Frobenius
        // norm of the corresponding term (||P||_F = 4).
        if (std::abs(v) * 4.0 > tol) r.violations.push_back({s, forbidden_type(s), v});
    }
    r.ok = r.violations.empty();
    return r;
}

CausalClass classify_structure(const HermitianOperator& w, double tol) {
    CausalClass c;
    c.dist_a_before_b = distance(w, project_a_before_b(w));
    c.dist_b_before_a = distance(w, project_b_before_a(w));
    bool ab = c.dist_a_before_b <= tol;
    bool ba = c.dist_b_before_a <= tol;
    if (ab && ba) c.order = CausalOrder::a_parallel_b;
    else if (ab) c.order = CausalOrder::a_before_b;
    else if (ba) c.order = CausalOrder::b_before_a;
    else c.order = CausalOrder::none;
    return c;
}

CausalClass classify_causal_order(const ProcessMatrix& w, double tol) { return classify_structure(w.op(), tol); }

CausalClass classify_causal_order(const HermitianOperator& w, double tol) {
    ValidityReport r = is_valid_process(w, std::max(tol, kProcessTol));
    if (!r.valid) throw std::invalid_argument("classification needs a valid process: " + r.message);
    return classify_structure(w, tol);
}

double born_rule(const ProcessMatrix& w, const HermitianOperator& ma, const HermitianOperator& mb) {
    if (ma.layout().labels() != std::vector<std::string>{kAI, kAO})
        throw std::invalid_argument("Alice's operator must be on [A_I, A_O]");
    if (mb.layout().labels() != std::vector<std::string>{kBI, kBO})
        throw std::invalid_argument("Bob's operator must be on [B_I, B_O]");
    if (min_eigenvalue(ma) < -kProcessTol) throw std::invalid_argument("Alice's operator is not positive semidefinite");
    if (min_eigenvalue(mb) < -kProcessTol) throw std::invalid_argument("Bob's operator is not positive semidefinite");
    HermitianOperator m = kron(ma, mb);
    return (w.matrix() * m.matrix()).trace().real();
}

HermitianOperator choi_matrix(const std::vector<Matrix>& kraus, const std::string& in, const std::string& out) {
    if (kraus.empty()) throw std::invalid_argument("empty Kraus list");
    int din = static_cast<int>(kraus[0].cols());
    int dout = static_cast<int>(kraus[0].rows());
    SpaceLayout layout({{in, din}, {out, dout}});
    Matrix c = Matrix::Zero(din * dout, din * dout);
    for (const auto& k : kraus) {
        // vec with the input index most significant: |i> (x) K|i>
        Vector v = Vector::Zero(din * dout);
        for (int i = 0; i < din; ++i) v.segment(i * dout, dout) = k.col(i);
        c += v * v.adjoint();
    }
    return HermitianOperator(layout, c);
}

ProcessMatrix w_ocb() {
    PauliCoefficients w{SpaceLayout::process(), std::vector<cplx>(256, 0.0)};
    const double s = 0.25 / std::sqrt(2.0);
    w.at("IIII") = 0.25;
    w.at("IZZI") = s;
    w.at("ZIXZ") = s;
    return ProcessMatrix(pauli_assemble(w));
}

ProcessMatrix w_sharp() {
    return ProcessMatrix(HermitianOperator::identity(SpaceLayout::process()) * 0.5 - w_ocb().op());
}

ProcessMatrix identity_process() { return ProcessMatrix(HermitianOperator::identity(SpaceLayout::process()) * 0.25); }

ProcessMatrix markovian_full_rank(double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("markovian_full_rank needs r in (0, 1)");
    SpaceLayout ai = SpaceLayout::qubits({kAI});
    SpaceLayout mid = SpaceLayout::qubits({kAO, kBI});
    SpaceLayout bo = SpaceLayout::qubits({kBO});
    Vector phi = Vector::Zero(4);
    phi(0) = 1.0;
    phi(3) = 1.0;
    HermitianOperator channel =
        HermitianOperator::projector(mid, phi) * r + HermitianOperator::identity(mid) * ((1.0 - r) / 2.0);
    HermitianOperator w = kron(kron(HermitianOperator::identity(ai) * 0.5, channel), HermitianOperator::identity(bo));
    return ProcessMatrix(w);
}

HermitianOperator swap_parties(const HermitianOperator& w) {
    require_process_layout(w);
    return swap_labels(w, {{kAI, kBI}, {kAO, kBO}});
}

double success_probability(const ProcessMatrix& w) {
    const SpaceLayout& l = w.op().layout();
    return 1.0 / (l.dim(kAI) * l.dim(kBI) * max_eigenvalue(w.op()));
}

namespace {

std::map<std::string, double> parse_params(const std::string& s) {
    std::map<std::string, double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("malformed parameter '" + item + "'");
        out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    return out;
}

}  // namespace

ProcessMatrix named_process(const std::string& spec) {
    std::string name = spec;
    std::map<std::string, double> params;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        params = parse_params(spec.substr(colon + 1));
    }
    auto param = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (name == "w_ocb") return w_ocb();
    if (name == "w_sharp") return w_sharp();
    if (name == "identity") return identity_process();
    if (name == "markovian") return markovian_full_rank(param("r", 0.5));
    if (name == "markovian_mirror") return ProcessMatrix(swap_parties(markovian_full_rank(param("r", 0.5)).op()));
    throw std::invalid_argument("unknown process name " + spec);
}

nlohmann::json to_json(const ProcessMatrix& w) {
    nlohmann::json j = to_json(w.op());
    j["kind"] = "process";
    return j;
}

nlohmann::json to_json(const Comb& c) {
    nlohmann::json j = to_json(c.op());
    j["kind"] = "comb";
    j["order"] = to_string(c.order());
    return j;
}

ProcessMatrix process_from_json(const nlohmann::json& j) {
    if (j.value("kind", "process") != "process") throw std::invalid_argument("JSON object is not a process");
    return ProcessMatrix(operator_from_json(j));
}

Comb comb_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "comb") throw std::invalid_argument("JSON object is not a comb");
    return Comb(operator_from_json(j), comb_order_from_string(j.at("order").get<std::string>()));
}

}  // namespace qcausal
