#include "qcausal/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/SparseCore>

namespace qcausal {

namespace {

using SparseReal = Eigen::SparseMatrix<double>;

struct Reduction {
    Eigen::VectorXd x0;
    SparseReal basis;  // x = x0 + basis * z
    bool infeasible = false;
    std::string message;
};

// Substitutes singleton rows, then parametrizes what is left by an SVD
// nullspace restricted to the columns those rows touch.
Reduction eliminate_equalities(const ConicProgram& p) {
    const int m = p.num_variables;
    Reduction red;
    red.x0 = Eigen::VectorXd::Zero(m);

    std::vector<std::map<int, double>> rows(p.num_equalities);
    for (const auto& e : p.equalities) rows[e.row][e.var] += e.value;
    std::vector<char> fixed(m, 0), done(p.num_equalities, 0);

    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 0; r < p.num_equalities; ++r) {
            if (done[r]) continue;
            double rhs = p.equality_rhs(r);
            int live = 0, live_var = -1;
            double live_coef = 0.0, scale = std::abs(rhs);
            for (const auto& [v, a] : rows[r]) {
                scale = std::max(scale, std::abs(a));
                if (fixed[v]) rhs -= a * red.x0(v);
                else if (std::abs(a) > 1e-14) { ++live; live_var = v; live_coef = a; }
            }
            if (live == 0) {
                if (std::abs(rhs) > 1e-9 * (1.0 + scale)) {
                    red.infeasible = true;
                    red.message = "inconsistent linear equalities";
                    return red;
                }
                done[r] = 1;
            } else if (live == 1) {
                red.x0(live_var) = rhs / live_coef;
                fixed[live_var] = 1;
                done[r] = 1;
                changed = true;
            }
        }
    }

    std::vector<int> rest_rows;
    std::vector<int> col_index(m, -1), rest_cols;
    for (int r = 0; r < p.num_equalities; ++r) {
        if (done[r]) continue;
        rest_rows.push_back(r);
        for (const auto& [v, a] : rows[r])
            if (!fixed[v] && col_index[v] < 0) {
                col_index[v] = static_cast<int>(rest_cols.size());
                rest_cols.push_back(v);
            }
    }

    std::vector<Eigen::Triplet<double>> trip;
    int next = 0;
    for (int v = 0; v < m; ++v)
        if (!fixed[v] && col_index[v] < 0) trip.emplace_back(v, next++, 1.0);

    if (!rest_rows.empty()) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rest_rows.size()), static_cast<Eigen::Index>(rest_cols.size()));
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(rest_rows.size()));
        for (std::size_t i = 0; i < rest_rows.size(); ++i) {
            int r = rest_rows[i];
            double b = p.equality_rhs(r);
            for (const auto& [v, a] : rows[r]) {
                if (fixed[v]) b -= a * red.x0(v);
                else e(static_cast<Eigen::Index>(i), col_index[v]) += a;
            }
            rhs(static_cast<Eigen::Index>(i)) = b;
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        double cutoff = sv.size() > 0 ? 1e-10 * std::max(1.0, sv(0)) : 0.0;
        Eigen::Index rank = 0;
        while (rank < sv.size() && sv(rank) > cutoff) ++rank;
        Eigen::VectorXd ub = svd.matrixU().leftCols(rank).transpose() * rhs;
        Eigen::VectorXd xp = svd.matrixV().leftCols(rank) * ub.cwiseQuotient(sv.head(rank));
        if ((e * xp - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
            red.infeasible = true;
            red.message = "inconsistent linear equalities";
            return red;
        }
        for (std::size_t k = 0; k < rest_cols.size(); ++k) red.x0(rest_cols[k]) = xp(static_cast<Eigen::Index>(k));
        Eigen::MatrixXd null = svd.matrixV().rightCols(e.cols() - rank);
        for (Eigen::Index j = 0; j < null.cols(); ++j, ++next)
            for (Eigen::Index k = 0; k < null.rows(); ++k)
                if (null(k, j) != 0.0) trip.emplace_back(rest_cols[k], next, null(k, j));
    }
    red.basis.resize(m, next);
    red.basis.setFromTriplets(trip.begin(), trip.end());
    return red;
}

struct Lmi {
    std::vector<int> dims;
    std::vector<Matrix> constant;   // C_b
    std::vector<Matrix> coeffs;     // n_b^2 x m, columns vec(A_{b,j}) column-major
    Eigen::VectorXd c;
    double offset = 0.0;

    int m() const { return static_cast<int>(c.size()); }
};

Matrix unvec(const Vector& v, int n) { return Eigen::Map<const Matrix>(v.data(), n, n); }

Matrix herm(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

// Re tr(a^H b)
double inner(const Matrix& a, const Matrix& b) { return (a.conjugate().cwiseProduct(b)).sum().real(); }

// Largest step keeping x + a dx positive definite, scaled by gamma and capped at 1.
double step_length(const Matrix& x, const Matrix& dx, double gamma) {
    Eigen::LLT<Matrix> llt(x);
    Matrix linv = llt.matrixL().solve(Matrix::Identity(x.rows(), x.cols()));
    Matrix s = linv * dx * linv.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm(s), Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues()(0);
    if (lmin >= 0.0) return 1.0;
    return std::min(1.0, gamma * (-1.0 / lmin));
}

struct IpmResult {
    Eigen::VectorXd w;
    std::vector<Matrix> y;
    double pobj = 0.0, dobj = 0.0, pinf = 0.0, dinf = 0.0, relgap = 0.0, dual_res = 0.0;
    int iterations = 0;
    bool converged = false;
    bool primal_infeasible = false;
    bool dual_infeasible = false;
};

IpmResult solve_lmi(const Lmi& lmi, const SolverOptions& opt) {
    const int nb = static_cast<int>(lmi.dims.size());
    const int m = lmi.m();
    IpmResult res;

    int ntot = 0;
    double cnorm = 0.0, amax = 0.0;
    for (int b = 0; b < nb; ++b) {
        ntot += lmi.dims[b];
        cnorm += lmi.constant[b].squaredNorm();
    }
    cnorm = std::sqrt(cnorm);
    Eigen::VectorXd colnorm = Eigen::VectorXd::Zero(m);
    for (int b = 0; b < nb; ++b) colnorm += lmi.coeffs[b].colwise().squaredNorm().transpose();
    colnorm = colnorm.cwiseSqrt();
    if (m > 0) amax = colnorm.maxCoeff();

    double ratio = 0.0;
    for (int j = 0; j < m; ++j) ratio = std::max(ratio, (1.0 + std::abs(lmi.c(j))) / (1.0 + colnorm(j)));
    double zeta = std::max({10.0, std::sqrt(static_cast<double>(ntot)), cnorm, amax});
    double eta = std::max({10.0, std::sqrt(static_cast<double>(ntot)), ntot * ratio});

    std::vector<Matrix> z(nb), y(nb), zinv(nb), rp(nb);
    for (int b = 0; b < nb; ++b) {
        z[b] = zeta * Matrix::Identity(lmi.dims[b], lmi.dims[b]);
        y[b] = eta * Matrix::Identity(lmi.dims[b], lmi.dims[b]);
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    const double cvec_norm = lmi.c.norm();

    auto affine = [&](int b, const Eigen::VectorXd& v) {
        Matrix a = lmi.constant[b];
        if (m > 0) a += unvec(lmi.coeffs[b] * v.cast<cplx>(), lmi.dims[b]);
        return a;
    };
    auto linear = [&](int b, const Eigen::VectorXd& v) { return unvec(lmi.coeffs[b] * v.cast<cplx>(), lmi.dims[b]); };
    auto adjoint = [&](const std::vector<Matrix>& k) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
        for (int b = 0; b < nb; ++b) {
            Eigen::Map<const Vector> kv(k[b].data(), k[b].size());
            out += (lmi.coeffs[b].adjoint() * kv).real();
        }
        return out;
    };

    Eigen::VectorXd rd;
    for (int it = 0; it <= opt.max_iterations; ++it) {
        res.iterations = it;
        double gap = 0.0, cy = 0.0, rpn = 0.0;
        for (int b = 0; b < nb; ++b) {
            rp[b] = affine(b, w) - z[b];
            rpn += rp[b].squaredNorm();
            gap += inner(z[b], y[b]);
            cy += inner(lmi.constant[b], y[b]);
        }
        rd = lmi.c - adjoint(y);
        res.pobj = lmi.c.dot(w) + lmi.offset;
        res.dobj = -cy + lmi.offset;
        res.pinf = std::sqrt(rpn) / (1.0 + cnorm);
        res.dual_res = rd.norm();
        res.dinf = res.dual_res / (1.0 + cvec_norm);
        res.relgap = std::abs(res.pobj - res.dobj) / (1.0 + std::abs(res.pobj) + std::abs(res.dobj));
        double mu = gap / ntot;

        if (std::max({res.relgap, res.pinf, res.dinf}) < opt.tolerance) {
            res.converged = true;
            break;
        }
        double ynorm = 0.0;
        for (int b = 0; b < nb; ++b) ynorm += y[b].norm();
        if (-cy > 0.0 && ynorm > 1e8 && adjoint(y).norm() / (-cy) < 1e-8) {
            res.primal_infeasible = true;
            break;
        }
        if (res.pobj < -1e10) {
            res.dual_infeasible = true;
            break;
        }
        if (it == opt.max_iterations) break;

        // Schur complement M_ij = <A_i, Z^-1 A_j Y>
        Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
        for (int b = 0; b < nb; ++b) {
            int n = lmi.dims[b];
            Eigen::LLT<Matrix> llt(z[b]);
            zinv[b] = llt.solve(Matrix::Identity(n, n));
            zinv[b] = herm(zinv[b]);
            Matrix g(n * n, m);
            for (int j = 0; j < m; ++j) {
                Eigen::Map<const Matrix> aj(lmi.coeffs[b].col(j).data(), n, n);
                Matrix gj = zinv[b] * aj * y[b];
                g.col(j) = Eigen::Map<const Vector>(gj.data(), n * n);
            }
            schur += (lmi.coeffs[b].adjoint() * g).real();
        }
        schur = 0.5 * (schur + schur.transpose()).eval();
        Eigen::LLT<Eigen::MatrixXd> chol(schur);
        Eigen::LDLT<Eigen::MatrixXd> ldlt;
        bool use_ldlt = chol.info() != Eigen::Success;
        if (use_ldlt) {
            double reg = 1e-14 * std::max(1.0, schur.diagonal().maxCoeff());
            ldlt.compute(schur + reg * Eigen::MatrixXd::Identity(m, m));
        }
        auto solve = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
            return use_ldlt ? Eigen::VectorXd(ldlt.solve(rhs)) : Eigen::VectorXd(chol.solve(rhs));
        };

        auto direction = [&](double sigma_mu, const std::vector<Matrix>* corr, Eigen::VectorXd& dw,
                             std::vector<Matrix>& dz, std::vector<Matrix>& dy) {
            std::vector<Matrix> k(nb);
            for (int b = 0; b < nb; ++b) {
                k[b] = sigma_mu * zinv[b] - y[b] - zinv[b] * rp[b] * y[b];
                if (corr) k[b] -= (*corr)[b];
            }
            dw = solve(adjoint(k) - rd);
            for (int b = 0; b < nb; ++b) {
                dz[b] = rp[b] + linear(b, dw);
                dy[b] = herm(k[b] - zinv[b] * (dz[b] - rp[b]) * y[b]);
            }
        };

        Eigen::VectorXd dw;
        std::vector<Matrix> dz(nb), dy(nb);
        direction(0.0, nullptr, dw, dz, dy);
        double ap = 1.0, ad = 1.0;
        for (int b = 0; b < nb; ++b) {
            ap = std::min(ap, step_length(z[b], dz[b], 1.0));
            ad = std::min(ad, step_length(y[b], dy[b], 1.0));
        }
        double gap_aff = 0.0;
        for (int b = 0; b < nb; ++b) gap_aff += inner(z[b] + ap * dz[b], y[b] + ad * dy[b]);
        double sigma = std::clamp(std::pow(std::max(gap_aff, 0.0) / gap, 3.0), 0.0, 1.0);
        // Keep some centering while infeasible.
        if (res.pinf > 1e-2 || res.dinf > 1e-2) sigma = std::max(sigma, 0.1);
        double gamma = 0.9 + 0.09 * std::min(ap, ad);

        std::vector<Matrix> corr(nb);
        for (int b = 0; b < nb; ++b) corr[b] = zinv[b] * dz[b] * dy[b];
        direction(sigma * mu, &corr, dw, dz, dy);
        ap = 1.0;
        ad = 1.0;
        for (int b = 0; b < nb; ++b) {
            ap = std::min(ap, step_length(z[b], dz[b], gamma));
            ad = std::min(ad, step_length(y[b], dy[b], gamma));
        }
        if (ap < 1e-12 && ad < 1e-12) break;
        w += ap * dw;
        for (int b = 0; b < nb; ++b) {
            z[b] = herm(z[b] + ap * dz[b]);
            y[b] = herm(y[b] + ad * dy[b]);
        }
    }
    res.w = w;
    res.y = y;
    return res;
}

}  // namespace

SolverReport solve_interior_point(const ConicProgram& program, const SolverOptions& options) {
    program.validate();
    SolverReport report;
    const int m = program.num_variables;

    Reduction red = eliminate_equalities(program);
    if (red.infeasible) {
        report.status = SolverStatus::infeasible;
        report.message = red.message;
        report.x = Eigen::VectorXd::Zero(m);
        return report;
    }

    const int mr = static_cast<int>(red.basis.cols());
    Lmi lmi;
    lmi.c = red.basis.transpose() * program.objective;
    lmi.offset = program.objective_offset + program.objective.dot(red.x0);
    for (std::size_t b = 0; b < program.blocks.size(); ++b) {
        const PsdBlock& blk = program.blocks[b];
        int n = blk.dim;
        Matrix full = Matrix::Zero(n * n, m);
        Matrix constant = Matrix::Zero(n, n);
        for (const auto& e : blk.entries) {
            if (e.var < 0) {
                constant(e.row, e.col) += e.value;
                if (e.row != e.col) constant(e.col, e.row) += std::conj(e.value);
                continue;
            }
            full(e.row + e.col * n, e.var) += e.value;
            if (e.row != e.col) full(e.col + e.row * n, e.var) += std::conj(e.value);
        }
        Vector shift = full * red.x0.cast<cplx>();
        constant += unvec(shift, n);
        lmi.dims.push_back(n);
        lmi.constant.push_back(constant);
        lmi.coeffs.push_back(full * red.basis.cast<cplx>());
    }

    // Drop directions that no block sees.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(mr, mr);
    for (const auto& f : lmi.coeffs) gram += (f.adjoint() * f).real();
    Eigen::MatrixXd keep = Eigen::MatrixXd::Identity(mr, mr);
    bool reduced = false;
    if (mr > 0) {
        Eigen::VectorXd diag = gram.diagonal();
        bool diagonal = (gram - Eigen::MatrixXd(diag.asDiagonal())).norm() <= 1e-12 * std::max(1.0, diag.maxCoeff());
        double scale = std::max(1.0, gram.diagonal().maxCoeff());
        if (diagonal) {
            std::vector<int> cols;
            for (int j = 0; j < mr; ++j)
                if (diag(j) > 1e-12 * scale) cols.push_back(j);
            if (static_cast<int>(cols.size()) < mr) {
                keep = Eigen::MatrixXd::Zero(mr, static_cast<Eigen::Index>(cols.size()));
                for (std::size_t k = 0; k < cols.size(); ++k) keep(cols[k], static_cast<Eigen::Index>(k)) = 1.0;
                reduced = true;
            }
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
            std::vector<int> cols;
            for (int j = 0; j < mr; ++j)
                if (es.eigenvalues()(j) > 1e-12 * scale) cols.push_back(j);
            keep = Eigen::MatrixXd(mr, static_cast<Eigen::Index>(cols.size()));
            for (std::size_t k = 0; k < cols.size(); ++k) keep.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(cols[k]);
            reduced = true;
        }
    }
    if (reduced) {
        Eigen::VectorXd dead = lmi.c - keep * (keep.transpose() * lmi.c);
        if (dead.norm() > 1e-9 * (1.0 + lmi.c.norm())) {
            report.status = SolverStatus::infeasible;
            report.message = "objective is unbounded along directions no constraint sees";
            report.x = red.x0;
            return report;
        }
        lmi.c = keep.transpose() * lmi.c;
        for (auto& f : lmi.coeffs) f = f * keep.cast<cplx>();
    }

    IpmResult ipm = solve_lmi(lmi, options);

    report.x = red.x0 + red.basis * (keep * ipm.w);
    report.objective = program.objective.dot(report.x) + program.objective_offset;
    report.dual_objective = ipm.dobj;
    report.dual_gap = std::abs(ipm.pobj - ipm.dobj);
    report.dual_residual = ipm.dual_res;
    report.iterations = ipm.iterations;
    report.block_duals = ipm.y;

    double psd_violation = 0.0;
    for (std::size_t b = 0; b < program.blocks.size(); ++b) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(program.block_value(b, report.x), Eigen::EigenvaluesOnly);
        psd_violation = std::max(psd_violation, -es.eigenvalues()(0));
    }
    double eq_residual = program.num_equalities > 0 ? program.equality_residual(report.x).cwiseAbs().maxCoeff() : 0.0;
    report.primal_residual = std::max(psd_violation, eq_residual);

    std::ostringstream msg;
    msg << "iterations " << ipm.iterations << ", relative gap " << ipm.relgap << ", primal infeasibility " << ipm.pinf
        << ", dual infeasibility " << ipm.dinf;
    report.message = msg.str();

    if (ipm.primal_infeasible || ipm.dual_infeasible) {
        report.status = SolverStatus::infeasible;
        report.message = (ipm.primal_infeasible ? "primal infeasible; " : "dual infeasible; ") + report.message;
    } else if (ipm.converged && report.dual_gap < 1e-7 * (1.0 + std::abs(ipm.pobj) + std::abs(ipm.dobj)) &&
               report.primal_residual < 1e-7) {
        report.status = SolverStatus::optimal;
    } else {
        report.status = SolverStatus::inaccurate;
    }
    return report;
}

}  // namespace qcausal
