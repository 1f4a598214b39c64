#include "lev2d/levmar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lev2d {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd clamp_to_bounds(VectorXd x, const VectorXd& lo, const VectorXd& hi) {
    for (Eigen::Index j = 0; j < x.size(); ++j)
        x(j) = std::min(std::max(x(j), lo(j)), hi(j));
    return x;
}

// Central-difference Jacobian; steps shrink one-sidedly at the box edge.
MatrixXd jacobian(const ResidualFn& fn, const VectorXd& x, const VectorXd& r0,
                  const VectorXd& lo, const VectorXd& hi, double rel_step,
                  int& n_eval) {
    const Eigen::Index m = r0.size(), n = x.size();
    MatrixXd jac(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double h = rel_step * std::max(std::abs(x(j)), 1e-300);
        if (h == 0.0)
            h = rel_step;
        double xp = std::min(x(j) + h, hi(j));
        double xm = std::max(x(j) - h, lo(j));
        if (xp == xm) { // degenerate box; derivative is zero by construction
            jac.col(j).setZero();
            continue;
        }
        VectorXd xt = x;
        xt(j) = xp;
        const VectorXd rp = fn(xt);
        xt(j) = xm;
        const VectorXd rm = fn(xt);
        n_eval += 2;
        jac.col(j) = (rp - rm) / (xp - xm);
    }
    return jac;
}

double chi2_of(const VectorXd& r) { return r.squaredNorm(); }

// Deterministic Nelder-Mead restart used when LM stalls.
VectorXd nelder_mead(const ResidualFn& fn, const VectorXd& x0, const VectorXd& lo,
                     const VectorXd& hi, int max_eval, int& n_eval) {
    const Eigen::Index n = x0.size();
    std::vector<VectorXd> pts;
    std::vector<double> fv;
    auto eval = [&](const VectorXd& x) {
        ++n_eval;
        return chi2_of(fn(clamp_to_bounds(x, lo, hi)));
    };
    pts.push_back(x0);
    fv.push_back(eval(x0));
    for (Eigen::Index j = 0; j < n; ++j) {
        VectorXd p = x0;
        const double h = 0.05 * std::max(std::abs(x0(j)), 1e-8);
        p(j) = std::min(p(j) + h, hi(j));
        if (p(j) == x0(j))
            p(j) = std::max(x0(j) - h, lo(j));
        pts.push_back(p);
        fv.push_back(eval(p));
    }
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    while (n_eval < max_eval) {
        std::vector<std::size_t> order(pts.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<VectorXd> spts(pts.size());
        std::vector<double> sfv(pts.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            spts[i] = pts[order[i]];
            sfv[i] = fv[order[i]];
        }
        pts = spts;
        fv = sfv;
        if (std::abs(fv.front() - fv.back()) <=
            1e-14 * (std::abs(fv.front()) + 1e-300))
            break;
        VectorXd centroid = VectorXd::Zero(n);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            centroid += pts[i];
        centroid /= double(n);
        const VectorXd xr = centroid + alpha * (centroid - pts.back());
        const double fr = eval(xr);
        if (fr < fv.front()) {
            const VectorXd xe = centroid + gamma * (centroid - pts.back());
            const double fe = eval(xe);
            if (fe < fr) {
                pts.back() = xe;
                fv.back() = fe;
            } else {
                pts.back() = xr;
                fv.back() = fr;
            }
        } else if (fr < fv[pts.size() - 2]) {
            pts.back() = xr;
            fv.back() = fr;
        } else {
            const VectorXd xc = centroid + rho * (pts.back() - centroid);
            const double fc = eval(xc);
            if (fc < fv.back()) {
                pts.back() = xc;
                fv.back() = fc;
            } else {
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    pts[i] = pts.front() + sigma * (pts[i] - pts.front());
                    fv[i] = eval(pts[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < fv.size(); ++i)
        if (fv[i] < fv[best])
            best = i;
    return clamp_to_bounds(pts[best], lo, hi);
}

} // namespace

std::string to_string(LsqStatus status) {
    switch (status) {
    case LsqStatus::converged_ftol: return "converged (ftol)";
    case LsqStatus::converged_xtol: return "converged (xtol)";
    case LsqStatus::converged_gtol: return "converged (gtol)";
    case LsqStatus::max_iterations: return "max iterations";
    case LsqStatus::stalled: return "stalled";
    }
    return "unknown";
}

LsqResult least_squares(const ResidualFn& fn, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                        const LsqOptions& opts) {
    const Eigen::Index n = x0.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("least_squares: bound size mismatch");
    for (Eigen::Index j = 0; j < n; ++j)
        if (!(lower(j) <= x0(j) && x0(j) <= upper(j)))
            throw std::invalid_argument("least_squares: x0 outside bounds");

    LsqResult res;
    res.x = x0;
    VectorXd r = fn(res.x);
    res.n_evaluations = 1;
    res.chi2 = chi2_of(r);
    res.accepted_chi2.push_back(res.chi2);

    double lambda = 1e-3;
    int consecutive_rejects = 0;
    bool stalled = false;

    while (res.n_iterations < opts.max_iterations) {
        ++res.n_iterations;
        const MatrixXd jac = jacobian(fn, res.x, r, lower, upper,
                                      opts.diff_rel_step, res.n_evaluations);
        const MatrixXd jtj = jac.transpose() * jac;
        const VectorXd g = jac.transpose() * r;

        // scaled gradient convergence
        double gnorm = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            gnorm = std::max(gnorm, std::abs(g(j)) * std::max(std::abs(res.x(j)), 1.0));
        if (gnorm <= opts.gtol * std::max(res.chi2, 1e-300)) {
            res.status = LsqStatus::converged_gtol;
            break;
        }

        VectorXd diag = jtj.diagonal();
        for (Eigen::Index j = 0; j < n; ++j)
            diag(j) = std::max(diag(j), 1e-300);

        bool accepted = false;
        while (!accepted) {
            MatrixXd lhs = jtj;
            lhs.diagonal() += lambda * diag;
            const VectorXd step = lhs.ldlt().solve(-g);
            const VectorXd xt = clamp_to_bounds(res.x + step, lower, upper);
            const VectorXd rt = fn(xt);
            ++res.n_evaluations;
            const double chi2_t = chi2_of(rt);
            if (chi2_t < res.chi2 && std::isfinite(chi2_t)) {
                const double dchi = res.chi2 - chi2_t;
                const double dx = (xt - res.x).norm();
                res.x = xt;
                r = rt;
                res.chi2 = chi2_t;
                res.accepted_chi2.push_back(res.chi2);
                lambda = std::max(lambda * 0.3, 1e-14);
                consecutive_rejects = 0;
                accepted = true;
                if (dchi <= opts.ftol * std::max(res.chi2, 1e-300)) {
                    res.status = LsqStatus::converged_ftol;
                }
                if (dx <= opts.xtol * (res.x.norm() + opts.xtol)) {
                    if (res.status != LsqStatus::converged_ftol)
                        res.status = LsqStatus::converged_xtol;
                }
            } else {
                lambda *= 4.0;
                ++consecutive_rejects;
                if (lambda > 1e14 || consecutive_rejects > 30) {
                    stalled = true;
                    break;
                }
            }
        }
        if (res.converged())
            break;
        if (stalled) {
            if (res.n_restarts >= opts.max_restarts) {
                res.status = LsqStatus::stalled;
                break;
            }
            ++res.n_restarts;
            const VectorXd xr = nelder_mead(fn, res.x, lower, upper,
                                            200 * static_cast<int>(n) + 200,
                                            res.n_evaluations);
            const VectorXd rr = fn(xr);
            ++res.n_evaluations;
            if (chi2_of(rr) < res.chi2) {
                res.x = xr;
                r = rr;
                res.chi2 = chi2_of(rr);
                res.accepted_chi2.push_back(res.chi2);
            }
            lambda = 1e-3;
            consecutive_rejects = 0;
            stalled = false;
        }
    }

    // covariance from the final Jacobian
    const MatrixXd jac = jacobian(fn, res.x, r, lower, upper, opts.diff_rel_step,
                                  res.n_evaluations);
    const MatrixXd jtj = jac.transpose() * jac;
    Eigen::FullPivLU<MatrixXd> lu(jtj);
    res.covariance = lu.isInvertible()
                         ? MatrixXd(lu.inverse())
                         : MatrixXd(jtj.completeOrthogonalDecomposition().pseudoInverse());

    res.at_lower.assign(n, false);
    res.at_upper.assign(n, false);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double span = upper(j) - lower(j);
        const double tol = 1e-10 * (std::abs(span) + std::abs(res.x(j)) + 1e-300);
        res.at_lower[j] = std::isfinite(lower(j)) && res.x(j) - lower(j) <= tol;
        res.at_upper[j] = std::isfinite(upper(j)) && upper(j) - res.x(j) <= tol;
    }
    return res;
}

} // namespace lev2d
