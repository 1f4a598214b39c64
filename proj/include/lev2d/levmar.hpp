#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lev2d {

// Residual function: maps parameter vector to the weighted residual vector.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

enum class LsqStatus {
    converged_ftol,   // chi2 change below ftol
    converged_xtol,   // step norm below xtol
    converged_gtol,   // gradient norm below gtol
    max_iterations,
    stalled,          // no further progress after fallback restarts
};

struct LsqOptions {
    int max_iterations = 200;
    double ftol = 1e-12;         // relative chi2 decrease
    double xtol = 1e-12;         // relative step size
    double gtol = 1e-12;         // scaled gradient infinity-norm
    double diff_rel_step = 1e-6; // central-difference relative step
    int max_restarts = 1;        // Nelder-Mead restarts on stall
};

struct LsqResult {
    Eigen::VectorXd x;
    double chi2 = 0.0;
    LsqStatus status = LsqStatus::max_iterations;
    int n_iterations = 0;
    int n_evaluations = 0;
    std::vector<double> accepted_chi2;      // monotone non-increasing
    Eigen::MatrixXd covariance;             // (J^T J)^-1 at the solution
    std::vector<bool> at_lower, at_upper;   // parameter pinned at a bound
    int n_restarts = 0;

    bool converged() const {
        return status == LsqStatus::converged_ftol ||
               status == LsqStatus::converged_xtol ||
               status == LsqStatus::converged_gtol;
    }
};

std::string to_string(LsqStatus status);

// Levenberg-Marquardt trust-region least squares with a numerically
// differenced Jacobian (central differences) and box bounds enforced by step
// clamping.  Fully deterministic: no randomness, fixed evaluation order.
// Falls back to a deterministic Nelder-Mead restart when LM stalls.
LsqResult least_squares(const ResidualFn& fn, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                        const LsqOptions& opts = {});

} // namespace lev2d
