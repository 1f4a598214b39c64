#pragma once

#include <Eigen/Dense>

namespace lev2d {

// Solves the continuous-time Lyapunov equation  A X + X A^T + Q = 0  by
// direct Kronecker linearization: (I (x) A + A (x) I) vec(X) = -vec(Q).
// At n = 6 the linearized system has 36 unknowns; a dense LU is exact and
// cheap, no iterative method needed.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
solve_lyapunov(const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>& a,
               const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& q) {
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = a.rows();

    // vec is column-major: vec(AX) = (I (x) A) vec X, vec(X A^T) = (A (x) I) vec X.
    Dense k = Dense::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        k.block(j * n, j * n, n, n) += a.template cast<Scalar>();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index l = 0; l < n; ++l)
            for (Eigen::Index r = 0; r < n; ++r)
                k(j * n + r, l * n + r) += Scalar(a(j, l));

    Vec rhs(n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        rhs.segment(j * n, n) = -q.col(j);

    Vec x = k.partialPivLu().solve(rhs);
    Dense out(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        out.col(j) = x.segment(j * n, n);
    return out;
}

} // namespace lev2d
