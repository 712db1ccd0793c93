#include "tcclock/liouville.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tcclock {

CMat lindblad_rhs(const CMat& rho, const CollectiveOps& ops) {
    if (rho.rows() != ops.dim() || rho.cols() != ops.dim())
        throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    const double s = ops.params().spin();
    const double gm = ops.rates().gamma_minus / s;
    const double gp = ops.rates().gamma_plus / s;
    const CMat& lm = ops.l_minus();
    const CMat& lp = ops.l_plus();

    CMat out = gm * (lm * rho * lm.adjoint());
    out.noalias() += gp * (lp * rho * lp.adjoint());
    const CMat km = lm.adjoint() * lm;
    const CMat kp = lp.adjoint() * lp;
    out.noalias() -= 0.5 * gm * (km * rho + rho * km);
    out.noalias() -= 0.5 * gp * (kp * rho + rho * kp);
    return out;
}

namespace {

// Dormand-Prince 4(5) tableau.
const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
const double a21 = 1.0 / 5;
const double a31 = 3.0 / 40, a32 = 9.0 / 40;
const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
             a54 = -212.0 / 729;
const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
             a64 = 49.0 / 176, a65 = -5103.0 / 18656;
const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
             b5 = -2187.0 / 6784, b6 = 11.0 / 84;
const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
             e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

CMat propagate(CMat rho, const CollectiveOps& ops, double t, double rtol, double atol) {
    if (t <= 0.0) return rho;
    // Initial step from the rate scale.
    const double s = ops.params().spin();
    const double rate = (ops.rates().gamma_minus + ops.rates().gamma_plus) / s *
                        (ops.alpha() * ops.alpha() + 2.0 * s + 1.0);
    double h = std::min(t, 0.1 / std::max(rate, 1e-300));
    double time = 0.0;

    CMat k1 = lindblad_rhs(rho, ops);
    while (time < t) {
        if (time + h > t) h = t - time;
        const CMat k2 = lindblad_rhs(rho + h * (a21 * k1), ops);
        const CMat k3 = lindblad_rhs(rho + h * (a31 * k1 + a32 * k2), ops);
        const CMat k4 = lindblad_rhs(rho + h * (a41 * k1 + a42 * k2 + a43 * k3), ops);
        const CMat k5 = lindblad_rhs(rho + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), ops);
        const CMat k6 = lindblad_rhs(rho + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), ops);
        const CMat rho5 = rho + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const CMat k7 = lindblad_rhs(rho5, ops);
        const CMat err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double scale = atol + rtol * std::max(rho.norm(), rho5.norm());
        const double errnorm = err.norm() / scale;
        if (errnorm <= 1.0) {
            time += h;
            rho = rho5;
            k1 = k7;  // FSAL
        }
        const double factor = std::clamp(0.9 * std::pow(std::max(errnorm, 1e-10), -0.2), 0.2, 5.0);
        h *= factor;
        if (h < 1e-14 * t)
            throw std::runtime_error("propagate: step size underflow");
    }
    // Keep the iterate on the physical manifold.
    rho = 0.5 * (rho + CMat(rho.adjoint()));
    rho /= rho.trace().real();
    return rho;
}

double trace_distance(const CMat& a, const CMat& b) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (a - b + CMat((a - b).adjoint())));
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;

// Column-stacked superoperator: vec(A rho B) = (B^T kron A) vec(rho).
SpMat build_superoperator(const CollectiveOps& ops) {
    const int d = ops.dim();
    const double s = ops.params().spin();
    const double g[2] = {ops.rates().gamma_minus / s, ops.rates().gamma_plus / s};
    const CMat l[2] = {ops.l_minus(), ops.l_plus()};

    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<size_t>(d) * d * 16);
    auto add_kron = [&](const CMat& bt, const CMat& a, cplx w) {
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                const cplx bij = bt(i, j);
                if (bij == cplx(0.0)) continue;
                for (int l2 = 0; l2 < d; ++l2)
                    for (int k = 0; k < d; ++k) {
                        const cplx akl = a(k, l2);
                        if (akl == cplx(0.0)) continue;
                        trip.emplace_back(i * d + k, j * d + l2, w * bij * akl);
                    }
            }
    };

    const CMat id = CMat::Identity(d, d);
    for (int k = 0; k < 2; ++k) {
        const CMat kk = l[k].adjoint() * l[k];
        add_kron(l[k].conjugate(), l[k], g[k]);             // L rho L^dag
        add_kron(id, kk, -0.5 * g[k]);                      // -1/2 L^dag L rho
        add_kron(kk.transpose(), id, -0.5 * g[k]);          // -1/2 rho L^dag L
    }
    SpMat m(d * d, d * d);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

struct SolveAttempt {
    CMat pi;
    double residual;
};

// Shifted inverse iteration toward the null vector of the superoperator.
SolveAttempt null_vector_solve(const CollectiveOps& ops) {
    const int d = ops.dim();
    SpMat m = build_superoperator(ops);
    const double shift = 1e-10 * ops.params().gamma0;
    SpMat shifted = m;
    for (int i = 0; i < d * d; ++i) shifted.coeffRef(i, i) -= shift;
    shifted.makeCompressed();

    Eigen::SparseLU<SpMat> lu;
    lu.compute(shifted);
    SolveAttempt best{CMat(), std::numeric_limits<double>::infinity()};
    if (lu.info() != Eigen::Success) return best;

    CVec x = CVec::Zero(d * d);
    for (int i = 0; i < d; ++i) x[i * d + i] = 1.0 / d;  // vec(I/d)
    for (int iter = 0; iter < 50; ++iter) {
        x = lu.solve(x);
        x /= x.norm();
        CMat rho = Eigen::Map<CMat>(x.data(), d, d);
        rho = 0.5 * (rho + CMat(rho.adjoint()));
        const double tr = rho.trace().real();
        if (std::abs(tr) < 1e-14) continue;
        rho /= tr;
        const double res = lindblad_rhs(rho, ops).norm();
        if (res < best.residual) best = {rho, res};
        if (res <= 1e-12) break;
    }
    return best;
}

SolveAttempt propagation_solve(const CollectiveOps& ops, double tol) {
    const double g0 = ops.params().gamma0;
    CMat rho = CMat::Identity(ops.dim(), ops.dim()) / ops.dim();
    SolveAttempt best{rho, lindblad_rhs(rho, ops).norm()};
    double t = 0.0;
    const double chunk = 100.0 / g0;
    while (t < 4000.0 / g0) {
        rho = propagate(rho, ops, chunk, 1e-11, 1e-14);
        t += chunk;
        const double res = lindblad_rhs(rho, ops).norm();
        if (res < best.residual) best = {rho, res};
        if (res <= 0.1 * tol) break;
    }
    return best;
}

}  // namespace

SpectralNESS steady_state(const CollectiveOps& ops, double tol) {
    if (ops.rates().gamma_plus == 0.0 && ops.alpha() == 0.0) {
        // Pure decay without drive: the all-down Dicke state is dark, so the
        // steady state is exactly |0><0|.
        const int d = ops.dim();
        SpectralNESS out;
        out.pi = CMat::Zero(d, d);
        out.pi(0, 0) = 1.0;
        out.eigenvalues = Eigen::VectorXd::Zero(d);
        out.eigenvalues[0] = 1.0;
        out.eigenvectors = CMat::Identity(d, d);
        out.residual = lindblad_rhs(out.pi, ops).norm();
        return out;
    }
    SolveAttempt att = null_vector_solve(ops);
    bool fallback = false;
    if (!(att.residual <= tol)) {
        const SolveAttempt prop = propagation_solve(ops, tol);
        if (prop.residual < att.residual) {
            att = prop;
            fallback = true;
        }
    }
    if (!(att.residual <= tol)) {
        std::ostringstream msg;
        msg << "steady_state: no convergence, best residual " << att.residual
            << " (target " << tol << ")";
        throw std::runtime_error(msg.str());
    }

    Eigen::SelfAdjointEigenSolver<CMat> es(att.pi);
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < -1e-10)
        throw std::runtime_error("steady_state: negative eigenvalue beyond tolerance");

    SpectralNESS out;
    out.pi = att.pi;
    out.residual = att.residual;
    out.from_fallback = fallback;
    // Descending order, small negatives clipped for sampling.
    const int d = ops.dim();
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d, d);
    for (int i = 0; i < d; ++i) {
        out.eigenvalues[i] = std::max(ev[d - 1 - i], 0.0);
        out.eigenvectors.col(i) = es.eigenvectors().col(d - 1 - i);
    }
    out.eigenvalues /= out.eigenvalues.sum();
    return out;
}

std::pair<int, CVec> sample_initial(const SpectralNESS& ness, std::mt19937_64& rng) {
    const int d = static_cast<int>(ness.eigenvalues.size());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double acc = 0.0;
    for (int n = 0; n < d; ++n) {
        acc += ness.eigenvalues[n];
        if (u < acc) return {n, ness.eigenvectors.col(n)};
    }
    return {d - 1, ness.eigenvectors.col(d - 1)};
}

}  // namespace tcclock
