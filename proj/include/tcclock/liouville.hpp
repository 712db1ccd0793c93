#pragma once

#include <random>

#include "tcclock/spin_core.hpp"

namespace tcclock {

// Right-hand side of the Lindblad master equation,
//   sum_{k=+-} (gamma_k/S) (L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho}).
// Trace-free and Hermiticity-preserving for Hermitian rho.
CMat lindblad_rhs(const CMat& rho, const CollectiveOps& ops);

// Adaptive Dormand-Prince 4(5) propagation of rho over [0, t].
CMat propagate(CMat rho, const CollectiveOps& ops, double t,
               double rtol = 1e-9, double atol = 1e-12);

// Nonequilibrium steady state with its spectral decomposition.
// eigenvalues are sorted descending; eigenvectors.col(n) is |n>.
struct SpectralNESS {
    CMat pi;
    Eigen::VectorXd eigenvalues;
    CMat eigenvectors;
    double residual = 0.0;   // Frobenius norm of L[pi]
    bool from_fallback = false;
};

// Solves L[pi] = 0 by shifted inverse iteration on the sparse superoperator,
// falling back to long-time propagation if the residual target is missed.
// Throws if neither route reaches residual <= tol.
SpectralNESS steady_state(const CollectiveOps& ops, double tol = 1e-10);

// Trace distance (1/2) || a - b ||_1 between density matrices.
double trace_distance(const CMat& a, const CMat& b);

// Draws an eigenstate |n> of pi with probability pi_n.
std::pair<int, CVec> sample_initial(const SpectralNESS& ness, std::mt19937_64& rng);

}  // namespace tcclock
