#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace tcclock {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Physical configuration of the clock, in units omega_C = 1.
// The total spin is stored as the integer 2S so half-integer spins
// need no floating-point bookkeeping.
struct ClockParams {
    int spin2 = 1;          // 2S, must be >= 1
    double lambda = 0.0;    // dimensionless drive parameter, alpha = lambda * S
    double gamma0 = 1e-3;   // spontaneous emission rate
    double beta = 2.0;      // inverse temperature; ignored when zero_temperature
    bool zero_temperature = false;

    double spin() const { return 0.5 * spin2; }
    int dim() const { return spin2 + 1; }
    void validate() const;
};

// Thermal occupation and the two jump rates.
// gamma_minus / gamma_plus = exp(beta * omega_C) when gamma_plus > 0.
struct ThermalRates {
    double nbar;
    double gamma_plus;
    double gamma_minus;
};

ThermalRates thermal_rates(const ClockParams& params);

// Exact collective-spin algebra on the Dicke manifold |S,m>, m = -S..S,
// indexed as i = m + S (index 0 is all spins down).
// Immutable after construction; shareable across trajectory workers.
class CollectiveOps {
public:
    explicit CollectiveOps(const ClockParams& params);

    const ClockParams& params() const { return params_; }
    int dim() const { return d_; }
    double alpha() const { return alpha_; }
    const ThermalRates& rates() const { return rates_; }

    const CMat& s_plus() const { return sp_; }
    const CMat& s_minus() const { return sm_; }
    const CMat& s_z() const { return sz_; }
    const CMat& l_plus() const { return lp_; }
    const CMat& l_minus() const { return lm_; }

    // L- |psi> and L+ |psi> via the bidiagonal structure, O(d).
    CVec apply_l_minus(const CVec& psi) const;
    CVec apply_l_plus(const CVec& psi) const;

    // <psi| L+ L- |psi> / <psi|psi> and <psi| L- L+ |psi> / <psi|psi>.
    double expect_lp_lm(const CVec& psi) const;
    double expect_lm_lp(const CVec& psi) const;

    // Clock Hamiltonian is diagonal: H_C = omega_C * (S_z + S), entry i = i.
    double energy(const CVec& psi) const;

    // Ladder coefficient sqrt(S(S+1) - m(m+1)) for S+ acting on index i.
    double raise_coeff(int i) const { return ladder_[i]; }

private:
    ClockParams params_;
    int d_;
    double alpha_;
    ThermalRates rates_;
    std::vector<double> ladder_;  // ladder_[i] couples i <-> i+1, size d-1
    CMat sp_, sm_, sz_, lp_, lm_;
};

CollectiveOps build_operators(const ClockParams& params);

}  // namespace tcclock
