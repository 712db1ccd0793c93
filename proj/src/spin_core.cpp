#include "tcclock/spin_core.hpp"

#include <cmath>
#include <stdexcept>

namespace tcclock {

void ClockParams::validate() const {
    if (spin2 < 1) throw std::invalid_argument("spin2 must be >= 1");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    if (gamma0 <= 0.0) throw std::invalid_argument("gamma0 must be > 0");
    if (!zero_temperature && !(beta > 0.0 && std::isfinite(beta)))
        throw std::invalid_argument("beta must be positive and finite (or use the zero-temperature flag)");
}

ThermalRates thermal_rates(const ClockParams& params) {
    params.validate();
    ThermalRates r;
    if (params.zero_temperature) {
        r.nbar = 0.0;
        r.gamma_plus = 0.0;
        r.gamma_minus = params.gamma0;
        return r;
    }
    r.nbar = 1.0 / std::expm1(params.beta);  // omega_C = 1
    r.gamma_plus = params.gamma0 * r.nbar;
    r.gamma_minus = params.gamma0 * (r.nbar + 1.0);
    return r;
}

CollectiveOps::CollectiveOps(const ClockParams& params)
    : params_(params), d_(params.dim()), alpha_(params.lambda * params.spin()),
      rates_(thermal_rates(params)) {
    const double s = params_.spin();
    ladder_.resize(d_ - 1);
    for (int i = 0; i + 1 < d_; ++i) {
        const double m = -s + i;  // S+ maps m -> m+1
        ladder_[i] = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }

    sp_ = CMat::Zero(d_, d_);
    sm_ = CMat::Zero(d_, d_);
    sz_ = CMat::Zero(d_, d_);
    for (int i = 0; i < d_; ++i) sz_(i, i) = -s + i;
    for (int i = 0; i + 1 < d_; ++i) {
        sp_(i + 1, i) = ladder_[i];
        sm_(i, i + 1) = ladder_[i];
    }

    const cplx ia(0.0, alpha_);
    lm_ = sm_ + ia * CMat::Identity(d_, d_);
    lp_ = sp_ - ia * CMat::Identity(d_, d_);
}

CVec CollectiveOps::apply_l_minus(const CVec& psi) const {
    const cplx ia(0.0, alpha_);
    CVec out = ia * psi;
    for (int i = 0; i + 1 < d_; ++i) out[i] += ladder_[i] * psi[i + 1];
    return out;
}

CVec CollectiveOps::apply_l_plus(const CVec& psi) const {
    const cplx ia(0.0, alpha_);
    CVec out = -ia * psi;
    for (int i = 0; i + 1 < d_; ++i) out[i + 1] += ladder_[i] * psi[i];
    return out;
}

double CollectiveOps::expect_lp_lm(const CVec& psi) const {
    const CVec v = apply_l_minus(psi);
    return v.squaredNorm() / psi.squaredNorm();
}

double CollectiveOps::expect_lm_lp(const CVec& psi) const {
    const CVec v = apply_l_plus(psi);
    return v.squaredNorm() / psi.squaredNorm();
}

double CollectiveOps::energy(const CVec& psi) const {
    double num = 0.0;
    for (int i = 0; i < d_; ++i) num += i * std::norm(psi[i]);
    return num / psi.squaredNorm();
}

CollectiveOps build_operators(const ClockParams& params) {
    params.validate();
    return CollectiveOps(params);
}

}  // namespace tcclock
