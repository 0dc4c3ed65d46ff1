#pragma once

#include <complex>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fhl/mellin.hpp"
#include "fhl/series.hpp"
#include "fhl/zeta.hpp"

namespace fhl::expansion {

using cplx = std::complex<double>;

/// Heat zeta function of E: the truncated Mellin transform of f = t^{-N/2} E.
/// f satisfies f = sum_k m_k f(t / r_k^2) + R with R built from f itself, so
/// the factorized and direct forms agree up to quadrature.
struct HeatZeta {
    zeta::RatioProfile profile;
    mellin::ClosedForm f;       // t^{-N/2} E
    mellin::ClosedForm R;       // f - sum_k m_k f(. / r_k^2)
    double delta = 1.0;
    double sigma_R = 0.0;       // small-t growth exponent of R
    int N = 2;
    /// Keeps sampled data alive when f interpolates it.
    std::shared_ptr<const mellin::SampledFunction> samples;
    /// f(t / r^2) is needed up to this t.
    double coverage() const;
};

/// From a measured series; sigma0 of t^{-N/2} E is N/2 - (small-t exponent of E).
/// Below the first sample f is continued by the scaling equation itself,
/// f(t) = R(t) + sum_k m_k f(t / r_k^2), with R continued as
/// R(t_min) (t / t_min)^{-sigma_R}; a plain power tail would carry no
/// oscillation and every residue off the real axis would vanish.
HeatZeta make_heat_zeta(const zeta::RatioProfile& p, const TimeSeries& E, double sigma0_f,
                        double sigma_R, double delta = 1.0, int N = 2);
/// From a closed-form E.
HeatZeta make_heat_zeta(const zeta::RatioProfile& p, const mellin::RealFn& E, double sigma0_f,
                        double sigma_R, double delta = 1.0, int N = 2);

/// R(t) = f(t) - sum_k m_k f(t / r_k^2).
const mellin::ClosedForm& heat_remainder(const HeatZeta& hz);

/// zeta_Phi(2 s) (xi(s) + zeta_R(s)).
cplx heat_zeta_eval(const HeatZeta& hz, cplx s);
/// M^delta[f](s) by direct quadrature.
cplx heat_zeta_direct(const HeatZeta& hz, cplx s);

struct Residue {
    cplx omega;
    cplx value;             // r_omega, coefficient of t^{(N - omega)/2}
    cplx contour;           // the same from a circle around omega
    double relative_difference = 0.0;
};

/// r_omega = Res(zeta_hat(s); omega / 2) = (xi + zeta_R)(omega / 2) / (2 P'(omega)),
/// cross-checked by a 256-node contour of radius rho around omega.
Residue heat_residue(const HeatZeta& hz, cplx omega, double rho = 1e-3, int nodes = 256);

/// (z)_k = z (z + 1) ... (z + k - 1).
cplx pochhammer(cplx z, int k);

struct Term {
    cplx omega;
    cplx residue;
    std::string source = "analytic";
};

/// Residues for every simple pole of `dims` with |Im| <= T; refuses multiple poles.
std::vector<Term> heat_terms(const HeatZeta& hz, const zeta::ComplexDimensionSet& dims, double T);

/// sum over |Im omega| <= T of r t^{(N - omega)/2 + k} / ((N - omega)/2 + 1)_k,
/// conjugate pairs summed together from the real axis outwards.
double explicit_formula_eval(const std::vector<Term>& terms, int k, int N, double t,
                             double T = std::numeric_limits<double>::infinity());

/// k-fold antiderivative vanishing at 0: cumulative trapezoid plus the
/// integral of c t^a below the first sample, a estimated from the first two
/// samples unless given.
TimeSeries antiderivative(const TimeSeries& s, int k, std::optional<double> tail_exponent = {});

/// Least-squares residues for the given poles (upper half plane and real axis;
/// conjugates are implied) from E over [t_lo, t_hi], weighted by 1/|E|.
/// Labelled "fitted".
std::vector<Term> fit_residues(const TimeSeries& E, const std::vector<cplx>& omegas, int N,
                               double t_lo, double t_hi);

struct ExpansionFit {
    int N = 2;
    int k = 0;
    double T = 0.0;
    double delta = 1.0;
    std::vector<Term> terms;
    TimeSeries reconstruction;
    TimeSeries residual;  // measured minus reconstruction
    double max_relative_residual = 0.0;
};

/// Reconstruct E^{[k]} on the sample times of E and compare.
ExpansionFit build_expansion(const TimeSeries& E, const std::vector<Term>& terms, int k, int N,
                             double T, double delta, std::optional<double> t_lo = {},
                             std::optional<double> t_hi = {});

struct LogPeriodicFit {
    double D = 0.0;
    double period = 0.0;           // multiplicative period in t, as a log
    double c0 = 0.0;
    std::vector<double> amplitude; // c_j, j = 1..n
    std::vector<double> phase;     // phi_j
    double r2 = 0.0;               // of E / t^{(N-D)/2}
    double rss = 0.0;
    double rss_constant = 0.0;     // c0 only
    /// c0 at D, and D +/- i 4 pi j / period with r = c_j e^{-/+ i phi_j} / 2.
    std::vector<Term> implied_terms;
    TimeSeries residual;
};

/// E(t) ~ t^{(N-D)/2} (c0 + sum_j c_j cos(2 pi j ln t / period + phi_j)) by linear
/// least squares on E / t^{(N-D)/2} over [t_lo, t_hi].
LogPeriodicFit logperiodic_fit(const TimeSeries& E, double D, double period, int n_harmonics,
                               double t_lo, double t_hi, int N = 2);

}  // namespace fhl::expansion
