#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <cmath>

// Boost 1.74's pchip calls isnan unqualified and finds nothing for double.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

#include "fhl/zeta.hpp"

namespace fhl::mellin {

using cplx = std::complex<double>;
using RealFn = std::function<double(double)>;

/// Samples of f on a log-spaced grid, interpolated by PCHIP in log t and
/// extended below the first sample by c t^{-sigma0}, with c fitted over the
/// first decade.
class SampledFunction {
public:
    SampledFunction(std::vector<double> t, std::vector<double> values, double sigma0,
                    std::string description = {});

    const std::vector<double>& t() const { return t_; }
    const std::vector<double>& values() const { return v_; }
    double sigma0() const { return sigma0_; }
    double t_min() const { return t_.front(); }
    double t_max() const { return t_.back(); }
    double tail_coefficient() const { return tail_c_; }
    const std::string& description() const { return description_; }

    /// Interpolated value; the tail model below t_min; CoverageError above t_max.
    double operator()(double t) const;

    /// Same samples on the grid t * factor (i.e. the function t -> f(t / factor)).
    SampledFunction rescaled(double factor) const;

private:
    std::vector<double> t_, v_;
    double sigma0_;
    double tail_c_ = 0.0;
    std::string description_;
    boost::math::interpolators::pchip<std::vector<double>> interp_;
};

/// At least this many samples per decade are required.
inline constexpr double kMinSamplesPerDecade = 64.0;

/// Log-spaced grid [t_min, t_max] with `per_decade` points per decade.
std::vector<double> log_grid(double t_min, double t_max, int per_decade);

struct MellinValue {
    cplx s;
    cplx value;
    double quadrature_error = 0.0;
};

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_level = 20;
};

/// Truncated Mellin transform of a sampled function, int_a^b t^{s-1} f(t) dt,
/// integrated in x = ln t with Gauss panels aligned to the sample knots.
MellinValue truncated_mellin(const SampledFunction& f, double a, double b, cplx s,
                             const QuadratureOptions& opt = {});

/// Closed-form f with asserted small-t growth O(t^{-sigma0}); when a = 0 the
/// integral below a cutoff is closed by c t^{-sigma0} matched at the cutoff.
/// `breakpoints` are t values where f is not smooth.
struct ClosedForm {
    RealFn f;
    double sigma0 = 0.0;
    std::vector<double> breakpoints;
};
MellinValue truncated_mellin(const ClosedForm& f, double a, double b, cplx s,
                             const QuadratureOptions& opt = {});

/// |M^delta[f(./lambda^2)](s) - lambda^{2s} M^{delta/lambda^2}[f](s)| / (1 + |rhs|).
double scaling_identity_residual(const ClosedForm& f, double lambda, double delta, cplx s);
double scaling_identity_residual(const SampledFunction& f, double lambda, double delta, cplx s);

/// xi(s; delta) = sum_k m_k r_k^{alpha s} M_delta^{delta / r_k^alpha}[f](s).
cplx xi_entire(const zeta::RatioProfile& p, double alpha, const SampledFunction& f, double delta,
               cplx s);
cplx xi_entire(const zeta::RatioProfile& p, double alpha, const ClosedForm& f, double delta, cplx s);

/// zeta_Phi(alpha s) (xi + M^delta[R](s)).
cplx sfe_zeta_assemble(const zeta::RatioProfile& p, double alpha, const SampledFunction& f,
                       const ClosedForm& R, double delta, cplx s);
cplx sfe_zeta_assemble(const zeta::RatioProfile& p, double alpha, const ClosedForm& f,
                       const ClosedForm& R, double delta, cplx s);

/// R supported in [t0, t1] with t0 > 0.
struct CompactFunction {
    RealFn f;
    double t0;
    double t1;
};

/// Exact solution of f = sum_phi f(./lambda_phi^alpha) + R by summing R over
/// all words; words sharing a ratio product are evaluated once.
double synthetic_sfe_solve(const zeta::RatioProfile& p, double alpha, const CompactFunction& R,
                           double t);

/// sup over tau in [-T, T] of |M_a^b[f](sigma + i tau)| on n samples.
double vertical_strip_sup(const SampledFunction& f, double a, double b, double sigma, double T,
                          int n);

}  // namespace fhl::mellin
