#include <algorithm>
#include <cmath>

#include "fhl/error.hpp"
#include "fhl/heat.hpp"
#include "fhl/mellin.hpp"

namespace fhl::heat {

TimeSeries decomposition_remainder(const zeta::RatioProfile& p,
                                   const std::function<double(double)>& E,
                                   const std::vector<double>& t) {
    TimeSeries R;
    for (double x : t) {
        double s = E(x);
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double l2 = p.ratios[k] * p.ratios[k];
            s -= p.multiplicities[k] * l2 * E(x / l2);
        }
        R.t.push_back(x);
        R.v.push_back(s);
    }
    R.validate();
    return R;
}

TimeSeries decomposition_remainder(const zeta::RatioProfile& p, const TimeSeries& E) {
    E.validate();
    if (E.size() < 4) throw DomainError("remainder: need at least 4 samples");
    if (p.size() == 0) throw DomainError("remainder: empty profile");
    double rmin = p.ratios[0];
    for (double r : p.ratios) rmin = std::min(rmin, r);
    const double t_hi = E.t.back() * rmin * rmin * (1 + 1e-12);
    // Positive series are interpolated in log-log, where power laws are lines.
    const bool positive = std::all_of(E.v.begin(), E.v.end(), [](double v) { return v > 0.0; });
    std::vector<double> lt, v = E.v;
    for (double x : E.t) lt.push_back(std::log(x));
    if (positive)
        for (auto& y : v) y = std::log(y);
    boost::math::interpolators::pchip<std::vector<double>> f(std::move(lt), std::move(v));
    std::vector<double> pts;
    for (double x : E.t)
        if (x <= t_hi) pts.push_back(x);
    if (pts.empty()) {
        throw CoverageError("remainder: no sample t with t / r_min^2 inside the series",
                            E.t.front() / (rmin * rmin));
    }
    const double tmax = E.t.back();
    return decomposition_remainder(
        p,
        [&](double x) {
            const double y = f(std::log(std::min(x, tmax)));
            return positive ? std::exp(y) : y;
        },
        pts);
}

TimeSeries decomposition_remainder(const zeta::RatioProfile& p, const HeatRun& run) {
    return decomposition_remainder(p, run.E);
}

RemainderFit remainder_order_fit(const TimeSeries& R, std::optional<double> t_lo,
                                 std::optional<double> t_hi) {
    R.validate();
    if (R.size() < 3 || R.t.back() < 100.0 * R.t.front() * (1 - 1e-9))
        throw DomainError("remainder fit: need at least two decades of t");
    RemainderFit out;
    out.t_lo = t_lo.value_or(R.t.front());
    out.t_hi = t_hi.value_or(out.t_lo * 100.0);
    const PowerFit f = fit_loglog(R, out.t_lo, out.t_hi);
    out.slope = f.slope;
    out.intercept = f.intercept;
    out.r2 = f.r2;
    out.sign_changes = f.sign_changes;
    out.oscillation = f.max_abs_residual > 0.01;
    return out;
}

}  // namespace fhl::heat
