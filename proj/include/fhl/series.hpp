#pragma once

#include <cstddef>
#include <vector>

namespace fhl {

/// Sampled scalar function of t; t strictly increasing.
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> v;

    std::size_t size() const { return t.size(); }
    /// Throws DomainError on length mismatch or non-increasing t.
    void validate() const;
};

/// Least-squares line log|v| = intercept + slope * log t.
struct PowerFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double max_abs_residual = 0.0;  // in log|v|
    std::size_t n = 0;
    bool sign_changes = false;      // v changed sign inside the window
    double t_lo = 0.0, t_hi = 0.0;
};

/// Fit over samples with t in [t_lo, t_hi]; needs at least 3 samples.
PowerFit fit_loglog(const TimeSeries& s, double t_lo, double t_hi);

/// Best-r2 one-decade window [lo, 10 lo] with lo a sample time in
/// [lo_min, lo_max]. Windows reaching past the data are skipped.
PowerFit cleanest_decade(const TimeSeries& s, double lo_min, double lo_max);

/// log|v| detrended by a polynomial in log t of degree `trend_degree`, then
/// one harmonic cos/sin(2 pi ln t / period) added.
struct HarmonicFit {
    PowerFit trend;                 // the straight-line fit, whatever the degree
    int trend_degree = 1;
    double amplitude = 0.0;         // of the harmonic, in log|v|
    double phase = 0.0;
    double rss_constant = 0.0;      // residual sum of squares, polynomial trend only
    double rss_harmonic = 0.0;      // trend plus harmonic
    double r2_constant = 0.0;
    double r2_harmonic = 0.0;
    /// 1 - rss_harmonic / rss_constant.
    double variance_reduction = 0.0;
};

HarmonicFit fit_log_periodic(const TimeSeries& s, double t_lo, double t_hi, double period,
                             int trend_degree = 1);

}  // namespace fhl
