#include "fhl/series.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

#include "fhl/error.hpp"

namespace fhl {

void TimeSeries::validate() const {
    if (t.size() != v.size()) throw DomainError("time series: length mismatch");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(t[k] > 0.0) || !std::isfinite(t[k])) throw DomainError("time series: t must be positive");
        if (k > 0 && !(t[k] > t[k - 1])) throw DomainError("time series: t must be increasing");
    }
}

namespace {

struct Window {
    std::vector<double> x, y;
    bool sign_changes = false;
};

Window window(const TimeSeries& s, double t_lo, double t_hi) {
    s.validate();
    Window w;
    int sign = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s.t[k] < t_lo * (1 - 1e-12) || s.t[k] > t_hi * (1 + 1e-12)) continue;
        const double v = s.v[k];
        if (v == 0.0 || !std::isfinite(v)) {
            w.sign_changes = true;
            continue;
        }
        const int sg = v > 0 ? 1 : -1;
        if (sign != 0 && sg != sign) w.sign_changes = true;
        sign = sg;
        w.x.push_back(std::log(s.t[k]));
        w.y.push_back(std::log(std::abs(v)));
    }
    if (w.x.size() < 3) throw DomainError("fit window holds fewer than 3 usable samples");
    return w;
}

double total_ss(const std::vector<double>& y) {
    double m = 0;
    for (double v : y) m += v;
    m /= y.size();
    double ss = 0;
    for (double v : y) ss += (v - m) * (v - m);
    return ss;
}

}  // namespace

PowerFit fit_loglog(const TimeSeries& s, double t_lo, double t_hi) {
    auto w = window(s, t_lo, t_hi);
    const std::size_t n = w.x.size();
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (std::size_t k = 0; k < n; ++k) {
        A(k, 0) = 1.0;
        A(k, 1) = w.x[k];
        b(k) = w.y[k];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    PowerFit f;
    f.intercept = c(0);
    f.slope = c(1);
    f.n = n;
    f.sign_changes = w.sign_changes;
    f.t_lo = t_lo;
    f.t_hi = t_hi;
    double rss = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = b(k) - A.row(k).dot(c);
        rss += r * r;
        f.max_abs_residual = std::max(f.max_abs_residual, std::abs(r));
    }
    const double tss = total_ss(w.y);
    f.r2 = tss > 0 ? 1.0 - rss / tss : 1.0;
    return f;
}

PowerFit cleanest_decade(const TimeSeries& s, double lo_min, double lo_max) {
    s.validate();
    std::optional<PowerFit> best;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double lo = s.t[k];
        if (lo < lo_min * (1 - 1e-12) || lo > lo_max * (1 + 1e-12)) continue;
        if (10.0 * lo > s.t.back() * (1 + 1e-12)) break;
        PowerFit f = fit_loglog(s, lo, 10.0 * lo);
        if (f.sign_changes) continue;
        if (!best || f.r2 > best->r2) best = f;
    }
    if (!best) throw DomainError("cleanest decade: no full decade starts inside the search range");
    return *best;
}

HarmonicFit fit_log_periodic(const TimeSeries& s, double t_lo, double t_hi, double period,
                             int trend_degree) {
    if (!(period > 0)) throw DomainError("log-periodic fit: period must be positive");
    if (trend_degree < 0 || trend_degree > 6) throw DomainError("log-periodic fit: trend degree in [0, 6]");
    HarmonicFit h;
    h.trend = fit_loglog(s, t_lo, t_hi);
    h.trend_degree = trend_degree;
    auto w = window(s, t_lo, t_hi);
    const std::size_t n = w.x.size();
    const int p = trend_degree + 1;
    if (n < static_cast<std::size_t>(p + 3)) throw DomainError("log-periodic fit: window too short");
    // Centre and scale log t so the polynomial columns stay well conditioned.
    const double x0 = 0.5 * (w.x.front() + w.x.back());
    const double xs = std::max(1e-12, 0.5 * (w.x.back() - w.x.front()));
    Eigen::MatrixXd A(n, p + 2);
    Eigen::VectorXd b(n);
    const double k2 = 2.0 * std::numbers::pi / period;
    for (std::size_t k = 0; k < n; ++k) {
        const double u = (w.x[k] - x0) / xs;
        double pw = 1.0;
        for (int j = 0; j < p; ++j, pw *= u) A(k, j) = pw;
        A(k, p) = std::cos(k2 * w.x[k]);
        A(k, p + 1) = std::sin(k2 * w.x[k]);
        b(k) = w.y[k];
    }
    const Eigen::MatrixXd T = A.leftCols(p);
    Eigen::VectorXd c0 = T.colPivHouseholderQr().solve(b);
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    const double rss_c = (b - T * c0).squaredNorm();
    const double rss_h = (b - A * c).squaredNorm();
    const double tss = total_ss(w.y);
    h.rss_constant = rss_c;
    h.rss_harmonic = rss_h;
    h.r2_constant = tss > 0 ? 1.0 - rss_c / tss : 1.0;
    h.r2_harmonic = tss > 0 ? 1.0 - rss_h / tss : 1.0;
    h.amplitude = std::hypot(c(p), c(p + 1));
    h.phase = std::atan2(-c(p + 1), c(p));
    h.variance_reduction = rss_c > 0 ? 1.0 - rss_h / rss_c : 0.0;
    return h;
}

}  // namespace fhl
