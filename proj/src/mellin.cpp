#include "fhl/mellin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "fhl/error.hpp"

namespace fhl::mellin {

namespace {

using GL = boost::math::quadrature::gauss<double, 8>;

// Cap on integrand evaluations per refinement level.
constexpr std::size_t kMaxEvalsPerLevel = std::size_t{1} << 24;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::vector<double> log_grid(double t_min, double t_max, int per_decade) {
    if (!(t_min > 0.0) || !(t_max > t_min) || per_decade < 1) throw DomainError("log_grid: bad range");
    const double decades = std::log10(t_max / t_min);
    const int n = static_cast<int>(std::ceil(decades * per_decade - 1e-9));
    std::vector<double> t(n + 1);
    const double lmin = std::log(t_min), lmax = std::log(t_max);
    for (int k = 0; k <= n; ++k) t[k] = std::exp(lmin + (lmax - lmin) * k / n);
    t.front() = t_min;
    t.back() = t_max;
    return t;
}

SampledFunction::SampledFunction(std::vector<double> t, std::vector<double> values, double sigma0,
                                 std::string description)
    : t_(std::move(t)),
      v_(std::move(values)),
      sigma0_(sigma0),
      description_(std::move(description)),
      interp_([&] {
          if (t_.size() != v_.size()) throw DomainError("SampledFunction: length mismatch");
          if (t_.size() < 4) throw DomainError("SampledFunction: need at least four samples");
          std::vector<double> x(t_.size());
          for (std::size_t k = 0; k < t_.size(); ++k) {
              if (!(t_[k] > 0.0)) throw DomainError("SampledFunction: t must be positive");
              if (k > 0 && !(t_[k] > t_[k - 1])) throw DomainError("SampledFunction: t not increasing");
              if (!std::isfinite(v_[k])) throw DomainError("SampledFunction: non-finite value");
              x[k] = std::log(t_[k]);
          }
          const double decades = std::log10(t_.back() / t_.front());
          if (static_cast<double>(t_.size() - 1) < kMinSamplesPerDecade * decades - 1e-6) {
              throw DomainError("SampledFunction: fewer than 64 samples per decade (resolution)");
          }
          std::vector<double> y = v_;
          return boost::math::interpolators::pchip<std::vector<double>>(std::move(x), std::move(y));
      }()) {
    // Least-squares c for f ~ c t^{-sigma0} over the first decade.
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < t_.size() && t_[k] <= 10.0 * t_.front() * (1.0 + 1e-12); ++k) {
        const double g = std::pow(t_[k], -sigma0_);
        num += v_[k] * g;
        den += g * g;
    }
    tail_c_ = den > 0.0 ? num / den : 0.0;
}

double SampledFunction::operator()(double t) const {
    if (t < t_.front()) return tail_c_ * std::pow(t, -sigma0_);
    if (t > t_.back() * (1.0 + 1e-12)) {
        throw CoverageError("SampledFunction: t=" + fmt(t) + " above t_max=" + fmt(t_.back()), t);
    }
    return interp_(std::min(std::log(t), std::log(t_.back())));
}

SampledFunction SampledFunction::rescaled(double factor) const {
    std::vector<double> t = t_;
    for (auto& v : t) v *= factor;
    return SampledFunction(std::move(t), v_, sigma0_, description_);
}

namespace {

// int e^{s x} g(x) dx over consecutive intervals of `xb`, refining all panels
// together until two levels agree.
template <class G>
MellinValue composite(const G& g, const std::vector<double>& xb, cplx s, const QuadratureOptions& opt) {
    const auto& abscissa = GL::abscissa();
    const auto& weights = GL::weights();
    const double rate = std::abs(s.imag()) + 1.0;

    std::vector<int> base(xb.size() > 0 ? xb.size() - 1 : 0);
    std::size_t base_total = 0;
    for (std::size_t i = 0; i + 1 < xb.size(); ++i) {
        base[i] = std::max(1, static_cast<int>(std::ceil((xb[i + 1] - xb[i]) * rate)));
        base_total += base[i];
    }

    auto level_sum = [&](int level) {
        cplx total = 0.0;
        for (std::size_t i = 0; i + 1 < xb.size(); ++i) {
            const long m = static_cast<long>(base[i]) << level;
            const double w = (xb[i + 1] - xb[i]) / m;
            for (long j = 0; j < m; ++j) {
                const double c = xb[i] + (j + 0.5) * w, hw = 0.5 * w;
                cplx acc = 0.0;
                for (std::size_t q = 0; q < abscissa.size(); ++q) {
                    const double a = abscissa[q] * hw;
                    acc += weights[q] * std::exp(s * (c + a)) * g(c + a);
                    if (abscissa[q] != 0.0) acc += weights[q] * std::exp(s * (c - a)) * g(c - a);
                }
                total += acc * hw;
            }
        }
        return total;
    };

    MellinValue out{s, 0.0, 0.0};
    if (base_total == 0) return out;
    cplx prev = level_sum(0);
    for (int level = 1; level <= opt.max_level; ++level) {
        if ((base_total << level) * 8 > kMaxEvalsPerLevel) break;
        const cplx cur = level_sum(level);
        const double diff = std::abs(cur - prev);
        out.value = cur;
        out.quadrature_error = diff;
        if (diff <= std::max(opt.abs_tol, opt.rel_tol * std::abs(cur))) return out;
        prev = cur;
    }
    if (out.quadrature_error == 0.0 && out.value == cplx(0.0)) out.value = prev;
    return out;
}

// int_lo^hi c t^{s-1-sigma0} dt, lo may be 0.
cplx power_tail(double c, double sigma0, double lo, double hi, cplx s) {
    if (c == 0.0 || hi <= lo) return 0.0;
    const cplx e = s - sigma0;
    if (std::abs(e) < 1e-14) return c * (std::log(hi) - (lo > 0.0 ? std::log(lo) : 0.0));
    cplx v = std::exp(e * std::log(hi));
    if (lo > 0.0) v -= std::exp(e * std::log(lo));
    return c * v / e;
}

void check_limits(double a, double b) {
    if (!(a >= 0.0) || !(b > a)) throw DomainError("truncated_mellin: need 0 <= a < b");
}

}  // namespace

MellinValue truncated_mellin(const SampledFunction& f, double a, double b, cplx s,
                             const QuadratureOptions& opt) {
    check_limits(a, b);
    if (a == 0.0 && !(s.real() > f.sigma0())) {
        throw DomainError("truncated_mellin: divergent at 0 for Re(s)=" + fmt(s.real()) +
                          " <= sigma0=" + fmt(f.sigma0()));
    }
    if (b > f.t_max() * (1.0 + 1e-12)) {
        throw CoverageError("truncated_mellin: upper limit " + fmt(b) + " beyond t_max=" + fmt(f.t_max()), b);
    }
    MellinValue out{s, 0.0, 0.0};
    const double lo = std::max(a, f.t_min());
    if (lo < b) {
        std::vector<double> xb{std::log(lo)};
        for (double t : f.t()) {
            if (t > lo && t < b) xb.push_back(std::log(t));
        }
        xb.push_back(std::log(b));
        out = composite([&](double x) { return f(std::exp(x)); }, xb, s, opt);
    }
    if (a < f.t_min()) out.value += power_tail(f.tail_coefficient(), f.sigma0(), a, std::min(b, f.t_min()), s);
    return out;
}

MellinValue truncated_mellin(const ClosedForm& f, double a, double b, cplx s,
                             const QuadratureOptions& opt) {
    check_limits(a, b);
    double lo = a;
    cplx tail = 0.0;
    if (a == 0.0) {
        const double gap = s.real() - f.sigma0;
        if (!(gap > 0.0)) {
            throw DomainError("truncated_mellin: divergent at 0 for Re(s)=" + fmt(s.real()) +
                              " <= sigma0=" + fmt(f.sigma0));
        }
        lo = b * std::exp(-std::min(700.0, 40.0 / gap));
        const double c = f.f(lo) * std::pow(lo, f.sigma0);
        tail = power_tail(c, f.sigma0, 0.0, lo, s);
    }
    std::vector<double> xb{std::log(lo)};
    std::vector<double> bp = f.breakpoints;
    std::sort(bp.begin(), bp.end());
    for (double t : bp) {
        if (t > lo && t < b) xb.push_back(std::log(t));
    }
    xb.push_back(std::log(b));
    MellinValue out = composite([&](double x) { return f.f(std::exp(x)); }, xb, s, opt);
    out.value += tail;
    return out;
}

double scaling_identity_residual(const ClosedForm& f, double lambda, double delta, cplx s) {
    if (!(lambda > 0.0)) throw DomainError("scaling_identity_residual: lambda must be positive");
    const double l2 = lambda * lambda;
    ClosedForm g{[&](double t) { return f.f(t / l2); }, f.sigma0, {}};
    for (double t : f.breakpoints) g.breakpoints.push_back(t * l2);
    const cplx lhs = truncated_mellin(g, 0.0, delta, s).value;
    const cplx rhs = std::exp(2.0 * s * std::log(lambda)) * truncated_mellin(f, 0.0, delta / l2, s).value;
    return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

double scaling_identity_residual(const SampledFunction& f, double lambda, double delta, cplx s) {
    if (!(lambda > 0.0)) throw DomainError("scaling_identity_residual: lambda must be positive");
    const double l2 = lambda * lambda;
    const cplx lhs = truncated_mellin(f.rescaled(l2), 0.0, delta, s).value;
    const cplx rhs = std::exp(2.0 * s * std::log(lambda)) * truncated_mellin(f, 0.0, delta / l2, s).value;
    return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

namespace {

template <class F>
cplx xi_impl(const zeta::RatioProfile& p, double alpha, const F& f, double delta, cplx s) {
    if (!(alpha > 0.0) || !(delta > 0.0)) throw DomainError("xi_entire: alpha and delta must be positive");
    cplx sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double la = std::pow(p.ratios[k], alpha);
        const cplx scale = std::exp(alpha * s * std::log(p.ratios[k]));
        sum += static_cast<double>(p.multiplicities[k]) * scale * truncated_mellin(f, delta, delta / la, s).value;
    }
    return sum;
}

}  // namespace

cplx xi_entire(const zeta::RatioProfile& p, double alpha, const SampledFunction& f, double delta,
               cplx s) {
    const double need = delta / std::pow(p.ratios.back(), alpha);
    if (f.t_max() < need * (1.0 - 1e-12)) {
        throw CoverageError("xi_entire: samples end at " + fmt(f.t_max()) + ", need t_max >= " + fmt(need), need);
    }
    return xi_impl(p, alpha, f, delta, s);
}

cplx xi_entire(const zeta::RatioProfile& p, double alpha, const ClosedForm& f, double delta, cplx s) {
    return xi_impl(p, alpha, f, delta, s);
}

cplx sfe_zeta_assemble(const zeta::RatioProfile& p, double alpha, const SampledFunction& f,
                       const ClosedForm& R, double delta, cplx s) {
    const cplx z = zeta::scaling_zeta(p, alpha * s);
    return z * (xi_entire(p, alpha, f, delta, s) + truncated_mellin(R, 0.0, delta, s).value);
}

cplx sfe_zeta_assemble(const zeta::RatioProfile& p, double alpha, const ClosedForm& f,
                       const ClosedForm& R, double delta, cplx s) {
    const cplx z = zeta::scaling_zeta(p, alpha * s);
    return z * (xi_entire(p, alpha, f, delta, s) + truncated_mellin(R, 0.0, delta, s).value);
}

double synthetic_sfe_solve(const zeta::RatioProfile& p, double alpha, const CompactFunction& R,
                           double t) {
    if (!(R.t0 > 0.0) || !(R.t1 >= R.t0)) throw DomainError("synthetic_sfe_solve: need 0 < t0 <= t1");
    if (!(t > 0.0)) throw DomainError("synthetic_sfe_solve: t must be positive");
    const std::size_t M = p.size();
    std::vector<double> la(M);
    for (std::size_t k = 0; k < M; ++k) la[k] = std::log(p.ratios[k]) * alpha;
    // Words are grouped by their exponent vector (how often each distinct ratio
    // occurs); the multinomial weight is accumulated through the recursion.
    std::map<std::vector<int>, double> memo;
    std::size_t calls = 0;
    std::vector<int> e(M, 0);
    std::function<double(double)> rec = [&](double logarg) -> double {
        const double arg = std::exp(logarg);
        if (arg > R.t1) return 0.0;
        if (++calls > 10000000) throw ResourceError("synthetic_sfe_solve: more than 1e7 words");
        auto it = memo.find(e);
        if (it != memo.end()) return it->second;
        double v = arg >= R.t0 ? R.f(arg) : 0.0;
        for (std::size_t k = 0; k < M; ++k) {
            ++e[k];
            v += p.multiplicities[k] * rec(logarg - la[k]);
            --e[k];
        }
        memo.emplace(e, v);
        return v;
    };
    return rec(std::log(t));
}

double vertical_strip_sup(const SampledFunction& f, double a, double b, double sigma, double T, int n) {
    if (n < 2) throw DomainError("vertical_strip_sup: need n >= 2");
    double sup = 0.0;
    for (int k = 0; k < n; ++k) {
        const double tau = -T + 2.0 * T * k / (n - 1);
        sup = std::max(sup, std::abs(truncated_mellin(f, a, b, cplx(sigma, tau)).value));
    }
    return sup;
}

}  // namespace fhl::mellin
