#include "fhl/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include <Eigen/Dense>

#include "fhl/error.hpp"
#include "fhl/parallel.hpp"

namespace fhl::expansion {

namespace {

constexpr double kSigmaMargin = 0.05;

double min_ratio(const zeta::RatioProfile& p) {
    if (p.size() == 0) throw DomainError("heat zeta: empty profile");
    return *std::min_element(p.ratios.begin(), p.ratios.end());
}

void check_sigma(const HeatZeta& hz, cplx s) {
    if (!(s.real() > hz.sigma_R + kSigmaMargin)) {
        throw DomainError("heat zeta: Re(s) must exceed sigma_R + " + std::to_string(kSigmaMargin) +
                          "; continuation of zeta_R is not available");
    }
}

}  // namespace

double HeatZeta::coverage() const {
    const double r = min_ratio(profile);
    return delta / (r * r);
}

namespace {

// Breakpoints of f and of each rescaled copy.
std::vector<double> remainder_breaks(const zeta::RatioProfile& p, const std::vector<double>& knots) {
    std::vector<double> out;
    for (double t : knots) {
        out.push_back(t);
        for (double r : p.ratios) out.push_back(t * r * r);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Measured f continued below t_min by the scaling equation.
struct SfeExtension {
    std::shared_ptr<const mellin::SampledFunction> data;
    zeta::RatioProfile p;
    double sigma_R = 0.0;
    double R0 = 0.0;

    double t_min() const { return data->t_min(); }
    double R_data(double t) const {
        double s = (*data)(t);
        for (std::size_t k = 0; k < p.size(); ++k) s -= p.multiplicities[k] * (*data)(t / (p.ratios[k] * p.ratios[k]));
        return s;
    }
    double R(double t) const {
        return t >= t_min() ? R_data(t) : R0 * std::pow(t / t_min(), -sigma_R);
    }
    double f(double t) const {
        if (t >= t_min()) return (*data)(t);
        std::unordered_map<long long, double> memo;
        return f_rec(t, memo);
    }
    // Words with equal ratio products meet at the same key.
    double f_rec(double t, std::unordered_map<long long, double>& memo) const {
        if (t >= t_min()) return (*data)(t);
        const long long key = std::llround(std::log(t) * 1e9);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        double v = R(t);
        for (std::size_t k = 0; k < p.size(); ++k)
            v += p.multiplicities[k] * f_rec(t / (p.ratios[k] * p.ratios[k]), memo);
        memo.emplace(key, v);
        return v;
    }
};

}  // namespace

HeatZeta make_heat_zeta(const zeta::RatioProfile& p, const TimeSeries& E, double sigma0_f,
                        double sigma_R, double delta, int N) {
    E.validate();
    if (!(delta > 0.0)) throw DomainError("heat zeta: delta must be positive");
    std::vector<double> v;
    for (std::size_t k = 0; k < E.size(); ++k) v.push_back(E.v[k] * std::pow(E.t[k], -0.5 * N));
    auto sf = std::make_shared<const mellin::SampledFunction>(E.t, v, sigma0_f, "t^-N/2 E");
    HeatZeta hz;
    hz.profile = p;
    hz.delta = delta;
    hz.sigma_R = sigma_R;
    hz.N = N;
    hz.samples = sf;
    if (sf->t_max() < hz.coverage() * (1 - 1e-12)) {
        throw CoverageError("heat zeta: E must be sampled up to delta / r_min^2", hz.coverage());
    }
    if (sf->t_min() >= delta) throw CoverageError("heat zeta: samples start above delta", delta);
    auto ext = std::make_shared<SfeExtension>();
    ext->data = sf;
    ext->p = p;
    ext->sigma_R = sigma_R;
    ext->R0 = ext->R_data(sf->t_min());
    hz.f = mellin::ClosedForm{[ext](double t) { return ext->f(t); }, sigma0_f, E.t};
    hz.R = mellin::ClosedForm{[ext](double t) { return ext->R(t); }, sigma_R, remainder_breaks(p, E.t)};
    return hz;
}

HeatZeta make_heat_zeta(const zeta::RatioProfile& p, const mellin::RealFn& E, double sigma0_f,
                        double sigma_R, double delta, int N) {
    if (!(delta > 0.0)) throw DomainError("heat zeta: delta must be positive");
    HeatZeta hz;
    hz.profile = p;
    hz.delta = delta;
    hz.sigma_R = sigma_R;
    hz.N = N;
    const double half = 0.5 * N;
    hz.f = mellin::ClosedForm{[E, half](double t) { return E(t) * std::pow(t, -half); }, sigma0_f, {}};
    const auto f = hz.f.f;
    hz.R.sigma0 = sigma_R;
    hz.R.f = [p, f](double t) {
        double s = f(t);
        for (std::size_t k = 0; k < p.size(); ++k) s -= p.multiplicities[k] * f(t / (p.ratios[k] * p.ratios[k]));
        return s;
    };
    return hz;
}

const mellin::ClosedForm& heat_remainder(const HeatZeta& hz) { return hz.R; }

cplx heat_zeta_eval(const HeatZeta& hz, cplx s) {
    check_sigma(hz, s);
    const cplx P = zeta::dirichlet_poly(hz.profile, 2.0 * s);
    const cplx dP = zeta::dirichlet_poly_derivative(hz.profile, 2.0 * s);
    if (std::abs(P) < 1e-9 * std::max(1.0, std::abs(dP))) {
        throw AtPoleError("heat zeta: 2s lies within 1e-9 of a pole of zeta_Phi");
    }
    return mellin::sfe_zeta_assemble(hz.profile, 2.0, hz.f, heat_remainder(hz), hz.delta, s);
}

cplx heat_zeta_direct(const HeatZeta& hz, cplx s) {
    return mellin::truncated_mellin(hz.f, 0.0, hz.delta, s).value;
}

Residue heat_residue(const HeatZeta& hz, cplx omega, double rho, int nodes) {
    const cplx dP = zeta::dirichlet_poly_derivative(hz.profile, omega);
    if (std::abs(zeta::dirichlet_poly(hz.profile, omega)) > 1e-8)
        throw DomainError("heat residue: omega is not a pole of zeta_Phi");
    if (std::abs(dP) < 1e-10) throw DomainError("heat residue: pole is not simple; refused");
    check_sigma(hz, omega / 2.0);
    const auto& R = heat_remainder(hz);
    auto entire = [&](cplx s) {
        return mellin::xi_entire(hz.profile, 2.0, hz.f, hz.delta, s) +
               mellin::truncated_mellin(R, 0.0, hz.delta, s).value;
    };
    Residue out;
    out.omega = omega;
    out.value = entire(omega / 2.0) / (2.0 * dP);
    // (1 / 2 pi i) int zeta_hat(z / 2) dz around omega, halved.
    cplx acc = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const double th = 2.0 * std::numbers::pi * (j + 0.5) / nodes;
        const cplx e(std::cos(th), std::sin(th));
        const cplx z = omega + rho * e;
        const cplx zeta_hat = entire(z / 2.0) / zeta::dirichlet_poly(hz.profile, z);
        acc += zeta_hat * rho * e;
    }
    out.contour = 0.5 * acc / static_cast<double>(nodes);
    const double scale = std::max(std::abs(out.value), 1e-300);
    out.relative_difference = std::abs(out.contour - out.value) / scale;
    return out;
}

cplx pochhammer(cplx z, int k) {
    if (k < 0) throw DomainError("pochhammer: k must be nonnegative");
    cplx p = 1.0;
    for (int j = 0; j < k; ++j) p *= z + static_cast<double>(j);
    return p;
}

std::vector<Term> heat_terms(const HeatZeta& hz, const zeta::ComplexDimensionSet& dims, double T) {
    std::vector<const zeta::Pole*> upper;
    for (const auto& p : dims.poles) {
        if (std::abs(p.omega.imag()) > T) continue;
        if (p.multiplicity != 1) throw DomainError("heat terms: multiple pole refused");
        if (p.omega.imag() >= 0.0) upper.push_back(&p);
    }
    std::vector<Term> half(upper.size());
    parallel_tasks(upper.size(), [&](std::size_t k) {
        const auto r = heat_residue(hz, upper[k]->omega);
        half[k] = Term{r.omega, r.value, "analytic"};
    });
    std::vector<Term> out;
    for (auto& t : half) {
        if (t.omega.imag() == 0.0) {
            t.residue = cplx(t.residue.real(), 0.0);
            out.push_back(t);
        } else {
            out.push_back(t);
            out.push_back(Term{std::conj(t.omega), std::conj(t.residue), t.source});
        }
    }
    return out;
}

double explicit_formula_eval(const std::vector<Term>& terms, int k, int N, double t, double T) {
    if (k < 0) throw DomainError("explicit formula: k must be nonnegative");
    if (!(t > 0.0)) throw DomainError("explicit formula: t must be positive");
    struct Group {
        double im;
        const Term* a;
        const Term* b;
    };
    std::vector<Group> groups;
    std::vector<bool> used(terms.size(), false);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& w = terms[i].omega;
        const double tol = 1e-9 * (1.0 + std::abs(w));
        if (std::abs(w.imag()) <= tol) {
            groups.push_back({0.0, &terms[i], nullptr});
            used[i] = true;
        }
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (used[i] || terms[i].omega.imag() < 0.0) continue;
        const auto& w = terms[i].omega;
        const double tol = 1e-9 * (1.0 + std::abs(w));
        std::size_t match = terms.size();
        for (std::size_t j = 0; j < terms.size(); ++j) {
            if (!used[j] && j != i && std::abs(terms[j].omega - std::conj(w)) <= tol) {
                match = j;
                break;
            }
        }
        if (match == terms.size())
            throw DomainError("explicit formula: pole without its conjugate; truncation is not symmetric");
        used[i] = used[match] = true;
        groups.push_back({w.imag(), &terms[i], &terms[match]});
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (!used[i]) throw DomainError("explicit formula: pole without its conjugate; truncation is not symmetric");
    std::sort(groups.begin(), groups.end(), [](const Group& x, const Group& y) { return x.im < y.im; });

    const double lt = std::log(t);
    auto term = [&](const Term& tm) {
        const cplx e = 0.5 * (static_cast<double>(N) - tm.omega) + static_cast<double>(k);
        return tm.residue * std::exp(e * lt) / pochhammer(0.5 * (static_cast<double>(N) - tm.omega) + 1.0, k);
    };
    cplx sum = 0.0;
    for (const auto& g : groups) {
        if (g.im > T) break;
        cplx pair = term(*g.a);
        if (g.b) pair += term(*g.b);
        sum += pair;
    }
    if (std::abs(sum.imag()) > 1e-10 * std::abs(sum) && std::abs(sum.imag()) > 1e-300) {
        throw NumericError("explicit formula: imaginary part " + std::to_string(sum.imag()) +
                           " is not negligible; residues are not conjugate-symmetric");
    }
    return sum.real();
}

TimeSeries antiderivative(const TimeSeries& s, int k, std::optional<double> tail_exponent) {
    s.validate();
    if (k < 0) throw DomainError("antiderivative: k must be nonnegative");
    if (s.size() < 2) throw DomainError("antiderivative: need at least 2 samples");
    TimeSeries cur = s;
    double a = 0.0;
    if (tail_exponent) {
        a = *tail_exponent;
    } else if (s.v[0] > 0.0 && s.v[1] > 0.0) {
        a = std::log(s.v[1] / s.v[0]) / std::log(s.t[1] / s.t[0]);
    } else if (s.v[0] < 0.0 && s.v[1] < 0.0) {
        a = std::log(s.v[1] / s.v[0]) / std::log(s.t[1] / s.t[0]);
    }
    for (int level = 0; level < k; ++level) {
        if (!(a > -1.0)) throw DomainError("antiderivative: small-t exponent must exceed -1");
        TimeSeries next;
        next.t = cur.t;
        next.v.resize(cur.size());
        next.v[0] = cur.t[0] * cur.v[0] / (a + 1.0);
        for (std::size_t i = 1; i < cur.size(); ++i)
            next.v[i] = next.v[i - 1] + 0.5 * (cur.t[i] - cur.t[i - 1]) * (cur.v[i] + cur.v[i - 1]);
        cur = std::move(next);
        a += 1.0;
    }
    return cur;
}

ExpansionFit build_expansion(const TimeSeries& E, const std::vector<Term>& terms, int k, int N,
                             double T, double delta, std::optional<double> t_lo,
                             std::optional<double> t_hi) {
    ExpansionFit fit;
    fit.N = N;
    fit.k = k;
    fit.T = T;
    fit.delta = delta;
    for (const auto& tm : terms)
        if (std::abs(tm.omega.imag()) <= T) fit.terms.push_back(tm);
    const TimeSeries Ek = k == 0 ? E : antiderivative(E, k);
    const double lo = t_lo.value_or(E.t.front()), hi = t_hi.value_or(E.t.back());
    for (std::size_t i = 0; i < Ek.size(); ++i) {
        const double t = Ek.t[i];
        if (t < lo || t > hi) continue;
        const double rec = explicit_formula_eval(fit.terms, k, N, t, T);
        fit.reconstruction.t.push_back(t);
        fit.reconstruction.v.push_back(rec);
        fit.residual.t.push_back(t);
        fit.residual.v.push_back(Ek.v[i] - rec);
        if (Ek.v[i] != 0.0)
            fit.max_relative_residual = std::max(fit.max_relative_residual, std::abs(Ek.v[i] - rec) / std::abs(Ek.v[i]));
    }
    return fit;
}

LogPeriodicFit logperiodic_fit(const TimeSeries& E, double D, double period, int n_harmonics,
                               double t_lo, double t_hi, int N) {
    E.validate();
    if (!(period > 0.0)) throw DomainError("log-periodic fit: period must be positive");
    if (n_harmonics < 0) throw DomainError("log-periodic fit: negative harmonic count");
    if (!(t_hi > t_lo) || std::log(t_hi / t_lo) < 2.0 * period * (1 - 1e-9))
        throw DomainError("log-periodic fit: window spans fewer than two periods");
    const double beta = 0.5 * (N - D);
    std::vector<double> x, g;
    for (std::size_t i = 0; i < E.size(); ++i) {
        if (E.t[i] < t_lo * (1 - 1e-12) || E.t[i] > t_hi * (1 + 1e-12)) continue;
        x.push_back(std::log(E.t[i]));
        g.push_back(E.v[i] * std::pow(E.t[i], -beta));
    }
    const std::size_t n = x.size();
    const int cols = 1 + 2 * n_harmonics;
    if (n < static_cast<std::size_t>(cols) + 2) throw DomainError("log-periodic fit: too few samples");
    Eigen::MatrixXd A(n, cols);
    Eigen::VectorXd b(n);
    const double w = 2.0 * std::numbers::pi / period;
    for (std::size_t i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        for (int j = 1; j <= n_harmonics; ++j) {
            A(i, 2 * j - 1) = std::cos(w * j * x[i]);
            A(i, 2 * j) = std::sin(w * j * x[i]);
        }
        b(i) = g[i];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    LogPeriodicFit out;
    out.D = D;
    out.period = period;
    out.c0 = c(0);
    double mean = b.mean();
    out.rss_constant = (b.array() - mean).square().sum();
    out.rss = (b - A * c).squaredNorm();
    out.r2 = out.rss_constant > 0 ? 1.0 - out.rss / out.rss_constant : 1.0;
    out.implied_terms.push_back(Term{cplx(D, 0.0), cplx(out.c0, 0.0), "fitted"});
    for (int j = 1; j <= n_harmonics; ++j) {
        // a cos + b sin = c cos(theta + phi) with c = hypot(a, b), phi = atan2(-b, a).
        const double a = c(2 * j - 1), bb = c(2 * j);
        const double amp = std::hypot(a, bb), ph = std::atan2(-bb, a);
        out.amplitude.push_back(amp);
        out.phase.push_back(ph);
        const double gamma = 2.0 * w * j;
        const cplx r = 0.5 * amp * std::exp(cplx(0.0, -ph));
        out.implied_terms.push_back(Term{cplx(D, gamma), r, "fitted"});
        out.implied_terms.push_back(Term{cplx(D, -gamma), std::conj(r), "fitted"});
    }
    const Eigen::VectorXd res = b - A * c;
    for (std::size_t i = 0; i < n; ++i) {
        out.residual.t.push_back(std::exp(x[i]));
        out.residual.v.push_back(res(static_cast<Eigen::Index>(i)) * std::exp(beta * x[i]));
    }
    return out;
}

std::vector<Term> fit_residues(const TimeSeries& E, const std::vector<cplx>& omegas, int N,
                               double t_lo, double t_hi) {
    E.validate();
    std::vector<cplx> upper;
    for (auto w : omegas)
        if (w.imag() >= 0.0) upper.push_back(w);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < E.size(); ++i)
        if (E.t[i] >= t_lo * (1 - 1e-12) && E.t[i] <= t_hi * (1 + 1e-12)) rows.push_back(i);
    std::size_t cols = 0;
    for (auto w : upper) cols += w.imag() > 0.0 ? 2 : 1;
    if (rows.size() < cols + 2) throw DomainError("residue fit: too few samples in the window");
    Eigen::MatrixXd A(rows.size(), cols);
    Eigen::VectorXd b(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double t = E.t[rows[r]], lt = std::log(t);
        const double scale = 1.0 / std::abs(E.v[rows[r]]);  // relative residuals
        b(r) = E.v[rows[r]] * scale;
        std::size_t c = 0;
        for (auto w : upper) {
            const double g = std::pow(t, 0.5 * (N - w.real())) * scale;
            if (w.imag() > 0.0) {
                const double th = 0.5 * w.imag() * lt;
                A(r, c++) = 2.0 * g * std::cos(th);
                A(r, c++) = 2.0 * g * std::sin(th);
            } else {
                A(r, c++) = g;
            }
        }
    }
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
    std::vector<Term> out;
    std::size_t c = 0;
    for (auto w : upper) {
        if (w.imag() > 0.0) {
            const cplx r(x(c), x(c + 1));
            c += 2;
            out.push_back({w, r, "fitted"});
            out.push_back({std::conj(w), std::conj(r), "fitted"});
        } else {
            out.push_back({w, cplx(x(c++), 0.0), "fitted"});
        }
    }
    return out;
}

}  // namespace fhl::expansion
