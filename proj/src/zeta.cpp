#include "fhl/zeta.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fhl/error.hpp"

namespace fhl::zeta {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxLatticeDegree = 512;

}  // namespace

int RatioProfile::total_maps() const {
    return std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
}

RatioProfile make_profile(std::vector<geometry::RatioCount> ratios) {
    auto d = geometry::dedupe_ratios(std::move(ratios));
    RatioProfile p;
    for (const auto& rc : d) {
        p.ratios.push_back(rc.ratio);
        p.multiplicities.push_back(rc.multiplicity);
    }
    return p;
}

RatioProfile profile_of(const geometry::SelfSimilarSystem& system) {
    return make_profile(system.distinct_ratios());
}

RatioProfile gkf_profile(int n, double r) { return profile_of(geometry::gkf_system(n, r)); }

cplx dirichlet_poly(const RatioProfile& p, cplx s) {
    cplx sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        sum += static_cast<double>(p.multiplicities[k]) * std::exp(s * std::log(p.ratios[k]));
    }
    return 1.0 - sum;
}

cplx dirichlet_poly_derivative(const RatioProfile& p, cplx s) {
    cplx sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double lr = std::log(p.ratios[k]);
        sum += static_cast<double>(p.multiplicities[k]) * std::exp(s * lr) * (-lr);
    }
    return sum;
}

cplx scaling_zeta(const RatioProfile& p, cplx s) {
    const cplx P = dirichlet_poly(p, s);
    if (std::abs(P) < 1e-14) {
        std::ostringstream os;
        os << "scaling_zeta: s=" << s << " is at a pole (|P|=" << std::abs(P) << ")";
        throw AtPoleError(os.str());
    }
    return 1.0 / P;
}

namespace {

// Bisection of an increasing function g on a bracket grown geometrically
// around 0 until g changes sign; runs to floating-point resolution.
double bisect_increasing(const std::function<double(double)>& g) {
    double lo = -1.0, hi = 1.0;
    while (g(lo) > 0.0) {
        hi = lo;
        lo *= 2.0;
        if (lo < -1e6) throw NumericError("bisection bracket diverged");
    }
    while (g(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw NumericError("bisection bracket diverged");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = g(mid);
        if (v == 0.0) return mid;
        (v < 0.0 ? lo : hi) = mid;
    }
    return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
}

}  // namespace

double moran_dimension(const RatioProfile& p) {
    if (p.size() == 0) throw DomainError("moran_dimension: empty profile");
    auto sum = [&](double D) {
        double s = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) s += p.multiplicities[k] * std::pow(p.ratios[k], D);
        return s;
    };
    if (sum(0.0) == 1.0) return 0.0;
    // D -> 1 - sum is increasing; bracket on [0, B] with B doubled.
    double lo = 0.0, hi = 1.0;
    while (sum(hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = sum(mid);
        if (v == 1.0) return mid;
        (v > 1.0 ? lo : hi) = mid;
    }
    return std::abs(sum(lo) - 1.0) <= std::abs(sum(hi) - 1.0) ? lo : hi;
}

double lower_dim_bound(const RatioProfile& p) {
    if (p.size() == 0) throw DomainError("lower_dim_bound: empty profile");
    const std::size_t M = p.size() - 1;
    const double rM = p.ratios[M];
    const double mM = p.multiplicities[M];
    auto g = [&](double t) {
        double v = std::pow(1.0 / rM, t) / mM;
        for (std::size_t k = 0; k < M; ++k) v += (p.multiplicities[k] / mM) * std::pow(p.ratios[k] / rM, t);
        return v - 1.0;
    };
    return bisect_increasing(g);
}

const char* to_string(LatticeKind k) {
    switch (k) {
        case LatticeKind::Lattice: return "lattice";
        case LatticeKind::Nonlattice: return "nonlattice";
        default: return "undecided";
    }
}

const char* to_string(PoleMethod m) {
    return m == PoleMethod::LatticePolynomial ? "lattice-polynomial" : "argument-principle";
}

const char* to_string(Criterion c) {
    switch (c) {
        case Criterion::LowerDim: return "lower-dim";
        case Criterion::Lattice: return "lattice";
        default: return "none";
    }
}

LatticeClassification classify_lattice(const RatioProfile& p, long max_denominator, double tol) {
    if (p.size() == 0) throw DomainError("classify_lattice: empty profile");
    LatticeClassification out;
    out.max_denominator_checked = max_denominator;
    if (p.size() == 1) {
        out.kind = LatticeKind::Lattice;
        out.lambda0 = p.ratios[0];
        out.exponents = {1};
        return out;
    }
    const double l1 = std::log(p.ratios[0]);
    // Smallest continued-fraction denominator q <= max_denominator that makes
    // q*log r_k an integer multiple of log r_1 within tol.
    long Q = 1;
    for (std::size_t k = 1; k < p.size(); ++k) {
        const double x = std::log(p.ratios[k]) / l1;
        long h0 = 1, h1 = static_cast<long>(std::floor(x));
        long k0 = 0, k1 = 1;
        double frac = x - std::floor(x);
        long found = 0;
        for (int it = 0; it < 64; ++it) {
            if (std::abs(k1 * std::log(p.ratios[k]) - h1 * l1) < tol) {
                found = k1;
                break;
            }
            if (frac < 1e-300) break;
            const double inv = 1.0 / frac;
            const long a = static_cast<long>(std::floor(inv));
            frac = inv - a;
            const long h2 = a * h1 + h0, k2 = a * k1 + k0;
            if (k2 > max_denominator) break;
            h0 = h1;
            h1 = h2;
            k0 = k1;
            k1 = k2;
        }
        if (found == 0) {
            out.kind = LatticeKind::Nonlattice;
            out.residual = std::abs(k1 * std::log(p.ratios[k]) - h1 * l1);
            return out;
        }
        Q = std::lcm(Q, found);
        if (Q > max_denominator) {
            out.kind = LatticeKind::Undecided;
            return out;
        }
    }
    std::vector<long> e(p.size());
    e[0] = Q;
    double res = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k) {
        const double x = std::log(p.ratios[k]) / l1;
        e[k] = std::lround(Q * x);
        res = std::max(res, std::abs(Q * std::log(p.ratios[k]) - e[k] * l1));
    }
    if (res >= tol) {
        out.kind = LatticeKind::Undecided;
        out.residual = res;
        return out;
    }
    long g = 0;
    for (long v : e) g = std::gcd(g, v);
    out.kind = LatticeKind::Lattice;
    out.lambda0 = std::pow(p.ratios[0], static_cast<double>(g) / Q);
    for (long v : e) out.exponents.push_back(static_cast<int>(v / g));
    out.residual = res;
    return out;
}

Window default_window(const RatioProfile& p, double T) {
    return Window{lower_dim_bound(p) - 1.0, moran_dimension(p) + 1.0, T};
}

int ComplexDimensionSet::count_with_multiplicity() const {
    int c = 0;
    for (const auto& pl : poles) c += pl.multiplicity;
    return c;
}

namespace {

void check_window(const Window& w) {
    if (!(w.sigma_max > w.sigma_min) || !(w.T > 0.0) || !(w.T < 1e5)) {
        throw DomainError("complex_dimensions: invalid window");
    }
}

// Newton on P (multiplicity-aware). Returns false if not converged.
bool newton_polish(const RatioProfile& p, cplx& s, int mult = 1) {
    for (int it = 0; it < 50; ++it) {
        const cplx P = dirichlet_poly(p, s);
        if (std::abs(P) < 1e-13) return true;
        const cplx dP = dirichlet_poly_derivative(p, s);
        if (std::abs(dP) == 0.0) return false;
        s -= static_cast<double>(mult) * P / dP;
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return false;
    }
    return std::abs(dirichlet_poly(p, s)) < 1e-12;
}

void finish(const RatioProfile& p, ComplexDimensionSet& set) {
    // Enforce exact conjugate closure: keep the upper half, mirror it.
    std::vector<Pole> upper;
    for (auto pl : set.poles) {
        if (std::abs(pl.omega.imag()) < 1e-9) {
            pl.omega = {pl.omega.real(), 0.0};
            upper.push_back(pl);
        } else if (pl.omega.imag() > 0.0) {
            upper.push_back(pl);
        }
    }
    std::vector<Pole> all;
    for (auto pl : upper) {
        if (pl.multiplicity == 1) {
            pl.residue = 1.0 / dirichlet_poly_derivative(p, pl.omega);
            if (pl.omega.imag() == 0.0) pl.residue = cplx(pl.residue->real(), 0.0);
        }
        all.push_back(pl);
        if (pl.omega.imag() != 0.0) {
            Pole c = pl;
            c.omega = std::conj(pl.omega);
            if (pl.residue) c.residue = std::conj(*pl.residue);
            all.push_back(c);
        }
    }
    std::sort(all.begin(), all.end(), [](const Pole& a, const Pole& b) {
        if (a.omega.real() != b.omega.real()) return a.omega.real() < b.omega.real();
        return a.omega.imag() < b.omega.imag();
    });
    // Drop duplicates from overlapping boxes.
    std::vector<Pole> uniq;
    for (const auto& pl : all) {
        bool dup = false;
        for (const auto& u : uniq) {
            if (std::abs(u.omega - pl.omega) < 1e-8) {
                dup = true;
                break;
            }
        }
        if (!dup) uniq.push_back(pl);
    }
    set.poles = std::move(uniq);
}

struct PolyRoot {
    cplx z;
    int mult;
};

std::vector<PolyRoot> lattice_roots(const RatioProfile& p, const LatticeClassification& cls) {
    int deg = 0;
    for (int e : cls.exponents) deg = std::max(deg, e);
    std::vector<double> c(deg + 1, 0.0);
    c[0] = 1.0;
    for (std::size_t k = 0; k < p.size(); ++k) c[cls.exponents[k]] -= p.multiplicities[k];
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) C(i, deg - 1) = -c[i] / c[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    if (es.info() != Eigen::Success) throw NumericError("lattice polynomial eigensolver failed");
    auto poly = [&](cplx z, cplx& d) {
        cplx v = 0.0;
        d = 0.0;
        for (int j = deg; j >= 0; --j) {
            d = d * z + v;
            v = v * z + c[j];
        }
        return v;
    };
    std::vector<cplx> raw;
    for (int i = 0; i < deg; ++i) raw.push_back(es.eigenvalues()[i]);
    std::vector<PolyRoot> roots;
    std::vector<bool> used(raw.size(), false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (used[i]) continue;
        int m = 1;
        cplx sum = raw[i];
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            if (!used[j] && std::abs(raw[j] - raw[i]) < 1e-4 * std::max(1.0, std::abs(raw[i]))) {
                used[j] = true;
                sum += raw[j];
                ++m;
            }
        }
        cplx z = sum / static_cast<double>(m);
        for (int it = 0; it < 30; ++it) {
            cplx d;
            const cplx v = poly(z, d);
            if (std::abs(d) == 0.0) break;
            const cplx step = static_cast<double>(m) * v / d;
            z -= step;
            if (std::abs(step) < 1e-16 * std::abs(z)) break;
        }
        roots.push_back({z, m});
    }
    return roots;
}

}  // namespace

std::vector<double> lattice_pole_real_parts(const RatioProfile& p,
                                            const LatticeClassification& cls) {
    if (cls.kind != LatticeKind::Lattice) throw DomainError("lattice_pole_real_parts: not lattice");
    const double ll = std::log(cls.lambda0);
    std::vector<double> re;
    for (const auto& r : lattice_roots(p, cls)) re.push_back(std::log(std::abs(r.z)) / ll);
    std::sort(re.begin(), re.end());
    std::vector<double> out;
    for (double v : re) {
        if (out.empty() || std::abs(v - out.back()) > 1e-10) out.push_back(v);
    }
    return out;
}

ComplexDimensionSet complex_dimensions_lattice(const RatioProfile& p, const Window& w,
                                               const LatticeClassification& cls) {
    check_window(w);
    if (cls.kind != LatticeKind::Lattice) throw DomainError("complex_dimensions_lattice: not lattice");
    ComplexDimensionSet set;
    set.window = w;
    set.method = PoleMethod::LatticePolynomial;
    const double ll = std::log(cls.lambda0);  // negative
    const double period = kTwoPi / std::abs(ll);
    for (const auto& r : lattice_roots(p, cls)) {
        const cplx base = std::log(r.z) / ll;
        if (base.real() < w.sigma_min || base.real() > w.sigma_max) continue;
        const long m0 = static_cast<long>(std::floor((-w.T - base.imag()) / period)) - 1;
        const long m1 = static_cast<long>(std::ceil((w.T - base.imag()) / period)) + 1;
        for (long m = m0; m <= m1; ++m) {
            cplx s = base + cplx(0.0, period * m);
            if (std::abs(s.imag()) > w.T + 1e-12) continue;
            newton_polish(p, s, r.mult);
            set.poles.push_back({s, r.mult, std::nullopt});
        }
    }
    finish(p, set);
    return set;
}

namespace {

struct Box {
    double x0, x1, y0, y1;
};

// Winding number of P around the box boundary. Returns nullopt when the
// contour comes too close to a zero to be trusted.
std::optional<int> winding(const RatioProfile& p, const Box& b) {
    const cplx corners[5] = {{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}, {b.x0, b.y0}};
    double total = 0.0;
    for (int side = 0; side < 4; ++side) {
        const cplx a = corners[side], e = corners[side + 1];
        int n = 64;
        for (;;) {
            double sum = 0.0, maxjump = 0.0;
            cplx prev = dirichlet_poly(p, a);
            bool near = std::abs(prev) < 1e-9;
            for (int k = 1; k <= n && !near; ++k) {
                const cplx cur = dirichlet_poly(p, a + (e - a) * (static_cast<double>(k) / n));
                if (std::abs(cur) < 1e-9) near = true;
                const double d = std::arg(cur / prev);
                sum += d;
                maxjump = std::max(maxjump, std::abs(d));
                prev = cur;
            }
            if (near) return std::nullopt;
            if (maxjump < std::numbers::pi / 2.0) {
                total += sum;
                break;
            }
            n *= 2;
            if (n > (1 << 20)) return std::nullopt;
        }
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

class ArgumentSearch {
public:
    ArgumentSearch(const RatioProfile& p, ComplexDimensionSet& set) : p_(p), set_(set) {}

    void run(const Box& b, int count, int depth) {
        if (count <= 0) return;
        const double wx = b.x1 - b.x0, wy = b.y1 - b.y0;
        if (count == 1) {
            cplx s(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1));
            const double margin = 1e-9;
            if (newton_polish(p_, s) && s.real() >= b.x0 - margin && s.real() <= b.x1 + margin &&
                s.imag() >= b.y0 - margin && s.imag() <= b.y1 + margin) {
                set_.poles.push_back({s, 1, std::nullopt});
                return;
            }
        } else if (std::max(wx, wy) < 1e-7) {
            cplx s(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1));
            if (newton_polish(p_, s, count)) {
                set_.poles.push_back({s, count, std::nullopt});
            } else {
                set_.undecided.push_back({b.x0, b.x1, b.y0, b.y1, count});
            }
            return;
        }
        if (depth > 80) {
            set_.undecided.push_back({b.x0, b.x1, b.y0, b.y1, count});
            return;
        }
        // Split the longer side; nudge the cut if it grazes a zero.
        static constexpr double fracs[] = {0.5, 0.4871, 0.5133, 0.4617, 0.5389, 0.4211};
        for (double f : fracs) {
            Box l = b, r = b;
            if (wx >= wy) {
                l.x1 = r.x0 = b.x0 + f * wx;
            } else {
                l.y1 = r.y0 = b.y0 + f * wy;
            }
            auto cl = winding(p_, l), cr = winding(p_, r);
            if (!cl || !cr || *cl + *cr != count || *cl < 0 || *cr < 0) continue;
            run(l, *cl, depth + 1);
            run(r, *cr, depth + 1);
            return;
        }
        set_.undecided.push_back({b.x0, b.x1, b.y0, b.y1, count});
    }

private:
    const RatioProfile& p_;
    ComplexDimensionSet& set_;
};

std::pair<Box, int> outer_box(const RatioProfile& p, const Window& w) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double d = 1e-6 * attempt * (attempt % 2 ? 1.0 : -1.0);
        Box b{w.sigma_min + d, w.sigma_max - d, -w.T - d, w.T + d};
        if (auto c = winding(p, b)) return {b, *c};
    }
    throw NumericError("argument principle: window contour keeps passing through a zero");
}

}  // namespace

int argument_principle_count(const RatioProfile& p, const Window& w) {
    check_window(w);
    return outer_box(p, w).second;
}

ComplexDimensionSet complex_dimensions_argument(const RatioProfile& p, const Window& w) {
    check_window(w);
    ComplexDimensionSet set;
    set.window = w;
    set.method = PoleMethod::ArgumentPrinciple;
    auto [box, count] = outer_box(p, w);
    ArgumentSearch(p, set).run(box, count, 0);
    finish(p, set);
    return set;
}

ComplexDimensionSet complex_dimensions(const RatioProfile& p, const Window& w,
                                       const LatticeClassification& cls) {
    if (cls.kind == LatticeKind::Lattice) {
        int deg = 0;
        for (int e : cls.exponents) deg = std::max(deg, e);
        if (deg <= kMaxLatticeDegree) return complex_dimensions_lattice(p, w, cls);
    }
    return complex_dimensions_argument(p, w);
}

cplx residue_check(const RatioProfile& p, cplx omega, double rho, int nodes,
                   const std::vector<cplx>& others) {
    for (;;) {
        bool clash = false;
        for (const auto& o : others) {
            const double d = std::abs(o - omega);
            if (d > 1e-12 && d < 2.0 * rho) clash = true;
        }
        if (!clash) break;
        rho *= 0.5;
        if (rho < 1e-12) throw NumericError("residue_check: poles too close together");
    }
    cplx sum = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const cplx e = std::polar(1.0, kTwoPi * j / nodes);
        sum += scaling_zeta(p, omega + rho * e) * rho * e;
    }
    return sum / static_cast<double>(nodes);
}

ScreenBound screen_bound(const RatioProfile& p, double sigma, double T, int n_samples) {
    if (n_samples < 2 || !(T > 0.0)) throw DomainError("screen_bound: bad sampling");
    const auto cls = classify_lattice(p);
    if (cls.kind == LatticeKind::Lattice) {
        for (double re : lattice_pole_real_parts(p, cls)) {
            if (std::abs(re - sigma) < 1e-6) {
                std::ostringstream os;
                os << "screen_bound: sigma=" << sigma << " lies on the pole line Re=" << re;
                throw DomainError(os.str());
            }
        }
    }
    ScreenBound b{0.0, std::numeric_limits<double>::infinity()};
    for (int k = 0; k < n_samples; ++k) {
        const double tau = -T + 2.0 * T * k / (n_samples - 1);
        const double a = std::abs(dirichlet_poly(p, cplx(sigma, tau)));
        b.min_abs_p = std::min(b.min_abs_p, a);
        b.sup_zeta = std::max(b.sup_zeta, a > 0.0 ? 1.0 / a : std::numeric_limits<double>::infinity());
    }
    return b;
}

AdmissibilityReport admissibility_report(const RatioProfile& p, double sigma0) {
    AdmissibilityReport rep;
    rep.sigma0 = sigma0;
    rep.lower_dim_bound = lower_dim_bound(p);
    const auto cls = classify_lattice(p);
    rep.lattice = cls.kind;
    std::ostringstream notes;
    notes << "D_l=" << rep.lower_dim_bound << " (bound, not the lower similarity dimension)";
    // The inequality is strict; equality up to rounding does not qualify.
    const bool lower_ok = sigma0 < rep.lower_dim_bound - 1e-12;
    if (cls.kind == LatticeKind::Lattice) {
        rep.criterion = Criterion::Lattice;
        double gap = 1.0;
        for (double re : lattice_pole_real_parts(p, cls)) {
            if (re > sigma0 + 1e-12) gap = std::min(gap, re - sigma0);
        }
        rep.screen = sigma0 + 0.5 * gap;
        if (lower_ok) notes << "; the lower-dimension criterion also holds";
    } else if (lower_ok) {
        rep.criterion = Criterion::LowerDim;
        rep.screen = sigma0 + 0.5 * (rep.lower_dim_bound - sigma0);
    } else {
        rep.criterion = Criterion::None;
        notes << "; sigma0 >= D_l and the ratios are " << to_string(cls.kind)
              << " (up to denominator " << cls.max_denominator_checked << ")";
    }
    rep.notes = notes.str();
    return rep;
}

}  // namespace fhl::zeta
