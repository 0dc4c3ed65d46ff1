#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fhl/geometry.hpp"

namespace fhl::zeta {

using cplx = std::complex<double>;

/// Distinct ratios r_1 > ... > r_M with multiplicities.
struct RatioProfile {
    std::vector<double> ratios;
    std::vector<int> multiplicities;

    std::size_t size() const { return ratios.size(); }
    int total_maps() const;
};

RatioProfile make_profile(std::vector<geometry::RatioCount> ratios);
RatioProfile profile_of(const geometry::SelfSimilarSystem& system);
/// Shorthand for profile_of(gkf_system(n, r)).
RatioProfile gkf_profile(int n, double r);

/// P(s) = 1 - sum m_k r_k^s.
cplx dirichlet_poly(const RatioProfile& p, cplx s);
/// P'(s) = sum m_k r_k^s ln(1/r_k).
cplx dirichlet_poly_derivative(const RatioProfile& p, cplx s);

/// 1/P(s); throws AtPoleError when |P(s)| < 1e-14.
cplx scaling_zeta(const RatioProfile& p, cplx s);

/// Real root D of sum m_k r_k^D = 1.
double moran_dimension(const RatioProfile& p);

/// Real root of (1/m_M) r_M^{-t} + sum_{k<M} (m_k/m_M)(r_k/r_M)^t = 1. This is
/// a lower bound for the real parts of the poles, not the lower similarity
/// dimension itself.
double lower_dim_bound(const RatioProfile& p);

enum class LatticeKind { Lattice, Nonlattice, Undecided };
const char* to_string(LatticeKind k);

struct LatticeClassification {
    LatticeKind kind = LatticeKind::Undecided;
    double lambda0 = 0.0;           // lattice only
    std::vector<int> exponents;     // r_k = lambda0^{exponents[k]}, lattice only
    long max_denominator_checked = 0;
    double residual = 0.0;
};

LatticeClassification classify_lattice(const RatioProfile& p, long max_denominator = 1000000,
                                       double tol = 1e-9);

struct Window {
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double T = 0.0;  // max |Im|
};

/// [D_l - 1, D + 1] x [-T, T].
Window default_window(const RatioProfile& p, double T);

enum class PoleMethod { LatticePolynomial, ArgumentPrinciple };
const char* to_string(PoleMethod m);

struct Pole {
    cplx omega;
    int multiplicity = 1;
    std::optional<cplx> residue;  // simple poles only
};

/// A box the argument-principle search could not resolve.
struct UndecidedBox {
    double re_min, re_max, im_min, im_max;
    int count;
};

struct ComplexDimensionSet {
    Window window;
    PoleMethod method = PoleMethod::LatticePolynomial;
    std::vector<Pole> poles;            // sorted by (Re, Im)
    std::vector<UndecidedBox> undecided;

    int count_with_multiplicity() const;
};

/// Lattice systems go through the polynomial in z = lambda0^s (unless the
/// degree is above 512); everything else through the argument principle.
ComplexDimensionSet complex_dimensions(const RatioProfile& p, const Window& w,
                                       const LatticeClassification& cls);
ComplexDimensionSet complex_dimensions_lattice(const RatioProfile& p, const Window& w,
                                               const LatticeClassification& cls);
ComplexDimensionSet complex_dimensions_argument(const RatioProfile& p, const Window& w);

/// Number of zeros of P inside the window rectangle, by the argument principle.
/// The rectangle edges are nudged if they pass within 1e-9 of a zero.
int argument_principle_count(const RatioProfile& p, const Window& w);

/// Real parts of the pole lines of a lattice system (one per distinct |root|).
std::vector<double> lattice_pole_real_parts(const RatioProfile& p,
                                            const LatticeClassification& cls);

/// Trapezoidal contour residue of zeta_Phi on a circle around omega. `others`
/// lists poles that must stay outside 2*rho; rho is halved until they do.
cplx residue_check(const RatioProfile& p, cplx omega, double rho = 1e-3, int nodes = 256,
                   const std::vector<cplx>& others = {});

struct ScreenBound {
    double sup_zeta = 0.0;
    double min_abs_p = 0.0;
};
/// Samples zeta_Phi(sigma + i tau) for tau in [-T, T].
ScreenBound screen_bound(const RatioProfile& p, double sigma, double T, int n_samples = 20001);

enum class Criterion { LowerDim, Lattice, None };
const char* to_string(Criterion c);

struct AdmissibilityReport {
    double sigma0 = 0.0;
    Criterion criterion = Criterion::None;
    std::optional<double> screen;
    double lower_dim_bound = 0.0;
    LatticeKind lattice = LatticeKind::Undecided;
    std::string notes;
};

AdmissibilityReport admissibility_report(const RatioProfile& p, double sigma0);

}  // namespace fhl::zeta
