#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "fhl/simd/kernels.hpp"

using namespace fhl::simd;

namespace {

struct Problem {
    std::size_t nx = 37, ny = 23;
    std::vector<double> d, e, n, inv_d, x, b;
    explicit Problem(unsigned seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0.1, 1.0);
        const std::size_t size = nx * ny;
        for (auto* v : {&d, &e, &n, &inv_d, &x, &b}) v->resize(size);
        for (std::size_t k = 0; k < size; ++k) {
            e[k] = U(rng);
            n[k] = U(rng);
            d[k] = 4.0 + U(rng);
            inv_d[k] = 1.0 / d[k];
            x[k] = U(rng) - 0.5;
            b[k] = U(rng) - 0.5;
        }
    }
    Stencil5 A() const { return {d.data(), e.data(), n.data(), nx}; }
    // Cells whose neighbours are in bounds, including odd lengths for tails.
    std::size_t begin() const { return nx + 1; }
    std::size_t end() const { return nx * (ny - 1) - 2; }
};

}  // namespace

TEST_CASE("dispatch honours availability") {
    const Kernels& s = scalar_kernels();
    CHECK(std::string(s.name) == "scalar");
    const Kernels& a = active_kernels();
    if (avx2_kernels() == nullptr) CHECK(&a == &s);
}

TEST_CASE("scalar and AVX2 kernels agree") {
    const Kernels* v = avx2_kernels();
    if (!v) {
        MESSAGE("AVX2 unavailable; equivalence not exercised");
        return;
    }
    const Kernels& s = scalar_kernels();
    for (unsigned seed : {1u, 2u, 3u}) {
        Problem P(seed);
        std::vector<double> y1(P.x.size(), 0.0), y2(P.x.size(), 0.0);
        s.apply(P.A(), P.x.data(), y1.data(), P.begin(), P.end());
        v->apply(P.A(), P.x.data(), y2.data(), P.begin(), P.end());
        for (std::size_t k = 0; k < y1.size(); ++k) CHECK(std::abs(y1[k] - y2[k]) <= 1e-14);

        std::fill(y1.begin(), y1.end(), 0.0);
        std::fill(y2.begin(), y2.end(), 0.0);
        s.jacobi(P.A(), P.inv_d.data(), P.x.data(), P.b.data(), y1.data(), 0.7, P.begin(), P.end());
        v->jacobi(P.A(), P.inv_d.data(), P.x.data(), P.b.data(), y2.data(), 0.7, P.begin(), P.end());
        for (std::size_t k = 0; k < y1.size(); ++k) CHECK(std::abs(y1[k] - y2[k]) <= 1e-14);

        for (std::size_t len : {0ul, 1ul, 3ul, 4ul, 7ul, 100ul, 851ul}) {
            const double d1 = s.dot(P.x.data(), P.b.data(), len);
            const double d2 = v->dot(P.x.data(), P.b.data(), len);
            CHECK(std::abs(d1 - d2) <= 1e-13 * (1 + std::abs(d1)));
            std::vector<double> a1(P.b.begin(), P.b.begin() + len), a2 = a1;
            s.axpby(0.3, P.x.data(), -1.7, a1.data(), len);
            v->axpby(0.3, P.x.data(), -1.7, a2.data(), len);
            for (std::size_t k = 0; k < len; ++k) CHECK(std::abs(a1[k] - a2[k]) <= 1e-15);
        }

        for (std::size_t len : {1ul, 2ul, 5ul, 8ul, 13ul}) {
            std::vector<double> ax(P.x.begin(), P.x.begin() + len), ay(P.b.begin(), P.b.begin() + len),
                bx(P.e.begin(), P.e.begin() + len), by(P.n.begin(), P.n.begin() + len);
            // One degenerate segment.
            bx[0] = ax[0];
            by[0] = ay[0];
            const double m1 = s.min_seg_dist2(0.2, -0.1, ax.data(), ay.data(), bx.data(), by.data(), len);
            const double m2 = v->min_seg_dist2(0.2, -0.1, ax.data(), ay.data(), bx.data(), by.data(), len);
            CHECK(std::abs(m1 - m2) <= 1e-15);
        }
    }
}
