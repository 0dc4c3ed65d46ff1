#include "multigrid.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "fhl/error.hpp"

namespace fhl::heat::detail {

void GridOperator::finalize_spans() {
    spans.assign(ny, {0, 0});
    active = 0;
    for (std::size_t j = 0; j < ny; ++j) {
        std::size_t lo = nx, hi = 0;
        for (std::size_t i = 0; i < nx; ++i) {
            if (m[j * nx + i] > 0.0) {
                lo = std::min(lo, i);
                hi = i + 1;
                ++active;
            }
        }
        if (hi > lo) {
            if (lo == 0 || hi == nx || j == 0 || j + 1 == ny)
                throw NumericError("multigrid: active cell on the grid edge");
            spans[j] = {j * nx + lo, j * nx + hi};
        }
    }
    spans.erase(std::remove_if(spans.begin(), spans.end(),
                               [](const auto& s) { return s.second <= s.first; }),
                spans.end());
    const std::size_t size = nx * ny;
    d.assign(size, 0.0);
    e.assign(size, 0.0);
    n.assign(size, 0.0);
    inv_d.assign(size, 0.0);
}

void GridOperator::set_scale(double c, double stiffness_factor) {
    const double s = c * stiffness_factor;
    for (auto [b, end] : spans) {
        for (std::size_t i = b; i < end; ++i) {
            d[i] = m[i] + s * kd[i];
            e[i] = s * ke[i];
            n[i] = s * kn[i];
            inv_d[i] = d[i] > 0.0 ? 1.0 / d[i] : 0.0;
        }
    }
}

void GridOperator::apply(const simd::Kernels& K, const double* x, double* y) const {
    const auto S = stencil();
    for (auto [b, end] : spans) K.apply(S, x, y, b, end);
}

double GridOperator::dot(const simd::Kernels& K, const double* x, const double* y) const {
    double s = 0.0;
    for (auto [b, end] : spans) s += K.dot(x + b, y + b, end - b);
    return s;
}

void GridOperator::axpby(const simd::Kernels& K, double a, const double* x, double b,
                         double* y) const {
    for (auto [lo, end] : spans) K.axpby(a, x + lo, b, y + lo, end - lo);
}

namespace {

/// Halved Galerkin aggregation of `f` onto 2x2 blocks, offset by one cell.
GridOperator coarsen(const GridOperator& f) {
    GridOperator c;
    c.nx = (f.nx + 1) / 2 + 2;
    c.ny = (f.ny + 1) / 2 + 2;
    const std::size_t size = c.nx * c.ny;
    c.m.assign(size, 0.0);
    c.kd.assign(size, 0.0);
    c.ke.assign(size, 0.0);
    c.kn.assign(size, 0.0);
    auto parent = [&](std::size_t i, std::size_t j) { return (j / 2 + 1) * c.nx + (i / 2 + 1); };
    for (std::size_t j = 0; j < f.ny; ++j) {
        for (std::size_t i = 0; i < f.nx; ++i) {
            const std::size_t k = j * f.nx + i;
            if (!(f.m[k] > 0.0)) continue;
            const std::size_t P = parent(i, j);
            c.m[P] += f.m[k];
            c.kd[P] += f.kd[k];
            if (f.ke[k] != 0.0) {
                if (parent(i + 1, j) == P) c.kd[P] -= 2.0 * f.ke[k];
                else c.ke[P] += f.ke[k];
            }
            if (f.kn[k] != 0.0) {
                if (parent(i, j + 1) == P) c.kd[P] -= 2.0 * f.kn[k];
                else c.kn[P] += f.kn[k];
            }
        }
    }
    for (std::size_t k = 0; k < size; ++k) {
        c.kd[k] *= 0.5;
        c.ke[k] *= 0.5;
        c.kn[k] *= 0.5;
    }
    c.finalize_spans();
    return c;
}

}  // namespace

struct Multigrid::Impl {
    const GridOperator& fine;
    const simd::Kernels& K;
    std::vector<GridOperator> coarse;  // level l >= 1 is coarse[l - 1]
    struct Buffers {
        std::vector<double> x, b, r, t;
    };
    std::vector<Buffers> buf;  // per level; level 0 uses only r and t
    std::vector<std::size_t> dense_index;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd rhs;

    Impl(const GridOperator& f, const simd::Kernels& k) : fine(f), K(k) {}

    const GridOperator& op(std::size_t l) const { return l == 0 ? fine : coarse[l - 1]; }
    std::size_t levels() const { return coarse.size() + 1; }

    void restrict_to(std::size_t l, const double* r, double* bc) {
        const GridOperator& f = op(l);
        const GridOperator& c = op(l + 1);
        for (auto [b, e] : c.spans) std::fill(bc + b, bc + e, 0.0);
        for (auto [b, e] : f.spans) {
            const std::size_t j = b / f.nx;
            const std::size_t row = (j / 2 + 1) * c.nx + 1;
            for (std::size_t k = b; k < e; ++k) {
                if (f.m[k] > 0.0) bc[row + (k - j * f.nx) / 2] += r[k];
            }
        }
    }

    void prolong_add(std::size_t l, const double* xc, double* x) {
        const GridOperator& f = op(l);
        const GridOperator& c = op(l + 1);
        for (auto [b, e] : f.spans) {
            const std::size_t j = b / f.nx;
            const std::size_t row = (j / 2 + 1) * c.nx + 1;
            for (std::size_t k = b; k < e; ++k) {
                if (f.m[k] > 0.0) x[k] += xc[row + (k - j * f.nx) / 2];
            }
        }
    }

    void dense_solve(const double* b, double* x) {
        for (std::size_t q = 0; q < dense_index.size(); ++q) rhs(q) = b[dense_index[q]];
        Eigen::VectorXd y = llt.solve(rhs);
        for (std::size_t q = 0; q < dense_index.size(); ++q) x[dense_index[q]] = y(q);
    }

    void vcycle(std::size_t l, const double* b, double* x, int nu, double omega) {
        const GridOperator& A = op(l);
        if (l + 1 == levels()) {
            dense_solve(b, x);
            return;
        }
        auto& B = buf[l];
        double* t = B.t.data();
        double* r = B.r.data();
        const auto S = A.stencil();
        // Pre-smoothing from zero: the first sweep is omega D^{-1} b.
        for (auto [lo, e] : A.spans)
            for (std::size_t k = lo; k < e; ++k) x[k] = omega * A.inv_d[k] * b[k];
        for (int s = 1; s < nu; ++s) {
            for (auto [lo, e] : A.spans) K.jacobi(S, A.inv_d.data(), x, b, t, omega, lo, e);
            std::swap(x, t);
        }
        if (nu % 2 == 0) {
            // x currently points at t's storage; copy back.
            for (auto [lo, e] : A.spans) std::copy(x + lo, x + e, t + lo);
            std::swap(x, t);
        }
        A.apply(K, x, r);
        A.axpby(K, 1.0, b, -1.0, r);
        auto& C = buf[l + 1];
        restrict_to(l, r, C.b.data());
        vcycle(l + 1, C.b.data(), C.x.data(), nu, omega);
        prolong_add(l, C.x.data(), x);
        double* xa = x;
        for (int s = 0; s < nu; ++s) {
            for (auto [lo, e] : A.spans) K.jacobi(S, A.inv_d.data(), xa, b, t, omega, lo, e);
            std::swap(xa, t);
        }
        if (xa != x)
            for (auto [lo, e] : A.spans) std::copy(xa + lo, xa + e, x + lo);
    }
};

Multigrid::Multigrid(const GridOperator& fine, const simd::Kernels& K, std::size_t coarsest)
    : impl_(std::make_unique<Impl>(fine, K)) {
    auto& I = *impl_;
    while (I.op(I.levels() - 1).active > coarsest && I.op(I.levels() - 1).nx > 4 &&
           I.op(I.levels() - 1).ny > 4) {
        I.coarse.push_back(coarsen(I.op(I.levels() - 1)));
    }
    I.buf.resize(I.levels());
    for (std::size_t l = 0; l < I.levels(); ++l) {
        const std::size_t size = I.op(l).nx * I.op(l).ny;
        I.buf[l].r.assign(size, 0.0);
        I.buf[l].t.assign(size, 0.0);
        if (l > 0) {
            I.buf[l].x.assign(size, 0.0);
            I.buf[l].b.assign(size, 0.0);
        }
    }
    const GridOperator& last = I.op(I.levels() - 1);
    for (std::size_t k = 0; k < last.m.size(); ++k)
        if (last.m[k] > 0.0) I.dense_index.push_back(k);
    I.rhs.resize(static_cast<Eigen::Index>(I.dense_index.size()));
}

Multigrid::~Multigrid() = default;

std::size_t Multigrid::levels() const { return impl_->levels(); }

void Multigrid::set_scale(double c) {
    auto& I = *impl_;
    for (auto& op : I.coarse) op.set_scale(c);
    const GridOperator& last = I.op(I.levels() - 1);
    const std::size_t n = I.dense_index.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    std::vector<std::ptrdiff_t> pos(last.m.size(), -1);
    for (std::size_t q = 0; q < n; ++q) pos[I.dense_index[q]] = static_cast<std::ptrdiff_t>(q);
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t k = I.dense_index[q];
        A(q, q) = last.d[k];
        const std::ptrdiff_t east = pos[k + 1], north = pos[k + last.nx];
        if (east >= 0) A(q, east) = A(east, q) = -last.e[k];
        if (north >= 0) A(q, north) = A(north, q) = -last.n[k];
    }
    I.llt.compute(A);
    if (I.llt.info() != Eigen::Success) throw NumericError("multigrid: coarse matrix not SPD");
}

void Multigrid::apply(const double* b, double* x) {
    impl_->vcycle(0, b, x, smoothing_steps, omega);
}

}  // namespace fhl::heat::detail
