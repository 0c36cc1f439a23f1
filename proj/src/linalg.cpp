#include "perwave/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace perwave {

SmallLU::SmallLU(std::span<const double> a, int d)
    : d_(d), lu_(a.begin(), a.end()), piv_(std::size_t(d), 0.0) {
    if (a.size() != std::size_t(d) * std::size_t(d))
        throw std::invalid_argument("SmallLU: size mismatch");
    for (int k = 0; k < d_; ++k) {
        int p = k;
        double best = std::abs(lu_[std::size_t(k) * d_ + k]);
        for (int i = k + 1; i < d_; ++i) {
            const double v = std::abs(lu_[std::size_t(i) * d_ + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best == 0.0) throw std::runtime_error("SmallLU: singular block");
        piv_[std::size_t(k)] = p;
        if (p != k)
            for (int j = 0; j < d_; ++j)
                std::swap(lu_[std::size_t(k) * d_ + j], lu_[std::size_t(p) * d_ + j]);
        const double inv = 1.0 / lu_[std::size_t(k) * d_ + k];
        for (int i = k + 1; i < d_; ++i) {
            const double m = lu_[std::size_t(i) * d_ + k] * inv;
            lu_[std::size_t(i) * d_ + k] = m;
            for (int j = k + 1; j < d_; ++j)
                lu_[std::size_t(i) * d_ + j] -= m * lu_[std::size_t(k) * d_ + j];
        }
    }
}

void SmallLU::solve(std::span<double> b) const {
    for (int k = 0; k < d_; ++k) {
        if (piv_[std::size_t(k)] != k) std::swap(b[std::size_t(k)], b[std::size_t(piv_[std::size_t(k)])]);
        for (int i = k + 1; i < d_; ++i) b[std::size_t(i)] -= lu_[std::size_t(i) * d_ + k] * b[std::size_t(k)];
    }
    for (int i = d_ - 1; i >= 0; --i) {
        double acc = b[std::size_t(i)];
        for (int j = i + 1; j < d_; ++j) acc -= lu_[std::size_t(i) * d_ + j] * b[std::size_t(j)];
        b[std::size_t(i)] = acc / lu_[std::size_t(i) * d_ + i];
    }
}

BlockTridiagSolver::BlockTridiagSolver(int n, int d, bool periodic,
                                       std::span<const double> diag,
                                       std::span<const double> lo, std::span<const double> up)
    : n_(n), d_(d), periodic_(periodic), lo_(lo.begin(), lo.end()), up_(up.begin(), up.end()) {
    if (diag.size() != std::size_t(n) * d * d || lo.size() != std::size_t(n) * d ||
        up.size() != std::size_t(n) * d)
        throw std::invalid_argument("BlockTridiagSolver: size mismatch");
    if (periodic_ && n < 3) throw std::invalid_argument("BlockTridiagSolver: periodic needs n >= 3");

    m_ = periodic_ ? n_ - 1 : n_;
    const std::size_t dd = std::size_t(d_) * d_;

    // Block Thomas factorization of the interior part: pivot blocks
    // Delta_j = D_j - diag(lo_j) Delta_{j-1}^{-1} diag(up_{j-1}).
    delta_.reserve(std::size_t(m_));
    std::vector<double> work(dd), col(std::size_t(d_), 0.0);
    std::vector<double> g(dd);  // Delta_{j-1}^{-1} diag(up_{j-1})
    for (int j = 0; j < m_; ++j) {
        for (std::size_t t = 0; t < dd; ++t) work[t] = diag[std::size_t(j) * dd + t];
        if (j > 0) {
            for (int k = 0; k < d_; ++k) {
                for (int i = 0; i < d_; ++i) col[std::size_t(i)] = 0.0;
                col[std::size_t(k)] = up_[std::size_t(j - 1) * d_ + k];
                delta_.back().solve(col);
                for (int i = 0; i < d_; ++i) g[std::size_t(i) * d_ + k] = col[std::size_t(i)];
            }
            for (int i = 0; i < d_; ++i)
                for (int k = 0; k < d_; ++k)
                    work[std::size_t(i) * d_ + k] -= lo_[std::size_t(j) * d_ + i] * g[std::size_t(i) * d_ + k];
        }
        delta_.emplace_back(work, d_);
    }

    if (!periodic_) return;

    // Bordered elimination of the last node: Z = T^{-1} U, then the Schur
    // complement S = D_{n-1} - V Z with V reading interior nodes 0 and m-1.
    z_.assign(std::size_t(d_) * std::size_t(m_) * d_, 0.0);
    std::vector<double> rhs(std::size_t(m_) * d_);
    for (int k = 0; k < d_; ++k) {
        for (auto& v : rhs) v = 0.0;
        rhs[std::size_t(k)] = lo_[std::size_t(k)];  // wrap coupling of node 0
        rhs[std::size_t(m_ - 1) * d_ + k] = up_[std::size_t(m_ - 1) * d_ + k];
        thomas_solve(rhs);
        for (std::size_t t = 0; t < rhs.size(); ++t)
            z_[std::size_t(k) * rhs.size() + t] = rhs[t];
    }
    std::vector<double> s(dd);
    for (std::size_t t = 0; t < dd; ++t) s[t] = diag[std::size_t(n_ - 1) * dd + t];
    for (int i = 0; i < d_; ++i)
        for (int k = 0; k < d_; ++k) {
            const double zi_last = z_[std::size_t(k) * std::size_t(m_) * d_ + std::size_t(m_ - 1) * d_ + i];
            const double zi_first = z_[std::size_t(k) * std::size_t(m_) * d_ + i];
            s[std::size_t(i) * d_ + k] -= lo_[std::size_t(n_ - 1) * d_ + i] * zi_last +
                                          up_[std::size_t(n_ - 1) * d_ + i] * zi_first;
        }
    schur_ = SmallLU(s, d_);
}

void BlockTridiagSolver::thomas_solve(std::span<double> b) const {
    std::vector<double> t(std::size_t(d_), 0.0);
    // forward sweep
    for (int j = 1; j < m_; ++j) {
        for (int i = 0; i < d_; ++i) t[std::size_t(i)] = b[std::size_t(j - 1) * d_ + i];
        delta_[std::size_t(j - 1)].solve(t);
        for (int i = 0; i < d_; ++i) b[std::size_t(j) * d_ + i] -= lo_[std::size_t(j) * d_ + i] * t[std::size_t(i)];
    }
    // back substitution
    delta_[std::size_t(m_ - 1)].solve(b.subspan(std::size_t(m_ - 1) * d_, std::size_t(d_)));
    for (int j = m_ - 2; j >= 0; --j) {
        for (int i = 0; i < d_; ++i)
            b[std::size_t(j) * d_ + i] -= up_[std::size_t(j) * d_ + i] * b[std::size_t(j + 1) * d_ + i];
        delta_[std::size_t(j)].solve(b.subspan(std::size_t(j) * d_, std::size_t(d_)));
    }
}

void BlockTridiagSolver::solve(std::span<double> b) const {
    if (!periodic_) {
        thomas_solve(b);
        return;
    }
    const std::size_t md = std::size_t(m_) * d_;
    auto b_t = b.subspan(0, md);
    thomas_solve(b_t);
    std::vector<double> w(std::size_t(d_), 0.0);
    for (int i = 0; i < d_; ++i)
        w[std::size_t(i)] = b[md + std::size_t(i)] -
                            lo_[std::size_t(n_ - 1) * d_ + i] * b_t[std::size_t(m_ - 1) * d_ + i] -
                            up_[std::size_t(n_ - 1) * d_ + i] * b_t[std::size_t(i)];
    schur_.solve(w);
    for (std::size_t t = 0; t < md; ++t) {
        double acc = b_t[t];
        for (int k = 0; k < d_; ++k) acc -= z_[std::size_t(k) * md + t] * w[std::size_t(k)];
        b_t[t] = acc;
    }
    for (int i = 0; i < d_; ++i) b[md + std::size_t(i)] = w[std::size_t(i)];
}

ScalarTridiagSolver::ScalarTridiagSolver(std::span<const double> lo, std::span<const double> diag,
                                         std::span<const double> up, bool periodic)
    : n_(int(diag.size())), periodic_(periodic), lo_(lo.begin(), lo.end()), up_(up.begin(), up.end()) {
    if (lo.size() != diag.size() || up.size() != diag.size())
        throw std::invalid_argument("ScalarTridiagSolver: size mismatch");
    std::vector<double> d(diag.begin(), diag.end());
    wrap_lo_ = lo_[0];
    wrap_up_ = up_[std::size_t(n_ - 1)];

    double gamma = 0.0;
    if (periodic_) {
        if (n_ < 3) throw std::invalid_argument("ScalarTridiagSolver: periodic needs n >= 3");
        // A = B + u v^T with u = (gamma, 0,..,0, wrap_up)^T and
        // v = (1, 0,..,0, wrap_lo/gamma)^T.
        gamma = -d[0];
        d[0] -= gamma;
        d[std::size_t(n_ - 1)] -= wrap_up_ * wrap_lo_ / gamma;
    }

    // Thomas factorization of B: store multipliers in lo_, pivots inverted.
    dinv_.assign(std::size_t(n_), 0.0);
    for (int i = 1; i < n_; ++i) {
        const double m = lo_[std::size_t(i)] / d[std::size_t(i - 1)];
        lo_[std::size_t(i)] = m;
        d[std::size_t(i)] -= m * up_[std::size_t(i - 1)];
    }
    for (int i = 0; i < n_; ++i) {
        if (d[std::size_t(i)] == 0.0) throw std::runtime_error("ScalarTridiagSolver: zero pivot");
        dinv_[std::size_t(i)] = 1.0 / d[std::size_t(i)];
    }

    if (periodic_) {
        corr_.assign(std::size_t(n_), 0.0);
        corr_[0] = gamma;
        corr_[std::size_t(n_ - 1)] = wrap_up_;
        plain_solve(corr_);  // z = B^{-1} u
        corr_scale_ = 1.0 + corr_[0] + (wrap_lo_ / gamma) * corr_[std::size_t(n_ - 1)];
        wrap_lo_ /= gamma;  // store v's last component
    }
}

void ScalarTridiagSolver::plain_solve(std::span<double> b) const {
    for (int i = 1; i < n_; ++i) b[std::size_t(i)] -= lo_[std::size_t(i)] * b[std::size_t(i - 1)];
    b[std::size_t(n_ - 1)] *= dinv_[std::size_t(n_ - 1)];
    for (int i = n_ - 2; i >= 0; --i)
        b[std::size_t(i)] = (b[std::size_t(i)] - up_[std::size_t(i)] * b[std::size_t(i + 1)]) * dinv_[std::size_t(i)];
}

void ScalarTridiagSolver::solve(std::span<double> b) const {
    plain_solve(b);
    if (!periodic_) return;
    const double vy = b[0] + wrap_lo_ * b[std::size_t(n_ - 1)];
    const double f = vy / corr_scale_;
    for (int i = 0; i < n_; ++i) b[std::size_t(i)] -= f * corr_[std::size_t(i)];
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace perwave
