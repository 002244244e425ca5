// Inversion of L_phi v = v - c B2(phi, v) two independent ways:
//
//   invert_explicit - the first-order-ODE route: gauge out the dispersion
//     (psi_k = e^{-ik^3 t} phi_k, g_k = e^{-ik^3 t} f_k), pass to
//     antiderivatives w' = u, xi' = psi, where w solves
//
//        w' + xi w = g + c~,    w periodic with zero mean,
//
//     whose unique solution is reconstructed on a uniform grid from
//
//        w(x) = G(x) + ( C - int_0^x G xi e^Xi + c~ int_0^x e^Xi ) e^{-Xi(x)},
//        c~   = int G xi e^Xi / int e^Xi,
//        C    = ( int e^-Xi int_0^x G xi e^Xi - c~ int e^-Xi int_0^x e^Xi
//                 - int G ) / int e^-Xi,
//
//     with all quadratures spectrally exact on the periodic grid
//     (trapezoid rule; antiderivatives by division by ik).
//
//   invert_dense - assemble the matrix of L_phi on modes 0 < |k| <= M and
//     solve directly (validation oracle for the explicit route).
//
// The scalar c is a parameter: the uniqueness lemma uses c = 1 and the
// contraction argument c = 1/3; B2(phi,v) is bilinear so c folds into phi.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "kdv/fourier_state.hpp"
#include "kdv/operators.hpp"

namespace kdv {

// L_phi v = v - c B2(phi, v, t).
inline FourierState apply_L(const FourierState& phi, const FourierState& v, double t, double c) {
    return v - Complex{c, 0.0} * b2(phi, v, t);
}

struct InversionReport {
    FourierState v;        // solution
    Complex c_tilde{0.0};  // the constant c~ (explicit method)
    Complex C_const{0.0};  // the constant C (explicit method)
    double residual = 0.0;         // ||L_phi v - f||_{H^0}
    double periodicity_defect = 0.0;  // |Xi(2pi) - Xi(0)| (explicit)
    double mean_defect = 0.0;         // |int w| / 2pi (explicit)
    double c_tilde_defect = 0.0;      // |Pi_0(xi w) - c~| (explicit)
    double condition_estimate = 0.0;  // dense method only
    const char* method = "";
};

namespace detail {

// Uniform-grid sampler of sum coef_k e^{ikx} (direct summation; supports are
// small and exactness is prioritized over FFTs).
class SpectralGrid {
public:
    explicit SpectralGrid(int size) : n_(size), x_(size) {
        for (int j = 0; j < n_; ++j) x_[j] = 2.0 * M_PI * j / n_;
    }

    int size() const { return n_; }
    double x(int j) const { return x_[j]; }

    std::vector<Complex> sample(const std::map<int, Complex>& coef) const {
        std::vector<Complex> out(n_, Complex{0.0, 0.0});
        for (const auto& [k, a] : coef) {
            for (int j = 0; j < n_; ++j) {
                double ph = k * x_[j];
                out[j] += a * Complex{std::cos(ph), std::sin(ph)};
            }
        }
        return out;
    }

    // trapezoid rule over the period, spectrally exact for smooth periodic f
    Complex integral(const std::vector<Complex>& f) const {
        Complex acc{0.0, 0.0};
        for (const auto& z : f) acc += z;
        return acc * (2.0 * M_PI / n_);
    }

    // DFT coefficients c_k, |k| <= kmax (direct)
    std::map<int, Complex> analyze(const std::vector<Complex>& f, int kmax) const {
        std::map<int, Complex> out;
        for (int k = -kmax; k <= kmax; ++k) {
            Complex acc{0.0, 0.0};
            for (int j = 0; j < n_; ++j) {
                double ph = -k * x_[j];
                acc += f[j] * Complex{std::cos(ph), std::sin(ph)};
            }
            out[k] = acc / static_cast<double>(n_);
        }
        return out;
    }

    // F(x) = int_0^x f, computed spectrally: mean * x + periodic part.
    std::vector<Complex> antiderivative(const std::vector<Complex>& f) const {
        int kmax = n_ / 2 - 1;
        auto c = analyze(f, kmax);
        Complex mean = c[0];
        std::vector<Complex> out(n_);
        for (int j = 0; j < n_; ++j) {
            Complex acc = mean * x_[j];
            for (const auto& [k, a] : c) {
                if (k == 0) continue;
                double ph = k * x_[j];
                acc += a * (Complex{std::cos(ph), std::sin(ph)} - 1.0) / Complex{0.0, double(k)};
            }
            out[j] = acc;
        }
        return out;
    }

private:
    int n_;
    std::vector<double> x_;
};

}  // namespace detail

// Explicit quadrature inversion.  Requires Hermitian zero-mean phi and f
// (the boundary-value reformulation lives on real-valued functions).
inline InversionReport invert_explicit(const FourierState& phi, const FourierState& f, double t,
                                       double c, int grid = 0) {
    if (!phi.empty() && !phi.is_hermitian(1e-9))
        throw std::invalid_argument("invert_explicit: phi must be Hermitian");
    if (!f.empty() && !f.is_hermitian(1e-9))
        throw std::invalid_argument("invert_explicit: f must be Hermitian");
    int sup = phi.support_bound() + f.support_bound();
    if (grid <= 0) grid = std::max(64, 4 * sup + 16);
    if (grid <= 4 * sup)
        throw std::invalid_argument("invert_explicit: grid must exceed 4x combined support");

    InversionReport rep;
    rep.method = "explicit";

    // gauge: psi_k = e^{-ik^3 t} phi_k scaled by c, g_k = e^{-ik^3 t} f_k
    FourierState psi = v_to_u(Complex{c, 0.0} * phi, t);
    FourierState g = v_to_u(f, t);

    std::map<int, Complex> xi_c, Xi_c, G_c;
    for (const auto& [k, a] : psi.entries()) {
        Complex x = a / Complex{0.0, double(k)};
        xi_c[k] = x;
        Xi_c[k] = x / Complex{0.0, double(k)};
    }
    for (const auto& [k, a] : g.entries()) G_c[k] = a / Complex{0.0, double(k)};

    detail::SpectralGrid gr(grid);
    auto xi_s = gr.sample(xi_c);
    auto Xi_raw = gr.sample(Xi_c);
    auto G_raw = gr.sample(G_c);
    const int n = gr.size();

    // Xi(x) = int_0^x xi and G(x) = int_0^x g vanish at x = 0
    std::vector<double> xi(n), Xi(n), G(n), eXi(n), emXi(n);
    for (int j = 0; j < n; ++j) {
        xi[j] = xi_s[j].real();
        Xi[j] = (Xi_raw[j] - Xi_raw[0]).real();
        G[j] = (G_raw[j] - G_raw[0]).real();
        eXi[j] = std::exp(Xi[j]);
        emXi[j] = std::exp(-Xi[j]);
    }
    // zero-mean phi makes Xi periodic; a defect flags corrupted input
    {
        Complex XiFull = gr.integral(xi_s);
        rep.periodicity_defect = std::abs(XiFull);
        if (rep.periodicity_defect > 1e-10)
            throw std::runtime_error("invert_explicit: Xi is not periodic (phi has a mean?)");
    }

    std::vector<Complex> GxeXi(n), eXi_c(n), emXi_c(n);
    for (int j = 0; j < n; ++j) {
        GxeXi[j] = Complex{G[j] * xi[j] * eXi[j], 0.0};
        eXi_c[j] = Complex{eXi[j], 0.0};
        emXi_c[j] = Complex{emXi[j], 0.0};
    }
    auto H1 = gr.antiderivative(GxeXi);  // int_0^x G xi e^Xi
    auto H2 = gr.antiderivative(eXi_c);  // int_0^x e^Xi

    double int_eXi = gr.integral(eXi_c).real();
    double int_emXi = gr.integral(emXi_c).real();
    if (std::abs(int_eXi) < 1e-30 || std::abs(int_emXi) < 1e-30)
        throw std::runtime_error("invert_explicit: quadrature denominator underflow");

    double ctil = gr.integral(GxeXi).real() / int_eXi;

    std::vector<Complex> inner1(n), inner2(n), G_c2(n);
    for (int j = 0; j < n; ++j) {
        inner1[j] = emXi[j] * H1[j];
        inner2[j] = emXi[j] * H2[j];
        G_c2[j] = Complex{G[j], 0.0};
    }
    double Cc = (gr.integral(inner1).real() - ctil * gr.integral(inner2).real() -
                 gr.integral(G_c2).real()) /
                int_emXi;

    std::vector<Complex> w(n);
    for (int j = 0; j < n; ++j)
        w[j] = Complex{G[j] + (Cc - H1[j].real() + ctil * H2[j].real()) * emXi[j], 0.0};

    rep.c_tilde = Complex{ctil, 0.0};
    rep.C_const = Complex{Cc, 0.0};
    rep.mean_defect = std::abs(gr.integral(w)) / (2.0 * M_PI);
    {
        std::vector<Complex> xiw(n);
        for (int j = 0; j < n; ++j) xiw[j] = xi[j] * w[j];
        rep.c_tilde_defect = std::abs(gr.integral(xiw) / (2.0 * M_PI) - Complex{ctil, 0.0});
    }

    // u = w' spectrally; then un-gauge v_k = e^{ik^3 t} u_k
    int kmax = grid / 3;
    auto wc = gr.analyze(w, kmax);
    FourierState::Map vm;
    for (const auto& [k, a] : wc) {
        if (k == 0) continue;
        Complex uk = Complex{0.0, double(k)} * a;
        if (uk != Complex{0.0, 0.0}) vm.emplace(k, uk);
    }
    FourierState u(std::move(vm), false);
    rep.v = u_to_v(u, t);
    rep.v.mark_real_valued(rep.v.is_hermitian(1e-9));
    rep.residual = sobolev_norm(apply_L(phi, rep.v, t, c) - f, 0.0);
    return rep;
}

// Dense-matrix inversion on modes 0 < |k| <= M (validation oracle).
inline InversionReport invert_dense(const FourierState& phi, const FourierState& f, double t,
                                    double c, int M) {
    if (M < 1) throw std::invalid_argument("invert_dense: M must be >= 1");
    const int n = 2 * M;  // modes -M..-1, 1..M
    auto row = [M](int k) { return k < 0 ? k + M : k + M - 1; };

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
    for (int k = -M; k <= M; ++k) {
        if (k == 0) continue;
        for (int k2 = -M; k2 <= M; ++k2) {
            if (k2 == 0 || k2 == k) continue;
            int k1 = k - k2;
            Complex p = phi.at(k1);
            if (p == Complex{0.0, 0.0}) continue;
            Complex phase = unit_phase(3ll * k * k1 * k2, t);
            A(row(k), row(k2)) -= c * phase * p / static_cast<double>(k1 * k2);
        }
    }

    Eigen::VectorXcd b(n);
    double tail = 0.0;
    for (const auto& [k, a] : f.entries())
        if (std::abs(k) > M) tail += std::norm(a);
    for (int k = -M; k <= M; ++k) {
        if (k == 0) continue;
        b(row(k)) = f.at(k);
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues()(n - 1), smax = svd.singularValues()(0);
    if (smin <= 0.0 || !std::isfinite(smin))
        throw std::runtime_error("invert_dense: singular matrix (nullspace should be trivial)");

    Eigen::VectorXcd x = svd.solve(b);

    InversionReport rep;
    rep.method = "dense";
    rep.condition_estimate = smax / smin;
    FourierState::Map vm;
    for (int k = -M; k <= M; ++k) {
        if (k == 0) continue;
        Complex z = x(row(k));
        if (z != Complex{0.0, 0.0}) vm.emplace(k, z);
    }
    rep.v = FourierState(std::move(vm), false);
    rep.v.mark_real_valued(rep.v.is_hermitian(1e-9));
    rep.residual = sobolev_norm(apply_L(phi, rep.v, t, c) - f, 0.0);
    if (tail > 0.0) rep.residual = std::max(rep.residual, std::sqrt(tail));
    return rep;
}

// Truncated inverse of L(t) = I - c Pi_m B2(Pi_m phi, Pi_m .)(t) on the
// modes 0 < |k| <= m, with one LU factorization cached per requested time.
// Used by the Galerkin contraction solver, where the fixed-point map needs
// the truncated operator exactly.
class TruncatedInverse {
public:
    TruncatedInverse(const FourierState& phi, double c, int m)
        : m_(m), c_(c), phi_(project(phi, m, ProjectSide::low)) {}

    // f is dense over [-m..m] (index k+m); returns the dense solution.
    std::vector<Complex> solve(const std::vector<Complex>& f, double t) {
        auto& lu = factor(t);
        const int n = 2 * m_;
        Eigen::VectorXcd b(n);
        for (int k = -m_; k <= m_; ++k)
            if (k != 0) b(row(k)) = f[k + m_];
        Eigen::VectorXcd x = lu.solve(b);
        std::vector<Complex> out(2 * m_ + 1, Complex{0.0, 0.0});
        for (int k = -m_; k <= m_; ++k)
            if (k != 0) out[k + m_] = x(row(k));
        return out;
    }

private:
    int row(int k) const { return k < 0 ? k + m_ : k + m_ - 1; }

    Eigen::PartialPivLU<Eigen::MatrixXcd>& factor(double t) {
        auto it = lus_.find(t);
        if (it != lus_.end()) return it->second;
        const int n = 2 * m_;
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
        for (int k = -m_; k <= m_; ++k) {
            if (k == 0) continue;
            for (int k2 = -m_; k2 <= m_; ++k2) {
                if (k2 == 0 || k2 == k) continue;
                int k1 = k - k2;
                if (std::abs(k1) > m_) continue;
                Complex p = phi_.at(k1);
                if (p == Complex{0.0, 0.0}) continue;
                A(row(k), row(k2)) -=
                    c_ * unit_phase(3ll * k * k1 * k2, t) * p / static_cast<double>(k1 * k2);
            }
        }
        return lus_.emplace(t, Eigen::PartialPivLU<Eigen::MatrixXcd>(A)).first->second;
    }

    int m_;
    double c_;
    FourierState phi_;
    std::map<double, Eigen::PartialPivLU<Eigen::MatrixXcd>> lus_;
};

}  // namespace kdv
