// Rotating complex Burgers warmup: u_t + u u_z = i Omega u with analytic
// initial data phi.  After v = e^{-i Omega t} u, the characteristics give
// the implicit relation
//
//   v(z,t) = phi(z - lambda(t) v(z,t)),    lambda(t) = (e^{i Omega t}-1)/(i Omega),
//
// and the derivative
//
//   dz v = phi'(zeta) / (1 + lambda(t) phi'(zeta)),   zeta = z - lambda v.
//
// The denominator hitting zero is the blow-up; fast rotation keeps
// |lambda| <= 2/|Omega| so |Omega| >= 2 sup|phi'| rules it out.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace kdv {

using Complex = std::complex<double>;

// Analytic initial datum with its derivative and strip bounds.
struct AnalyticProfile {
    std::function<Complex(Complex)> eval;
    std::function<Complex(Complex)> deriv;
    double sup_phi = 0.0;            // bound on |phi| over the working strip
    double sup_dphi = 0.0;           // bound on |phi'|
    double strip_halfwidth = 1.0;    // d

    static AnalyticProfile linear(Complex a, Complex b, double d = 1.0) {
        AnalyticProfile p;
        p.eval = [a, b](Complex z) { return a * z + b; };
        p.deriv = [a](Complex) { return a; };
        p.sup_dphi = std::abs(a);
        p.sup_phi = std::abs(a) * (2.0 * M_PI + d) + std::abs(b);
        p.strip_halfwidth = d;
        return p;
    }

    // phi(z) = amp * sin(z); sup bounds on the strip |Im z| <= d
    static AnalyticProfile sine(double amp, double d = 1.0) {
        AnalyticProfile p;
        p.eval = [amp](Complex z) { return amp * std::sin(z); };
        p.deriv = [amp](Complex z) { return amp * std::cos(z); };
        p.sup_phi = std::abs(amp) * std::cosh(d);
        p.sup_dphi = std::abs(amp) * std::cosh(d);
        p.strip_halfwidth = d;
        return p;
    }

    // max relative central-difference defect of `deriv` on real samples
    double deriv_self_check(int samples = 64) const {
        const double h = 1e-6;
        double worst = 0.0;
        for (int j = 0; j < samples; ++j) {
            double x = 2.0 * M_PI * j / samples;
            Complex fd = (eval(Complex{x + h, 0.0}) - eval(Complex{x - h, 0.0})) / (2.0 * h);
            Complex d = deriv(Complex{x, 0.0});
            double scale = std::max(1.0, std::abs(d));
            worst = std::max(worst, std::abs(fd - d) / scale);
        }
        return worst;
    }
};

// lambda(t) = (e^{i Omega t} - 1)/(i Omega); series near Omega t = 0.
inline Complex rotation_lambda(double t, double omega) {
    double x = omega * t;
    if (std::abs(x) < 1e-6) {
        // t * sum (i x)^n / (n+1)!
        Complex acc{0.0, 0.0}, term{1.0, 0.0};
        for (int n = 0; n < 8; ++n) {
            acc += term / static_cast<double>(n + 1);
            term *= Complex{0.0, x} / static_cast<double>(n + 1);
        }
        return t * acc;
    }
    return (std::exp(Complex{0.0, x}) - 1.0) / Complex{0.0, omega};
}

struct CharacteristicSolution {
    Complex v{0.0, 0.0};
    Complex dz_v{0.0, 0.0};
    int iterations = 0;
    bool converged = false;
    double denominator_abs = std::numeric_limits<double>::quiet_NaN();  // |1 + lambda phi'|
};

// Solves v = phi(z - lambda v) by fixed-point iteration from v = phi(z),
// switching to damped Newton when three consecutive steps fail to contract
// by 0.9 (or after 30 iterations of slow linear convergence).  A
// near-singular denominator flags imminent blow-up instead of crashing.
inline CharacteristicSolution solve_implicit(const AnalyticProfile& phi, Complex z, double t,
                                             double omega, double tol = 1e-14) {
    const Complex lam = rotation_lambda(t, omega);
    CharacteristicSolution out;
    Complex v = phi.eval(z);
    double prev_step = std::numeric_limits<double>::infinity();
    int non_contracting = 0;
    bool newton = false;

    for (int it = 0; it < 200; ++it) {
        out.iterations = it + 1;
        Complex zeta = z - lam * v;
        Complex f = v - phi.eval(zeta);
        Complex dphi = phi.deriv(zeta);
        Complex den = 1.0 + lam * dphi;
        out.denominator_abs = std::abs(den);
        if (std::abs(f) <= tol * std::max(1.0, std::abs(v))) {
            out.v = v;
            out.dz_v = dphi / den;
            out.converged = true;
            return out;
        }
        if (!newton) {
            Complex vn = phi.eval(zeta);
            double step = std::abs(vn - v);
            if (step >= 0.9 * prev_step) {
                if (++non_contracting >= 3) newton = true;
            } else {
                non_contracting = 0;
            }
            if (it >= 30) newton = true;  // slow linear convergence: finish with Newton
            prev_step = step;
            v = vn;
        } else {
            if (std::abs(den) < 1e-8) {
                out.v = v;
                out.dz_v = dphi / den;
                out.converged = false;
                return out;
            }
            Complex dv = -f / den;
            double f0 = std::abs(f);
            double damp = 1.0;
            Complex vtrial = v + dv;
            for (int d = 0; d < 8; ++d) {
                Complex ft = vtrial - phi.eval(z - lam * vtrial);
                if (std::abs(ft) < f0) break;
                damp *= 0.5;
                vtrial = v + damp * dv;
            }
            v = vtrial;
        }
    }
    Complex zeta = z - lam * v;
    Complex dphi = phi.deriv(zeta);
    Complex den = 1.0 + lam * dphi;
    out.v = v;
    out.dz_v = dphi / den;
    out.denominator_abs = std::abs(den);
    out.converged = false;
    return out;
}

struct BlowupScan {
    bool found = false;
    double t_star = 0.0;
    Complex witness_z{0.0, 0.0};
    double min_denominator = std::numeric_limits<double>::infinity();
};

namespace detail {

// min over samples of |1 + lambda phi'(zeta)|; non-convergence counts as 0.
inline double min_denominator(const AnalyticProfile& phi, double omega,
                              const std::vector<Complex>& zs, double t, Complex* argmin) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : zs) {
        auto sol = solve_implicit(phi, z, t, omega);
        double d = sol.converged ? sol.denominator_abs : 0.0;
        if (d < best) {
            best = d;
            if (argmin) *argmin = z;
        }
    }
    return best;
}

}  // namespace detail

// Marches t over [0, T] watching min_z |1 + lambda phi'|; when it dips under
// `threshold`, golden-section refinement locates the bottom of the dip
// (the singular time) to ~1e-6.  Returns found=false when the minimum stays
// above threshold over the whole horizon.
inline BlowupScan blowup_scan(const AnalyticProfile& phi, double omega,
                              const std::vector<Complex>& z_samples, double T,
                              double threshold = 1e-3) {
    if (z_samples.empty()) throw std::invalid_argument("blowup_scan: no z samples");
    BlowupScan out;
    double dt = T / 512.0;
    if (omega != 0.0) dt = std::min(dt, 2.0 * M_PI / std::abs(omega) / 16.0);

    double t_prev = 0.0;
    double t = 0.0;
    while (t <= T + 1e-12) {
        Complex zmin;
        double g = detail::min_denominator(phi, omega, z_samples, t, &zmin);
        out.min_denominator = std::min(out.min_denominator, g);
        if (g < threshold) {
            // refine over [t_prev, min(t + dt, T)] by golden-section on g
            double a = t_prev, b = std::min(t + dt, T);
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double g1 = detail::min_denominator(phi, omega, z_samples, x1, nullptr);
            double g2 = detail::min_denominator(phi, omega, z_samples, x2, nullptr);
            for (int it = 0; it < 64 && (b - a) > 1e-7; ++it) {
                if (g1 < g2) {
                    b = x2;
                    x2 = x1;
                    g2 = g1;
                    x1 = b - gr * (b - a);
                    g1 = detail::min_denominator(phi, omega, z_samples, x1, nullptr);
                } else {
                    a = x1;
                    x1 = x2;
                    g1 = g2;
                    x2 = a + gr * (b - a);
                    g2 = detail::min_denominator(phi, omega, z_samples, x2, nullptr);
                }
            }
            double ts = 0.5 * (a + b);
            Complex witness;
            double gm = detail::min_denominator(phi, omega, z_samples, ts, &witness);
            out.found = true;
            out.t_star = ts;
            out.witness_z = witness;
            out.min_denominator = std::min(out.min_denominator, gm);
            return out;
        }
        t_prev = t;
        // shrink steps as the denominator gets small so the dip is not
        // stepped over
        double step = dt * std::clamp(g * 0.5, 0.02, 1.0);
        t += step;
    }
    return out;
}

}  // namespace kdv
