// Oscillation-exact Simpson segments.
//
// Integrals of e^{i*phi*tau} * P(tau) over one segment [t, t+h], with P
// sampled at the three Simpson nodes {t, t+h/2, t+h} and interpolated
// quadratically, but the oscillatory factor integrated in closed form:
//
//   int_0^1 e^{i*theta*u} L_j(u) du,   theta = phi*h,
//
// where L_j are the Lagrange basis polynomials on u in {0, 1/2, 1}.  As
// theta -> 0 the weights reduce to Simpson's 1/6, 4/6, 1/6, so this is
// composite Simpson that stays accurate when phi*h >> 1.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <unordered_map>

#include "kdv/phase.hpp"

namespace kdv {

struct FilonWeights {
    Complex w0, w1, w2;  // node weights on [0,1]; multiply by h and e^{i*phi*t}
};

namespace detail {

struct OscMoments {
    Complex m0, m1, m2;  // int_0^1 e^{i*theta*u} u^j du
};

inline OscMoments osc_moments(double theta) {
    OscMoments M;
    if (std::abs(theta) < 1.0) {
        // series sum_n (i theta)^n / (n! (n+j+1)); 19 terms reach 1 ulp at |theta|<1
        Complex acc0{0, 0}, acc1{0, 0}, acc2{0, 0}, term{1.0, 0.0};
        const Complex it{0.0, theta};
        for (int n = 0; n < 19; ++n) {
            acc0 += term / static_cast<double>(n + 1);
            acc1 += term / static_cast<double>(n + 2);
            acc2 += term / static_cast<double>(n + 3);
            term *= it / static_cast<double>(n + 1);
        }
        M.m0 = acc0;
        M.m1 = acc1;
        M.m2 = acc2;
    } else {
        const Complex z{0.0, theta};
        const Complex e = std::exp(z);
        M.m0 = (e - 1.0) / z;
        M.m1 = e * (1.0 / z - 1.0 / (z * z)) + 1.0 / (z * z);
        M.m2 = e * (1.0 / z - 2.0 / (z * z) + 2.0 / (z * z * z)) - 2.0 / (z * z * z);
    }
    return M;
}

}  // namespace detail

// Weights for int_0^1 e^{i*theta*u} P(u) du with P quadratic through
// P(0), P(1/2), P(1).
inline FilonWeights filon_weights(double theta) {
    auto [m0, m1, m2] = detail::osc_moments(theta);
    return {2.0 * m2 - 3.0 * m1 + m0, 4.0 * m1 - 4.0 * m2, 2.0 * m2 - m1};
}

// Same nodes, but integrating only the first half interval [0, 1/2]:
// int_0^{1/2} e^{i*theta*u} P(u) du with the quadratic through all three nodes.
inline FilonWeights filon_weights_half(double theta) {
    auto [m0, m1, m2] = detail::osc_moments(0.5 * theta);
    // substitute u = s/2: moments int_0^{1/2} u^j e^{i theta u} du = (1/2)^{j+1} M_j(theta/2)
    Complex h0 = 0.5 * m0, h1 = 0.25 * m1, h2 = 0.125 * m2;
    return {2.0 * h2 - 3.0 * h1 + h0, 4.0 * h1 - 4.0 * h2, 2.0 * h2 - h1};
}

// Weight table keyed by the integer phase, for a fixed segment length h.
class FilonTable {
public:
    explicit FilonTable(double h, bool half = false) : h_(h), half_(half) {}

    const FilonWeights& operator()(std::int64_t phi) {
        auto it = memo_.find(phi);
        if (it != memo_.end()) return it->second;
        double theta = static_cast<double>(phi) * h_;
        auto w = half_ ? filon_weights_half(theta) : filon_weights(theta);
        return memo_.emplace(phi, w).first->second;
    }

    double h() const { return h_; }

private:
    double h_;
    bool half_;
    std::unordered_map<std::int64_t, FilonWeights> memo_;
};

}  // namespace kdv
