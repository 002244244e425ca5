// Integer phase algebra for the cubic dispersion relation on the circle.
//
// Every oscillatory factor in the mode equations is e^{i*Theta*t} with an
// integer Theta built from wavenumbers:
//
//   cubic_phase(k1,k2,k3)   = 3(k1+k2)(k2+k3)(k3+k1)
//                           = (k1+k2+k3)^3 - k1^3 - k2^3 - k3^3
//   quartic_phase(k1..k4)   = (k1+..+k4)^3 - k1^3 - .. - k4^3
//
// Theta*t is reduced mod 2*pi in extended precision before calling sin/cos,
// so mode counts up to ~10^3 keep the phase accurate to ~1e-10 rad.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <unordered_map>

namespace kdv {

using Complex = std::complex<double>;

inline std::int64_t cube(std::int64_t k) { return k * k * k; }

// 3(k1+k2)(k2+k3)(k3+k1); vanishes exactly on resonant triples.
inline std::int64_t cubic_phase(std::int64_t k1, std::int64_t k2, std::int64_t k3) {
    return 3 * (k1 + k2) * (k2 + k3) * (k3 + k1);
}

// (sum)^3 - sum of cubes; no product factorization exists for quadruples.
inline std::int64_t quartic_phase(std::int64_t k1, std::int64_t k2, std::int64_t k3,
                                  std::int64_t k4) {
    return cube(k1 + k2 + k3 + k4) - cube(k1) - cube(k2) - cube(k3) - cube(k4);
}

// e^{i*theta*t} with theta integer; the product theta*t is reduced mod 2*pi
// in long double so the reduction error stays ~|theta*t|*2^-63.
inline Complex unit_phase(std::int64_t theta, double t) {
    constexpr long double two_pi = 6.283185307179586476925286766559005768L;
    long double r = std::fmod(static_cast<long double>(theta) * static_cast<long double>(t), two_pi);
    return {static_cast<double>(std::cos(r)), static_cast<double>(std::sin(r))};
}

// Memo of e^{i*Theta*t} at one fixed time, keyed by the integer phase.
class PhaseCache {
public:
    explicit PhaseCache(double t) : t_(t) {}

    Complex operator()(std::int64_t theta) {
        auto it = memo_.find(theta);
        if (it != memo_.end()) return it->second;
        Complex z = unit_phase(theta, t_);
        memo_.emplace(theta, z);
        return z;
    }

    double time() const { return t_; }

private:
    double t_;
    std::unordered_map<std::int64_t, Complex> memo_;
};

}  // namespace kdv
