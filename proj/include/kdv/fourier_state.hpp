// Zero-mean periodic spectral data and the operations that live on it:
// homogeneous Sobolev norms, mode-split projections, the dispersive gauge
// v_k = e^{ik^3 t} u_k, physical-space sampling, and reproducible random
// states for the estimate experiments.
//
// Conventions (period 2*pi throughout):
//   u(x) = sum_{k != 0} u_k e^{ikx},   ||u||_{H^s}^2 = sum |k|^{2s} |u_k|^2,
// so ||u||_{H^0}^2 = (1/2pi) int u^2 and physical samples use the plain
// series, no normalization factor.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "kdv/phase.hpp"

namespace kdv {

// Finitely supported map k -> amplitude, k in Z \ {0}.  Immutable in spirit:
// operations return new states.  `real_valued` is a conservative flag: when
// true the state is Hermitian (entry(-k) == conj(entry(k))); operations that
// cannot guarantee symmetry of their output clear it.
class FourierState {
public:
    using Map = std::map<int, Complex>;

    FourierState() = default;

    explicit FourierState(Map entries, bool real_valued = false)
        : entries_(std::move(entries)), real_valued_(real_valued) {
        validate();
    }

    static FourierState single_pair(int k, Complex a) {
        Map m;
        m[k] = a;
        m[-k] = std::conj(a);
        return FourierState(std::move(m), true);
    }

    const Map& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    Complex at(int k) const {
        auto it = entries_.find(k);
        return it == entries_.end() ? Complex{0.0, 0.0} : it->second;
    }

    void set(int k, Complex a) {
        if (k == 0) throw std::invalid_argument("FourierState: k = 0 is not allowed (zero-mean)");
        if (a == Complex{0.0, 0.0})
            entries_.erase(k);
        else
            entries_[k] = a;
    }

    int support_bound() const {
        int b = 0;
        for (const auto& [k, a] : entries_) b = std::max(b, std::abs(k));
        return b;
    }

    bool real_valued() const { return real_valued_; }
    void mark_real_valued(bool f) { real_valued_ = f; }

    // Exact Hermitian check up to `tol` relative to the largest amplitude.
    bool is_hermitian(double tol = 0.0) const {
        double scale = 0.0;
        for (const auto& [k, a] : entries_) scale = std::max(scale, std::abs(a));
        for (const auto& [k, a] : entries_)
            if (std::abs(a - std::conj(at(-k))) > tol * scale) return false;
        return true;
    }

    FourierState& operator*=(Complex c) {
        if (c == Complex{0.0, 0.0}) {
            entries_.clear();
            return *this;
        }
        for (auto& [k, a] : entries_) a *= c;
        if (c.imag() != 0.0) real_valued_ = false;
        return *this;
    }

    friend FourierState operator*(Complex c, FourierState s) {
        s *= c;
        return s;
    }

    friend FourierState operator+(const FourierState& a, const FourierState& b) {
        Map m = a.entries_;
        for (const auto& [k, x] : b.entries_) {
            auto [it, fresh] = m.emplace(k, x);
            if (!fresh) it->second += x;
        }
        FourierState out(std::move(m), a.real_valued_ && b.real_valued_);
        return out;
    }

    friend FourierState operator-(const FourierState& a, const FourierState& b) {
        return a + (Complex{-1.0, 0.0} * b);
    }

private:
    void validate() const {
        for (const auto& [k, a] : entries_) {
            if (k == 0) throw std::invalid_argument("FourierState: k = 0 entry");
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw std::invalid_argument("FourierState: non-finite amplitude");
        }
    }

    Map entries_;
    bool real_valued_ = false;
};

// ||v||_{H^s} = (sum |k|^{2s} |v_k|^2)^{1/2}; 0 for the empty state.
inline double sobolev_norm(const FourierState& v, double s) {
    double acc = 0.0;
    for (const auto& [k, a] : v.entries())
        acc += std::pow(static_cast<double>(std::abs(k)), 2.0 * s) * std::norm(a);
    return std::sqrt(acc);
}

inline double energy_h0(const FourierState& v) {
    double acc = 0.0;
    for (const auto& [k, a] : v.entries()) acc += std::norm(a);
    return acc;  // squared H^0 norm
}

enum class ProjectSide { low, high, zero };

// Pi_m (side=low keeps |k| <= m), Pi_{-m} = I - Pi_m (side=high keeps |k| > m).
// side=zero extracts the k=0 coefficient, identically absent here.
inline FourierState project(const FourierState& v, int m, ProjectSide side) {
    if (m < 0) throw std::invalid_argument("project: m must be >= 0");
    if (side == ProjectSide::zero) return FourierState{};
    FourierState::Map out;
    for (const auto& [k, a] : v.entries()) {
        bool low = std::abs(k) <= m;
        if ((side == ProjectSide::low) == low) out.emplace(k, a);
    }
    return FourierState(std::move(out), v.real_valued());
}

// Dispersive gauge v_k = e^{+ik^3 t} u_k and its inverse.  Isometric on
// every H^s; preserves Hermitian symmetry.
inline FourierState u_to_v(const FourierState& u, double t) {
    FourierState::Map out;
    for (const auto& [k, a] : u.entries()) out.emplace(k, unit_phase(cube(k), t) * a);
    return FourierState(std::move(out), u.real_valued());
}

inline FourierState v_to_u(const FourierState& v, double t) { return u_to_v(v, -t); }

struct PhysicalSamples {
    std::vector<double> values;
    double max_imag = 0.0;  // diagnostic; ~1e-16 for Hermitian input
};

// Samples of sum v_k e^{ikx} at x_j = 2*pi*j/grid, direct summation.
inline PhysicalSamples to_physical(const FourierState& v, int grid) {
    if (!v.real_valued())
        throw std::invalid_argument("to_physical: state is not marked real-valued");
    if (grid <= 2 * v.support_bound())
        throw std::invalid_argument("to_physical: grid must exceed 2 * support_bound");
    PhysicalSamples out;
    out.values.resize(grid);
    const double h = 2.0 * M_PI / grid;
    for (int j = 0; j < grid; ++j) {
        Complex acc{0.0, 0.0};
        for (const auto& [k, a] : v.entries())
            acc += a * Complex{std::cos(k * j * h), std::sin(k * j * h)};
        out.values[j] = acc.real();
        out.max_imag = std::max(out.max_imag, std::abs(acc.imag()));
    }
    return out;
}

// Deterministic Box-Muller over mt19937_64: std::normal_distribution is
// implementation-defined, and identical seeds must give bit-identical states.
class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : eng_(seed) {}

    double operator()() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    double uniform() {
        // in (0,1]; avoids log(0)
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_ = false;
};

// Hermitian state supported in 0 < |k| <= m, per-mode complex Gaussian with
// |k|^{-s-1/2} decay, rescaled so sobolev_norm(., s) == target_norm.
inline FourierState random_state(std::uint64_t seed, int m, double s, double target_norm) {
    if (m < 1) throw std::invalid_argument("random_state: m must be >= 1");
    Gaussian g(seed);
    FourierState::Map out;
    for (int k = 1; k <= m; ++k) {
        double w = std::pow(static_cast<double>(k), -s - 0.5);
        Complex a{g() * w, g() * w};
        out.emplace(k, a);
        out.emplace(-k, std::conj(a));
    }
    FourierState v(std::move(out), true);
    double n = sobolev_norm(v, s);
    v *= Complex{target_norm / n, 0.0};
    v.mark_real_valued(true);
    return v;
}

}  // namespace kdv
