// The multilinear convolution operators of the mode system: the quadratic
// term B1, the differentiated-by-parts family B2, R3, B3, B4 = (1/2)B4^1 + B4^2,
// the resonance decomposition of R3 with its closed-form resonant part A_res,
// and the high/low mode n-split variants (R3nres0/R3nres1, B30, B40).
//
// Every operator here is an exact finite sum over the supports of its
// arguments.  All oscillatory factors obey
//
//   e^{i*Phi*t} = e^{ik^3 t} * prod_j e^{-i k_j^3 t},
//
// so the production kernels evaluate a phase-free sum in the gauged
// variables and apply the mode-wise gauge on the way in and out; the naive
// per-tuple-phase evaluation lives in the test oracles.
//
// Nonresonance is always decided in exact integer arithmetic on
// (k1+k2)(k2+k3)(k3+k1), never by floating comparison.  The `kernels`
// namespace exposes window options (pair-sum bounds, low-mode cuts, output
// truncation) needed by the Galerkin form identities; the public operators
// use the free (windowless) definitions.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kdv/fourier_state.hpp"
#include "kdv/phase.hpp"

namespace kdv {

namespace kernels {

// Dense coefficient block over [-bound..bound]; index k + bound.
struct Dense {
    int bound = 0;
    std::vector<Complex> a;

    Dense() = default;
    explicit Dense(int b) : bound(b), a(2 * static_cast<std::size_t>(b) + 1) {}

    Complex get(int k) const { return a[static_cast<std::size_t>(k + bound)]; }
    void add(int k, Complex z) { a[static_cast<std::size_t>(k + bound)] += z; }
};

inline Dense to_dense(const FourierState& s, int bound) {
    Dense d(bound);
    for (const auto& [k, v] : s.entries())
        if (std::abs(k) <= bound) d.a[static_cast<std::size_t>(k + bound)] = v;
    return d;
}

inline FourierState to_state(const Dense& d, bool real_valued = false) {
    FourierState::Map m;
    for (int k = -d.bound; k <= d.bound; ++k) {
        if (k == 0) continue;
        Complex z = d.get(k);
        if (z != Complex{0.0, 0.0}) m.emplace(k, z);
    }
    return FourierState(std::move(m), real_valued);
}

// Linear convolution c(q) = sum_{k3+k4=q} w_{k3} phi_{k4}, k3,k4 != 0.
inline Dense pair_conv(const Dense& w, const Dense& phi) {
    Dense c(w.bound + phi.bound);
    for (int k3 = -w.bound; k3 <= w.bound; ++k3) {
        if (k3 == 0) continue;
        Complex a3 = w.get(k3);
        if (a3 == Complex{0.0, 0.0}) continue;
        for (int k4 = -phi.bound; k4 <= phi.bound; ++k4) {
            if (k4 == 0) continue;
            Complex a4 = phi.get(k4);
            if (a4 == Complex{0.0, 0.0}) continue;
            c.add(k3 + k4, a3 * a4);
        }
    }
    return c;
}

// (ik/2) sum u_{k1} v_{k2} over k1+k2=k (gauged, t=0 form).
inline Dense b1_kernel(const Dense& u, const Dense& v, int out_cap = -1) {
    int B = u.bound + v.bound;
    if (out_cap >= 0) B = std::min(B, out_cap);
    Dense out(B);
    for (int k1 = -u.bound; k1 <= u.bound; ++k1) {
        if (k1 == 0) continue;
        Complex a1 = u.get(k1);
        if (a1 == Complex{0.0, 0.0}) continue;
        for (int k2 = -v.bound; k2 <= v.bound; ++k2) {
            if (k2 == 0) continue;
            int k = k1 + k2;
            if (k == 0 || std::abs(k) > B) continue;
            out.add(k, Complex{0.0, 0.5 * k} * a1 * v.get(k2));
        }
    }
    return out;
}

// sum u_{k1} v_{k2} / (k1 k2) over k1+k2=k (gauged form).
inline Dense b2_kernel(const Dense& u, const Dense& v, int out_cap = -1) {
    int B = u.bound + v.bound;
    if (out_cap >= 0) B = std::min(B, out_cap);
    Dense out(B);
    for (int k1 = -u.bound; k1 <= u.bound; ++k1) {
        if (k1 == 0) continue;
        Complex a1 = u.get(k1);
        if (a1 == Complex{0.0, 0.0}) continue;
        for (int k2 = -v.bound; k2 <= v.bound; ++k2) {
            if (k2 == 0) continue;
            int k = k1 + k2;
            if (k == 0 || std::abs(k) > B) continue;
            out.add(k, a1 * v.get(k2) / static_cast<double>(k1 * k2));
        }
    }
    return out;
}

enum class ResFilter { all, res_only, nres_only };

// High/low split of arguments 2 and 3 at threshold n: `both_high` keeps the
// (Pi_{-n} x, Pi_{-n} x) block, `complement` the six remaining blocks.
enum class Split23 { none, both_high, complement };

struct TriOpts {
    int out_cap = -1;           // Pi_m on the output; -1 = free
    int pair_abs_max = -1;      // require |k2+k3| <= pair_abs_max
    bool pair_nonzero = false;  // require k2+k3 != 0
    int split_n = 0;
    Split23 split = Split23::none;
    ResFilter filter = ResFilter::all;
};

// Trilinear sums with denominator 1/k1 (b3_denoms=false) or
// 1/(k1 (k1+k2)(k2+k3)(k3+k1)) (b3_denoms=true; only meaningful with
// nres_only).
inline Dense trilinear_kernel(const Dense& u, const Dense& v, const Dense& w,
                              bool b3_denoms, TriOpts o) {
    int B = u.bound + v.bound + w.bound;
    if (o.out_cap >= 0) B = std::min(B, o.out_cap);
    Dense out(B);
    for (int k1 = -u.bound; k1 <= u.bound; ++k1) {
        if (k1 == 0) continue;
        Complex a1 = u.get(k1);
        if (a1 == Complex{0.0, 0.0}) continue;
        for (int k2 = -v.bound; k2 <= v.bound; ++k2) {
            if (k2 == 0) continue;
            Complex a12 = a1 * v.get(k2);
            if (a12 == Complex{0.0, 0.0}) continue;
            bool high2 = std::abs(k2) > o.split_n;
            for (int k3 = -w.bound; k3 <= w.bound; ++k3) {
                if (k3 == 0) continue;
                if (o.split != Split23::none) {
                    bool both = high2 && std::abs(k3) > o.split_n;
                    if (o.split == Split23::both_high ? !both : both) continue;
                }
                int k = k1 + k2 + k3;
                if (k == 0 || std::abs(k) > B) continue;
                int p = k2 + k3;
                if (o.pair_nonzero && p == 0) continue;
                if (o.pair_abs_max >= 0 && std::abs(p) > o.pair_abs_max) continue;
                std::int64_t f = static_cast<std::int64_t>(k1 + k2) * p * (k3 + k1);
                if (o.filter == ResFilter::res_only && f != 0) continue;
                if (o.filter == ResFilter::nres_only && f == 0) continue;
                Complex a = a12 * w.get(k3);
                if (b3_denoms) {
                    if (f == 0) continue;
                    out.add(k, a / (static_cast<double>(k1) * static_cast<double>(f)));
                } else {
                    out.add(k, a / static_cast<double>(k1));
                }
            }
        }
    }
    return out;
}

struct Quad1Opts {
    int out_cap = -1;
    int pair12_abs_max = -1;       // |k1+k2| <= max (Galerkin window)
    int q_abs_max = -1;            // |k3+k4| <= max
    int q_abs_min_excl = -1;       // |k3+k4| > min; -1 admits q = 0
    int lowcut1 = 0, lowcut2 = 0;  // Pi_{-n} on legs 1, 2
};

// B4^1-type sum: u_{k1} v_{k2} (w*phi)(q) / ((k1+k2)(k1+q)(k2+q)), q = k3+k4.
inline Dense b41_kernel(const Dense& u, const Dense& v, const Dense& w, const Dense& phi,
                        Quad1Opts o) {
    Dense c = pair_conv(w, phi);
    int B = u.bound + v.bound + c.bound;
    if (o.out_cap >= 0) B = std::min(B, o.out_cap);
    Dense out(B);
    for (int k1 = -u.bound; k1 <= u.bound; ++k1) {
        if (k1 == 0 || std::abs(k1) <= o.lowcut1) continue;
        Complex a1 = u.get(k1);
        if (a1 == Complex{0.0, 0.0}) continue;
        for (int k2 = -v.bound; k2 <= v.bound; ++k2) {
            if (k2 == 0 || std::abs(k2) <= o.lowcut2) continue;
            int d1 = k1 + k2;
            if (d1 == 0) continue;
            if (o.pair12_abs_max >= 0 && std::abs(d1) > o.pair12_abs_max) continue;
            Complex a12 = a1 * v.get(k2);
            if (a12 == Complex{0.0, 0.0}) continue;
            for (int q = -c.bound; q <= c.bound; ++q) {
                if (o.q_abs_min_excl >= 0 && std::abs(q) <= o.q_abs_min_excl) continue;
                if (o.q_abs_max >= 0 && std::abs(q) > o.q_abs_max) continue;
                int k = k1 + k2 + q;
                if (k == 0 || std::abs(k) > B) continue;
                int d2 = k1 + q, d3 = k2 + q;
                if (d2 == 0 || d3 == 0) continue;
                Complex cq = c.get(q);
                if (cq == Complex{0.0, 0.0}) continue;
                out.add(k, a12 * cq / static_cast<double>(static_cast<std::int64_t>(d1) * d2 * d3));
            }
        }
    }
    return out;
}

struct Quad2Opts {
    int out_cap = -1;
    int tail234_abs_max = -1;  // |k2+k3+k4| <= max (Galerkin window)
    int q_abs_max = -1;        // |k3+k4| <= max
    int q_abs_min_excl = 0;    // |k3+k4| > min (pair projection Pi_{-n}(v v))
    int lowcut2 = 0;           // Pi_{-n} on leg 2
};

// B4^2-type sum: q u_{k1} v_{k2} (w*phi)(q) / (k1 (k1+k2)(k1+q)(k2+q)).
inline Dense b42_kernel(const Dense& u, const Dense& v, const Dense& w, const Dense& phi,
                        Quad2Opts o) {
    Dense c = pair_conv(w, phi);
    int B = u.bound + v.bound + c.bound;
    if (o.out_cap >= 0) B = std::min(B, o.out_cap);
    Dense out(B);
    for (int k1 = -u.bound; k1 <= u.bound; ++k1) {
        if (k1 == 0) continue;
        Complex a1 = u.get(k1);
        if (a1 == Complex{0.0, 0.0}) continue;
        for (int k2 = -v.bound; k2 <= v.bound; ++k2) {
            if (k2 == 0 || std::abs(k2) <= o.lowcut2) continue;
            int d1 = k1 + k2;
            if (d1 == 0) continue;
            Complex a12 = a1 * v.get(k2);
            if (a12 == Complex{0.0, 0.0}) continue;
            for (int q = -c.bound; q <= c.bound; ++q) {
                if (std::abs(q) <= o.q_abs_min_excl) continue;
                if (o.q_abs_max >= 0 && std::abs(q) > o.q_abs_max) continue;
                int k = k1 + k2 + q;
                if (k == 0 || std::abs(k) > B) continue;
                int d2 = k1 + q, d3 = k2 + q;
                if (d2 == 0 || d3 == 0) continue;
                if (o.tail234_abs_max >= 0 && std::abs(d3) > o.tail234_abs_max) continue;
                Complex cq = c.get(q);
                if (cq == Complex{0.0, 0.0}) continue;
                out.add(k, static_cast<double>(q) * a12 * cq /
                               (static_cast<double>(k1) *
                                static_cast<double>(static_cast<std::int64_t>(d1) * d2 * d3)));
            }
        }
    }
    return out;
}

}  // namespace kernels

namespace detail {

inline kernels::Dense gauge_in(const FourierState& x, double t) {
    if (t == 0.0) return kernels::to_dense(x, x.support_bound());
    FourierState u = v_to_u(x, t);
    return kernels::to_dense(u, u.support_bound());
}

// Un-gauge a kernel result and set the Hermitian flag when plausible.
inline FourierState gauge_out(kernels::Dense d, double t, bool hermitian_hint) {
    FourierState out = kernels::to_state(d, false);
    if (t != 0.0) out = u_to_v(out, t);
    out.mark_real_valued(hermitian_hint && out.is_hermitian(1e-12));
    return out;
}

}  // namespace detail

// B1(u,v)_k = (ik/2) sum_{k1+k2=k} e^{i3kk1k2 t} u_{k1} v_{k2}; symmetric.
inline FourierState b1(const FourierState& u, const FourierState& v, double t) {
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t);
    return detail::gauge_out(kernels::b1_kernel(du, dv), t, u.real_valued() && v.real_valued());
}

// B2(u,v)_k = sum e^{i3kk1k2 t} u_{k1} v_{k2} / (k1 k2); symmetric.
inline FourierState b2(const FourierState& u, const FourierState& v, double t) {
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t);
    return detail::gauge_out(kernels::b2_kernel(du, dv), t, u.real_valued() && v.real_valued());
}

// R3(u,v,w)_k = sum_{k1+k2+k3=k} e^{i*cubic_phase*t} u_{k1} v_{k2} w_{k3} / k1.
inline FourierState r3(const FourierState& u, const FourierState& v, const FourierState& w,
                       double t) {
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t), dw = detail::gauge_in(w, t);
    return detail::gauge_out(kernels::trilinear_kernel(du, dv, dw, false, {}), t, false);
}

struct ResonanceSplit {
    FourierState res;   // triples with (k1+k2)(k2+k3)(k3+k1) = 0; phases are 1 there
    FourierState nres;  // complement, with oscillatory factors
};

inline ResonanceSplit resonance_split(const FourierState& u, const FourierState& v,
                                      const FourierState& w, double t) {
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t), dw = detail::gauge_in(w, t);
    kernels::TriOpts res_o, nres_o;
    res_o.filter = kernels::ResFilter::res_only;
    nres_o.filter = kernels::ResFilter::nres_only;
    return {detail::gauge_out(kernels::trilinear_kernel(du, dv, dw, false, res_o), t, false),
            detail::gauge_out(kernels::trilinear_kernel(du, dv, dw, false, nres_o), t, false)};
}

// A_res(v)_k = (v_k / k)(energy - |v_k|^2); the closed form of the resonant
// sum over S1..S6 for Hermitian v, with energy = ||v||_{H^0}^2 (instantaneous)
// or ||v^0||_{H^0}^2 (conserved variant).
inline FourierState a_res(const FourierState& v, double energy) {
    if (energy < 0.0) throw std::invalid_argument("a_res: energy must be >= 0");
    FourierState::Map m;
    for (const auto& [k, a] : v.entries()) {
        Complex z = a / static_cast<double>(k) * (energy - std::norm(a));
        if (z != Complex{0.0, 0.0}) m.emplace(k, z);
    }
    return FourierState(std::move(m), false);
}

// B3: nonresonant trilinear sum with denominator k1 (k1+k2)(k2+k3)(k3+k1).
inline FourierState b3(const FourierState& u, const FourierState& v, const FourierState& w,
                       double t) {
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t), dw = detail::gauge_in(w, t);
    kernels::TriOpts o;
    o.filter = kernels::ResFilter::nres_only;
    return detail::gauge_out(kernels::trilinear_kernel(du, dv, dw, true, o), t, false);
}

struct B4Result {
    FourierState part1;  // B4^1
    FourierState part2;  // B4^2
    FourierState total;  // (1/2) part1 + part2
};

// B4 = (1/2)B4^1 + B4^2, the two nonresonant quadruple sums.  The
// nonresonance set is the non-vanishing of the shared denominator factors
// (k1+k2)(k1+k3+k4)(k2+k3+k4).
inline B4Result b4(const FourierState& u, const FourierState& v, const FourierState& w,
                   const FourierState& phi, double t) {
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t), dw = detail::gauge_in(w, t),
         dp = detail::gauge_in(phi, t);
    B4Result out;
    out.part1 = detail::gauge_out(kernels::b41_kernel(du, dv, dw, dp, {}), t, false);
    out.part2 = detail::gauge_out(kernels::b42_kernel(du, dv, dw, dp, {}), t, false);
    out.total = Complex{0.5, 0.0} * out.part1 + out.part2;
    return out;
}

// Nonresonant part of R3 (same sum as resonance_split().nres).
inline FourierState r3_nres(const FourierState& u, const FourierState& v, const FourierState& w,
                            double t) {
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t), dw = detail::gauge_in(w, t);
    kernels::TriOpts o;
    o.filter = kernels::ResFilter::nres_only;
    return detail::gauge_out(kernels::trilinear_kernel(du, dv, dw, false, o), t, false);
}

// n-split family: Pi_{-n} on arguments 2 and 3 keeps the part with only one
// smoothed argument; r3_nres1_n is the six-term complement.
inline FourierState r3_nres0_n(const FourierState& u, const FourierState& v,
                               const FourierState& w, double t, int n) {
    if (n < 0) throw std::invalid_argument("r3_nres0_n: n must be >= 0");
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t), dw = detail::gauge_in(w, t);
    kernels::TriOpts o;
    o.filter = kernels::ResFilter::nres_only;
    o.split = kernels::Split23::both_high;
    o.split_n = n;
    return detail::gauge_out(kernels::trilinear_kernel(du, dv, dw, false, o), t, false);
}

inline FourierState r3_nres1_n(const FourierState& u, const FourierState& v,
                               const FourierState& w, double t, int n) {
    if (n < 0) throw std::invalid_argument("r3_nres1_n: n must be >= 0");
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t), dw = detail::gauge_in(w, t);
    kernels::TriOpts o;
    o.filter = kernels::ResFilter::nres_only;
    o.split = kernels::Split23::complement;
    o.split_n = n;
    return detail::gauge_out(kernels::trilinear_kernel(du, dv, dw, false, o), t, false);
}

// B30^(n): B3 denominators, arguments 2 and 3 restricted to |k| > n.
inline FourierState b30_n(const FourierState& u, const FourierState& v, const FourierState& w,
                          double t, int n) {
    if (n < 0) throw std::invalid_argument("b30_n: n must be >= 0");
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t), dw = detail::gauge_in(w, t);
    kernels::TriOpts o;
    o.filter = kernels::ResFilter::nres_only;
    o.split = kernels::Split23::both_high;
    o.split_n = n;
    return detail::gauge_out(kernels::trilinear_kernel(du, dv, dw, true, o), t, false);
}

// B40^(n) = (1/2)B40^1 + B40^2: B4^1 with Pi_{-n} on legs 1,2; B4^2 with
// Pi_{-n} on leg 2 and the pair projection |k3+k4| > n.
inline B4Result b40_n(const FourierState& u, const FourierState& v, const FourierState& w,
                      const FourierState& phi, double t, int n) {
    if (n < 0) throw std::invalid_argument("b40_n: n must be >= 0");
    auto du = detail::gauge_in(u, t), dv = detail::gauge_in(v, t), dw = detail::gauge_in(w, t),
         dp = detail::gauge_in(phi, t);
    kernels::Quad1Opts o1;
    o1.lowcut1 = n;
    o1.lowcut2 = n;
    kernels::Quad2Opts o2;
    o2.lowcut2 = n;
    o2.q_abs_min_excl = n;
    B4Result out;
    out.part1 = detail::gauge_out(kernels::b41_kernel(du, dv, dw, dp, o1), t, false);
    out.part2 = detail::gauge_out(kernels::b42_kernel(du, dv, dw, dp, o2), t, false);
    out.total = Complex{0.5, 0.0} * out.part1 + out.part2;
    return out;
}

// ---- Resonant triple enumeration ----------------------------------------

enum class ResonanceClass { S1, S2, S3, S4, S5, S6 };

struct ResonantTriple {
    int k1, k2, k3;
    ResonanceClass cls;
};

// Classifies a triple satisfying the resonance condition; throws otherwise.
inline ResonanceClass classify_resonant(int k1, int k2, int k3) {
    int k = k1 + k2 + k3;
    if (k == 0) throw std::invalid_argument("classify_resonant: k = 0");
    bool f12 = (k1 + k2) == 0, f23 = (k2 + k3) == 0, f31 = (k3 + k1) == 0;
    if (!f12 && !f23 && !f31)
        throw std::invalid_argument("classify_resonant: triple is nonresonant");
    if (f12 && f23) return ResonanceClass::S1;
    if (f12 && f31) return ResonanceClass::S2;
    if (f23 && f31) return ResonanceClass::S3;
    if (f12) return ResonanceClass::S4;
    if (f23) return ResonanceClass::S5;
    return ResonanceClass::S6;
}

// All resonant triples with k1+k2+k3 = k and |ki| <= support.
inline std::vector<ResonantTriple> enumerate_resonant(int k, int support) {
    if (k == 0) throw std::invalid_argument("enumerate_resonant: k = 0");
    std::vector<ResonantTriple> out;
    if (std::abs(k) > support) return out;
    out.push_back({k, -k, k, ResonanceClass::S1});
    out.push_back({-k, k, k, ResonanceClass::S2});
    out.push_back({k, k, -k, ResonanceClass::S3});
    for (int j = -support; j <= support; ++j) {
        if (j == 0 || std::abs(j) == std::abs(k)) continue;
        out.push_back({j, -j, k, ResonanceClass::S4});
        out.push_back({k, j, -j, ResonanceClass::S5});
        out.push_back({j, k, -j, ResonanceClass::S6});
    }
    return out;
}

}  // namespace kdv
