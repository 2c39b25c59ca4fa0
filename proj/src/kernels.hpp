#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "errors.hpp"
#include "rational.hpp"

namespace cantordist {

// Exact backend: arbitrary-precision rationals.  Every directed primitive is
// exact except root extraction, which returns an enclosure of width at most
// 2^-sqrt_prec (and is exact for perfect powers).
struct ExactKernel {
    using Num = Rat;
    unsigned sqrt_prec = 64;

    Num from_rat_lo(const Rat& x) const { return x; }
    Num from_rat_hi(const Rat& x) const { return x; }
    Rat to_rat(const Num& x) const { return x; }
    Num add_lo(const Num& a, const Num& b) const { return a + b; }
    Num add_hi(const Num& a, const Num& b) const { return a + b; }
    Num sub_lo(const Num& a, const Num& b) const { return a - b; }
    Num sub_hi(const Num& a, const Num& b) const { return a - b; }
    Num mul_lo(const Num& a, const Num& b) const { return a * b; }
    Num mul_hi(const Num& a, const Num& b) const { return a * b; }
    Num half_lo(const Num& a) const { return a / 2; }
    Num half_hi(const Num& a) const { return a / 2; }
    // Nonnegative base only.
    Num pow_lo(const Num& a, unsigned long k) const { return rat_pow_uint(a, k); }
    Num pow_hi(const Num& a, unsigned long k) const { return rat_pow_uint(a, k); }
    std::pair<Num, Num> root_enclose(const Num& x, unsigned long k) const {
        return rat_root_enclose(x, k, sqrt_prec);
    }
};

// Float backend: doubles stepped one ulp outward after each operation, so
// every result brackets the exact value.  Used only for exploratory passes;
// anything emitted is re-derived with the exact kernel first.
struct FastKernel {
    using Num = double;

    static double down(double x) {
        return std::nextafter(x, -std::numeric_limits<double>::infinity());
    }
    static double up(double x) {
        return std::nextafter(x, std::numeric_limits<double>::infinity());
    }

    Num from_rat_lo(const Rat& x) const { return rat_to_double_down(x); }
    Num from_rat_hi(const Rat& x) const { return rat_to_double_up(x); }
    Rat to_rat(const Num& x) const { return Rat(x); }
    Num add_lo(Num a, Num b) const { return down(a + b); }
    Num add_hi(Num a, Num b) const { return up(a + b); }
    Num sub_lo(Num a, Num b) const { return down(a - b); }
    Num sub_hi(Num a, Num b) const { return up(a - b); }
    Num mul_lo(Num a, Num b) const { return down(a * b); }
    Num mul_hi(Num a, Num b) const { return up(a * b); }
    Num half_lo(Num a) const { return down(a / 2); }
    Num half_hi(Num a) const { return up(a / 2); }
    Num pow_lo(Num a, unsigned long k) const {
        Num r = 1.0;
        for (unsigned long i = 0; i < k; ++i) r = mul_lo(r, a);
        return std::max(r, 0.0);
    }
    Num pow_hi(Num a, unsigned long k) const {
        Num r = 1.0;
        for (unsigned long i = 0; i < k; ++i) r = mul_hi(r, a);
        return r;
    }
    // k-th root of x >= 0.  sqrt is correctly rounded, so one ulp suffices;
    // general k starts from pow() and certifies each bound by powering it
    // back with directed rounding.
    std::pair<Num, Num> root_enclose(Num x, unsigned long k) const {
        if (x < 0) x = 0;
        if (x == 0) return {0.0, 0.0};
        if (k == 1) return {x, x};
        if (k == 2) {
            double r = std::sqrt(x);
            return {std::max(0.0, down(r)), up(r)};
        }
        double r = std::pow(x, 1.0 / static_cast<double>(k));
        double lo = std::max(0.0, r), hi = std::max(r, 1e-300);
        for (int i = 0; i < 64 && pow_hi(lo, k) > x; ++i) lo = std::max(0.0, down(lo));
        for (int i = 0; i < 64 && pow_lo(hi, k) < x; ++i) hi = up(hi);
        if (pow_hi(lo, k) > x) lo = 0.0;
        if (pow_lo(hi, k) < x) hi = std::max(x, 1.0);
        return {lo, hi};
    }
};

// Interval with kernel-typed endpoints; every operation rounds outward, so a
// KIv computed from enclosures of its inputs encloses the exact value.  With
// ExactKernel the endpoints are exact (root aside).
template <class K>
struct KIv {
    typename K::Num lo, hi;
};

template <class K>
KIv<K> kiv_from(const K& k, const Rat& lo, const Rat& hi) {
    return {k.from_rat_lo(lo), k.from_rat_hi(hi)};
}

template <class K>
KIv<K> kiv_point(const K& k, const Rat& v) {
    return kiv_from(k, v, v);
}

template <class K>
KIv<K> kiv_add(const K& k, const KIv<K>& a, const KIv<K>& b) {
    return {k.add_lo(a.lo, b.lo), k.add_hi(a.hi, b.hi)};
}

template <class K>
KIv<K> kiv_sub(const K& k, const KIv<K>& a, const KIv<K>& b) {
    return {k.sub_lo(a.lo, b.hi), k.sub_hi(a.hi, b.lo)};
}

template <class K>
KIv<K> kiv_mul(const K& k, const KIv<K>& a, const KIv<K>& b) {
    using N = typename K::Num;
    N l = k.mul_lo(a.lo, b.lo);
    l = std::min(l, k.mul_lo(a.lo, b.hi));
    l = std::min(l, k.mul_lo(a.hi, b.lo));
    l = std::min(l, k.mul_lo(a.hi, b.hi));
    N h = k.mul_hi(a.lo, b.lo);
    h = std::max(h, k.mul_hi(a.lo, b.hi));
    h = std::max(h, k.mul_hi(a.hi, b.lo));
    h = std::max(h, k.mul_hi(a.hi, b.hi));
    return {l, h};
}

template <class K>
KIv<K> kiv_abs(const K&, const KIv<K>& a) {
    using N = typename K::Num;
    if (a.lo >= N(0)) return a;
    if (a.hi <= N(0)) return {N(-a.hi), N(-a.lo)};
    return {N(0), std::max<N>(N(-a.lo), a.hi)};
}

// Square: tighter than kiv_mul(a, a) when a straddles zero.
template <class K>
KIv<K> kiv_sq(const K& k, const KIv<K>& a) {
    KIv<K> m = kiv_abs(k, a);
    return {k.mul_lo(m.lo, m.lo), k.mul_hi(m.hi, m.hi)};
}

template <class K>
KIv<K> kiv_min(const K&, const KIv<K>& a, const KIv<K>& b) {
    return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

template <class K>
KIv<K> kiv_max(const K&, const KIv<K>& a, const KIv<K>& b) {
    return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

template <class K>
KIv<K> kiv_half(const K& k, const KIv<K>& a) {
    return {k.half_lo(a.lo), k.half_hi(a.hi)};
}

// Nonnegative base required (lo >= 0 after clamping a tiny negative slack).
template <class K>
KIv<K> kiv_pow(const K& k, const KIv<K>& a, unsigned long p) {
    using N = typename K::Num;
    N lo = std::max(a.lo, N(0));
    if (a.hi < N(0)) fail(Errc::Internal, "power of negative enclosure");
    return {k.pow_lo(lo, p), k.pow_hi(a.hi, p)};
}

template <class K>
KIv<K> kiv_root(const K& k, const KIv<K>& a, unsigned long p) {
    using N = typename K::Num;
    N lo = std::max(a.lo, N(0));
    if (a.hi < N(0)) fail(Errc::Internal, "root of negative enclosure");
    return {k.root_enclose(lo, p).first, k.root_enclose(a.hi, p).second};
}

template <class K>
KIv<K> kiv_clamp(const K& k, const KIv<K>& x, const KIv<K>& lo, const KIv<K>& hi) {
    return kiv_min(k, kiv_max(k, x, lo), hi);
}

}  // namespace cantordist
