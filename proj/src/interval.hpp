#pragma once

#include <optional>
#include <vector>

#include "rational.hpp"

namespace cantordist {

// Closed interval [lo, hi] with exact rational endpoints; lo <= hi always.
struct Iv {
    Rat lo, hi;
    Iv() : lo(0), hi(0) {}
    Iv(Rat a, Rat b);
    static Iv point(const Rat& v) { return Iv(v, v); }
    Rat width() const { return Rat(hi - lo); }
    Rat mid() const { return Rat((lo + hi) / 2); }
    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
    bool contains(const Iv& o) const { return lo <= o.lo && o.hi <= hi; }
    bool intersects(const Iv& o) const { return lo <= o.hi && o.lo <= hi; }
};

bool operator==(const Iv& a, const Iv& b);

Iv iv_add(const Iv& a, const Iv& b);
Iv iv_sub(const Iv& a, const Iv& b);
Iv iv_neg(const Iv& a);
Iv iv_mul(const Iv& a, const Iv& b);
Iv iv_div(const Iv& a, const Iv& b);  // requires 0 outside b
Iv iv_abs(const Iv& a);
Iv iv_min(const Iv& a, const Iv& b);
Iv iv_max(const Iv& a, const Iv& b);
Iv iv_pow_uint(const Iv& a, unsigned long k);
Iv iv_hull(const Iv& a, const Iv& b);
std::optional<Iv> iv_intersect(const Iv& a, const Iv& b);
// Outer enclosure of sqrt over a; requires a.lo >= 0.
Iv iv_sqrt_enclose(const Iv& a, unsigned prec_bits);

// Finite union of closed intervals, kept sorted with overlapping or abutting
// parts merged.
class IntervalUnion {
  public:
    IntervalUnion() = default;
    explicit IntervalUnion(std::vector<Iv> parts);
    void add(const Iv& p);
    const std::vector<Iv>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    bool covers(const Iv& target) const;
    // The merged part containing target, if any single part does.
    std::optional<Iv> component_containing(const Iv& target) const;

  private:
    void normalize();
    std::vector<Iv> parts_;
};

// Axis-aligned rectangle U_x x U_y.
struct Box2 {
    Iv x, y;
    bool contains(const Box2& o) const { return x.contains(o.x) && y.contains(o.y); }
};

bool operator==(const Box2& a, const Box2& b);

}  // namespace cantordist
