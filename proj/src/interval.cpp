#include "interval.hpp"

#include <algorithm>

#include "errors.hpp"

namespace cantordist {

Iv::Iv(Rat a, Rat b) : lo(std::move(a)), hi(std::move(b)) {
    if (lo > hi) fail(Errc::InvalidInterval, "interval endpoints out of order");
}

bool operator==(const Iv& a, const Iv& b) { return a.lo == b.lo && a.hi == b.hi; }

Iv iv_add(const Iv& a, const Iv& b) { return Iv(a.lo + b.lo, a.hi + b.hi); }
Iv iv_sub(const Iv& a, const Iv& b) { return Iv(a.lo - b.hi, a.hi - b.lo); }
Iv iv_neg(const Iv& a) { return Iv(-a.hi, -a.lo); }

Iv iv_mul(const Iv& a, const Iv& b) {
    Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return Iv(rat_min(rat_min(p1, p2), rat_min(p3, p4)),
              rat_max(rat_max(p1, p2), rat_max(p3, p4)));
}

Iv iv_div(const Iv& a, const Iv& b) {
    if (b.contains(Rat(0))) fail(Errc::InvalidInterval, "division by interval containing zero");
    return iv_mul(a, Iv(Rat(1) / b.hi, Rat(1) / b.lo));
}

Iv iv_abs(const Iv& a) {
    if (a.lo >= 0) return a;
    if (a.hi <= 0) return iv_neg(a);
    return Iv(Rat(0), rat_max(Rat(-a.lo), a.hi));
}

Iv iv_min(const Iv& a, const Iv& b) { return Iv(rat_min(a.lo, b.lo), rat_min(a.hi, b.hi)); }
Iv iv_max(const Iv& a, const Iv& b) { return Iv(rat_max(a.lo, b.lo), rat_max(a.hi, b.hi)); }

Iv iv_pow_uint(const Iv& a, unsigned long k) {
    if (k == 0) return Iv::point(Rat(1));
    Rat pl = rat_pow_uint(a.lo, k), ph = rat_pow_uint(a.hi, k);
    if (k % 2 == 1) return Iv(pl, ph);
    if (a.lo >= 0) return Iv(pl, ph);
    if (a.hi <= 0) return Iv(ph, pl);
    return Iv(Rat(0), rat_max(pl, ph));
}

Iv iv_hull(const Iv& a, const Iv& b) {
    return Iv(rat_min(a.lo, b.lo), rat_max(a.hi, b.hi));
}

std::optional<Iv> iv_intersect(const Iv& a, const Iv& b) {
    Rat lo = rat_max(a.lo, b.lo), hi = rat_min(a.hi, b.hi);
    if (lo > hi) return std::nullopt;
    return Iv(lo, hi);
}

Iv iv_sqrt_enclose(const Iv& a, unsigned prec_bits) {
    if (a.lo < 0) fail(Errc::InvalidInterval, "sqrt of interval with negative lower end");
    return Iv(rat_sqrt_enclose(a.lo, prec_bits).first, rat_sqrt_enclose(a.hi, prec_bits).second);
}

IntervalUnion::IntervalUnion(std::vector<Iv> parts) : parts_(std::move(parts)) { normalize(); }

void IntervalUnion::add(const Iv& p) {
    parts_.push_back(p);
    normalize();
}

void IntervalUnion::normalize() {
    if (parts_.empty()) return;
    std::sort(parts_.begin(), parts_.end(),
              [](const Iv& a, const Iv& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
    std::vector<Iv> merged;
    merged.push_back(parts_.front());
    for (size_t i = 1; i < parts_.size(); ++i) {
        Iv& last = merged.back();
        if (parts_[i].lo <= last.hi) {
            if (parts_[i].hi > last.hi) last.hi = parts_[i].hi;
        } else {
            merged.push_back(parts_[i]);
        }
    }
    parts_ = std::move(merged);
}

bool IntervalUnion::covers(const Iv& target) const {
    return component_containing(target).has_value();
}

std::optional<Iv> IntervalUnion::component_containing(const Iv& target) const {
    for (const Iv& p : parts_)
        if (p.contains(target)) return p;
    return std::nullopt;
}

bool operator==(const Box2& a, const Box2& b) { return a.x == b.x && a.y == b.y; }

}  // namespace cantordist
