#include "phi.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "kernels.hpp"

namespace cantordist {

namespace {

// distance from the point t to the interval b (0 when t lies inside)
Rat dist_point_iv(const Rat& t, const Iv& b) {
    if (t < b.lo) return Rat(b.lo - t);
    if (t > b.hi) return Rat(t - b.hi);
    return Rat(0);
}

// max_{w in b} |w - t|; convex in t, so it is one of the endpoint deviations
Rat maxdev_point_iv(const Rat& t, const Iv& b) {
    return rat_max(rat_abs(Rat(b.lo - t)), rat_abs(Rat(b.hi - t)));
}

// gap between two intervals (0 when they intersect)
Rat dist_iv_iv(const Iv& u, const Iv& b) {
    if (u.hi < b.lo) return Rat(b.lo - u.hi);
    if (b.hi < u.lo) return Rat(u.lo - b.hi);
    return Rat(0);
}

// max_{z in u, w in b} |w - z|
Rat maxdev_iv_iv(const Iv& u, const Iv& b) {
    return rat_max(rat_abs(Rat(b.hi - u.lo)), rat_abs(Rat(b.lo - u.hi)));
}

Rat clamp_rat(const Rat& t, const Iv& u) { return rat_min(rat_max(t, u.lo), u.hi); }

// Encloses the k-th root of an exact nonnegative key. Exact mode takes the
// root at the kernel precision; fast mode first rounds the key outward to
// doubles so every later step is plain hardware arithmetic.
Iv enclose_root(const Rat& key, unsigned long k, unsigned prec_bits, ArithMode mode) {
    if (k == 1) return Iv(key, key);
    if (mode == ArithMode::Exact) {
        auto r = rat_root_enclose(key, k, prec_bits);
        return Iv(r.first, r.second);
    }
    FastKernel fk;
    auto lo = fk.root_enclose(rat_to_double_down(key), k);
    auto hi = fk.root_enclose(rat_to_double_up(key), k);
    return Iv(Rat(lo.first), Rat(hi.second));
}

// min / max of z*w over w in b for fixed z (linear in w)
Rat dot_min_fixed_z(const Rat& z, const Iv& b) { return rat_min(Rat(z * b.lo), Rat(z * b.hi)); }
Rat dot_max_fixed_z(const Rat& z, const Iv& b) { return rat_max(Rat(z * b.lo), Rat(z * b.hi)); }

}  // namespace

PhiSpec PhiSpec::pnorm(unsigned p) {
    if (p < 1) fail(Errc::MalformedSpec, "pnorm exponent must be >= 1");
    // p = 2 is the euclidean map; keep one canonical representation
    return {p == 2 ? PhiKind::Euclidean : PhiKind::PNorm, p};
}

bool operator==(const PhiSpec& a, const PhiSpec& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == PhiKind::Dot) return true;
    return a.p == b.p;
}

Rat phi_power_key(const PhiSpec& phi, const Pt2& z, const Pt2& w) {
    if (phi.kind == PhiKind::Dot) return Rat(z.x * w.x + z.y * w.y);
    Rat dx = rat_abs(Rat(w.x - z.x));
    Rat dy = rat_abs(Rat(w.y - z.y));
    return Rat(rat_pow_uint(dx, phi.p) + rat_pow_uint(dy, phi.p));
}

Iv phi_value_from_key(const PhiSpec& phi, const Rat& key, unsigned prec_bits) {
    if (phi.kind == PhiKind::Dot) return Iv(key, key);
    if (key < 0) fail(Errc::Internal, "negative norm power key");
    return enclose_root(key, phi.p, prec_bits, ArithMode::Exact);
}

double phi_eval(const PhiSpec& phi, double zx, double zy, double wx, double wy) {
    if (phi.kind == PhiKind::Dot) return zx * wx + zy * wy;
    double dx = std::fabs(wx - zx), dy = std::fabs(wy - zy);
    if (phi.p == 1) return dx + dy;
    if (phi.p == 2) return std::hypot(dx, dy);
    double s = std::pow(dx, double(phi.p)) + std::pow(dy, double(phi.p));
    return std::pow(s, 1.0 / double(phi.p));
}

Iv hull_image(const PhiSpec& phi, const Pt2& z, const Box2& B, unsigned prec_bits) {
    if (phi.kind == PhiKind::Dot) {
        Rat lo = Rat(dot_min_fixed_z(z.x, B.x) + dot_min_fixed_z(z.y, B.y));
        Rat hi = Rat(dot_max_fixed_z(z.x, B.x) + dot_max_fixed_z(z.y, B.y));
        return Iv(lo, hi);
    }
    Rat min_key = Rat(rat_pow_uint(dist_point_iv(z.x, B.x), phi.p) +
                      rat_pow_uint(dist_point_iv(z.y, B.y), phi.p));
    Rat max_key = Rat(rat_pow_uint(maxdev_point_iv(z.x, B.x), phi.p) +
                      rat_pow_uint(maxdev_point_iv(z.y, B.y), phi.p));
    Rat lo = rat_root_enclose(min_key, phi.p, prec_bits).first;
    Rat hi = rat_root_enclose(max_key, phi.p, prec_bits).second;
    return Iv(lo, hi);
}

Iv hull_image_outer(const PhiSpec& phi, const Box2& U, const Box2& B, unsigned prec_bits) {
    if (phi.kind == PhiKind::Dot) {
        return iv_add(iv_mul(U.x, B.x), iv_mul(U.y, B.y));
    }
    Rat min_key = Rat(rat_pow_uint(dist_iv_iv(U.x, B.x), phi.p) +
                      rat_pow_uint(dist_iv_iv(U.y, B.y), phi.p));
    Rat max_key = Rat(rat_pow_uint(maxdev_iv_iv(U.x, B.x), phi.p) +
                      rat_pow_uint(maxdev_iv_iv(U.y, B.y), phi.p));
    Rat lo = rat_root_enclose(min_key, phi.p, prec_bits).first;
    Rat hi = rat_root_enclose(max_key, phi.p, prec_bits).second;
    return Iv(lo, hi);
}

std::optional<Iv> RobustImage::inner() const {
    if (lower_encl.hi > upper_encl.lo) return std::nullopt;
    return Iv(lower_encl.hi, upper_encl.lo);
}

RobustImage robust_image(const PhiSpec& phi, const Box2& U, const Box2& B, unsigned prec_bits,
                         ArithMode mode) {
    if (phi.kind == PhiKind::Dot) {
        // min_w z.w is concave piecewise-linear per pin coordinate with its
        // kink at z_i = 0, so the sup over U sits at an endpoint or at 0;
        // dually for the convex max_w z.w and the inf over U.
        Rat supmin(0), infmax(0);
        const Iv* us[2] = {&U.x, &U.y};
        const Iv* bs[2] = {&B.x, &B.y};
        for (int i = 0; i < 2; ++i) {
            const Iv& u = *us[i];
            const Iv& b = *bs[i];
            Rat mn = rat_max(dot_min_fixed_z(u.lo, b), dot_min_fixed_z(u.hi, b));
            Rat mx = rat_min(dot_max_fixed_z(u.lo, b), dot_max_fixed_z(u.hi, b));
            if (u.lo < 0 && 0 < u.hi) {
                mn = rat_max(mn, Rat(0));
                mx = rat_min(mx, Rat(0));
            }
            supmin = Rat(supmin + mn);
            infmax = Rat(infmax + mx);
        }
        if (mode == ArithMode::Exact) {
            return {Iv(supmin, supmin), Iv(infmax, infmax)};
        }
        return {Iv(Rat(rat_to_double_down(supmin)), Rat(rat_to_double_up(supmin))),
                Iv(Rat(rat_to_double_down(infmax)), Rat(rat_to_double_up(infmax)))};
    }
    // Norms: the inner optima split per coordinate. min_w |w-z|^p maxes over
    // z at an endpoint of U (distance to a box is convex in the pin), and
    // max_w |w-z|^p mins at the projection of B's midpoint onto U (the max
    // deviation is convex with its minimum at the midpoint).
    Rat supmin_key(0), infmax_key(0);
    const Iv* us[2] = {&U.x, &U.y};
    const Iv* bs[2] = {&B.x, &B.y};
    for (int i = 0; i < 2; ++i) {
        const Iv& u = *us[i];
        const Iv& b = *bs[i];
        Rat far_lo = dist_point_iv(u.lo, b);
        Rat far_hi = dist_point_iv(u.hi, b);
        supmin_key = Rat(supmin_key + rat_pow_uint(rat_max(far_lo, far_hi), phi.p));
        Rat zstar = clamp_rat(b.mid(), u);
        infmax_key = Rat(infmax_key + rat_pow_uint(maxdev_point_iv(zstar, b), phi.p));
    }
    return {enclose_root(supmin_key, phi.p, prec_bits, mode),
            enclose_root(infmax_key, phi.p, prec_bits, mode)};
}

namespace {

PartialSign weak_sign(const Iv& n) {
    if (n.lo >= 0 && n.hi > 0) return PartialSign::Positive;
    if (n.hi <= 0 && n.lo < 0) return PartialSign::Negative;
    return PartialSign::Indeterminate;
}

}  // namespace

SignReport check_derivative_condition(const PhiSpec& phi, const Box2& pin, const Box2& arg,
                                      unsigned prec_bits) {
    SignReport rep;
    if (phi.kind == PhiKind::Dot) {
        // d(z.w)/dw_i = z_i: sign and magnitude come straight off the pin box.
        const Iv* us[2] = {&pin.x, &pin.y};
        for (int i = 0; i < 2; ++i) {
            rep.sign[i] = weak_sign(*us[i]);
            rep.magnitude[i] = iv_abs(*us[i]);
        }
        return rep;
    }
    // d phi/dw_i = sign(w_i - z_i) * (|w_i - z_i| / phi)^(p-1); the ratio
    // never exceeds 1, so the cap below only sharpens interval division.
    Iv d = hull_image_outer(phi, pin, arg, prec_bits);
    const Iv* us[2] = {&pin.x, &pin.y};
    const Iv* as[2] = {&arg.x, &arg.y};
    for (int i = 0; i < 2; ++i) {
        Iv n = iv_sub(*as[i], *us[i]);
        rep.sign[i] = weak_sign(n);
        if (d.hi == 0) {
            // phi vanishes identically: no derivative anywhere
            rep.sign[i] = PartialSign::Indeterminate;
            rep.magnitude[i] = Iv(Rat(0), Rat(1));
            continue;
        }
        Iv nabs = iv_abs(n);
        Rat ratio_lo = Rat(nabs.lo / d.hi);
        Rat ratio_hi = d.lo > 0 ? rat_min(Rat(1), Rat(nabs.hi / d.lo)) : Rat(1);
        rep.magnitude[i] = iv_pow_uint(Iv(ratio_lo, ratio_hi), phi.p - 1);
    }
    return rep;
}

std::vector<SignSplit> split_for_definite_signs(const PhiSpec& phi, const Box2& pin,
                                                const Box2& arg, unsigned prec_bits) {
    // Per coordinate, the segments of the box being cut; norms cut the
    // argument at the pin's endpoints, the dot map cuts the pin at zero.
    auto segments = [](const Iv& box, std::vector<Rat> cuts) {
        std::vector<Iv> segs;
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        Rat lo = box.lo;
        for (const Rat& c : cuts) {
            if (c <= box.lo || c >= box.hi) continue;
            segs.emplace_back(lo, c);
            lo = c;
        }
        segs.emplace_back(lo, box.hi);
        return segs;
    };

    std::vector<Iv> xs, ys;
    bool cut_arg = phi.kind != PhiKind::Dot;
    if (cut_arg) {
        xs = segments(arg.x, {pin.x.lo, pin.x.hi});
        ys = segments(arg.y, {pin.y.lo, pin.y.hi});
    } else {
        xs = segments(pin.x, {Rat(0)});
        ys = segments(pin.y, {Rat(0)});
    }

    std::vector<SignSplit> out;
    out.reserve(xs.size() * ys.size());
    for (const Iv& sx : xs) {
        for (const Iv& sy : ys) {
            Box2 piece{sx, sy};
            Box2 p = cut_arg ? pin : piece;
            Box2 a = cut_arg ? piece : arg;
            out.push_back({p, a, check_derivative_condition(phi, p, a, prec_bits)});
        }
    }
    return out;
}

}  // namespace cantordist
