#pragma once

#include <optional>
#include <vector>

#include "interval.hpp"

namespace cantordist {

// The distance-like maps the toolkit certifies: the Euclidean plane norm of
// w - z, a coordinatewise p-norm (integer p >= 1), or the bilinear pin-dot
// z . w. All act on a pin z in R^2 and an argument w in R^2.
enum class PhiKind { Euclidean, PNorm, Dot };

struct PhiSpec {
    PhiKind kind = PhiKind::Euclidean;
    unsigned p = 2;  // norm exponent; ignored for Dot
    static PhiSpec euclidean() { return {PhiKind::Euclidean, 2}; }
    static PhiSpec pnorm(unsigned p);
    static PhiSpec dot() { return {PhiKind::Dot, 1}; }
    // the root order turning a power key back into a value (1 for Dot)
    unsigned root_order() const { return kind == PhiKind::Dot ? 1 : p; }
};

bool operator==(const PhiSpec& a, const PhiSpec& b);

struct Pt2 {
    Rat x, y;
};

// Exact scalar that orders exactly like phi: sum |w_i - z_i|^p for norms
// (the p-th power of the value), z.w for the dot map.
Rat phi_power_key(const PhiSpec& phi, const Pt2& z, const Pt2& w);
// Enclosure of the phi-value a power key encodes (k-th root for norms).
Iv phi_value_from_key(const PhiSpec& phi, const Rat& key, unsigned prec_bits);
// Plain double evaluation for the non-rigorous oracle side.
double phi_eval(const PhiSpec& phi, double zx, double zy, double wx, double wy);

// Tight outer enclosure of { phi(z, w) : w in B } for a fixed pin z; the
// squared/p-powered endpoints are exact, only the final root is enclosed.
Iv hull_image(const PhiSpec& phi, const Pt2& z, const Box2& B, unsigned prec_bits);
// Outer enclosure of { phi(z, w) : z in U, w in B }.
Iv hull_image_outer(const PhiSpec& phi, const Box2& U, const Box2& B, unsigned prec_bits);

enum class ArithMode { Exact, Fast };

// Enclosures of the two critical values of the robust image
//   [ sup_{z in U} min_{w in B} phi_z(w),  inf_{z in U} max_{w in B} phi_z(w) ]:
// every t between them is attained by phi_z on B for every z in U.
struct RobustImage {
    Iv lower_encl;  // encloses the sup-min
    Iv upper_encl;  // encloses the inf-max
    // Certified subset of every pinned image (empty if the pins disagree
    // too much): [lower_encl.hi, upper_encl.lo].
    std::optional<Iv> inner() const;
    // Outer bracket [lower_encl.lo, upper_encl.hi] for diagnostics.
    Iv outer() const { return Iv(lower_encl.lo, upper_encl.hi); }
};

// The sup-min and inf-max power keys are exact rational optimizations over
// box corners and midpoints in both modes; the mode only chooses how the
// final root is enclosed. Fast-mode enclosures still contain the true value.
RobustImage robust_image(const PhiSpec& phi, const Box2& U, const Box2& B, unsigned prec_bits,
                         ArithMode mode);

// Sign of d phi/d w_i over pin x arg, per argument coordinate. Definite
// means the partial does not vanish on the interior (it may touch zero on
// the boundary; rules that need a strictly positive floor must additionally
// check magnitude.lo > 0).
enum class PartialSign { Positive, Negative, Indeterminate };

struct SignReport {
    PartialSign sign[2] = {PartialSign::Indeterminate, PartialSign::Indeterminate};
    Iv magnitude[2];  // enclosure of |d phi/d w_i| over pin x arg
    bool definite(unsigned i) const { return sign[i] != PartialSign::Indeterminate; }
    bool both_definite() const { return definite(0) && definite(1); }
};

SignReport check_derivative_condition(const PhiSpec& phi, const Box2& pin, const Box2& arg,
                                      unsigned prec_bits);

// Subdivision along the zero locus of the partials: norms cut the argument
// box at the pin's endpoints, the dot map cuts the pin box at zero. Every
// returned piece carries its own report; pieces strictly inside the pin
// projection (norms) stay indeterminate and are returned as such.
struct SignSplit {
    Box2 pin;
    Box2 arg;
    SignReport report;
};

std::vector<SignSplit> split_for_definite_signs(const PhiSpec& phi, const Box2& pin,
                                                const Box2& arg, unsigned prec_bits);

}  // namespace cantordist
