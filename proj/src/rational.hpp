#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>

namespace cantordist {

// Exact rational scalar. All certificate-bearing arithmetic runs on Rat;
// doubles appear only in the fast search kernel and in non-certified reports.
using Rat = mpq_class;

// Accepts "p/q", integer, and decimal literals with optional exponent
// ("1/3", "-2", "0.25", "2.5e-3"). Throws ConfigError on anything else.
Rat rat_from_string(const std::string& text);

// Canonical "p" or "p/q" with positive denominator, no leading zeros.
std::string rat_to_string(const Rat& x);

// Nearest doubles bracketing x: to_double_down(x) <= x <= to_double_up(x).
double rat_to_double_down(const Rat& x);
double rat_to_double_up(const Rat& x);

Rat rat_abs(const Rat& x);
Rat rat_min(const Rat& a, const Rat& b);
Rat rat_max(const Rat& a, const Rat& b);
Rat rat_pow_uint(const Rat& x, unsigned long k);

// Certified enclosure lo <= x^(1/k) <= hi with hi - lo <= 2^-prec_bits.
// Exact when x is a perfect k-th power of a rational. Requires x >= 0.
std::pair<Rat, Rat> rat_root_enclose(const Rat& x, unsigned long k, unsigned prec_bits);

inline std::pair<Rat, Rat> rat_sqrt_enclose(const Rat& x, unsigned prec_bits) {
    return rat_root_enclose(x, 2, prec_bits);
}

}  // namespace cantordist
