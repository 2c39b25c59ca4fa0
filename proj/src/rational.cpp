#include "rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "errors.hpp"

namespace cantordist {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Rat parse_fraction(const std::string& text, size_t slash) {
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    bool neg = false;
    if (!num.empty() && (num[0] == '+' || num[0] == '-')) {
        neg = num[0] == '-';
        num = num.substr(1);
    }
    if (!all_digits(num) || !all_digits(den))
        fail(Errc::ConfigError, "bad rational literal: " + text);
    mpz_class n(num, 10), d(den, 10);
    if (d == 0) fail(Errc::ConfigError, "zero denominator: " + text);
    Rat r(n, d);
    r.canonicalize();
    if (neg) r = -r;
    return r;
}

Rat parse_decimal(const std::string& text) {
    size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_len = 0;
    bool saw_digit = false, saw_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            saw_digit = true;
            if (saw_dot) ++frac_len;
        } else if (c == '.' && !saw_dot) {
            saw_dot = true;
        } else {
            break;
        }
    }
    long exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            eneg = text[i] == '-';
            ++i;
        }
        std::string e;
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) break;
            e += text[i];
        }
        if (e.empty() || e.size() > 6) fail(Errc::ConfigError, "bad exponent: " + text);
        exp10 = std::strtol(e.c_str(), nullptr, 10);
        if (eneg) exp10 = -exp10;
    }
    if (!saw_digit || i != text.size())
        fail(Errc::ConfigError, "bad numeric literal: " + text);
    mpz_class mantissa(digits.empty() ? "0" : digits, 10);
    long shift = exp10 - frac_len;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
    Rat r;
    if (shift >= 0)
        r = Rat(mantissa * pow10);
    else
        r = Rat(mantissa, pow10);
    r.canonicalize();
    if (neg) r = -r;
    return r;
}

}  // namespace

Rat rat_from_string(const std::string& raw) {
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) text += c;
    if (text.empty()) fail(Errc::ConfigError, "empty numeric literal");
    size_t slash = text.find('/');
    if (slash != std::string::npos) return parse_fraction(text, slash);
    return parse_decimal(text);
}

std::string rat_to_string(const Rat& x) {
    return x.get_str();
}

namespace {

double directed(const Rat& x, bool down) {
    double d = mpq_get_d(x.get_mpq_t());
    if (!std::isfinite(d))
        fail(Errc::Internal, "rational out of double range");
    Rat dr(d);
    if (down) {
        if (dr > x) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
    } else {
        if (dr < x) d = std::nextafter(d, std::numeric_limits<double>::infinity());
    }
    return d;
}

}  // namespace

double rat_to_double_down(const Rat& x) { return directed(x, true); }
double rat_to_double_up(const Rat& x) { return directed(x, false); }

Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }
Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
Rat rat_max(const Rat& a, const Rat& b) { return a > b ? a : b; }

Rat rat_pow_uint(const Rat& x, unsigned long k) {
    Rat out;
    mpz_pow_ui(out.get_num_mpz_t(), x.get_num_mpz_t(), k);
    mpz_pow_ui(out.get_den_mpz_t(), x.get_den_mpz_t(), k);
    out.canonicalize();
    return out;
}

std::pair<Rat, Rat> rat_root_enclose(const Rat& x, unsigned long k, unsigned prec_bits) {
    if (x < 0) fail(Errc::InvalidInterval, "root of negative value");
    if (k == 0) fail(Errc::Internal, "zeroth root");
    if (x == 0) return {Rat(0), Rat(0)};
    if (k == 1) return {x, x};
    const mpz_class& p = x.get_num();
    const mpz_class& q = x.get_den();
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), 2, prec_bits);
    // x^(1/k) = (p q^{k-1})^(1/k) / q, so with m = p q^{k-1} t^k and
    // s = floor(m^(1/k)):  s/(q t) <= x^(1/k) <= (s+1)/(q t), width 1/(q t).
    mpz_class qk1;
    mpz_pow_ui(qk1.get_mpz_t(), q.get_mpz_t(), k - 1);
    mpz_class tk;
    mpz_pow_ui(tk.get_mpz_t(), t.get_mpz_t(), k);
    mpz_class m = p * qk1 * tk;
    mpz_class s;
    bool exact = mpz_root(s.get_mpz_t(), m.get_mpz_t(), k) != 0;
    mpz_class qt = q * t;
    Rat lo(s, qt);
    lo.canonicalize();
    if (exact) return {lo, lo};
    Rat hi(s + 1, qt);
    hi.canonicalize();
    return {lo, hi};
}

}  // namespace cantordist
