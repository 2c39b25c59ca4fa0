#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "errors.hpp"
#include "interval.hpp"
#include "kernels.hpp"
#include "rational.hpp"

using namespace cantordist;

namespace {

std::mt19937_64 rng(0x5eedULL);

Rat random_rat(long num_mag = 1'000'000, long den_mag = 1'000'000) {
    std::uniform_int_distribution<long> num(-num_mag, num_mag);
    std::uniform_int_distribution<long> den(1, den_mag);
    Rat r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

Iv random_iv() {
    Rat a = random_rat(), b = random_rat();
    return a <= b ? Iv(a, b) : Iv(b, a);
}

}  // namespace

TEST_CASE("rational parsing") {
    CHECK(rat_from_string("1/3") == Rat(1, 3));
    CHECK(rat_from_string("-2/6") == Rat(-1, 3));
    CHECK(rat_from_string("+4/8") == Rat(1, 2));
    CHECK(rat_from_string("7") == Rat(7));
    CHECK(rat_from_string("-0") == Rat(0));
    CHECK(rat_from_string("0.25") == Rat(1, 4));
    CHECK(rat_from_string("-1.5") == Rat(-3, 2));
    CHECK(rat_from_string("2.5e-3") == Rat(1, 400));
    CHECK(rat_from_string("1e2") == Rat(100));
    CHECK(rat_from_string("1.25E+1") == Rat(25, 2));
    CHECK(rat_from_string(" 3 / 9 ") == Rat(1, 3));
    CHECK(rat_to_string(Rat(-5, 7)) == "-5/7");
    CHECK(rat_to_string(Rat(4)) == "4");
    CHECK_THROWS_AS(rat_from_string("1/0"), DomainError);
    CHECK_THROWS_AS(rat_from_string(""), DomainError);
    CHECK_THROWS_AS(rat_from_string("abc"), DomainError);
    CHECK_THROWS_AS(rat_from_string("1.2.3"), DomainError);
    CHECK_THROWS_AS(rat_from_string("1e"), DomainError);
    CHECK_THROWS_AS(rat_from_string("2/-3"), DomainError);
}

TEST_CASE("directed double conversion brackets the exact value") {
    int inexact = 0;
    for (int i = 0; i < 100000; ++i) {
        Rat x = random_rat();
        double lo = rat_to_double_down(x), hi = rat_to_double_up(x);
        CHECK(Rat(lo) <= x);
        CHECK(x <= Rat(hi));
        if (Rat(lo) == x) {
            CHECK(lo == hi);
        } else {
            ++inexact;
            CHECK(std::nextafter(lo, std::numeric_limits<double>::infinity()) == hi);
        }
    }
    CHECK(inexact > 0);  // the sweep must exercise the rounding branch
}

TEST_CASE("root enclosures: perfect powers are exact") {
    CHECK(rat_root_enclose(Rat(9, 4), 2, 64) == std::pair<Rat, Rat>(Rat(3, 2), Rat(3, 2)));
    CHECK(rat_root_enclose(Rat(8, 27), 3, 64) == std::pair<Rat, Rat>(Rat(2, 3), Rat(2, 3)));
    CHECK(rat_root_enclose(Rat(0), 2, 64) == std::pair<Rat, Rat>(Rat(0), Rat(0)));
    CHECK(rat_root_enclose(Rat(16), 4, 8) == std::pair<Rat, Rat>(Rat(2), Rat(2)));
    CHECK(rat_root_enclose(Rat(5), 1, 64) == std::pair<Rat, Rat>(Rat(5), Rat(5)));
    CHECK_THROWS_AS(rat_root_enclose(Rat(-1), 2, 64), DomainError);
}

TEST_CASE("root enclosures contain the root and meet the width bound") {
    // Oracle: lo^k <= x <= hi^k re-derived by exact powering, independent of
    // the integer-root routine that produced the bounds.
    for (unsigned prec : {8u, 40u, 64u}) {
        Rat width_cap(1);
        width_cap /= rat_pow_uint(Rat(2), prec).get_num();
        for (unsigned long k : {2ul, 3ul, 5ul}) {
            for (int i = 0; i < 2000; ++i) {
                Rat x = rat_abs(random_rat());
                auto [lo, hi] = rat_root_enclose(x, k, prec);
                CHECK(lo >= 0);
                CHECK(rat_pow_uint(lo, k) <= x);
                CHECK(x <= rat_pow_uint(hi, k));
                CHECK(Rat(hi - lo) <= width_cap);
            }
        }
    }
}

TEST_CASE("interval constructor and division guards") {
    CHECK_THROWS_AS(Iv(Rat(1), Rat(0)), DomainError);
    CHECK_THROWS_AS(iv_div(Iv(Rat(1), Rat(2)), Iv(Rat(-1), Rat(1))), DomainError);
    CHECK_THROWS_AS(iv_sqrt_enclose(Iv(Rat(-1), Rat(1)), 32), DomainError);
}

TEST_CASE("exact interval ops against a sampling oracle") {
    auto samples = [](const Iv& v) {
        return std::vector<Rat>{v.lo, v.hi, v.mid(), Rat((3 * v.lo + v.hi) / 4),
                                Rat((v.lo + 3 * v.hi) / 4)};
    };
    for (int i = 0; i < 3000; ++i) {
        Iv a = random_iv(), b = random_iv();
        Iv sum = iv_add(a, b), dif = iv_sub(a, b), prod = iv_mul(a, b);
        for (const Rat& xa : samples(a))
            for (const Rat& xb : samples(b)) {
                CHECK(sum.contains(Rat(xa + xb)));
                CHECK(dif.contains(Rat(xa - xb)));
                CHECK(prod.contains(Rat(xa * xb)));
            }
        // Multiplication endpoints are attained at corners.
        bool lo_hit = false, hi_hit = false;
        for (const Rat& xa : {a.lo, a.hi})
            for (const Rat& xb : {b.lo, b.hi}) {
                if (Rat(xa * xb) == prod.lo) lo_hit = true;
                if (Rat(xa * xb) == prod.hi) hi_hit = true;
            }
        CHECK(lo_hit);
        CHECK(hi_hit);
        if (!b.contains(Rat(0))) {
            Iv quot = iv_div(a, b);
            for (const Rat& xa : samples(a))
                for (const Rat& xb : samples(b)) CHECK(quot.contains(Rat(xa / xb)));
        }
        Iv ab = iv_abs(a);
        Iv p2 = iv_pow_uint(a, 2), p3 = iv_pow_uint(a, 3);
        for (const Rat& xa : samples(a)) {
            CHECK(ab.contains(rat_abs(xa)));
            CHECK(p2.contains(rat_pow_uint(xa, 2)));
            CHECK(p3.contains(rat_pow_uint(xa, 3)));
        }
        if (a.contains(Rat(0))) CHECK(p2.lo == 0);
        Iv mn = iv_min(a, b), mx = iv_max(a, b);
        for (const Rat& xa : samples(a))
            for (const Rat& xb : samples(b)) {
                CHECK(mn.contains(rat_min(xa, xb)));
                CHECK(mx.contains(rat_max(xa, xb)));
            }
    }
}

TEST_CASE("outer sqrt enclosure") {
    for (int i = 0; i < 2000; ++i) {
        Rat a = rat_abs(random_rat()), b = rat_abs(random_rat());
        Iv v = a <= b ? Iv(a, b) : Iv(b, a);
        Iv s = iv_sqrt_enclose(v, 64);
        // Every sample's square lies in v, so the sample lies in s.
        for (const Rat& x : {v.lo, v.mid(), v.hi}) {
            auto [lo, hi] = rat_sqrt_enclose(x, 96);
            CHECK(s.lo <= lo);
            CHECK(hi <= s.hi);
        }
    }
}

TEST_CASE("float kernel directed scalar ops bracket exact results") {
    FastKernel fk;
    for (int i = 0; i < 100000; ++i) {
        double a = fk.from_rat_lo(random_rat());
        double b = fk.from_rat_hi(random_rat());
        Rat ra(a), rb(b);
        CHECK(Rat(fk.add_lo(a, b)) <= Rat(ra + rb));
        CHECK(Rat(ra + rb) <= Rat(fk.add_hi(a, b)));
        CHECK(Rat(fk.sub_lo(a, b)) <= Rat(ra - rb));
        CHECK(Rat(ra - rb) <= Rat(fk.sub_hi(a, b)));
        CHECK(Rat(fk.mul_lo(a, b)) <= Rat(ra * rb));
        CHECK(Rat(ra * rb) <= Rat(fk.mul_hi(a, b)));
        CHECK(Rat(fk.half_lo(a)) <= Rat(ra / 2));
        CHECK(Rat(ra / 2) <= Rat(fk.half_hi(a)));
    }
}

TEST_CASE("float kernel root enclosures are sound") {
    FastKernel fk;
    for (unsigned long k : {2ul, 3ul, 5ul}) {
        for (int i = 0; i < 20000; ++i) {
            double x = fk.from_rat_hi(rat_abs(random_rat()));
            auto [lo, hi] = fk.root_enclose(x, k);
            CHECK(lo >= 0);
            CHECK(rat_pow_uint(Rat(lo), k) <= Rat(x));
            CHECK(Rat(x) <= rat_pow_uint(Rat(hi), k));
        }
    }
}

TEST_CASE("float kernel interval ops enclose exact kernel results") {
    FastKernel fk;
    ExactKernel ek;
    for (int i = 0; i < 20000; ++i) {
        Iv a = random_iv(), b = random_iv();
        KIv<FastKernel> fa = kiv_from(fk, a.lo, a.hi), fb = kiv_from(fk, b.lo, b.hi);
        KIv<ExactKernel> ea = kiv_from(ek, a.lo, a.hi), eb = kiv_from(ek, b.lo, b.hi);
        auto encloses = [&](const KIv<FastKernel>& f, const KIv<ExactKernel>& e) {
            CHECK(Rat(f.lo) <= e.lo);
            CHECK(e.hi <= Rat(f.hi));
        };
        encloses(kiv_add(fk, fa, fb), kiv_add(ek, ea, eb));
        encloses(kiv_sub(fk, fa, fb), kiv_sub(ek, ea, eb));
        encloses(kiv_mul(fk, fa, fb), kiv_mul(ek, ea, eb));
        encloses(kiv_sq(fk, fa), kiv_sq(ek, ea));
        encloses(kiv_abs(fk, fa), kiv_abs(ek, ea));
        encloses(kiv_min(fk, fa, fb), kiv_min(ek, ea, eb));
        encloses(kiv_max(fk, fa, fb), kiv_max(ek, ea, eb));
        encloses(kiv_half(fk, fa), kiv_half(ek, ea));
        KIv<FastKernel> fs = kiv_sq(fk, fa);
        KIv<ExactKernel> es = kiv_sq(ek, ea);
        encloses(kiv_root(fk, fs, 2), kiv_root(ek, es, 2));
        KIv<FastKernel> fabs = kiv_abs(fk, fa);
        KIv<ExactKernel> eabs = kiv_abs(ek, ea);
        encloses(kiv_pow(fk, fabs, 3), kiv_pow(ek, eabs, 3));
        encloses(kiv_root(fk, kiv_pow(fk, fabs, 3), 3), kiv_root(ek, kiv_pow(ek, eabs, 3), 3));
    }
}

TEST_CASE("exact kernel squares and roots are enclosures") {
    ExactKernel ek;
    for (int i = 0; i < 2000; ++i) {
        Iv a = random_iv();
        KIv<ExactKernel> ea = kiv_from(ek, a.lo, a.hi);
        KIv<ExactKernel> sq = kiv_sq(ek, ea);
        for (const Rat& x : {a.lo, a.mid(), a.hi}) {
            Rat xs = rat_pow_uint(x, 2);
            CHECK(sq.lo <= xs);
            CHECK(xs <= sq.hi);
        }
        KIv<ExactKernel> rt = kiv_root(ek, sq, 2);
        for (const Rat& x : {a.lo, a.mid(), a.hi}) {
            Rat xa = rat_abs(x);
            CHECK(rt.lo <= xa);
            CHECK(xa <= rt.hi);
        }
    }
}

TEST_CASE("interval union normalization and covering") {
    IntervalUnion u(std::vector<Iv>{Iv(Rat(0), Rat(1)), Iv(Rat(1), Rat(2)), Iv(Rat(3), Rat(4))});
    REQUIRE(u.parts().size() == 2);
    CHECK(u.parts()[0] == Iv(Rat(0), Rat(2)));
    CHECK(u.parts()[1] == Iv(Rat(3), Rat(4)));
    CHECK(u.covers(Iv(Rat(1, 2), Rat(3, 2))));
    CHECK(!u.covers(Iv(Rat(3, 2), Rat(7, 2))));
    CHECK(!u.covers(Iv(Rat(2), Rat(3))));
    auto c = u.component_containing(Iv(Rat(7, 2), Rat(4)));
    REQUIRE(c.has_value());
    CHECK(*c == Iv(Rat(3), Rat(4)));
    u.add(Iv(Rat(2), Rat(3)));
    REQUIRE(u.parts().size() == 1);
    CHECK(u.parts()[0] == Iv(Rat(0), Rat(4)));

    IntervalUnion empty_u;
    CHECK(empty_u.empty());
    CHECK(!empty_u.covers(Iv(Rat(0), Rat(0))));

    // Overlap in random unions: union of [x, x+w] parts covers what it should.
    for (int i = 0; i < 500; ++i) {
        std::vector<Iv> parts;
        for (int j = 0; j < 8; ++j) {
            Rat lo = random_rat(100, 10);
            parts.push_back(Iv(lo, Rat(lo + rat_abs(random_rat(50, 10)))));
        }
        IntervalUnion ru(parts);
        const auto& ps = ru.parts();
        for (size_t j = 0; j + 1 < ps.size(); ++j) CHECK(ps[j].hi < ps[j + 1].lo);
        for (const Iv& p : parts) CHECK(ru.covers(p));
    }
}
