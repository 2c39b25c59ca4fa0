#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "../src/errors.hpp"
#include "../src/sampler.hpp"

using namespace cantordist;

namespace {

CantorSet middle_thirds() {
    return CantorSet::affine_ifs(Iv(Rat(0), Rat(1)),
                                 {{Rat(1, 3), Rat(0)}, {Rat(1, 3), Rat(2, 3)}});
}

CantorSet uniform3() {
    return CantorSet::affine_ifs(
        Iv(Rat(0), Rat(1)),
        {{Rat(1, 5), Rat(0)}, {Rat(1, 5), Rat(2, 5)}, {Rat(1, 5), Rat(4, 5)}});
}

CantorSet fat_quarter() { return CantorSet::gap_schedule(Iv(Rat(0), Rat(1)), Rat(1, 4), Rat(1, 2)); }

Errc thrown_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const DomainError& e) {
        return e.code();
    }
    return Errc::Internal;
}

}  // namespace

TEST_CASE("sample clouds enumerate guaranteed member points") {
    SampleCloud c1 = sample_points(middle_thirds(), 1);
    CHECK(c1.points == std::vector<Rat>{Rat(0), Rat(2, 3)});
    SampleCloud c2 = sample_points(middle_thirds(), 2);
    CHECK(c2.points == std::vector<Rat>{Rat(0), Rat(2, 9), Rat(2, 3), Rat(8, 9)});

    SampleCloud g2 = sample_points(fat_quarter(), 2);
    CHECK(g2.points == std::vector<Rat>{Rat(0), Rat(7, 32), Rat(5, 8), Rat(27, 32)});

    for (unsigned d = 1; d <= 8; ++d) {
        SampleCloud c = sample_points(middle_thirds(), d);
        CHECK(c.points.size() == middle_thirds().level_cell_count(d));
        CHECK(std::is_sorted(c.points.begin(), c.points.end()));
        CHECK(std::adjacent_find(c.points.begin(), c.points.end()) == c.points.end());
    }
}

TEST_CASE("sample clouds refine monotonically") {
    for (const CantorSet& s : {middle_thirds(), uniform3(), fat_quarter()}) {
        SampleCloud prev = sample_points(s, 1);
        for (unsigned d = 2; d <= 6; ++d) {
            SampleCloud next = sample_points(s, d);
            CHECK(std::includes(next.points.begin(), next.points.end(), prev.points.begin(),
                                prev.points.end()));
            prev = next;
        }
    }
}

TEST_CASE("sampling depth limits") {
    CHECK(thrown_code([] { sample_points(middle_thirds(), 17); }) == Errc::DepthTooLarge);
    // raising the cap works until the cloud itself would be too large
    CHECK(sample_points(middle_thirds(), 17, 20).points.size() == std::size_t(1) << 17);
    CHECK(thrown_code([] { sample_points(uniform3(), 16, 32); }) == Errc::DepthTooLarge);
}

TEST_CASE("sampled pinned set: hand example and exact dedup") {
    SampleCloud c = sample_points(middle_thirds(), 1);  // {0, 2/3}
    SampledDistanceSet s = sampled_pinned_set(PhiSpec::euclidean(), {Rat(0), Rat(0)}, c, c);
    // 4 pairs, 3 distinct distances: 0, 2/3, 2*sqrt(2)/3
    REQUIRE(s.keys.size() == 3);
    CHECK(s.keys[0] == Rat(0));
    CHECK(s.keys[1] == Rat(4, 9));
    CHECK(s.keys[2] == Rat(8, 9));
    auto vals = s.values();
    CHECK(vals[0] == Iv(Rat(0), Rat(0)));
    CHECK(vals[1] == Iv(Rat(2, 3), Rat(2, 3)));  // perfect square key
    double twosqrt2_3 = 2.0 * std::sqrt(2.0) / 3.0;
    CHECK(rat_to_double_down(vals[2].lo) <= twosqrt2_3);
    CHECK(rat_to_double_up(vals[2].hi) >= twosqrt2_3 - 1e-15);

    // pin sitting on a sampled diagonal point: zero distance appears
    SampledDistanceSet z = sampled_pinned_set(PhiSpec::euclidean(), {Rat(2, 3), Rat(2, 3)}, c, c);
    CHECK(z.keys.front() == Rat(0));

    // dedup is exact: distinct keys equal distinct sampled values
    SampleCloud c4 = sample_points(middle_thirds(), 4);
    SampledDistanceSet d = sampled_pinned_set(PhiSpec::euclidean(), {Rat(2), Rat(2)}, c4, c4);
    std::set<Rat> uniq(d.keys.begin(), d.keys.end());
    CHECK(uniq.size() == d.keys.size());
    CHECK(std::is_sorted(d.keys.begin(), d.keys.end()));
}

TEST_CASE("sampled distance sets refine monotonically and stay in the hull image") {
    SampleCloud a3 = sample_points(middle_thirds(), 3);
    SampleCloud a5 = sample_points(middle_thirds(), 5);
    Pt2 pin{Rat(2), Rat(2)};
    for (const PhiSpec& phi : {PhiSpec::euclidean(), PhiSpec::pnorm(1), PhiSpec::dot()}) {
        SampledDistanceSet s3 = sampled_pinned_set(phi, pin, a3, a3);
        SampledDistanceSet s5 = sampled_pinned_set(phi, pin, a5, a5);
        CHECK(std::includes(s5.keys.begin(), s5.keys.end(), s3.keys.begin(), s3.keys.end()));

        Iv hull = hull_image(phi, pin, Box2{a3.set.hull(), a3.set.hull()}, 64);
        for (const Iv& v : s3.values()) {
            CHECK(hull.lo <= v.lo);
            CHECK(v.hi <= hull.hi);
        }
    }
}

TEST_CASE("cover check flags dense and sparse targets correctly") {
    SampleCloud c = sample_points(fat_quarter(), 10);  // 1024 points, positive measure
    std::vector<Pt2> pins = {{Rat(2), Rat(2)}, {Rat(2), Rat(199, 100)}};
    // distances from (2,2) to [0,1]^2 land in [sqrt 2, 2 sqrt 2]; the middle
    // of that range is densely sampled
    Iv dense(Rat(8, 5), Rat(17, 10));  // [1.6, 1.7]
    CoverReport ok = sampled_cover_check(PhiSpec::euclidean(), pins, c, c, dense, 1e-2);
    CHECK(ok.covered);
    CHECK(ok.max_gap_bound <= 1e-2);
    CHECK(ok.per_pin_gap_bound.size() == 2);

    // an interval fully below the sampled range is not covered at all
    Iv below(Rat(1, 2), Rat(3, 5));
    CoverReport bad = sampled_cover_check(PhiSpec::euclidean(), pins, c, c, below, 1e-2);
    CHECK_FALSE(bad.covered);
    CHECK(bad.max_gap_bound >= 0.09);  // the whole window is one empty run

    // an interval straddling the lower edge has a long empty prefix
    Iv straddle(Rat(13, 10), Rat(29, 20));
    CoverReport edge = sampled_cover_check(PhiSpec::euclidean(), pins, c, c, straddle, 1e-2);
    CHECK_FALSE(edge.covered);

    CHECK_THROWS_AS(sampled_cover_check(PhiSpec::euclidean(), {}, c, c, dense, 1e-2), DomainError);
    CHECK_THROWS_AS(sampled_cover_check(PhiSpec::euclidean(), pins, c, c, dense, 0.0), DomainError);
}

TEST_CASE("cover gap bound dominates the true sampled gap") {
    SampleCloud c = sample_points(middle_thirds(), 5);
    Pt2 pin{Rat(2), Rat(2)};
    Iv target(Rat(2), Rat(5, 2));
    double eps = 1e-2;
    CoverReport rep = sampled_cover_check(PhiSpec::euclidean(), {pin}, c, c, target, eps);

    // brute force the same gap in doubles
    std::vector<double> vals;
    for (const Rat& a : c.points) {
        for (const Rat& b : c.points) {
            double v = phi_eval(PhiSpec::euclidean(), 2.0, 2.0, rat_to_double_down(a),
                                rat_to_double_down(b));
            if (v >= 2.0 && v <= 2.5) vals.push_back(v);
        }
    }
    std::sort(vals.begin(), vals.end());
    double true_gap = 0;
    double prev = 2.0;
    for (double v : vals) {
        true_gap = std::max(true_gap, v - prev);
        prev = v;
    }
    true_gap = std::max(true_gap, 2.5 - prev);

    CHECK(rep.per_pin_gap_bound[0] + 1e-12 >= true_gap);
    CHECK(rep.per_pin_gap_bound[0] <= true_gap + 3.0 * rep.bin_width);
}

TEST_CASE("chain realization follows exactly sampled targets") {
    SampleCloud c = sample_points(middle_thirds(), 6);
    ProductCloud link{c, c};
    // a generic pin breaks distance ties between distinct cloud pairs
    Pt2 y0{Rat(403, 200), Rat(513, 200)};
    Pt2 p1{c.points[17], c.points[40]};
    Pt2 p2{c.points[5], c.points[33]};

    auto val = [&](const Pt2& z, const Pt2& w) {
        return phi_value_from_key(PhiSpec::euclidean(), phi_power_key(PhiSpec::euclidean(), z, w),
                                  80);
    };
    // rational midpoints of tight enclosures serve as near-exact targets
    std::vector<Rat> target = {val(y0, p1).mid(), val(p1, p2).mid()};

    ChainRealization r =
        realize_chain(PhiSpec::euclidean(), y0, target, {link, link}, 1e-9);
    REQUIRE(r.points.size() == 2);
    CHECK(r.points[0].x == p1.x);
    CHECK(r.points[0].y == p1.y);
    CHECK(r.points[1].x == p2.x);
    CHECK(r.points[1].y == p2.y);
    CHECK(r.errors[0] <= 1e-9);
    CHECK(r.errors[1] <= 1e-9);
}

TEST_CASE("chain realization skips exact collisions and reports failures") {
    SampleCloud tiny = sample_points(middle_thirds(), 1);  // {0, 2/3}
    ProductCloud link{tiny, tiny};
    Pt2 origin{Rat(0), Rat(0)};

    // target 2/3 from the origin: the nearest pair (0, 2/3) is taken; the
    // second link wants 2/3 again and must skip its own start point
    ChainRealization two =
        realize_chain(PhiSpec::euclidean(), origin, {Rat(2, 3), Rat(2, 3)}, {link, link}, 1e-9);
    CHECK(two.points[0].x == Rat(0));
    CHECK(two.points[0].y == Rat(2, 3));
    // (0,0) would match exactly but equals the pin; (2/3, 2/3) is next best
    CHECK(two.points[1].x == Rat(2, 3));
    CHECK(two.points[1].y == Rat(2, 3));

    // target 0 from the origin: only (0,0) matches and it collides
    Errc code = thrown_code([&] {
        realize_chain(PhiSpec::euclidean(), origin, {Rat(0)}, {link}, 1e-3);
    });
    CHECK(code == Errc::NoRealization);

    // an unreachable target reports its best error in the message
    try {
        realize_chain(PhiSpec::euclidean(), origin, {Rat(50)}, {link}, 1e-3);
        CHECK(false);
    } catch (const DomainError& e) {
        CHECK(e.code() == Errc::NoRealization);
        CHECK(std::string(e.what()).find("best error") != std::string::npos);
    }
}

TEST_CASE("single-link chain is a nearest-distance lookup") {
    SampleCloud c = sample_points(middle_thirds(), 4);
    ProductCloud link{c, c};
    Pt2 y0{Rat(2), Rat(2)};
    // brute-force the nearest sampled distance to 2.4
    double best = 1e18;
    Rat bax, bby;
    for (const Rat& a : c.points) {
        for (const Rat& b : c.points) {
            double v = phi_eval(PhiSpec::euclidean(), 2.0, 2.0, rat_to_double_down(a),
                                rat_to_double_down(b));
            if (std::fabs(v - 2.4) < best) {
                best = std::fabs(v - 2.4);
                bax = a;
                bby = b;
            }
        }
    }
    ChainRealization r = realize_chain(PhiSpec::euclidean(), y0, {Rat(12, 5)}, {link}, 1.0);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].x == bax);
    CHECK(r.points[0].y == bby);
    CHECK(r.errors[0] == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("tree realization places parents before children") {
    LabeledTree t = LabeledTree::build({{{0}, 2}});
    SampleCloud c = sample_points(middle_thirds(), 5);
    ProductCloud link{c, c};
    Pt2 y0{Rat(403, 200), Rat(513, 200)};
    Pt2 p1{c.points[3], c.points[20]};
    Pt2 p2{c.points[9], c.points[14]};
    auto val = [&](const Pt2& z, const Pt2& w) {
        return phi_value_from_key(PhiSpec::euclidean(), phi_power_key(PhiSpec::euclidean(), z, w),
                                  80);
    };
    std::vector<Rat> target = {val(y0, p1).mid(), val(y0, p2).mid()};
    std::map<Label, ProductCloud> clouds = {{{0, 0}, link}, {{0, 1}, link}};

    TreeRealization r = realize_tree(PhiSpec::euclidean(), t, y0, target, clouds, 1e-9);
    REQUIRE(r.points.size() == 3);
    CHECK(r.points.at({0}).x == y0.x);
    CHECK(r.points.at({0, 0}).x == p1.x);
    CHECK(r.points.at({0, 0}).y == p1.y);
    CHECK(r.points.at({0, 1}).x == p2.x);
    CHECK(r.points.at({0, 1}).y == p2.y);

    // all realized points are pairwise distinct
    std::set<std::pair<Rat, Rat>> uniq;
    for (const auto& [v, p] : r.points) uniq.insert({p.x, p.y});
    CHECK(uniq.size() == r.points.size());

    // missing cloud and wrong target length are caught
    CHECK_THROWS_AS(realize_tree(PhiSpec::euclidean(), t, y0, target, {{{0, 0}, link}}, 1e-9),
                    DomainError);
    CHECK_THROWS_AS(realize_tree(PhiSpec::euclidean(), t, y0, {Rat(1)}, clouds, 1e-9),
                    DomainError);
}

TEST_CASE("default sample tolerance follows width decay") {
    CHECK(default_sample_tol(middle_thirds(), 2) == Rat(1));
    CHECK(default_sample_tol(middle_thirds(), 5) == Rat(1, 27));
    CHECK(default_sample_tol(fat_quarter(), 4) == Rat(1, 4));
    CantorSet big = CantorSet::affine_ifs(Iv(Rat(0), Rat(10)),
                                          {{Rat(2, 5), Rat(0)}, {Rat(2, 5), Rat(6)}});
    CHECK(default_sample_tol(big, 3) == Rat(4));
}
