#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "../src/cantor.hpp"
#include "../src/errors.hpp"

using namespace cantordist;

namespace {

CantorSet middle_thirds() {
    return CantorSet::affine_ifs(Iv(Rat(0), Rat(1)),
                                 {{Rat(1, 3), Rat(0)}, {Rat(1, 3), Rat(2, 3)}});
}

CantorSet two_fifths() {
    return CantorSet::affine_ifs(Iv(Rat(0), Rat(1)),
                                 {{Rat(2, 5), Rat(0)}, {Rat(2, 5), Rat(3, 5)}});
}

CantorSet three_map() {
    return CantorSet::affine_ifs(
        Iv(Rat(0), Rat(1)),
        {{Rat(1, 5), Rat(0)}, {Rat(1, 5), Rat(2, 5)}, {Rat(1, 5), Rat(4, 5)}});
}

CantorSet fat_quarter() { return CantorSet::gap_schedule(Iv(Rat(0), Rat(1)), Rat(1, 4), Rat(1, 2)); }

CantorSet fat_on(const Rat& lo, const Rat& hi) {
    return CantorSet::gap_schedule(Iv(lo, hi), Rat(Rat(hi - lo) / 4), Rat(1, 2));
}

std::vector<CantorSet> zoo() {
    return {middle_thirds(), two_fifths(), three_map(), fat_quarter(),
            CantorSet::finite_union({fat_on(Rat(0), Rat(1)), fat_on(Rat(2), Rat(3))})};
}

// Exact membership test: walks construction cells containing p until some
// cell's left endpoint equals p (left endpoints always belong to the set).
bool is_attractor_left_point(const CantorSet& s, const Rat& p, unsigned max_depth = 48) {
    Address a;
    for (unsigned d = 0; d <= max_depth; ++d) {
        Iv c = s.cell(a);
        if (c.lo == p) return true;
        bool found = false;
        unsigned bc = s.branch_count(a);
        for (unsigned i = 0; i < bc; ++i) {
            Address ch = a;
            ch.push_back(i);
            if (s.cell(ch).contains(p)) {
                a = std::move(ch);
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return false;
}

void walk_addresses(const CantorSet& s, unsigned depth, const std::function<void(const Address&)>& fn,
                    Address a = {}) {
    fn(a);
    if (a.size() == depth) return;
    unsigned bc = s.branch_count(a);
    for (unsigned i = 0; i < bc; ++i) {
        a.push_back(i);
        walk_addresses(s, depth, fn, a);
        a.pop_back();
    }
}

}  // namespace

TEST_CASE("middle-thirds cells and member points match hand values") {
    CantorSet mt = middle_thirds();
    CHECK(mt.kind() == ModelKind::Ifs);
    CHECK(mt.hull() == Iv(Rat(0), Rat(1)));
    CHECK(mt.cell({}) == Iv(Rat(0), Rat(1)));
    CHECK(mt.cell({1}) == Iv(Rat(2, 3), Rat(1)));
    CHECK(mt.cell({0, 1}) == Iv(Rat(2, 9), Rat(1, 3)));
    CHECK(mt.member_point({0, 1}) == Rat(2, 9));
    CHECK(mt.member_point({}) == Rat(0));
    CHECK(mt.measure_lower_bound() == Rat(0));
    CHECK(mt.branch_count({}) == 2);
    CHECK_THROWS_AS(mt.cell({2}), DomainError);
    CHECK_THROWS_AS(mt.cell({0, 3}), DomainError);
    CHECK_THROWS_AS(mt.member_point({0, 0, 5}), DomainError);

    // depth-1 and depth-2 sample points (left endpoints of cells)
    CHECK(mt.level_points(1, 100) == std::vector<Rat>{Rat(0), Rat(2, 3)});
    CHECK(mt.level_points(2, 100) == std::vector<Rat>{Rat(0), Rat(2, 9), Rat(2, 3), Rat(8, 9)});
}

TEST_CASE("gap schedule cells, members, and exact measure") {
    CantorSet fq = fat_quarter();
    CHECK(fq.kind() == ModelKind::Gaps);
    // level 1 removes g = 1/4 centered: children keep the hull ends
    CHECK(fq.cell({0}) == Iv(Rat(0), Rat(3, 8)));
    CHECK(fq.cell({1}) == Iv(Rat(5, 8), Rat(1)));
    // level 2 removes (1/4)(1/2) total over 2 gaps: per-gap 1/16, child width 5/32
    CHECK(fq.cell({0, 0}) == Iv(Rat(0), Rat(5, 32)));
    CHECK(fq.cell({0, 1}) == Iv(Rat(7, 32), Rat(3, 8)));
    CHECK(fq.measure_lower_bound() == Rat(1, 2));
    CHECK(fq.level_points(2, 100) ==
          std::vector<Rat>{Rat(0), Rat(7, 32), Rat(5, 8), Rat(27, 32)});
    walk_addresses(fq, 4, [&](const Address& a) { CHECK(fq.member_point(a) == fq.cell(a).lo); });

    // feasibility is strict: g/(1-rho) must stay below the hull width
    CHECK_THROWS_AS(CantorSet::gap_schedule(Iv(Rat(0), Rat(1)), Rat(1, 2), Rat(1, 2)),
                    DomainError);
    CHECK_THROWS_AS(CantorSet::gap_schedule(Iv(Rat(0), Rat(1)), Rat(0), Rat(1, 2)), DomainError);
    CHECK_THROWS_AS(CantorSet::gap_schedule(Iv(Rat(0), Rat(1)), Rat(1, 4), Rat(1)), DomainError);
    CHECK_THROWS_AS(CantorSet::gap_schedule(Iv(Rat(0), Rat(0)), Rat(1, 4), Rat(1, 2)),
                    DomainError);
    CHECK_THROWS_AS(CantorSet::gap_schedule(Iv(Rat(0), Rat(1)), Rat(1, 4), Rat(1, 2), 0),
                    DomainError);
}

TEST_CASE("IFS validation rejects malformed models") {
    Iv unit(Rat(0), Rat(1));
    CHECK_THROWS_AS(CantorSet::affine_ifs(unit, {{Rat(1, 3), Rat(0)}}), DomainError);
    CHECK_THROWS_AS(CantorSet::affine_ifs(unit, {{Rat(0), Rat(0)}, {Rat(1, 3), Rat(2, 3)}}),
                    DomainError);
    CHECK_THROWS_AS(CantorSet::affine_ifs(unit, {{Rat(1), Rat(0)}, {Rat(1, 3), Rat(2, 3)}}),
                    DomainError);
    // touching images (gap 0)
    CHECK_THROWS_AS(CantorSet::affine_ifs(unit, {{Rat(1, 2), Rat(0)}, {Rat(1, 2), Rat(1, 2)}}),
                    DomainError);
    // overlapping images
    CHECK_THROWS_AS(CantorSet::affine_ifs(unit, {{Rat(2, 3), Rat(0)}, {Rat(1, 3), Rat(2, 3)}}),
                    DomainError);
    // hull not tight (last image ends at 5/6, not 1)
    CHECK_THROWS_AS(CantorSet::affine_ifs(unit, {{Rat(1, 3), Rat(0)}, {Rat(1, 3), Rat(1, 2)}}),
                    DomainError);
    // unsorted input is canonicalized, not rejected
    CantorSet mt = CantorSet::affine_ifs(unit, {{Rat(1, 3), Rat(2, 3)}, {Rat(1, 3), Rat(0)}});
    CHECK(mt == middle_thirds());
}

TEST_CASE("nesting, disjointness, and membership hold exhaustively to depth 6") {
    for (const CantorSet& s : zoo()) {
        // nesting: every child cell inside its parent, retaining both ends overall
        walk_addresses(s, 5, [&](const Address& a) {
            Iv c = s.cell(a);
            unsigned bc = s.branch_count(a);
            std::vector<Iv> kids;
            for (unsigned i = 0; i < bc; ++i) {
                Address ch = a;
                ch.push_back(i);
                kids.push_back(s.cell(ch));
                CHECK(c.contains(kids.back()));
            }
            // children retain the parent's endpoints (no end loss under refinement)
            CHECK(kids.front().lo == c.lo);
            CHECK(kids.back().hi == c.hi);
            for (std::size_t i = 0; i + 1 < kids.size(); ++i) CHECK(kids[i].hi < kids[i + 1].lo);
        });
        // same-level cells pairwise separated and emitted sorted
        for (unsigned d = 1; d <= 6; ++d) {
            std::vector<Iv> cells = s.level_cells(d, 4096);
            CHECK(cells.size() == s.level_cell_count(d));
            for (std::size_t i = 0; i + 1 < cells.size(); ++i)
                CHECK(cells[i].hi < cells[i + 1].lo);
        }
        // member points lie in every ancestor cell and are strictly increasing
        walk_addresses(s, 6, [&](const Address& a) {
            if (a.size() != 6) return;
            Rat p = s.member_point(a);
            Address prefix;
            CHECK(s.cell(prefix).contains(p));
            for (unsigned v : a) {
                prefix.push_back(v);
                CHECK(s.cell(prefix).contains(p));
            }
        });
        std::vector<Rat> pts = s.level_points(6, 4096);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) CHECK(pts[i] < pts[i + 1]);
    }
}

TEST_CASE("restrict extracts maximal cells and re-roots them") {
    CantorSet mt = middle_thirds();
    CantorSet left = mt.restrict_to(Iv(Rat(0), Rat(2, 5)));
    CHECK(left == mt.subset_at({0}));
    CHECK(left.hull() == Iv(Rat(0), Rat(1, 3)));
    CHECK(left.kind() == ModelKind::Ifs);

    CHECK(mt.restrict_to(mt.hull()) == mt);
    CHECK_THROWS_AS(mt.restrict_to(Iv(Rat(2, 5), Rat(3, 5))), DomainError);

    CantorSet mid = mt.restrict_to(Iv(Rat(1, 9), Rat(7, 9)));
    CHECK(mid.kind() == ModelKind::Union);
    auto parts = mid.union_parts();
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == mt.subset_at({0, 1}));
    CHECK(parts[1] == mt.subset_at({1, 0}));
    CHECK(mid.hull() == Iv(Rat(2, 9), Rat(7, 9)));

    // restriction member points lie in I and in the original attractor
    for (const CantorSet& s : zoo()) {
        Iv I(Rat(1, 10), Rat(4, 5));
        if (!s.hull().intersects(I)) continue;
        CantorSet r = s.restrict_to(I);
        CHECK(I.contains(r.hull()));
        for (const Rat& p : r.level_points(3, 4096)) {
            CHECK(I.contains(p));
            CHECK(is_attractor_left_point(s, p));
        }
    }
}

TEST_CASE("subset_at re-roots consistently with the address tree") {
    for (const CantorSet& s : zoo()) {
        walk_addresses(s, 3, [&](const Address& a) {
            CantorSet sub = s.subset_at(a);
            CHECK(sub.hull() == s.cell(a));
            walk_addresses(sub, 2, [&](const Address& w) {
                Address joined = a;
                joined.insert(joined.end(), w.begin(), w.end());
                CHECK(sub.cell(w) == s.cell(joined));
                CHECK(sub.member_point(w) == s.member_point(joined));
            });
        });
    }
    // measure of a depth-d schedule subset is measure/2^d
    CantorSet fq = fat_quarter();
    CHECK(fq.subset_at({0, 1}).measure_lower_bound() == Rat(1, 8));
}

TEST_CASE("descent geometry bounds every split it promises to bound") {
    for (const CantorSet& s : zoo()) {
        walk_addresses(s, 4, [&](const Address& a) {
            auto g = s.descent_geometry(a);
            if (s.kind() == ModelKind::Union && a.empty()) {
                CHECK(!g.has_value());
                return;
            }
            REQUIRE(g.has_value());
            Iv c = s.cell(a);
            CHECK(g->width == c.width());
            // the cell's own split: gap bound and child width bounds
            unsigned bc = s.branch_count(a);
            std::vector<Iv> kids;
            for (unsigned i = 0; i < bc; ++i) {
                Address ch = a;
                ch.push_back(i);
                kids.push_back(s.cell(ch));
                CHECK(kids.back().width() >= Rat(g->width * g->width_lb_decay));
                CHECK(kids.back().width() <= Rat(g->width * g->width_ub_decay));
            }
            for (std::size_t i = 0; i + 1 < kids.size(); ++i)
                CHECK(Rat(kids[i + 1].lo - kids[i].hi) <= g->gap1_ub);
            // one refinement deeper: gaps shrink by at least gap_decay
            for (unsigned i = 0; i < bc; ++i) {
                Address ch = a;
                ch.push_back(i);
                unsigned bc2 = s.branch_count(ch);
                std::vector<Iv> gk;
                for (unsigned j = 0; j < bc2; ++j) {
                    Address ch2 = ch;
                    ch2.push_back(j);
                    gk.push_back(s.cell(ch2));
                }
                for (std::size_t j = 0; j + 1 < gk.size(); ++j)
                    CHECK(Rat(gk[j + 1].lo - gk[j].hi) <= Rat(g->gap1_ub * g->gap_decay));
            }
        });
    }
    // hand values: middle-thirds is scale-free with ratio 1/3 everywhere
    auto g = middle_thirds().descent_geometry({});
    REQUIRE(g.has_value());
    CHECK(g->width == Rat(1));
    CHECK(g->gap1_ub == Rat(1, 3));
    CHECK(g->gap_decay == Rat(1, 3));
    CHECK(g->width_lb_decay == Rat(1, 3));
    CHECK(g->width_ub_decay == Rat(1, 3));
    // fat quarter at the root: gap 1/4, width bound (1 - 1/4)/2 = 3/8
    auto gq = fat_quarter().descent_geometry({});
    REQUIRE(gq.has_value());
    CHECK(gq->gap1_ub == Rat(1, 4));
    CHECK(gq->gap_decay == Rat(1, 4));
    CHECK(gq->width_lb_decay == Rat(3, 8));
    CHECK(gq->width_ub_decay == Rat(1, 2));
    // the schedule's width bound only improves with depth
    CantorSet fq = fat_quarter();
    Rat prev = gq->width_lb_decay;
    Address a;
    for (unsigned d = 0; d < 8; ++d) {
        a.push_back(d % 2);
        auto gd = fq.descent_geometry(a);
        REQUIRE(gd.has_value());
        CHECK(gd->width_lb_decay >= prev);
        prev = gd->width_lb_decay;
    }
}

TEST_CASE("level enumeration respects caps and saturates counts") {
    CantorSet mt = middle_thirds();
    CHECK(mt.level_cell_count(10) == 1024);
    CHECK(three_map().level_cell_count(4) == 81);
    CHECK(mt.level_cell_count(200) == std::numeric_limits<std::size_t>::max());
    CHECK_THROWS_AS(mt.level_points(12, 1000), DomainError);
    try {
        mt.level_points(12, 1000);
    } catch (const DomainError& e) {
        CHECK(e.code() == Errc::DepthTooLarge);
    }
}

TEST_CASE("unions flatten, sort, and reject overlap") {
    CantorSet a = fat_on(Rat(0), Rat(1));
    CantorSet b = fat_on(Rat(2), Rat(3));
    CantorSet c = middle_thirds().subset_at({1});  // hull [2/3, 1] — overlaps a

    CantorSet u = CantorSet::finite_union({b, a});  // sorted on construction
    CHECK(u.kind() == ModelKind::Union);
    CHECK(u.hull() == Iv(Rat(0), Rat(3)));
    CHECK(u.measure_lower_bound() == Rat(1));
    CHECK(u.branch_count({}) == 2);
    CHECK(u.cell({0}) == a.hull());
    CHECK(u.cell({1}) == b.hull());
    CHECK(u.member_point({}) == Rat(0));
    CHECK(u.cell({1, 0, 1}) == b.cell({0, 1}));

    CantorSet mt4 = CantorSet::affine_ifs(Iv(Rat(4), Rat(5)),
                                          {{Rat(1, 3), Rat(8, 3)}, {Rat(1, 3), Rat(10, 3)}});
    CantorSet uu = CantorSet::finite_union({u, mt4});
    CHECK(uu.union_parts().size() == 3);

    CHECK(CantorSet::finite_union({a}) == a);
    CHECK_THROWS_AS(CantorSet::finite_union({a, c}), DomainError);
    CHECK_THROWS_AS(CantorSet::finite_union(
                        {fat_on(Rat(0), Rat(1)),
                         CantorSet::gap_schedule(Iv(Rat(1), Rat(2)), Rat(1, 4), Rat(1, 2))}),
                    DomainError);
    CHECK_THROWS_AS(CantorSet::finite_union({}), DomainError);

    // geometry resolves through parts and is absent at the union root
    CHECK(!u.descent_geometry({}).has_value());
    auto gu = u.descent_geometry({1});
    auto gb = b.descent_geometry({});
    REQUIRE(gu.has_value());
    CHECK(gu->gap1_ub == gb->gap1_ub);
}

TEST_CASE("address strings round-trip") {
    CHECK(address_to_string({}) == "");
    CHECK(address_to_string({0, 1, 2}) == "0.1.2");
    CHECK(address_from_string("") == Address{});
    CHECK(address_from_string("0.1.2") == Address{0, 1, 2});
    CHECK(address_from_string("10") == Address{10});
    CHECK_THROWS_AS(address_from_string("0..1"), DomainError);
    CHECK_THROWS_AS(address_from_string("a"), DomainError);
    CHECK_THROWS_AS(address_from_string("0.1."), DomainError);
}
