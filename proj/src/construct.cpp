#include "construct.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace cantordist {

namespace {

constexpr unsigned kRestrictDepth = 64;  // cell-search budget for every restriction here

std::string span_text(const Iv& v) {
    return "[" + rat_to_string(v.lo) + ", " + rat_to_string(v.hi) + "]";
}

std::string point_text(const Pt2& p) {
    return "(" + rat_to_string(p.x) + ", " + rat_to_string(p.y) + ")";
}

Box2 square_at(const Pt2& c, const Rat& r) {
    return Box2{Iv(Rat(c.x - r), Rat(c.x + r)), Iv(Rat(c.y - r), Rat(c.y + r))};
}

bool boxes_disjoint(const Box2& a, const Box2& b) {
    return !(a.x.intersects(b.x) && a.y.intersects(b.y));
}

Box2 intersect_boxes(const Box2& a, const Box2& b, const char* what) {
    std::optional<Iv> x = iv_intersect(a.x, b.x);
    std::optional<Iv> y = iv_intersect(a.y, b.y);
    if (!x || !y) fail(Errc::EmptyIntersection, std::string(what) + " do not intersect");
    return Box2{*x, *y};
}

bool fail_report(VerifyReport* rep, const char* stage, std::size_t node, std::string detail) {
    if (rep) {
        rep->ok = false;
        rep->stage = stage;
        rep->node = node;
        rep->detail = std::move(detail);
    }
    return false;
}

// The sub-Cantor on the all-zero spine whose construction cell fits inside
// `within`. The leftmost member point is preserved down that spine, so the
// result keeps the base skeleton point while staying in the pin region.
CantorSet base_spine_part(const CantorSet& K, const Iv& within) {
    Address a;
    for (unsigned k = 0; k <= 256; ++k) {
        if (within.contains(K.cell(a))) return K.subset_at(a);
        a.push_back(0);
    }
    fail(Errc::Internal, "the pin region admits no base cell within 256 levels");
}

}  // namespace

PartnerResult construct_partner(const CantorSet& K, const Iv& I, const Pt2& v,
                                const SearchBudget& budget, const PhiSpec& phi, ArithMode mode,
                                unsigned prec_bits) {
    const CantorSet inside = K.restrict_to(I, kRestrictDepth);

    // Carrier: all of I, unless the pin ordinate lies in I, in which case the
    // cell of the restriction farthest from it (some sibling at each depth is
    // free of it, because sibling cells are separated).
    Iv q = I;
    CantorSet k1 = inside;
    std::optional<Iv> lambda2;
    Rat v2_gap(0);
    if (I.contains(v.y)) {
        std::vector<Address> frontier{Address{}};
        std::optional<Address> found;
        Rat best_dist(0);
        for (unsigned d = 1; d <= 4 && !found; ++d) {
            std::vector<Address> next;
            for (const Address& a : frontier) {
                const unsigned bc = inside.branch_count(a);
                for (unsigned i = 0; i < bc; ++i) {
                    Address child = a;
                    child.push_back(i);
                    next.push_back(std::move(child));
                }
            }
            for (const Address& a : next) {
                const Iv c = inside.cell(a);
                if (c.contains(v.y)) continue;
                const Rat dist = c.lo > v.y ? Rat(c.lo - v.y) : Rat(v.y - c.hi);
                if (!found || dist > best_dist) {  // ties keep the leftmost cell
                    found = a;
                    best_dist = dist;
                }
            }
            frontier = std::move(next);
        }
        if (!found)
            fail(Errc::DegeneratePin, "every cell of the restriction to " + span_text(I) +
                                          " down to depth 4 contains the pin ordinate " +
                                          rat_to_string(v.y));
        q = inside.cell(*found);
        k1 = inside.subset_at(*found);
        v2_gap = best_dist;
        const Rat half(best_dist / 2);
        lambda2 = Iv(rat_max(Rat(v.y - half), I.lo), rat_min(Rat(v.y + half), I.hi));
    }

    const Rat w = q.width();
    if (!(w > 0)) fail(Errc::EmptyRestriction, "carrier " + span_text(q) + " has zero width");
    Rat r0(w / 8);
    if (lambda2) r0 = rat_min(r0, Rat(v2_gap / 2));
    const Rat g0(w / 8);
    const Rat rhos[2] = {Rat(1, 2), Rat(1, 4)};
    const Rat measure_cap = k1.measure_upper_bound();

    std::string last_reason = "no candidate interval was produced";
    for (unsigned j = 0; j < kPartnerAttempts; ++j) {
        const Rat scale = rat_pow_uint(Rat(1, 2), j);
        const Rat r(r0 * scale);
        const Rat g(g0 * scale);
        const Box2 U = square_at(v, r);
        for (const Rat& rho : rhos) {
            CantorSet kt = CantorSet::gap_schedule(q, g, rho);
            if (!(kt.measure_lower_bound() > measure_cap)) {
                last_reason = "a partner with gap " + rat_to_string(g) +
                              " does not out-measure the restriction";
                continue;
            }
            const RobustImage ri = robust_image(phi, U, Box2{k1.hull(), kt.hull()}, prec_bits, mode);
            const std::optional<Iv> inner = ri.inner();
            if (!inner || !(inner->width() > 0)) {
                last_reason = "the robust image over the hulls has an empty inner part at pin radius " +
                              rat_to_string(r);
                continue;
            }
            const Rat third(inner->width() / 3);
            const Iv target(Rat(inner->lo + third), Rat(inner->hi - third));
            if (!(target.width() > 0)) {
                last_reason = "the middle third of the robust image collapsed to a point";
                continue;
            }
            try {
                CoverageCertificate cert =
                    certify_cover(phi, U, k1, kt, target, budget, mode, prec_bits);
                VerifyReport rep;
                if (!verify_certificate(cert, &rep))
                    fail(Errc::Internal, "freshly built partner certificate was rejected at " +
                                             rep.stage + ": " + rep.detail);
                return PartnerResult{std::move(kt), U,          target,
                                     std::move(cert), q, lambda2};
            } catch (const DomainError& e) {
                if (e.code() == Errc::BudgetExhausted || e.code() == Errc::AdmissibilityFailure) {
                    last_reason = e.what();
                    continue;
                }
                throw;
            }
        }
    }
    fail(Errc::BudgetExhausted, "partner search over " + span_text(q) + " exhausted " +
                                    std::to_string(kPartnerAttempts) + " gap/pin sizes for pin " +
                                    point_text(v) + "; last failure: " + last_reason);
}

bool verify_partner(const PartnerResult& p, VerifyReport* report) {
    if (report) *report = VerifyReport{};
    VerifyReport sub;
    if (!verify_certificate(p.cert, &sub))
        return fail_report(report, "partner-cert", sub.node,
                           "embedded certificate rejected at " + sub.stage + ": " + sub.detail);
    if (!(p.cert.target == p.target) || !(p.cert.k2 == p.ktilde) || !(p.cert.pins == p.pin_box))
        return fail_report(report, "partner-binding", 0,
                           "certificate fields differ from the stored result");
    if (!(p.target.width() > 0))
        return fail_report(report, "partner-binding", 0, "target has zero width");
    if (p.ktilde.kind() != ModelKind::Gaps || !(p.ktilde.hull() == p.q) ||
        !p.q.contains(p.cert.k1.hull()))
        return fail_report(report, "partner-carrier", 0,
                           "partner is not a gap schedule spanning the carrier");
    if (p.lambda2 && p.lambda2->intersects(p.q))
        return fail_report(report, "partner-lambda", 0,
                           "exclusion strip meets the carrier");
    if (!(p.ktilde.measure_lower_bound() > p.cert.k1.measure_upper_bound()))
        return fail_report(report, "partner-measure", 0,
                           "partner does not out-measure the restriction");
    return true;
}

std::vector<Pt2> select_skeleton(const CantorSet& K, std::size_t n, unsigned depth) {
    if (n == 0) fail(Errc::NotEnoughCells, "a skeleton needs at least one point");
    const std::size_t have = K.level_cell_count(depth);
    if (have < n)
        fail(Errc::NotEnoughCells, "depth " + std::to_string(depth) + " has " +
                                       std::to_string(have) + " cells, fewer than the " +
                                       std::to_string(n) + " skeleton points requested");
    const std::vector<Rat> pts = K.level_points(depth, std::size_t{1} << 16);
    std::vector<char> used(pts.size(), 0);
    std::vector<std::size_t> chosen{0};  // leftmost point seeds the spread
    used[0] = 1;
    while (chosen.size() < n) {
        std::size_t best = pts.size();
        Rat best_min(0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (used[i]) continue;
            Rat dmin(-1);
            for (const std::size_t c : chosen) {
                const Rat d = rat_abs(Rat(pts[i] - pts[c]));
                if (dmin < 0 || d < dmin) dmin = d;
            }
            if (best == pts.size() || dmin > best_min) {  // ties keep the smaller point
                best = i;
                best_min = dmin;
            }
        }
        used[best] = 1;
        chosen.push_back(best);
    }
    std::vector<Rat> vals;
    vals.reserve(chosen.size());
    for (const std::size_t c : chosen) vals.push_back(pts[c]);
    std::sort(vals.begin(), vals.end());
    std::vector<Pt2> out;
    out.reserve(vals.size());
    for (const Rat& p : vals) out.push_back(Pt2{p, p});
    return out;
}

namespace {

struct Scaffold {
    std::vector<Pt2> points;
    Rat radius;
};

// Diagonal skeleton of `count` points at the shallowest depth with enough
// cells, plus the common box radius: half the minimum separation, halved
// until the closed squares are pairwise separated, floored at 2^-30 of the
// hull width.
Scaffold make_scaffold(const CantorSet& K, std::size_t count) {
    unsigned depth = 0;
    while (K.level_cell_count(depth) < count) {
        if (depth >= 64)
            fail(Errc::NotEnoughCells,
                 "no depth up to 64 has " + std::to_string(count) + " cells");
        ++depth;
    }
    Scaffold s{select_skeleton(K, count, depth), Rat(0)};
    if (count == 1) {
        s.radius = Rat(K.hull().width() / 4);
        return s;
    }
    Rat sep(-1);
    for (std::size_t i = 0; i + 1 < s.points.size(); ++i) {
        const Rat d(s.points[i + 1].x - s.points[i].x);
        if (sep < 0 || d < sep) sep = d;
    }
    const Rat floor(K.hull().width() / 1073741824);  // 2^-30 of the hull width
    Rat r(sep / 2);
    while (!(Rat(2 * r) < sep)) {
        r = Rat(r / 2);
        if (r < floor)
            fail(Errc::SkeletonConflict,
                 "skeleton separation " + rat_to_string(sep) +
                     " cannot host disjoint neighborhoods above the resolution floor " +
                     rat_to_string(floor));
    }
    s.radius = r;
    return s;
}

// Recompute-and-compare checks for one link against its parent box.
bool verify_link(const CantorSet& base, const PhiSpec& phi, const LinkRecord& l,
                 const Box2& parent_box, const Pt2& own_point, std::size_t node,
                 VerifyReport* rep) {
    VerifyReport sub;
    if (!verify_certificate(l.cert, &sub))
        return fail_report(rep, "link-cert", node,
                           "embedded certificate rejected at " + sub.stage + ": " + sub.detail);
    if (!(l.cert.phi == phi))
        return fail_report(rep, "link-binding", node, "certificate phi differs from the top level");
    if (!(l.cert.target == l.target))
        return fail_report(rep, "link-binding", node,
                           "certificate target differs from the stored link target");
    if (!(l.cert.k2 == l.ktilde))
        return fail_report(rep, "link-binding", node,
                           "certificate partner set differs from the stored one");
    if (!(l.cert.k1 == l.restriction))
        return fail_report(rep, "link-binding", node,
                           "certificate base set differs from the stored restriction");
    if (!(l.target.width() > 0))
        return fail_report(rep, "link-binding", node, "link target has zero width");
    if (l.ktilde.kind() != ModelKind::Gaps || !l.box.x.contains(l.ktilde.hull()))
        return fail_report(rep, "link-carrier", node,
                           "partner is not a gap schedule carried inside the box slice");
    try {
        const CantorSet expect = base.restrict_to(l.box.x, kRestrictDepth);
        if (!(expect == l.restriction))
            return fail_report(rep, "link-restriction", node,
                               "stored restriction is not the base set cut to " + span_text(l.box.x));
    } catch (const DomainError& e) {
        return fail_report(rep, "link-restriction", node, e.what());
    }
    if (!l.box.contains(Box2{l.restriction.hull(), l.ktilde.hull()}))
        return fail_report(rep, "link-containment", node,
                           "restriction x partner does not stay inside the link box");
    if (!l.cert.pins.contains(parent_box))
        return fail_report(rep, "link-pins", node,
                           "certificate pins do not contain the previous box");
    if (!(l.box.x.contains(own_point.x) && l.box.y.contains(own_point.y)))
        return fail_report(rep, "link-skeleton", node, "skeleton point is outside the link box");
    if (!(l.ktilde.measure_lower_bound() > l.restriction.measure_upper_bound()))
        return fail_report(rep, "link-measure", node,
                           "partner does not out-measure the restriction");
    return true;
}

// All neighborhoods (the pin region first) must be pairwise disjoint.
bool verify_disjoint(const Box2& base_box, const std::vector<LinkRecord>& links,
                     VerifyReport* rep) {
    std::vector<const Box2*> all{&base_box};
    for (const LinkRecord& l : links) all.push_back(&l.box);
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b)
            if (!boxes_disjoint(*all[a], *all[b]))
                return fail_report(rep, "disjoint", b,
                                   "neighborhoods " + std::to_string(a) + " and " +
                                       std::to_string(b) + " overlap");
    return true;
}

// The stored partner union must equal base-restricted-to-the-pin-region plus
// every link partner, and must strictly out-measure the base content used.
bool verify_union(const CantorSet& base, const Box2& base_box,
                  const std::vector<LinkRecord>& links, const CantorSet& ktilde,
                  VerifyReport* rep) {
    try {
        std::vector<CantorSet> parts{base_spine_part(base, base_box.x)};
        Rat used = parts[0].measure_upper_bound();
        for (const LinkRecord& l : links) {
            parts.push_back(l.ktilde);
            used = Rat(used + l.restriction.measure_upper_bound());
        }
        const CantorSet expect = CantorSet::finite_union(std::move(parts));
        if (!(expect == ktilde))
            return fail_report(rep, "ktilde", 0,
                               "stored partner union differs from the recomputed one");
        if (!links.empty() && !(ktilde.measure_lower_bound() > used))
            return fail_report(rep, "measure-total", 0,
                               "partner union does not out-measure the base content it uses");
    } catch (const DomainError& e) {
        return fail_report(rep, "ktilde", 0, e.what());
    }
    return true;
}

}  // namespace

std::vector<Iv> certified_box(const ChainCertificate& c) {
    std::vector<Iv> out;
    out.reserve(c.links.size());
    for (const LinkRecord& l : c.links) out.push_back(l.target);
    return out;
}

std::vector<Iv> certified_box(const TreeCertificate& c) {
    std::vector<Iv> out;
    out.reserve(c.links.size());
    for (const LinkRecord& l : c.links) out.push_back(l.target);
    return out;
}

ChainCertificate build_chain(const CantorSet& K, unsigned n, const SearchBudget& budget,
                             const PhiSpec& phi, ArithMode mode, unsigned prec_bits) {
    if (n == 0) fail(Errc::ConfigError, "a chain needs at least one link");
    Scaffold sc = make_scaffold(K, std::size_t(n) + 1);
    std::vector<Box2> boxes;
    boxes.reserve(sc.points.size());
    for (const Pt2& p : sc.points) boxes.push_back(square_at(p, sc.radius));

    // Reverse induction: link i lives at point i and pins at point i-1; its
    // pin box becomes the previous point's box before that link starts.
    std::vector<LinkRecord> rev;
    rev.reserve(n);
    for (unsigned i = n; i >= 1; --i) {
        PartnerResult pr =
            construct_partner(K, boxes[i].x, sc.points[i - 1], budget, phi, mode, prec_bits);
        rev.push_back(LinkRecord{pr.cert.k1, std::move(pr.ktilde), boxes[i], pr.target,
                                 std::move(pr.cert)});
        boxes[i - 1] = intersect_boxes(boxes[i - 1], pr.pin_box, "chain pin boxes");
    }
    std::vector<LinkRecord> links(std::make_move_iterator(rev.rbegin()),
                                  std::make_move_iterator(rev.rend()));

    std::vector<CantorSet> parts{base_spine_part(K, boxes[0].x)};
    for (const LinkRecord& l : links) parts.push_back(l.ktilde);
    CantorSet ktilde = CantorSet::finite_union(std::move(parts));
    return ChainCertificate{K,        phi,   n, sc.points, boxes[0], std::move(links),
                            std::move(ktilde)};
}

bool verify_chain(const ChainCertificate& c, VerifyReport* report) {
    if (report) *report = VerifyReport{};
    if (c.n == 0 || c.links.size() != c.n || c.skeleton.size() != std::size_t(c.n) + 1)
        return fail_report(report, "chain-shape", 0, "link or skeleton count mismatch");
    for (std::size_t i = 0; i < c.skeleton.size(); ++i) {
        if (!(c.skeleton[i].x == c.skeleton[i].y))
            return fail_report(report, "chain-shape", i, "skeleton point off the diagonal");
        if (i > 0 && !(c.skeleton[i - 1].x < c.skeleton[i].x))
            return fail_report(report, "chain-shape", i, "skeleton points not strictly increasing");
    }
    if (!(c.base_box.x.contains(c.skeleton[0].x) && c.base_box.y.contains(c.skeleton[0].y)))
        return fail_report(report, "link-skeleton", 0,
                           "the first skeleton point is outside the pin region");
    if (!verify_disjoint(c.base_box, c.links, report)) return false;
    for (std::size_t i = 0; i < c.links.size(); ++i) {
        const Box2& prev = i == 0 ? c.base_box : c.links[i - 1].box;
        if (!verify_link(c.base, c.phi, c.links[i], prev, c.skeleton[i + 1], i + 1, report))
            return false;
    }
    return verify_union(c.base, c.base_box, c.links, c.ktilde, report);
}

TreeCertificate build_tree(const CantorSet& K, const LabeledTree& T, const SearchBudget& budget,
                           const PhiSpec& phi, ArithMode mode, unsigned prec_bits) {
    const std::vector<Label>& verts = T.vertices();
    const std::size_t V = verts.size();
    Scaffold sc = make_scaffold(K, V);
    std::vector<Box2> boxes;
    boxes.reserve(V);
    for (const Pt2& p : sc.points) boxes.push_back(square_at(p, sc.radius));
    std::map<Label, std::size_t> index;
    for (std::size_t k = 0; k < V; ++k) index[verts[k]] = k;

    // The vertex order is shallow-first, so walking it backwards finishes
    // every child (shrinking the parent's box by the returned pin box)
    // before the parent's own link starts on its final box.
    std::vector<std::optional<LinkRecord>> recs(V);
    for (std::size_t k = V; k-- > 1;) {
        const std::size_t parent = index.at(LabeledTree::parent(verts[k]));
        PartnerResult pr =
            construct_partner(K, boxes[k].x, sc.points[parent], budget, phi, mode, prec_bits);
        recs[k] = LinkRecord{pr.cert.k1, std::move(pr.ktilde), boxes[k], pr.target,
                             std::move(pr.cert)};
        boxes[parent] = intersect_boxes(boxes[parent], pr.pin_box, "sibling pin boxes");
    }
    std::vector<LinkRecord> links;
    links.reserve(V ? V - 1 : 0);
    for (std::size_t k = 1; k < V; ++k) links.push_back(std::move(*recs[k]));

    std::vector<CantorSet> parts{base_spine_part(K, boxes[0].x)};
    for (const LinkRecord& l : links) parts.push_back(l.ktilde);
    CantorSet ktilde = CantorSet::finite_union(std::move(parts));
    return TreeCertificate{K,        phi,   T, sc.points, boxes[0], std::move(links),
                           std::move(ktilde)};
}

bool verify_tree(const TreeCertificate& c, VerifyReport* report) {
    if (report) *report = VerifyReport{};
    const std::vector<Label>& verts = c.tree.vertices();
    const std::size_t V = verts.size();
    if (V == 0 || c.skeleton.size() != V || c.links.size() + 1 != V)
        return fail_report(report, "tree-shape", 0, "skeleton or link count mismatch");
    for (std::size_t k = 0; k < V; ++k) {
        if (!(c.skeleton[k].x == c.skeleton[k].y))
            return fail_report(report, "tree-shape", k, "skeleton point off the diagonal");
        for (std::size_t j = 0; j < k; ++j)
            if (c.skeleton[j].x == c.skeleton[k].x)
                return fail_report(report, "tree-shape", k, "duplicate skeleton points");
    }
    if (!(c.base_box.x.contains(c.skeleton[0].x) && c.base_box.y.contains(c.skeleton[0].y)))
        return fail_report(report, "link-skeleton", 0,
                           "the root skeleton point is outside the pin region");
    if (!verify_disjoint(c.base_box, c.links, report)) return false;
    std::map<Label, std::size_t> index;
    for (std::size_t k = 0; k < V; ++k) index[verts[k]] = k;
    for (std::size_t k = 1; k < V; ++k) {
        const auto pit = index.find(LabeledTree::parent(verts[k]));
        if (pit == index.end())
            return fail_report(report, "tree-shape", k, "vertex parent missing from the tree");
        const std::size_t parent = pit->second;
        const Box2& pbox = parent == 0 ? c.base_box : c.links[parent - 1].box;
        if (!verify_link(c.base, c.phi, c.links[k - 1], pbox, c.skeleton[k], k, report))
            return false;
    }
    return verify_union(c.base, c.base_box, c.links, c.ktilde, report);
}

}  // namespace cantordist
