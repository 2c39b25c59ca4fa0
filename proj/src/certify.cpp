#include "certify.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <utility>

#include "errors.hpp"

namespace cantordist {

const char* const kRuleDescentMargin = "descent-margin";
const char* const kRuleEmpiricalDeepening = "empirical-deepening";

namespace {

Box2 pair_box(const CantorSet& k1, const Address& a, const CantorSet& k2, const Address& b) {
    return Box2{k1.cell(a), k2.cell(b)};
}

std::string span_text(const Iv& v) {
    return "[" + rat_to_string(v.lo) + ", " + rat_to_string(v.hi) + "]";
}

std::string pair_text(const Address& a, const Address& b) {
    return "(" + address_to_string(a) + ") x (" + address_to_string(b) + ")";
}

}  // namespace

DescentCheck check_descent_margin(const PhiSpec& phi, const Box2& U, const CantorSet& k1,
                                  const Address& a, const CantorSet& k2, const Address& b,
                                  unsigned prec_bits) {
    DescentCheck out;
    auto ga = k1.descent_geometry(a);
    auto gb = k2.descent_geometry(b);
    if (!ga || !gb) {
        out.reason = "no uniform split geometry at a union hull";
        return out;
    }
    SignReport sr = check_derivative_condition(phi, U, pair_box(k1, a, k2, b), prec_bits);
    if (!sr.both_definite()) {
        out.reason = "a partial derivative may change sign over the cell pair";
        return out;
    }
    Rat cx = sr.magnitude[0].lo, Cx = sr.magnitude[0].hi;
    Rat cy = sr.magnitude[1].lo, Cy = sr.magnitude[1].hi;
    if (!(cx > 0) || !(cy > 0)) {
        out.reason = "a partial derivative magnitude floor vanishes";
        return out;
    }
    // Every future round compares one set's gap bound against the other set's
    // width bound one or two refinements later, so the gap bounds must decay
    // at least as fast as the opposing width lower bounds.
    if (!(ga->gap_decay <= gb->width_lb_decay) || !(gb->gap_decay <= ga->width_lb_decay)) {
        out.reason = "split gaps decay more slowly than the bridging cell widths";
        return out;
    }
    // First-coordinate-first alternation: a split gap of cell(a) at round k
    // (image jump <= Cx * gap) must be bridged by the full image height of
    // the round-k cell of b (>= cy * width); a split gap of cell(b) at round
    // k by the height of the already refined round-(k+1) cell of a. The decay
    // dominances reduce all rounds to the two k = 0 inequalities.
    Rat s1 = Rat(cy * gb->width - Cx * ga->gap1_ub);
    Rat s2 = Rat(cx * ga->width * ga->width_lb_decay - Cy * gb->gap1_ub);
    if (s1 >= 0 && s2 >= 0) {
        out.ok = true;
        out.margins = {s1, s2};
        return out;
    }
    // Second-coordinate-first alternation, mirrored.
    Rat t1 = Rat(cx * ga->width - Cy * gb->gap1_ub);
    Rat t2 = Rat(cy * gb->width * gb->width_lb_decay - Cx * ga->gap1_ub);
    if (t1 >= 0 && t2 >= 0) {
        out.ok = true;
        out.margins = {t1, t2};
        return out;
    }
    out.reason = "a split gap outruns the bridging image height in both refinement orders";
    return out;
}

namespace {

// Greedy max-reach walk of `pieces` (sorted by lo, then hi descending) over
// `target`; returns the minimal covering slack, or nullopt if the walk gets
// stuck. Slacks: cover start below target.lo, overlap at every junction used,
// and final reach past target.hi.
std::optional<Rat> covering_slack(const std::vector<Iv>& pieces, const Iv& target) {
    std::optional<Rat> margin;
    auto note = [&margin](const Rat& s) {
        if (!margin || s < *margin) margin = s;
    };
    Rat c = target.lo;
    std::size_t idx = 0;
    bool have = false;
    Rat best_lo, best_hi;
    while (true) {
        // Pieces arrive sorted by lo, so the set of eligible pieces only
        // grows as c advances; track the farthest reach seen so far.
        while (idx < pieces.size() && pieces[idx].lo <= c) {
            if (!have || pieces[idx].hi > best_hi ||
                (pieces[idx].hi == best_hi && pieces[idx].lo < best_lo)) {
                best_lo = pieces[idx].lo;
                best_hi = pieces[idx].hi;
                have = true;
            }
            ++idx;
        }
        if (!have || best_hi < c) return std::nullopt;
        if (best_hi == c && c < target.hi) return std::nullopt;  // no progress
        note(Rat(c - best_lo));
        c = best_hi;
        if (c >= target.hi) {
            note(Rat(c - target.hi));
            return margin;
        }
    }
}

}  // namespace

DeepeningCheck check_empirical_deepening(const PhiSpec& phi, const Box2& U, const CantorSet& k1,
                                         const Address& a, const CantorSet& k2, const Address& b,
                                         const Iv& target, unsigned generations,
                                         unsigned prec_bits, ArithMode mode) {
    DeepeningCheck out;
    if (generations == 0 || generations > kDeepeningGenerations) {
        out.reason = "generation count must lie in [1, " +
                     std::to_string(kDeepeningGenerations) + "]";
        return out;
    }
    struct FrontPair {
        Address a, b;
    };
    std::vector<FrontPair> front{{a, b}};
    for (unsigned g = 1; g <= generations; ++g) {
        std::vector<FrontPair> next;
        std::vector<Iv> pieces;
        for (const FrontPair& fp : front) {
            unsigned ba = k1.branch_count(fp.a);
            unsigned bb = k2.branch_count(fp.b);
            for (unsigned i = 0; i < ba; ++i) {
                Address ca = fp.a;
                ca.push_back(i);
                for (unsigned j = 0; j < bb; ++j) {
                    Address cb = fp.b;
                    cb.push_back(j);
                    RobustImage r = robust_image(phi, U, pair_box(k1, ca, k2, cb), prec_bits, mode);
                    if (auto in = r.inner()) pieces.push_back(*in);
                    // A pair whose outer bracket misses the target can never
                    // help cover it, and neither can its descendants.
                    if (r.outer().intersects(target)) {
                        if (next.size() >= kDeepeningFrontCap) {
                            out.reason = "descendant front exceeds " +
                                         std::to_string(kDeepeningFrontCap) +
                                         " pairs at generation " + std::to_string(g);
                            return out;
                        }
                        next.push_back({ca, std::move(cb)});
                    }
                }
            }
        }
        std::sort(pieces.begin(), pieces.end(), [](const Iv& x, const Iv& y) {
            if (x.lo != y.lo) return x.lo < y.lo;
            return x.hi > y.hi;
        });
        std::optional<Rat> slack = covering_slack(pieces, target);
        if (!slack) {
            out.reason = "generation " + std::to_string(g) + " below " + pair_text(a, b) +
                         " leaves the target uncovered";
            return out;
        }
        out.margins.push_back(*slack);
        front = std::move(next);
    }
    out.ok = true;
    return out;
}

CoverageCertificate certify_cover(const PhiSpec& phi, const Box2& U, const CantorSet& k1,
                                  const CantorSet& k2, const Iv& target, const SearchBudget& budget,
                                  ArithMode mode, unsigned prec_bits) {
    const auto t0 = std::chrono::steady_clock::now();
    auto check_clock = [&]() {
        if (budget.wall_clock_ms == 0) return;
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        if (ms > budget.wall_clock_ms)
            fail(Errc::BudgetExhausted,
                 "wall clock cap of " + std::to_string(budget.wall_clock_ms) +
                     " ms exceeded; no certificate was found (coverage is not disproved)");
    };

    CoverageCertificate cert{phi, U, k1, k2, target, mode, prec_bits, false, false, {}};
    cert.pin_overlap_warning = U.x.intersects(k1.hull()) || U.y.intersects(k2.hull());

    RobustImage root_img = robust_image(phi, U, Box2{k1.hull(), k2.hull()}, prec_bits, mode);
    auto root_inner = root_img.inner();
    if (!root_inner || !root_inner->contains(target))
        fail(Errc::AdmissibilityFailure,
             "target " + span_text(target) + " is not inside the robust image " +
                 (root_inner ? span_text(*root_inner) : std::string("(empty)")) +
                 " of the hull pair");
    if (budget.max_tasks == 0) fail(Errc::BudgetExhausted, "task budget is zero");
    cert.nodes.push_back(CertNode{target, {}, {}, *root_inner, {}, std::nullopt});

    // Widest open target first; ties toward the leftmost, then the oldest.
    struct Pending {
        Rat width, lo;
        std::uint64_t seq;
        std::uint32_t node;
        unsigned depth;
    };
    auto later = [](const Pending& x, const Pending& y) {
        if (x.width != y.width) return x.width < y.width;
        if (x.lo != y.lo) return x.lo > y.lo;
        return x.seq > y.seq;
    };
    std::priority_queue<Pending, std::vector<Pending>, decltype(later)> queue(later);
    std::uint64_t seq = 0;
    queue.push({target.width(), target.lo, seq++, 0, 0});

    while (!queue.empty()) {
        check_clock();
        Pending cur = queue.top();
        queue.pop();
        const Iv task_target = cert.nodes[cur.node].target;
        const Address ta = cert.nodes[cur.node].a;
        const Address tb = cert.nodes[cur.node].b;

        DescentCheck dc = check_descent_margin(phi, U, k1, ta, k2, tb, prec_bits);
        if (dc.ok) {
            cert.nodes[cur.node].leaf = LeafRecord{kRuleDescentMargin, false, dc.margins};
            continue;
        }
        if (cur.depth >= budget.max_depth) {
            DeepeningCheck ec = check_empirical_deepening(phi, U, k1, ta, k2, tb, task_target,
                                                          kDeepeningGenerations, prec_bits, mode);
            if (!ec.ok)
                fail(Errc::BudgetExhausted,
                     "cells " + pair_text(ta, tb) + " at the depth cap close under neither "
                     "leaf rule (" + dc.reason + "; " + ec.reason +
                     "); no certificate was found (coverage is not disproved)");
            cert.nodes[cur.node].leaf = LeafRecord{kRuleEmpiricalDeepening, true, ec.margins};
            cert.heuristic = true;
            continue;
        }

        // Lockstep one-letter split: all child pairs with a usable inner image,
        // ordered by image start, then wider first, then letters.
        struct Candidate {
            Iv inner;
            Rat width;
            unsigned i, j;
        };
        std::vector<Candidate> cand;
        const unsigned ba = k1.branch_count(ta);
        const unsigned bb = k2.branch_count(tb);
        for (unsigned i = 0; i < ba; ++i) {
            Address ca = ta;
            ca.push_back(i);
            for (unsigned j = 0; j < bb; ++j) {
                Address cb = tb;
                cb.push_back(j);
                RobustImage r = robust_image(phi, U, pair_box(k1, ca, k2, cb), prec_bits, mode);
                if (auto in = r.inner()) cand.push_back({*in, in->width(), i, j});
            }
        }
        std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
            if (x.inner.lo != y.inner.lo) return x.inner.lo < y.inner.lo;
            if (x.width != y.width) return x.width > y.width;
            if (x.i != y.i) return x.i < y.i;
            return x.j < y.j;
        });

        // Greedy left-to-right cover of the task target; the reach of each
        // chosen pair becomes the next child's start, so children partition
        // the target exactly.
        std::vector<std::pair<std::size_t, Iv>> cover;
        Rat c = task_target.lo;
        while (true) {
            std::size_t bi = cand.size();
            for (std::size_t k = 0; k < cand.size(); ++k) {
                if (cand[k].inner.lo > c) break;
                if (bi == cand.size() || cand[k].inner.hi > cand[bi].inner.hi ||
                    (cand[k].inner.hi == cand[bi].inner.hi && cand[k].width > cand[bi].width))
                    bi = k;
            }
            if (bi == cand.size() || cand[bi].inner.hi < c ||
                (cand[bi].inner.hi == c && c < task_target.hi))
                fail(Errc::BudgetExhausted,
                     "no child image below " + pair_text(ta, tb) + " covers t = " +
                         rat_to_string(c) +
                         "; no certificate was found (coverage is not disproved)");
            Rat reach = rat_min(cand[bi].inner.hi, task_target.hi);
            cover.emplace_back(bi, Iv(c, reach));
            c = reach;
            if (c == task_target.hi) break;
        }

        std::vector<std::uint32_t> child_ids;
        child_ids.reserve(cover.size());
        for (const auto& [ci, sub] : cover) {
            if (cert.nodes.size() >= budget.max_tasks ||
                cert.nodes.size() >= std::size_t{1} << 31)
                fail(Errc::BudgetExhausted,
                     "task budget of " + std::to_string(budget.max_tasks) +
                         " nodes exhausted; no certificate was found (coverage is not "
                         "disproved)");
            Address ca = ta;
            ca.push_back(cand[ci].i);
            Address cb = tb;
            cb.push_back(cand[ci].j);
            auto id = static_cast<std::uint32_t>(cert.nodes.size());
            cert.nodes.push_back(CertNode{sub, std::move(ca), std::move(cb), cand[ci].inner,
                                          {}, std::nullopt});
            queue.push({sub.width(), sub.lo, seq++, id, cur.depth + 1});
            child_ids.push_back(id);
        }
        cert.nodes[cur.node].children = std::move(child_ids);
    }
    return cert;
}

namespace {

bool verify_fail(VerifyReport* rep, const char* stage, std::size_t node, std::string detail) {
    if (rep) {
        rep->ok = false;
        rep->stage = stage;
        rep->node = node;
        rep->detail = std::move(detail);
    }
    return false;
}

}  // namespace

bool verify_certificate(const CoverageCertificate& cert, VerifyReport* rep) {
    if (rep) *rep = VerifyReport{};
    const auto& nodes = cert.nodes;

    // s1: tree shape and cell address discipline.
    if (nodes.empty()) return verify_fail(rep, "s1", 0, "certificate has no nodes");
    if (!nodes[0].a.empty() || !nodes[0].b.empty())
        return verify_fail(rep, "s1", 0, "the root node must sit on the hull pair");
    std::vector<unsigned> refs(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const CertNode& n = nodes[i];
        if (n.a.size() != n.b.size())
            return verify_fail(rep, "s1", i, "cell addresses must refine in lockstep");
        for (std::uint32_t ch : n.children) {
            if (ch >= nodes.size() || ch <= i)
                return verify_fail(rep, "s1", i, "child index out of order");
            refs[ch]++;
            const CertNode& c = nodes[ch];
            if (c.a.size() != n.a.size() + 1 || c.b.size() != n.b.size() + 1 ||
                !std::equal(n.a.begin(), n.a.end(), c.a.begin()) ||
                !std::equal(n.b.begin(), n.b.end(), c.b.begin()))
                return verify_fail(rep, "s1", ch,
                                   "child cells must extend the parent cells by one letter");
            if (c.a.back() >= cert.k1.branch_count(n.a) ||
                c.b.back() >= cert.k2.branch_count(n.b))
                return verify_fail(rep, "s1", ch, "child letter exceeds the branch count");
        }
    }
    if (refs[0] != 0) return verify_fail(rep, "s1", 0, "the root must not be a child");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (refs[i] != 1)
            return verify_fail(rep, "s1", i, "every non-root node needs exactly one parent");

    // s2: root binding and parameters.
    if (!(nodes[0].target == cert.target))
        return verify_fail(rep, "s2", 0, "root target differs from the certified interval");
    if (cert.prec_bits < 16) return verify_fail(rep, "s2", 0, "precision below 16 bits");

    // s3: stored image enclosures lie inside exact recomputations. The stored
    // inner endpoints must not undercut the recomputed outer root enclosures,
    // which bounds any tampering by the root enclosure width.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        RobustImage r = robust_image(cert.phi, cert.pins,
                                     pair_box(cert.k1, nodes[i].a, cert.k2, nodes[i].b),
                                     cert.prec_bits, ArithMode::Exact);
        if (nodes[i].image.lo < r.lower_encl.lo || nodes[i].image.hi > r.upper_encl.hi)
            return verify_fail(rep, "s3", i,
                               "stored image enclosure exceeds the recomputed robust image");
    }

    // s4: admissibility.
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (!nodes[i].image.contains(nodes[i].target))
            return verify_fail(rep, "s4", i, "target escapes the stored image enclosure");

    // s5: children partition internal targets exactly, in order.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const CertNode& n = nodes[i];
        if (n.children.empty()) continue;
        if (!(nodes[n.children.front()].target.lo == n.target.lo))
            return verify_fail(rep, "s5", i, "first child target does not start the parent target");
        for (std::size_t k = 0; k + 1 < n.children.size(); ++k)
            if (!(nodes[n.children[k]].target.hi == nodes[n.children[k + 1]].target.lo))
                return verify_fail(rep, "s5", i, "adjacent child targets do not meet exactly");
        if (!(nodes[n.children.back()].target.hi == n.target.hi))
            return verify_fail(rep, "s5", i, "last child target does not end the parent target");
    }

    // s6: leaf closure rules re-verified from scratch.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const CertNode& n = nodes[i];
        if (!n.children.empty()) {
            if (n.leaf) return verify_fail(rep, "s6", i, "internal node carries a leaf record");
            continue;
        }
        if (!n.leaf) return verify_fail(rep, "s6", i, "leaf without a closure record");
        const LeafRecord& lr = *n.leaf;
        if (lr.rule == kRuleDescentMargin) {
            DescentCheck dc =
                check_descent_margin(cert.phi, cert.pins, cert.k1, n.a, cert.k2, n.b,
                                     cert.prec_bits);
            if (!dc.ok)
                return verify_fail(rep, "s6", i, "descent-margin conditions fail: " + dc.reason);
        } else if (lr.rule == kRuleEmpiricalDeepening) {
            auto gens = static_cast<unsigned>(lr.margins.size());
            if (gens == 0 || gens > kDeepeningGenerations)
                return verify_fail(rep, "s6", i, "empirical-deepening generation count "
                                                 "out of range");
            DeepeningCheck ec =
                check_empirical_deepening(cert.phi, cert.pins, cert.k1, n.a, cert.k2, n.b,
                                          n.target, gens, cert.prec_bits, ArithMode::Exact);
            if (!ec.ok)
                return verify_fail(rep, "s6", i,
                                   "empirical deepening fails on recheck: " + ec.reason);
        } else {
            return verify_fail(rep, "s6", i, "unknown closure rule '" + lr.rule + "'");
        }
    }

    // s7: flags and audit data.
    bool any_heuristic = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].leaf) continue;
        const LeafRecord& lr = *nodes[i].leaf;
        if (lr.heuristic != (lr.rule == kRuleEmpiricalDeepening))
            return verify_fail(rep, "s7", i, "heuristic mark does not match the rule");
        any_heuristic = any_heuristic || lr.heuristic;
        for (const Rat& m : lr.margins)
            if (m < 0) return verify_fail(rep, "s7", i, "negative closure margin");
    }
    if (cert.heuristic != any_heuristic)
        return verify_fail(rep, "s7", 0, "certificate heuristic flag does not match the leaves");
    bool overlap = cert.pins.x.intersects(cert.k1.hull()) ||
                   cert.pins.y.intersects(cert.k2.hull());
    if (cert.pin_overlap_warning != overlap)
        return verify_fail(rep, "s7", 0, "pin-overlap warning flag is wrong");
    return true;
}

Iv suggest_target(const PhiSpec& phi, const Box2& U, const CantorSet& k1, const CantorSet& k2,
                  unsigned depth, unsigned prec_bits, ArithMode mode) {
    Address a, b;
    for (unsigned d = 0; d < depth; ++d) {
        const unsigned ba = k1.branch_count(a);
        const unsigned bb = k2.branch_count(b);
        std::optional<Iv> best;
        unsigned best_i = 0, best_j = 0;
        for (unsigned i = 0; i < ba; ++i) {
            Address ca = a;
            ca.push_back(i);
            for (unsigned j = 0; j < bb; ++j) {
                Address cb = b;
                cb.push_back(j);
                RobustImage r = robust_image(phi, U, pair_box(k1, ca, k2, cb), prec_bits, mode);
                auto in = r.inner();
                if (!in) continue;
                if (!best || in->width() > best->width() ||
                    (in->width() == best->width() && in->lo < best->lo)) {
                    best = *in;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (!best)
            fail(Errc::EmptyIntersection, "every child image below " + pair_text(a, b) +
                                              " has an empty robust inner part");
        a.push_back(best_i);
        b.push_back(best_j);
    }

    // Deepen below the chain pair for as many generations as the front cap
    // allows, keeping the inner images of the deepest generation that still
    // has any. With a wide pin box the robust inners of very small cells
    // vanish, so deepening stops at the last productive level.
    RobustImage chain_img = robust_image(phi, U, pair_box(k1, a, k2, b), prec_bits, mode);
    auto chain_inner = chain_img.inner();
    if (!chain_inner)
        fail(Errc::EmptyIntersection, "the robust image of " + pair_text(a, b) +
                                          " has an empty inner part");
    std::vector<Iv> pieces{*chain_inner};
    struct FrontPair {
        Address a, b;
    };
    std::vector<FrontPair> front{{a, b}};
    for (unsigned g = 1; g <= kDeepeningGenerations; ++g) {
        std::size_t expanded = 0;
        for (const FrontPair& fp : front)
            expanded += std::size_t{1} * k1.branch_count(fp.a) * k2.branch_count(fp.b);
        if (expanded > kDeepeningFrontCap) break;
        std::vector<FrontPair> next;
        std::vector<Iv> gen_pieces;
        next.reserve(expanded);
        for (const FrontPair& fp : front) {
            unsigned ba = k1.branch_count(fp.a);
            unsigned bb = k2.branch_count(fp.b);
            for (unsigned i = 0; i < ba; ++i) {
                Address ca = fp.a;
                ca.push_back(i);
                for (unsigned j = 0; j < bb; ++j) {
                    Address cb = fp.b;
                    cb.push_back(j);
                    RobustImage r =
                        robust_image(phi, U, pair_box(k1, ca, k2, cb), prec_bits, mode);
                    if (auto in = r.inner()) gen_pieces.push_back(*in);
                    next.push_back({ca, std::move(cb)});
                }
            }
        }
        if (gen_pieces.empty()) break;
        pieces = std::move(gen_pieces);
        front = std::move(next);
    }

    IntervalUnion merged(pieces);
    const Iv* widest = &merged.parts().front();
    for (const Iv& p : merged.parts())
        if (p.width() > widest->width()) widest = &p;
    Rat third = Rat(widest->width() / 3);
    return Iv(Rat(widest->lo + third), Rat(widest->hi - third));
}

}  // namespace cantordist
