#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cantor.hpp"
#include "certify.hpp"
#include "interval.hpp"
#include "phi.hpp"
#include "tree.hpp"

namespace cantordist {

// Output of the pin-wiggling construction over an interval I: a fat
// gap-schedule partner living on a carrier q inside I, certified so that
// every pin in pin_box attains every distance in `target` against
// (restriction of the base set to q) x ktilde.
struct PartnerResult {
    CantorSet ktilde;          // fat partner; hull() == q
    Box2 pin_box;              // square neighborhood of the requested pin
    Iv target;                 // certified distance interval, positive width
    CoverageCertificate cert;  // cert.k1 = base restricted to q, cert.k2 = ktilde
    Iv q;                      // carrier subinterval of I
    // When the pin ordinate v.y lies in I, q is chosen from a cell that
    // avoids it and lambda2 is a disjoint subinterval of I around v.y;
    // empty otherwise (then q == I).
    std::optional<Iv> lambda2;
};

// Searches the two-parameter gap-schedule family over q: pin-box radius and
// initial gap both start at |q|/8 (the radius additionally capped by half
// the distance separating v.y from q when v.y lies in I) and are halved
// jointly up to kPartnerAttempts times; each size is tried with gap ratios
// 1/2 and 1/4, and the first attempt whose certificate both verifies and
// whose partner strictly out-measures the restriction wins.
PartnerResult construct_partner(const CantorSet& K, const Iv& I, const Pt2& v,
                                const SearchBudget& budget = {},
                                const PhiSpec& phi = PhiSpec::euclidean(),
                                ArithMode mode = ArithMode::Exact, unsigned prec_bits = 64);

inline constexpr unsigned kPartnerAttempts = 12;

// Standalone recheck of a partner result: the embedded certificate verifies
// in exact arithmetic, its fields match the stored ones, the partner is a
// gap schedule carried on q that strictly out-measures the certified base
// restriction, and the exclusion strip (when present) stays clear of q.
bool verify_partner(const PartnerResult& p, VerifyReport* report = nullptr);

// n distinct diagonal points (p, p), each p the member point of a distinct
// depth-`depth` cell, spread greedily to maximize the minimum pairwise
// separation: start at the leftmost point, then repeatedly add the point
// farthest from those chosen (ties to the smaller value). Sorted ascending.
std::vector<Pt2> select_skeleton(const CantorSet& K, std::size_t n, unsigned depth);

// One certified link: every pin in the PREVIOUS box (the parent box for
// trees) attains every distance in `target` against restriction x ktilde,
// and that product lives inside `box`.
struct LinkRecord {
    CantorSet restriction;     // base set cut down to box.x
    CantorSet ktilde;          // fat partner on the carrier box.x
    Box2 box;                  // square neighborhood of this link's skeleton point
    Iv target;                 // certified distance interval of the link
    CoverageCertificate cert;  // pins contain the previous/parent box
};

// A certified n-link chain: for every start y0 in base_box with coordinates
// in base x ktilde, each vector of the box target_1 x ... x target_n is a
// consecutive-distance vector of a chain y0, y1, .., yn in base x ktilde.
struct ChainCertificate {
    CantorSet base;
    PhiSpec phi;
    unsigned n = 0;
    std::vector<Pt2> skeleton;      // n+1 diagonal points, ascending
    Box2 base_box;                  // pin region of the whole chain
    std::vector<LinkRecord> links;  // link i at index i-1, pinned at point i-1
    CantorSet ktilde;               // base restricted to base_box.x + all link partners
};

// The certified box: one target interval per link, in chain order.
std::vector<Iv> certified_box(const ChainCertificate& c);

ChainCertificate build_chain(const CantorSet& K, unsigned n, const SearchBudget& budget = {},
                             const PhiSpec& phi = PhiSpec::euclidean(),
                             ArithMode mode = ArithMode::Exact, unsigned prec_bits = 64);

bool verify_chain(const ChainCertificate& c, VerifyReport* report = nullptr);

// The tree analogue: vertices carry diagonal skeleton points in the
// canonical vertex order; every non-root vertex carries a link record whose
// pins contain its parent's box, and an internal vertex's box is the
// common-center intersection of the pin boxes its children returned.
struct TreeCertificate {
    CantorSet base;
    PhiSpec phi;
    LabeledTree tree;
    std::vector<Pt2> skeleton;      // one point per vertex, in vertex order
    Box2 base_box;                  // the root's box
    std::vector<LinkRecord> links;  // non-root vertices, in vertex order
    CantorSet ktilde;
};

// One target interval per edge, ordered like the tree's emitted coordinates
// (each link is the edge onto its vertex).
std::vector<Iv> certified_box(const TreeCertificate& c);

TreeCertificate build_tree(const CantorSet& K, const LabeledTree& T,
                           const SearchBudget& budget = {},
                           const PhiSpec& phi = PhiSpec::euclidean(),
                           ArithMode mode = ArithMode::Exact, unsigned prec_bits = 64);

bool verify_tree(const TreeCertificate& c, VerifyReport* report = nullptr);

}  // namespace cantordist
