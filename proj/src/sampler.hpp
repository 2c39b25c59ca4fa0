#pragma once

#include <map>
#include <vector>

#include "cantor.hpp"
#include "phi.hpp"
#include "tree.hpp"

namespace cantordist {

// Finite brute-force stand-in for a Cantor set: every guaranteed member
// point at a fixed construction depth, sorted and exact. Everything built
// on clouds is an independent oracle, not a certificate.
struct SampleCloud {
    CantorSet set;
    unsigned depth = 0;
    std::vector<Rat> points;  // strictly increasing
};

// All member points of depth-`depth` addresses. depth beyond max_depth (or
// a cloud too large to hold) raises DepthTooLarge.
SampleCloud sample_points(const CantorSet& set, unsigned depth, unsigned max_depth = 16);

// Exact sampled pinned-distance set: one entry per distinct value of
// phi(z, (a, b)) over the product of two clouds. Values are stored as exact
// power keys (the p-th power for norms, the raw value for the dot map);
// keys sort and deduplicate exactly like the values they encode.
struct SampledDistanceSet {
    Pt2 pin;
    PhiSpec phi;
    std::vector<Rat> keys;  // sorted, distinct
    std::vector<Iv> values(unsigned prec_bits = 64) const;
    std::vector<double> values_double() const;
};

SampledDistanceSet sampled_pinned_set(const PhiSpec& phi, const Pt2& z, const SampleCloud& A,
                                      const SampleCloud& B);

// Streaming epsilon-cover check: does every pin's sampled distance set hit
// the target interval densely enough? Values are binned at epsilon/10;
// per-pin gap bounds are conservative (an empty run of k bins reports a
// gap bound of (k+2) bins). Double precision by design — this is the
// non-rigorous cross-check, not the certificate.
struct CoverReport {
    double epsilon = 0;
    double bin_width = 0;
    std::vector<double> per_pin_gap_bound;
    double max_gap_bound = 0;
    bool covered = false;
};

CoverReport sampled_cover_check(const PhiSpec& phi, const std::vector<Pt2>& pins,
                                const SampleCloud& A, const SampleCloud& B, const Iv& target,
                                double epsilon);

// One product sample set K_i x K~_i backing a chain link or tree edge.
struct ProductCloud {
    SampleCloud a, b;
};

struct ChainRealization {
    std::vector<Pt2> points;     // y^1 .. y^n, exact cloud members
    std::vector<double> errors;  // |phi - target_i| achieved per link
};

// Greedy per-link realization: from the previous point, take the cloud pair
// nearest the target value, skipping any pair that exactly equals an
// already-chosen point. Throws NoRealization (best achieved error in the
// message) when a link cannot be matched within tol.
ChainRealization realize_chain(const PhiSpec& phi, const Pt2& y0, const std::vector<Rat>& target,
                               const std::vector<ProductCloud>& clouds, double tol);

struct TreeRealization {
    std::map<Label, Pt2> points;  // includes the pinned root
    std::vector<double> errors;   // per edge, kb_order
};

// Tree variant: edges are realized in kb_order, so a parent's point is
// always fixed before its children look for theirs. Targets follow the
// kb_order coordinate layout; clouds are keyed by child vertex.
TreeRealization realize_tree(const PhiSpec& phi, const LabeledTree& t, const Pt2& y_root,
                             const std::vector<Rat>& target,
                             const std::map<Label, ProductCloud>& clouds, double tol);

// Default realization tolerance at a sampling depth: hull width times the
// coarsest per-level width decay, depth - 2 times.
Rat default_sample_tol(const CantorSet& set, unsigned depth);

}  // namespace cantordist
