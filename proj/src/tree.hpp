#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cantor.hpp"
#include "phi.hpp"

namespace cantordist {

// Vertex label: the root is the one-letter word {0}; a child extends its
// parent's word by its sibling index. Integer letters keep sibling index 10
// unambiguous where digit strings would not.
using Label = std::vector<unsigned>;

std::string label_to_string(const Label& l);   // dot-joined, e.g. "0.1.0"
Label label_from_string(const std::string& s);
// digit-concatenated form ("010"); requires every letter <= 9
std::string label_compact(const Label& l);

// Kleene-Brouwer comparison as the emitted coordinate order: shallower
// vertices come first, ties broken lexicographically, so the layout runs
// 0, 00, 01, 000, 001, 010, 011 on the binary depth-2 tree.
bool kb_before(const Label& a, const Label& b);

// Finite rooted tree as a prefix-closed label set, canonically ordered.
class LabeledTree {
public:
    // child_counts maps a vertex label to its number of children; children
    // get sibling indices 0..count-1. Every key must be reachable from the
    // root through the counts themselves.
    static LabeledTree build(const std::map<Label, unsigned>& child_counts);

    const std::vector<Label>& vertices() const { return verts_; }  // KB order
    std::size_t size() const { return verts_.size(); }
    unsigned depth() const;  // root alone has depth 0
    bool has(const Label& v) const;
    unsigned child_count(const Label& v) const;
    std::vector<Label> children(const Label& v) const;
    static Label root() { return Label{0}; }
    static Label parent(const Label& v);  // v must not be the root

    friend bool operator==(const LabeledTree& a, const LabeledTree& b) {
        return a.verts_ == b.verts_;
    }

private:
    std::vector<Label> verts_;
};

// Edges (parent, child) sorted by the KB position of the child; this is the
// coordinate order of every distance vector the toolkit emits.
struct EdgeOrder {
    std::vector<std::pair<Label, Label>> edges;
};

EdgeOrder kb_order(const LabeledTree& t);

// Subtree rooted at v, relabeled canonically so v becomes the root word.
LabeledTree subtree(const LabeledTree& t, const Label& v);

// Distance vector of a point configuration: one phi-value enclosure per
// edge, in kb_order coordinate order. Points must cover all vertices and be
// pairwise distinct.
std::vector<Iv> assemble_vector(const LabeledTree& t, const std::map<Label, Pt2>& points,
                                const PhiSpec& phi = PhiSpec::euclidean(),
                                unsigned prec_bits = 64);

}  // namespace cantordist
