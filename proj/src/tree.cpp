#include "tree.hpp"

#include <algorithm>
#include <set>

#include "errors.hpp"

namespace cantordist {

namespace {

constexpr std::size_t kMaxVertices = std::size_t(1) << 20;

bool is_prefix(const Label& p, const Label& v) {
    return p.size() <= v.size() && std::equal(p.begin(), p.end(), v.begin());
}

}  // namespace

std::string label_to_string(const Label& l) { return address_to_string(l); }

Label label_from_string(const std::string& s) {
    Label l = address_from_string(s);
    if (l.empty() || l.front() != 0) fail(Errc::MalformedSpec, "label must start at the root 0");
    return l;
}

std::string label_compact(const Label& l) {
    std::string out;
    for (unsigned c : l) {
        if (c > 9) fail(Errc::MalformedSpec, "compact label form needs letters 0..9");
        out.push_back(char('0' + c));
    }
    return out;
}

bool kb_before(const Label& a, const Label& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

LabeledTree LabeledTree::build(const std::map<Label, unsigned>& child_counts) {
    std::set<Label> verts;
    verts.insert(root());
    // std::map iterates prefixes before their extensions, so a parent's
    // children are always registered before a deeper key is checked
    for (const auto& [label, count] : child_counts) {
        if (label.empty() || label.front() != 0)
            fail(Errc::MalformedSpec, "label must start at the root 0: " + label_to_string(label));
        if (!verts.count(label))
            fail(Errc::MalformedSpec, "unreachable label " + label_to_string(label));
        for (unsigned i = 0; i < count; ++i) {
            Label c = label;
            c.push_back(i);
            verts.insert(std::move(c));
        }
        if (verts.size() > kMaxVertices) fail(Errc::MalformedSpec, "tree too large");
    }
    LabeledTree t;
    t.verts_.assign(verts.begin(), verts.end());
    std::sort(t.verts_.begin(), t.verts_.end(), kb_before);
    return t;
}

unsigned LabeledTree::depth() const {
    std::size_t d = 1;
    for (const Label& v : verts_) d = std::max(d, v.size());
    return unsigned(d - 1);
}

bool LabeledTree::has(const Label& v) const {
    return std::binary_search(verts_.begin(), verts_.end(), v, kb_before);
}

unsigned LabeledTree::child_count(const Label& v) const {
    if (!has(v)) fail(Errc::InvalidAddress, "unknown vertex " + label_to_string(v));
    unsigned n = 0;
    Label c = v;
    c.push_back(0);
    while (has(c)) {
        ++n;
        c.back() = n;
    }
    return n;
}

std::vector<Label> LabeledTree::children(const Label& v) const {
    unsigned n = child_count(v);
    std::vector<Label> out;
    out.reserve(n);
    for (unsigned i = 0; i < n; ++i) {
        Label c = v;
        c.push_back(i);
        out.push_back(std::move(c));
    }
    return out;
}

Label LabeledTree::parent(const Label& v) {
    if (v.size() < 2) fail(Errc::InvalidAddress, "root has no parent");
    Label p = v;
    p.pop_back();
    return p;
}

EdgeOrder kb_order(const LabeledTree& t) {
    EdgeOrder eo;
    eo.edges.reserve(t.size() == 0 ? 0 : t.size() - 1);
    // vertices() is already KB-sorted; children inherit that order
    for (const Label& v : t.vertices()) {
        if (v.size() < 2) continue;
        eo.edges.emplace_back(LabeledTree::parent(v), v);
    }
    return eo;
}

LabeledTree subtree(const LabeledTree& t, const Label& v) {
    if (!t.has(v)) fail(Errc::InvalidAddress, "unknown vertex " + label_to_string(v));
    std::map<Label, unsigned> counts;
    for (const Label& w : t.vertices()) {
        if (!is_prefix(v, w)) continue;
        Label relabeled = LabeledTree::root();
        relabeled.insert(relabeled.end(), w.begin() + v.size(), w.end());
        unsigned n = t.child_count(w);
        if (n > 0) counts[relabeled] = n;
    }
    return LabeledTree::build(counts);
}

std::vector<Iv> assemble_vector(const LabeledTree& t, const std::map<Label, Pt2>& points,
                                const PhiSpec& phi, unsigned prec_bits) {
    for (const Label& v : t.vertices()) {
        if (!points.count(v))
            fail(Errc::MalformedSpec, "no point for vertex " + label_to_string(v));
    }
    const auto& vs = t.vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Pt2& a = points.at(vs[i]);
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            const Pt2& b = points.at(vs[j]);
            if (a.x == b.x && a.y == b.y)
                fail(Errc::DuplicatePoint, "vertices " + label_to_string(vs[i]) + " and " +
                                               label_to_string(vs[j]) + " share a point");
        }
    }
    std::vector<Iv> out;
    EdgeOrder eo = kb_order(t);
    out.reserve(eo.edges.size());
    for (const auto& [p, c] : eo.edges) {
        Rat key = phi_power_key(phi, points.at(p), points.at(c));
        out.push_back(phi_value_from_key(phi, key, prec_bits));
    }
    return out;
}

}  // namespace cantordist
