#include "docio.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <utility>

namespace cantordist {

// All readers funnel through these accessors so a malformed document fails
// with the field name instead of a bare JSON type error.
const Doc& doc_field(const Doc& d, const char* key) {
    if (!d.is_object()) fail(Errc::ConfigError, std::string("expected an object holding '") + key + "'");
    auto it = d.find(key);
    if (it == d.end()) fail(Errc::ConfigError, std::string("missing field '") + key + "'");
    return *it;
}

std::string doc_str(const Doc& d, const char* key) {
    const Doc& f = doc_field(d, key);
    if (!f.is_string()) fail(Errc::ConfigError, std::string("field '") + key + "' must be a string");
    return f.get<std::string>();
}

std::uint64_t doc_uint(const Doc& d, const char* key) {
    const Doc& f = doc_field(d, key);
    if (f.is_number_unsigned()) return f.get<std::uint64_t>();
    if (f.is_number_integer()) {
        std::int64_t v = f.get<std::int64_t>();
        if (v >= 0) return static_cast<std::uint64_t>(v);
    }
    fail(Errc::ConfigError, std::string("field '") + key + "' must be a nonnegative integer");
}

bool doc_bool(const Doc& d, const char* key) {
    const Doc& f = doc_field(d, key);
    if (!f.is_boolean()) fail(Errc::ConfigError, std::string("field '") + key + "' must be a boolean");
    return f.get<bool>();
}

const Doc& doc_array(const Doc& d, const char* key) {
    const Doc& f = doc_field(d, key);
    if (!f.is_array()) fail(Errc::ConfigError, std::string("field '") + key + "' must be an array");
    return f;
}

double doc_num(const Doc& d, const char* key) {
    const Doc& f = doc_field(d, key);
    if (!f.is_number()) fail(Errc::ConfigError, std::string("field '") + key + "' must be a number");
    return f.get<double>();
}

namespace {

const Doc& field(const Doc& d, const char* key) { return doc_field(d, key); }
std::string str_field(const Doc& d, const char* key) { return doc_str(d, key); }
std::uint64_t uint_field(const Doc& d, const char* key) { return doc_uint(d, key); }
bool bool_field(const Doc& d, const char* key) { return doc_bool(d, key); }
const Doc& array_field(const Doc& d, const char* key) { return doc_array(d, key); }
Rat rat_field(const Doc& d, const char* key) { return rat_from_doc(doc_field(d, key)); }

Doc doc_from_address(const Address& a) { return Doc(address_to_string(a)); }

Address address_from_doc(const Doc& d) {
    if (!d.is_string()) fail(Errc::ConfigError, "addresses must be dotted strings");
    return address_from_string(d.get<std::string>());
}

Doc doc_from_link(const LinkRecord& l) {
    Doc d;
    d["restriction"] = doc_from_set(l.restriction);
    d["ktilde"] = doc_from_set(l.ktilde);
    d["box"] = doc_from_box(l.box);
    d["target"] = doc_from_iv(l.target);
    d["certificate"] = doc_from_certificate(l.cert);
    return d;
}

LinkRecord link_from_doc(const Doc& d) {
    return LinkRecord{set_from_doc(field(d, "restriction")), set_from_doc(field(d, "ktilde")),
                      box_from_doc(field(d, "box")), iv_from_doc(field(d, "target")),
                      certificate_from_doc(field(d, "certificate"))};
}

std::vector<LinkRecord> links_from_doc(const Doc& d, const char* key) {
    std::vector<LinkRecord> links;
    for (const Doc& ld : array_field(d, key)) links.push_back(link_from_doc(ld));
    return links;
}

std::vector<Pt2> skeleton_from_doc(const Doc& d, const char* key) {
    std::vector<Pt2> pts;
    for (const Doc& pd : array_field(d, key)) pts.push_back(pt_from_doc(pd));
    return pts;
}

Doc doc_from_skeleton(const std::vector<Pt2>& pts) {
    Doc a = Doc::array();
    for (const Pt2& p : pts) a.push_back(doc_from_pt(p));
    return a;
}

void require_kind(const Doc& d, const char* key, const char* want) {
    std::string got = str_field(d, key);
    if (got != want)
        fail(Errc::ConfigError,
             std::string("expected ") + key + " '" + want + "', found '" + got + "'");
}

}  // namespace

// --- scalars and geometry ----------------------------------------------------

Doc doc_from_rat(const Rat& r) { return Doc(rat_to_string(r)); }

Rat rat_from_doc(const Doc& d) {
    if (d.is_string()) return rat_from_string(d.get<std::string>());
    if (d.is_number_integer()) {
        Rat r;
        r = static_cast<long>(d.get<std::int64_t>());
        return r;
    }
    fail(Errc::ConfigError, "exact numbers must be \"p/q\" strings or integers, not " +
                                std::string(d.is_number() ? "floating point" : d.type_name()));
}

Doc doc_from_iv(const Iv& v) {
    Doc d;
    d["lo"] = doc_from_rat(v.lo);
    d["hi"] = doc_from_rat(v.hi);
    return d;
}

Iv iv_from_doc(const Doc& d) { return Iv(rat_field(d, "lo"), rat_field(d, "hi")); }

Doc doc_from_pt(const Pt2& p) {
    Doc d;
    d["x"] = doc_from_rat(p.x);
    d["y"] = doc_from_rat(p.y);
    return d;
}

Pt2 pt_from_doc(const Doc& d) { return Pt2{rat_field(d, "x"), rat_field(d, "y")}; }

Doc doc_from_box(const Box2& b) {
    Doc d;
    d["x"] = doc_from_iv(b.x);
    d["y"] = doc_from_iv(b.y);
    return d;
}

Box2 box_from_doc(const Doc& d) {
    return Box2{iv_from_doc(field(d, "x")), iv_from_doc(field(d, "y"))};
}

Doc doc_from_phi(const PhiSpec& phi) {
    Doc d;
    switch (phi.kind) {
        case PhiKind::Euclidean: d["kind"] = "euclidean"; break;
        case PhiKind::PNorm:
            d["kind"] = "pnorm";
            d["p"] = phi.p;
            break;
        case PhiKind::Dot: d["kind"] = "dot"; break;
    }
    return d;
}

PhiSpec phi_from_doc(const Doc& d) {
    std::string kind = str_field(d, "kind");
    if (kind == "euclidean") return PhiSpec::euclidean();
    if (kind == "dot") return PhiSpec::dot();
    if (kind == "pnorm") return PhiSpec::pnorm(static_cast<unsigned>(uint_field(d, "p")));
    fail(Errc::ConfigError, "unknown distance map kind '" + kind + "'");
}

std::string mode_to_string(ArithMode m) { return m == ArithMode::Exact ? "exact" : "fast"; }

ArithMode mode_from_string(const std::string& s) {
    if (s == "exact") return ArithMode::Exact;
    if (s == "fast") return ArithMode::Fast;
    fail(Errc::ConfigError, "mode must be 'exact' or 'fast', not '" + s + "'");
}

Doc doc_from_budget(const SearchBudget& b) {
    Doc d;
    d["max_depth"] = b.max_depth;
    d["max_tasks"] = b.max_tasks;
    d["wall_clock_ms"] = b.wall_clock_ms;
    return d;
}

SearchBudget budget_from_doc(const Doc& d) {
    if (!d.is_object()) fail(Errc::ConfigError, "budget must be an object");
    SearchBudget b;
    if (d.count("max_depth")) b.max_depth = static_cast<unsigned>(uint_field(d, "max_depth"));
    if (d.count("max_tasks")) b.max_tasks = uint_field(d, "max_tasks");
    if (d.count("wall_clock_ms"))
        b.wall_clock_ms = static_cast<unsigned>(uint_field(d, "wall_clock_ms"));
    return b;
}

// --- set models ---------------------------------------------------------------

Doc doc_from_set(const CantorSet& s) {
    Doc d;
    switch (s.kind()) {
        case ModelKind::Ifs: {
            d["kind"] = "ifs";
            d["hull"] = doc_from_iv(s.hull());
            Doc maps = Doc::array();
            for (const AffineMap& m : s.ifs_maps()) {
                Doc md;
                md["ratio"] = doc_from_rat(m.ratio);
                md["offset"] = doc_from_rat(m.offset);
                maps.push_back(std::move(md));
            }
            d["maps"] = std::move(maps);
            break;
        }
        case ModelKind::Gaps: {
            Rat g, rho;
            unsigned feasible_depth = 0;
            s.gaps_params(g, rho, feasible_depth);
            d["kind"] = "gaps";
            d["hull"] = doc_from_iv(s.hull());
            d["g"] = doc_from_rat(g);
            d["rho"] = doc_from_rat(rho);
            d["feasible_depth"] = feasible_depth;
            break;
        }
        case ModelKind::Union: {
            d["kind"] = "union";
            Doc parts = Doc::array();
            for (const CantorSet& p : s.union_parts()) parts.push_back(doc_from_set(p));
            d["parts"] = std::move(parts);
            break;
        }
    }
    return d;
}

CantorSet set_from_doc(const Doc& d) {
    std::string kind = str_field(d, "kind");
    if (kind == "ifs") {
        std::vector<AffineMap> maps;
        for (const Doc& md : array_field(d, "maps"))
            maps.push_back(AffineMap{rat_field(md, "ratio"), rat_field(md, "offset")});
        return CantorSet::affine_ifs(iv_from_doc(field(d, "hull")), std::move(maps));
    }
    if (kind == "gaps") {
        unsigned fd = d.count("feasible_depth")
                          ? static_cast<unsigned>(uint_field(d, "feasible_depth"))
                          : 64;
        return CantorSet::gap_schedule(iv_from_doc(field(d, "hull")), rat_field(d, "g"),
                                       rat_field(d, "rho"), fd);
    }
    if (kind == "union") {
        std::vector<CantorSet> parts;
        for (const Doc& pd : array_field(d, "parts")) parts.push_back(set_from_doc(pd));
        return CantorSet::finite_union(std::move(parts));
    }
    fail(Errc::ConfigError, "unknown set kind '" + kind + "' (want ifs, gaps, or union)");
}

// --- tree shapes ----------------------------------------------------------------

Doc doc_from_tree(const LabeledTree& t) {
    Doc d = Doc::object();
    for (const Label& v : t.vertices()) d[label_to_string(v)] = t.child_count(v);
    return d;
}

LabeledTree tree_from_doc(const Doc& d) {
    if (!d.is_object() || d.empty())
        fail(Errc::ConfigError, "a tree shape is a nonempty object of {label: child count}");
    std::map<Label, unsigned> counts;
    for (auto it = d.begin(); it != d.end(); ++it) {
        const Doc& v = it.value();
        bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
        if (!ok)
            fail(Errc::ConfigError, "child count of '" + it.key() + "' must be a nonnegative integer");
        counts[label_from_string(it.key())] = static_cast<unsigned>(v.get<std::int64_t>());
    }
    return LabeledTree::build(counts);
}

// --- certificates ------------------------------------------------------------------

Doc doc_from_certificate(const CoverageCertificate& c) {
    Doc d;
    d["certificate_kind"] = "cover";
    d["phi"] = doc_from_phi(c.phi);
    d["pins"] = doc_from_box(c.pins);
    d["k1"] = doc_from_set(c.k1);
    d["k2"] = doc_from_set(c.k2);
    d["target"] = doc_from_iv(c.target);
    d["mode"] = mode_to_string(c.mode);
    d["prec_bits"] = c.prec_bits;
    d["heuristic"] = c.heuristic;
    d["pin_overlap_warning"] = c.pin_overlap_warning;
    Doc nodes = Doc::array();
    for (const CertNode& n : c.nodes) {
        Doc nd;
        nd["target"] = doc_from_iv(n.target);
        nd["a"] = doc_from_address(n.a);
        nd["b"] = doc_from_address(n.b);
        nd["image"] = doc_from_iv(n.image);
        nd["children"] = n.children;
        if (n.leaf) {
            Doc ld;
            ld["rule"] = n.leaf->rule;
            ld["heuristic"] = n.leaf->heuristic;
            Doc margins = Doc::array();
            for (const Rat& m : n.leaf->margins) margins.push_back(doc_from_rat(m));
            ld["margins"] = std::move(margins);
            nd["leaf"] = std::move(ld);
        }
        nodes.push_back(std::move(nd));
    }
    d["nodes"] = std::move(nodes);
    return d;
}

CoverageCertificate certificate_from_doc(const Doc& d) {
    require_kind(d, "certificate_kind", "cover");
    CoverageCertificate c{phi_from_doc(field(d, "phi")),
                          box_from_doc(field(d, "pins")),
                          set_from_doc(field(d, "k1")),
                          set_from_doc(field(d, "k2")),
                          iv_from_doc(field(d, "target")),
                          mode_from_string(str_field(d, "mode")),
                          static_cast<unsigned>(uint_field(d, "prec_bits")),
                          bool_field(d, "heuristic"),
                          bool_field(d, "pin_overlap_warning"),
                          {}};
    for (const Doc& nd : array_field(d, "nodes")) {
        CertNode n{iv_from_doc(field(nd, "target")), address_from_doc(field(nd, "a")),
                   address_from_doc(field(nd, "b")), iv_from_doc(field(nd, "image")),
                   {},
                   std::nullopt};
        for (const Doc& cd : array_field(nd, "children")) {
            bool ok = cd.is_number_unsigned() ||
                      (cd.is_number_integer() && cd.get<std::int64_t>() >= 0);
            if (!ok) fail(Errc::ConfigError, "node children must be nonnegative indices");
            n.children.push_back(static_cast<std::uint32_t>(cd.get<std::int64_t>()));
        }
        if (nd.count("leaf")) {
            const Doc& ld = field(nd, "leaf");
            LeafRecord leaf{str_field(ld, "rule"), bool_field(ld, "heuristic"), {}};
            for (const Doc& md : array_field(ld, "margins")) leaf.margins.push_back(rat_from_doc(md));
            n.leaf = std::move(leaf);
        }
        c.nodes.push_back(std::move(n));
    }
    return c;
}

Doc doc_from_partner(const PartnerResult& p) {
    Doc d;
    d["result_kind"] = "partner";
    d["q"] = doc_from_iv(p.q);
    if (p.lambda2) d["lambda2"] = doc_from_iv(*p.lambda2);
    d["pin_box"] = doc_from_box(p.pin_box);
    d["target"] = doc_from_iv(p.target);
    d["ktilde"] = doc_from_set(p.ktilde);
    d["certificate"] = doc_from_certificate(p.cert);
    return d;
}

PartnerResult partner_from_doc(const Doc& d) {
    require_kind(d, "result_kind", "partner");
    std::optional<Iv> lambda2;
    if (d.count("lambda2")) lambda2 = iv_from_doc(field(d, "lambda2"));
    return PartnerResult{set_from_doc(field(d, "ktilde")),
                         box_from_doc(field(d, "pin_box")),
                         iv_from_doc(field(d, "target")),
                         certificate_from_doc(field(d, "certificate")),
                         iv_from_doc(field(d, "q")),
                         std::move(lambda2)};
}

Doc doc_from_chain(const ChainCertificate& c) {
    Doc d;
    d["certificate_kind"] = "chain";
    d["base"] = doc_from_set(c.base);
    d["phi"] = doc_from_phi(c.phi);
    d["n"] = c.n;
    d["skeleton"] = doc_from_skeleton(c.skeleton);
    d["base_box"] = doc_from_box(c.base_box);
    Doc links = Doc::array();
    for (const LinkRecord& l : c.links) links.push_back(doc_from_link(l));
    d["links"] = std::move(links);
    d["ktilde"] = doc_from_set(c.ktilde);
    return d;
}

ChainCertificate chain_from_doc(const Doc& d) {
    require_kind(d, "certificate_kind", "chain");
    return ChainCertificate{set_from_doc(field(d, "base")),
                            phi_from_doc(field(d, "phi")),
                            static_cast<unsigned>(uint_field(d, "n")),
                            skeleton_from_doc(d, "skeleton"),
                            box_from_doc(field(d, "base_box")),
                            links_from_doc(d, "links"),
                            set_from_doc(field(d, "ktilde"))};
}

Doc doc_from_tree_certificate(const TreeCertificate& c) {
    Doc d;
    d["certificate_kind"] = "tree";
    d["base"] = doc_from_set(c.base);
    d["phi"] = doc_from_phi(c.phi);
    d["tree"] = doc_from_tree(c.tree);
    d["skeleton"] = doc_from_skeleton(c.skeleton);
    d["base_box"] = doc_from_box(c.base_box);
    Doc links = Doc::array();
    for (const LinkRecord& l : c.links) links.push_back(doc_from_link(l));
    d["links"] = std::move(links);
    d["ktilde"] = doc_from_set(c.ktilde);
    return d;
}

TreeCertificate tree_certificate_from_doc(const Doc& d) {
    require_kind(d, "certificate_kind", "tree");
    return TreeCertificate{set_from_doc(field(d, "base")),
                           phi_from_doc(field(d, "phi")),
                           tree_from_doc(field(d, "tree")),
                           skeleton_from_doc(d, "skeleton"),
                           box_from_doc(field(d, "base_box")),
                           links_from_doc(d, "links"),
                           set_from_doc(field(d, "ktilde"))};
}

// --- result reports -------------------------------------------------------------

Doc doc_from_verify(const VerifyReport& r) {
    Doc d;
    d["ok"] = r.ok;
    d["stage"] = r.stage;
    d["node"] = r.node;
    d["detail"] = r.detail;
    return d;
}

Doc doc_from_dimension(const DimensionReport& r) {
    Doc d;
    d["hausdorff_lower"] = r.hausdorff_lower;
    d["hausdorff_upper"] = r.hausdorff_upper;
    d["box_upper"] = r.box_upper;
    d["method"] = r.method;
    return d;
}

Doc doc_from_thickness(const ThicknessReport& r) {
    Doc d;
    d["value_lo"] = doc_from_rat(r.value_lo);
    d["value_hi"] = doc_from_rat(r.value_hi);
    d["exact"] = r.exact;
    d["truncated"] = r.truncated;
    d["depth"] = r.depth;
    Doc records = Doc::array();
    for (const GapRecord& g : r.records) {
        Doc gd;
        gd["left_bridge"] = doc_from_rat(g.left_bridge);
        gd["right_bridge"] = doc_from_rat(g.right_bridge);
        gd["gap"] = doc_from_rat(g.gap);
        records.push_back(std::move(gd));
    }
    d["records"] = std::move(records);
    return d;
}

Doc doc_from_cover_report(const CoverReport& r) {
    Doc d;
    d["epsilon"] = r.epsilon;
    d["bin_width"] = r.bin_width;
    d["max_gap_bound"] = r.max_gap_bound;
    d["covered"] = r.covered;
    d["per_pin_gap_bound"] = r.per_pin_gap_bound;
    return d;
}

// --- canonical text, hashing, files ------------------------------------------------

std::string canonical_text(const Doc& d) { return d.dump(2) + "\n"; }

std::string doc_hash(const Doc& d) {
    std::string text = canonical_text(d);
    std::uint64_t h = 14695981039346656037ULL;  // FNV-1a offset basis
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;  // FNV prime
    }
    std::ostringstream out;
    out << "fnv64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

Doc parse_text(const std::string& text) {
    Doc d = Doc::parse(text, nullptr, false);
    if (d.is_discarded()) fail(Errc::ConfigError, "malformed document: not valid JSON");
    return d;
}

Doc read_doc(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::ConfigError, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::ConfigError, "cannot open '" + path + "' for writing");
    out << text;
    if (!out.flush()) fail(Errc::ConfigError, "failed writing '" + path + "'");
}

}  // namespace cantordist
