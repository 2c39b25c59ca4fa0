#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <utility>
#include <vector>

namespace cantordist {

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::BudgetExhausted:
        case Errc::DepthTooLarge:
        case Errc::NoRealization:
            return 2;
        case Errc::VerifyFailure:
            return 3;
        case Errc::Internal:
            return 1;
        default:
            return 4;  // config and domain-input errors
    }
}

namespace {

using Clock = std::chrono::steady_clock;

// Everything a command needs besides its own sub-config: the named set
// definitions plus the cross-cutting knobs, with CLI overrides folded in.
struct RunContext {
    std::map<std::string, CantorSet> sets;
    PhiSpec phi = PhiSpec::euclidean();
    ArithMode mode = ArithMode::Exact;
    unsigned prec_bits = 64;
    SearchBudget budget;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

RunContext load_context(const Doc& config, const CliOverrides& o) {
    if (!config.is_object()) fail(Errc::ConfigError, "config must be a JSON object");
    RunContext ctx;
    if (config.count("sets")) {
        const Doc& sets = doc_field(config, "sets");
        if (!sets.is_object()) fail(Errc::ConfigError, "'sets' must map names to set models");
        for (auto it = sets.begin(); it != sets.end(); ++it)
            ctx.sets.emplace(it.key(), set_from_doc(it.value()));
    }
    if (config.count("phi")) ctx.phi = phi_from_doc(doc_field(config, "phi"));
    if (config.count("mode")) ctx.mode = mode_from_string(doc_str(config, "mode"));
    if (config.count("prec_bits")) ctx.prec_bits = static_cast<unsigned>(doc_uint(config, "prec_bits"));
    if (config.count("budget")) ctx.budget = budget_from_doc(doc_field(config, "budget"));
    if (config.count("threads")) ctx.threads = static_cast<unsigned>(doc_uint(config, "threads"));
    if (config.count("seed")) ctx.seed = doc_uint(config, "seed");
    if (o.mode) ctx.mode = *o.mode;
    if (o.max_depth) ctx.budget.max_depth = *o.max_depth;
    if (o.max_tasks) ctx.budget.max_tasks = *o.max_tasks;
    if (o.threads) ctx.threads = o.threads;
    if (o.seed) ctx.seed = o.seed;
    if (ctx.budget.max_depth == 0) fail(Errc::ConfigError, "budget.max_depth must be positive");
    if (ctx.budget.max_tasks == 0) fail(Errc::ConfigError, "budget.max_tasks must be positive");
    if (ctx.prec_bits < 8) fail(Errc::ConfigError, "prec_bits must be at least 8");
    if (ctx.threads && *ctx.threads == 0) fail(Errc::ConfigError, "threads must be positive");
    return ctx;
}

CantorSet resolve_set_value(const RunContext& ctx, const Doc& f, const std::string& what) {
    if (f.is_string()) {
        const std::string name = f.get<std::string>();
        auto it = ctx.sets.find(name);
        if (it == ctx.sets.end())
            fail(Errc::ConfigError, "unknown set '" + name + "' referenced by " + what);
        return it->second;
    }
    if (f.is_object()) return set_from_doc(f);
    fail(Errc::ConfigError, what + " must name a set from 'sets' or define one inline");
}

CantorSet resolve_set(const RunContext& ctx, const Doc& parent, const char* key) {
    return resolve_set_value(ctx, doc_field(parent, key), std::string("field '") + key + "'");
}

std::int64_t elapsed_ms(Clock::time_point t0) {
    return std::llround(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
}

CmdResult finish(Doc rep, int code, Clock::time_point t0) {
    Doc timing;
    timing["wall_ms"] = elapsed_ms(t0);
    rep["timing"] = std::move(timing);  // volatile section, always last
    return CmdResult{std::move(rep), code};
}

Doc report_head(const char* command, const Doc& config) {
    Doc rep;
    Doc tool;
    tool["name"] = "cantordist";
    tool["version"] = "0.1.0";
    rep["tool"] = std::move(tool);
    rep["command"] = command;
    rep["config_hash"] = doc_hash(config);
    return rep;
}

Doc status_ok() {
    Doc s;
    s["ok"] = true;
    return s;
}

Doc status_error(Errc code, const std::string& message) {
    Doc err;
    err["code"] = errc_name(code);
    err["message"] = message;
    Doc s;
    s["ok"] = false;
    s["error"] = std::move(err);
    return s;
}

template <class Body>
CmdResult run_one(const char* command, const Doc& config, const CliOverrides& o, Body&& body) {
    const auto t0 = Clock::now();
    Doc rep = report_head(command, config);
    int code = 0;
    try {
        RunContext ctx = load_context(config, o);
        rep["mode"] = mode_to_string(ctx.mode);
        if (ctx.threads) rep["threads"] = *ctx.threads;
        if (ctx.seed) rep["seed"] = *ctx.seed;
        rep["result"] = body(ctx);
        rep["status"] = status_ok();
    } catch (const DomainError& e) {
        rep["status"] = status_error(e.code(), e.what());
        code = exit_code_for(e.code());
    }
    return finish(std::move(rep), code, t0);
}

// Sub-config {"set": ..., "depth": N, "max_depth"?: N} -> sampled cloud.
SampleCloud cloud_from(const RunContext& ctx, const Doc& parent, const char* key) {
    const Doc& cd = doc_field(parent, key);
    CantorSet s = resolve_set(ctx, cd, "set");
    unsigned depth = static_cast<unsigned>(doc_uint(cd, "depth"));
    unsigned max_depth = cd.count("max_depth") ? static_cast<unsigned>(doc_uint(cd, "max_depth")) : 16;
    return sample_points(s, depth, max_depth);
}

std::vector<Pt2> pins_from(const Doc& cfg) {
    std::vector<Pt2> pins;
    if (cfg.count("pins")) {
        for (const Doc& pd : doc_array(cfg, "pins")) pins.push_back(pt_from_doc(pd));
    } else {
        const Doc& g = doc_field(cfg, "pin_grid");
        Box2 box = box_from_doc(doc_field(g, "box"));
        unsigned n = static_cast<unsigned>(doc_uint(g, "n"));
        if (n == 0) fail(Errc::ConfigError, "pin_grid.n must be positive");
        auto coord = [n](const Iv& v, unsigned i) {
            if (n == 1) return v.mid();
            return Rat(v.lo + Rat(v.width() * Rat(i) / Rat(n - 1)));
        };
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = 0; j < n; ++j) pins.push_back(Pt2{coord(box.x, i), coord(box.y, j)});
    }
    if (pins.empty()) fail(Errc::ConfigError, "no pins given");
    return pins;
}

Doc doc_from_cloud(const SampleCloud& c) {
    Doc d;
    d["depth"] = c.depth;
    d["count"] = c.points.size();
    Doc vals = Doc::array();
    for (const Rat& p : c.points) vals.push_back(doc_from_rat(p));
    d["values"] = std::move(vals);
    return d;
}

Doc doc_from_pt2_list(const std::vector<Pt2>& pts) {
    Doc a = Doc::array();
    for (const Pt2& p : pts) a.push_back(doc_from_pt(p));
    return a;
}

Doc doc_from_iv_list(const std::vector<Iv>& ivs) {
    Doc a = Doc::array();
    for (const Iv& v : ivs) a.push_back(doc_from_iv(v));
    return a;
}

// Payload discovery for verification: a bare certificate/partner document,
// or one embedded in a command report under "result".
const Doc* find_payload(const Doc& d) {
    auto is_payload = [](const Doc& x) {
        return x.is_object() && (x.count("certificate_kind") || x.count("result_kind"));
    };
    if (is_payload(d)) return &d;
    if (d.is_object() && d.count("result")) {
        const Doc& res = d.at("result");
        if (is_payload(res)) return &res;
        for (const char* key : {"certificate", "partner", "chain", "tree_certificate"})
            if (res.is_object() && res.count(key) && is_payload(res.at(key))) return &res.at(key);
    }
    return nullptr;
}

// Loads the chain or tree certificate for sample/realize: an inline payload
// document, a report embedding one, or a string path to either on disk.
Doc payload_doc(const Doc& f) {
    Doc holder = f.is_string() ? read_doc(f.get<std::string>()) : f;
    const Doc* p = find_payload(holder);
    if (!p) fail(Errc::ConfigError, "no certificate found in the referenced document");
    return *p;
}

std::vector<std::vector<Rat>> realize_targets(const Doc& cfg, const std::vector<Iv>& boxes,
                                              const std::optional<std::uint64_t>& seed) {
    std::vector<std::vector<Rat>> targets;
    if (cfg.count("targets")) {
        for (const Doc& td : doc_array(cfg, "targets")) {
            if (!td.is_array() || td.size() != boxes.size())
                fail(Errc::ConfigError, "each realize target must list one value per coordinate");
            std::vector<Rat> t;
            for (const Doc& vd : td) t.push_back(rat_from_doc(vd));
            targets.push_back(std::move(t));
        }
    } else {
        std::uint64_t count = doc_uint(cfg, "count");
        std::mt19937_64 rng(seed ? *seed : 0);
        for (std::uint64_t k = 0; k < count; ++k) {
            std::vector<Rat> t;
            for (const Iv& box : boxes) {
                std::uniform_real_distribution<double> dist(box.lo.get_d(), box.hi.get_d());
                t.emplace_back(dist(rng));
            }
            targets.push_back(std::move(t));
        }
    }
    if (targets.empty()) fail(Errc::ConfigError, "realize needs at least one target");
    return targets;
}

Doc realize_chain_doc(const RunContext& ctx, const Doc& cfg) {
    ChainCertificate c = chain_from_doc(payload_doc(doc_field(cfg, "chain")));
    unsigned depth = cfg.count("depth") ? static_cast<unsigned>(doc_uint(cfg, "depth")) : 12;
    std::vector<ProductCloud> clouds;
    for (const LinkRecord& l : c.links)
        clouds.push_back(ProductCloud{sample_points(l.restriction, depth, depth),
                                      sample_points(l.ktilde, depth, depth)});
    double tol = cfg.count("tol") ? doc_num(cfg, "tol") : default_sample_tol(c.base, depth).get_d();
    Pt2 y0 = cfg.count("pin") ? pt_from_doc(doc_field(cfg, "pin")) : c.skeleton.at(0);
    std::vector<Iv> boxes = certified_box(c);
    Doc runs = Doc::array();
    for (const std::vector<Rat>& t : realize_targets(cfg, boxes, ctx.seed)) {
        ChainRealization run = realize_chain(c.phi, y0, t, clouds, tol);
        Doc rd;
        Doc td = Doc::array();
        for (const Rat& v : t) td.push_back(doc_from_rat(v));
        rd["target"] = std::move(td);
        rd["points"] = doc_from_pt2_list(run.points);
        rd["errors"] = run.errors;
        runs.push_back(std::move(rd));
    }
    Doc r;
    r["kind"] = "chain";
    r["links"] = c.links.size();
    r["depth"] = depth;
    r["tol"] = tol;
    r["certified_box"] = doc_from_iv_list(boxes);
    r["runs"] = std::move(runs);
    return r;
}

Doc realize_tree_doc(const RunContext& ctx, const Doc& cfg) {
    TreeCertificate c = tree_certificate_from_doc(payload_doc(doc_field(cfg, "tree")));
    unsigned depth = cfg.count("depth") ? static_cast<unsigned>(doc_uint(cfg, "depth")) : 12;
    const std::vector<Label>& verts = c.tree.vertices();
    std::map<Label, ProductCloud> clouds;
    for (std::size_t k = 1; k < verts.size(); ++k)
        clouds.emplace(verts[k], ProductCloud{sample_points(c.links[k - 1].restriction, depth, depth),
                                              sample_points(c.links[k - 1].ktilde, depth, depth)});
    double tol = cfg.count("tol") ? doc_num(cfg, "tol") : default_sample_tol(c.base, depth).get_d();
    Pt2 y0 = cfg.count("pin") ? pt_from_doc(doc_field(cfg, "pin")) : c.skeleton.at(0);
    std::vector<Iv> boxes = certified_box(c);
    Doc runs = Doc::array();
    for (const std::vector<Rat>& t : realize_targets(cfg, boxes, ctx.seed)) {
        TreeRealization run = realize_tree(c.phi, c.tree, y0, t, clouds, tol);
        Doc rd;
        Doc td = Doc::array();
        for (const Rat& v : t) td.push_back(doc_from_rat(v));
        rd["target"] = std::move(td);
        Doc pts;
        for (const auto& [label, p] : run.points) pts[label_to_string(label)] = doc_from_pt(p);
        rd["points"] = std::move(pts);
        rd["errors"] = run.errors;
        runs.push_back(std::move(rd));
    }
    Doc r;
    r["kind"] = "tree";
    r["edges"] = c.links.size();
    r["depth"] = depth;
    r["tol"] = tol;
    r["certified_box"] = doc_from_iv_list(boxes);
    r["runs"] = std::move(runs);
    return r;
}

}  // namespace

CmdResult cmd_certify(const Doc& config, const CliOverrides& o) {
    return run_one("certify", config, o, [&config](const RunContext& ctx) {
        const Doc& cfg = doc_field(config, "certify");
        CantorSet k1 = resolve_set(ctx, cfg, "k1");
        CantorSet k2 = resolve_set(ctx, cfg, "k2");
        Box2 pins = box_from_doc(doc_field(cfg, "pins"));
        Doc r;
        Iv target = [&] {
            if (cfg.count("target")) return iv_from_doc(doc_field(cfg, "target"));
            unsigned depth = cfg.count("suggest_depth")
                                 ? static_cast<unsigned>(doc_uint(cfg, "suggest_depth"))
                                 : 6;
            Iv t = suggest_target(ctx.phi, pins, k1, k2, depth, ctx.prec_bits, ctx.mode);
            r["suggested_target"] = doc_from_iv(t);
            return t;
        }();
        CoverageCertificate cert =
            certify_cover(ctx.phi, pins, k1, k2, target, ctx.budget, ctx.mode, ctx.prec_bits);
        VerifyReport vr;
        if (!verify_certificate(cert, &vr))
            fail(Errc::Internal, "freshly built certificate failed recheck at stage " + vr.stage);
        r["certificate"] = doc_from_certificate(cert);
        r["nodes"] = cert.nodes.size();
        r["verify"] = doc_from_verify(vr);
        return r;
    });
}

CmdResult cmd_partner(const Doc& config, const CliOverrides& o) {
    return run_one("partner", config, o, [&config](const RunContext& ctx) {
        const Doc& cfg = doc_field(config, "partner");
        CantorSet K = resolve_set(ctx, cfg, "set");
        Iv I = iv_from_doc(doc_field(cfg, "interval"));
        Pt2 v = pt_from_doc(doc_field(cfg, "pin"));
        PartnerResult pr = construct_partner(K, I, v, ctx.budget, ctx.phi, ctx.mode, ctx.prec_bits);
        VerifyReport vr;
        if (!verify_partner(pr, &vr))
            fail(Errc::Internal, "freshly built partner failed recheck at stage " + vr.stage);
        Doc r;
        r["partner"] = doc_from_partner(pr);
        r["measure_lower_bound"] = doc_from_rat(pr.ktilde.measure_lower_bound());
        r["target_width"] = doc_from_rat(pr.target.width());
        r["verify"] = doc_from_verify(vr);
        return r;
    });
}

CmdResult cmd_chain(const Doc& config, const CliOverrides& o) {
    return run_one("chain", config, o, [&config](const RunContext& ctx) {
        const Doc& cfg = doc_field(config, "chain");
        CantorSet K = resolve_set(ctx, cfg, "set");
        unsigned n = static_cast<unsigned>(doc_uint(cfg, "n"));
        ChainCertificate c = build_chain(K, n, ctx.budget, ctx.phi, ctx.mode, ctx.prec_bits);
        VerifyReport vr;
        if (!verify_chain(c, &vr))
            fail(Errc::Internal, "freshly built chain failed recheck at stage " + vr.stage);
        Doc r;
        r["chain"] = doc_from_chain(c);
        r["certified_box"] = doc_from_iv_list(certified_box(c));
        r["verify"] = doc_from_verify(vr);
        return r;
    });
}

CmdResult cmd_tree(const Doc& config, const CliOverrides& o) {
    return run_one("tree", config, o, [&config](const RunContext& ctx) {
        const Doc& cfg = doc_field(config, "tree");
        CantorSet K = resolve_set(ctx, cfg, "set");
        LabeledTree T = tree_from_doc(doc_field(cfg, "shape"));
        TreeCertificate c = build_tree(K, T, ctx.budget, ctx.phi, ctx.mode, ctx.prec_bits);
        VerifyReport vr;
        if (!verify_tree(c, &vr))
            fail(Errc::Internal, "freshly built tree failed recheck at stage " + vr.stage);
        Doc r;
        r["tree_certificate"] = doc_from_tree_certificate(c);
        Doc edges = Doc::array();
        for (const auto& [parent, child] : kb_order(T).edges)
            edges.push_back(Doc::array({label_to_string(parent), label_to_string(child)}));
        r["kb_edges"] = std::move(edges);
        r["certified_box"] = doc_from_iv_list(certified_box(c));
        r["verify"] = doc_from_verify(vr);
        return r;
    });
}

CmdResult cmd_metrics(const Doc& config, const CliOverrides& o) {
    return run_one("metrics", config, o, [&config](const RunContext& ctx) {
        const Doc& cfg = doc_field(config, "metrics");
        CantorSet s = resolve_set(ctx, cfg, "set");
        double tol = cfg.count("tol") ? doc_num(cfg, "tol") : 1e-12;
        unsigned tdepth =
            cfg.count("thickness_depth") ? static_cast<unsigned>(doc_uint(cfg, "thickness_depth")) : 10;
        Doc r;
        if (s.kind() == ModelKind::Ifs) r["moran_dimension"] = moran_dimension(s, tol);
        r["dimension"] = doc_from_dimension(dimension_bounds(s, tol));
        r["thickness"] = doc_from_thickness(thickness(s, tdepth));
        if (cfg.count("product")) {
            const Doc& pd = doc_array(cfg, "product");
            if (pd.size() != 2) fail(Errc::ConfigError, "'product' must list exactly two sets");
            DimensionReport a = dimension_bounds(resolve_set_value(ctx, pd[0], "product[0]"), tol);
            DimensionReport b = dimension_bounds(resolve_set_value(ctx, pd[1], "product[1]"), tol);
            r["product_dimension"] = doc_from_dimension(product_dimension_bounds(a, b));
        }
        return r;
    });
}

CmdResult cmd_sample(const Doc& config, const CliOverrides& o) {
    return run_one("sample", config, o, [&config](const RunContext& ctx) {
        const Doc& cfg = doc_field(config, "sample");
        int branches = static_cast<int>(cfg.count("points")) + static_cast<int>(cfg.count("pinned")) +
                       static_cast<int>(cfg.count("cover")) + static_cast<int>(cfg.count("realize"));
        if (branches != 1)
            fail(Errc::ConfigError,
                 "sample config must contain exactly one of points/pinned/cover/realize");
        Doc r;
        if (cfg.count("points")) {
            r["points"] = doc_from_cloud(cloud_from(ctx, cfg, "points"));
        } else if (cfg.count("pinned")) {
            const Doc& pc = doc_field(cfg, "pinned");
            SampledDistanceSet sd =
                sampled_pinned_set(ctx.phi, pt_from_doc(doc_field(pc, "pin")),
                                   cloud_from(ctx, pc, "a"), cloud_from(ctx, pc, "b"));
            Doc pd;
            pd["pin"] = doc_from_pt(sd.pin);
            pd["count"] = sd.keys.size();
            pd["values"] = sd.values_double();
            if (pc.count("exact_keys") && doc_bool(pc, "exact_keys")) {
                Doc keys = Doc::array();
                for (const Rat& k : sd.keys) keys.push_back(doc_from_rat(k));
                pd["power_keys"] = std::move(keys);
            }
            r["pinned"] = std::move(pd);
        } else if (cfg.count("cover")) {
            const Doc& cc = doc_field(cfg, "cover");
            std::vector<Pt2> pins = pins_from(cc);
            CoverReport rep = sampled_cover_check(ctx.phi, pins, cloud_from(ctx, cc, "a"),
                                                  cloud_from(ctx, cc, "b"),
                                                  iv_from_doc(doc_field(cc, "target")),
                                                  doc_num(cc, "epsilon"));
            Doc cd;
            cd["pins_used"] = pins.size();
            cd["report"] = doc_from_cover_report(rep);
            r["cover"] = std::move(cd);
        } else {
            const Doc& rc = doc_field(cfg, "realize");
            if (rc.count("chain") == rc.count("tree"))
                fail(Errc::ConfigError, "realize needs exactly one of 'chain' or 'tree'");
            r["realize"] = rc.count("chain") ? realize_chain_doc(ctx, rc) : realize_tree_doc(ctx, rc);
        }
        return r;
    });
}

CmdResult cmd_verify(const Doc& doc) {
    const auto t0 = Clock::now();
    Doc rep = report_head("verify", doc);
    rep["mode"] = "exact";  // verification always recomputes exactly
    int code = 0;
    try {
        const Doc* payload = find_payload(doc);
        if (!payload) fail(Errc::ConfigError, "document carries no certificate or partner result");
        std::string kind =
            payload->count("certificate_kind") ? doc_str(*payload, "certificate_kind") : "partner";
        VerifyReport vr;
        bool ok = false;
        if (kind == "cover") {
            CoverageCertificate c = certificate_from_doc(*payload);
            ok = verify_certificate(c, &vr);
        } else if (kind == "chain") {
            ChainCertificate c = chain_from_doc(*payload);
            ok = verify_chain(c, &vr);
        } else if (kind == "tree") {
            TreeCertificate c = tree_certificate_from_doc(*payload);
            ok = verify_tree(c, &vr);
        } else if (kind == "partner") {
            PartnerResult p = partner_from_doc(*payload);
            ok = verify_partner(p, &vr);
        } else {
            fail(Errc::ConfigError, "unknown certificate_kind '" + kind + "'");
        }
        Doc r;
        r["certificate_kind"] = kind;
        r["verify"] = doc_from_verify(vr);
        rep["result"] = std::move(r);
        if (ok) {
            rep["status"] = status_ok();
        } else {
            rep["status"] = status_error(Errc::VerifyFailure, "verification failed at stage '" +
                                                                  vr.stage + "': " + vr.detail);
            code = 3;
        }
    } catch (const DomainError& e) {
        rep["status"] = status_error(e.code(), e.what());
        code = exit_code_for(e.code());
    }
    return finish(std::move(rep), code, t0);
}

CmdResult run_command(const std::string& command, const Doc& config, const CliOverrides& o) {
    if (command == "certify") return cmd_certify(config, o);
    if (command == "partner") return cmd_partner(config, o);
    if (command == "chain") return cmd_chain(config, o);
    if (command == "tree") return cmd_tree(config, o);
    if (command == "metrics") return cmd_metrics(config, o);
    if (command == "sample") return cmd_sample(config, o);
    if (command == "verify") return cmd_verify(config);
    fail(Errc::ConfigError, "unknown command '" + command + "'");
}

Doc report_core(const Doc& report) {
    Doc d = report;
    if (d.is_object()) d.erase("timing");
    return d;
}

}  // namespace cantordist
