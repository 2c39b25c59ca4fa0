#include "sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace cantordist {

namespace {

constexpr std::size_t kMaxCloudPoints = std::size_t(1) << 22;
constexpr std::size_t kMaxExactPairs = std::size_t(1) << 22;

std::vector<double> to_doubles(const std::vector<Rat>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (const Rat& x : xs) out.push_back(rat_to_double_down(x));
    return out;
}

double eval_pair(const PhiSpec& phi, double zx, double zy, double ax, double by) {
    return phi_eval(phi, zx, zy, ax, by);
}

}  // namespace

SampleCloud sample_points(const CantorSet& set, unsigned depth, unsigned max_depth) {
    if (depth > max_depth)
        fail(Errc::DepthTooLarge, "sampling depth " + std::to_string(depth) +
                                      " exceeds the configured maximum " +
                                      std::to_string(max_depth));
    if (set.level_cell_count(depth) > kMaxCloudPoints)
        fail(Errc::DepthTooLarge, "sampling depth " + std::to_string(depth) +
                                      " would enumerate too many points");
    SampleCloud c{set, depth, set.level_points(depth, kMaxCloudPoints)};
    return c;
}

std::vector<Iv> SampledDistanceSet::values(unsigned prec_bits) const {
    std::vector<Iv> out;
    out.reserve(keys.size());
    for (const Rat& k : keys) out.push_back(phi_value_from_key(phi, k, prec_bits));
    return out;
}

std::vector<double> SampledDistanceSet::values_double() const {
    std::vector<double> out;
    out.reserve(keys.size());
    for (const Rat& k : keys) {
        Iv v = phi_value_from_key(phi, k, 64);
        out.push_back(rat_to_double_down(v.lo));
    }
    return out;
}

SampledDistanceSet sampled_pinned_set(const PhiSpec& phi, const Pt2& z, const SampleCloud& A,
                                      const SampleCloud& B) {
    if (A.points.empty() || B.points.empty()) fail(Errc::MalformedSpec, "empty sample cloud");
    if (A.points.size() > kMaxExactPairs / B.points.size())
        fail(Errc::DepthTooLarge, "exact pinned set over too many sample pairs");
    SampledDistanceSet out;
    out.pin = z;
    out.phi = phi;
    out.keys.reserve(A.points.size() * B.points.size());
    for (const Rat& a : A.points) {
        for (const Rat& b : B.points) {
            out.keys.push_back(phi_power_key(phi, z, {a, b}));
        }
    }
    std::sort(out.keys.begin(), out.keys.end());
    out.keys.erase(std::unique(out.keys.begin(), out.keys.end()), out.keys.end());
    return out;
}

CoverReport sampled_cover_check(const PhiSpec& phi, const std::vector<Pt2>& pins,
                                const SampleCloud& A, const SampleCloud& B, const Iv& target,
                                double epsilon) {
    if (pins.empty()) fail(Errc::MalformedSpec, "cover check needs at least one pin");
    if (!(epsilon > 0)) fail(Errc::MalformedSpec, "cover epsilon must be positive");
    if (!(target.width() > 0)) fail(Errc::MalformedSpec, "cover target must have positive width");

    CoverReport rep;
    rep.epsilon = epsilon;
    rep.bin_width = epsilon / 10.0;
    // widen the target outward so a pass covers the true interval too
    const double tlo = rat_to_double_down(target.lo);
    const double thi = rat_to_double_up(target.hi);
    const std::size_t nbins = std::size_t((thi - tlo) / rep.bin_width) + 1;
    const double inv_bin = 1.0 / rep.bin_width;

    std::vector<double> ax = to_doubles(A.points);
    std::vector<double> by = to_doubles(B.points);
    std::vector<unsigned char> hit(nbins);

    const bool euclid = phi.kind == PhiKind::Euclidean;
    for (const Pt2& pin : pins) {
        const double zx = rat_to_double_down(pin.x);
        const double zy = rat_to_double_down(pin.y);
        std::fill(hit.begin(), hit.end(), 0);
        if (euclid) {
            // hot path: precompute the y-deviations once per pin
            std::vector<double> dy2(by.size());
            for (std::size_t j = 0; j < by.size(); ++j) {
                double d = by[j] - zy;
                dy2[j] = d * d;
            }
            for (double a : ax) {
                const double dx = a - zx;
                const double dx2 = dx * dx;
                for (double d2 : dy2) {
                    const double v = std::sqrt(dx2 + d2);
                    if (v < tlo || v > thi) continue;
                    std::size_t idx = std::size_t((v - tlo) * inv_bin);
                    hit[idx >= nbins ? nbins - 1 : idx] = 1;
                }
            }
        } else {
            for (double a : ax) {
                for (double b : by) {
                    const double v = eval_pair(phi, zx, zy, a, b);
                    if (v < tlo || v > thi) continue;
                    std::size_t idx = std::size_t((v - tlo) * inv_bin);
                    hit[idx >= nbins ? nbins - 1 : idx] = 1;
                }
            }
        }
        std::size_t longest = 0, run = 0;
        for (unsigned char h : hit) {
            run = h ? 0 : run + 1;
            longest = std::max(longest, run);
        }
        rep.per_pin_gap_bound.push_back(double(longest + 2) * rep.bin_width);
    }
    rep.max_gap_bound =
        *std::max_element(rep.per_pin_gap_bound.begin(), rep.per_pin_gap_bound.end());
    rep.covered = rep.max_gap_bound <= epsilon;
    return rep;
}

namespace {

// nearest cloud pair to `target` from `from`, skipping exact collisions
// with already-chosen points; returns achieved error
double scan_link(const PhiSpec& phi, const Pt2& from, const ProductCloud& cloud, double target,
                 const std::vector<Pt2>& taken, Pt2& best_point) {
    const std::vector<Rat>& ar = cloud.a.points;
    const std::vector<Rat>& br = cloud.b.points;
    if (ar.empty() || br.empty()) fail(Errc::MalformedSpec, "empty link cloud");
    std::vector<double> ax = to_doubles(ar);
    std::vector<double> by = to_doubles(br);
    std::vector<std::pair<double, double>> taken_d;
    taken_d.reserve(taken.size());
    for (const Pt2& p : taken)
        taken_d.emplace_back(rat_to_double_down(p.x), rat_to_double_down(p.y));

    const double fx = rat_to_double_down(from.x);
    const double fy = rat_to_double_down(from.y);
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    bool found = false;
    const bool euclid = phi.kind == PhiKind::Euclidean;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        const double dx2 = (ax[i] - fx) * (ax[i] - fx);
        for (std::size_t j = 0; j < by.size(); ++j) {
            double v;
            if (euclid) {
                const double dy = by[j] - fy;
                v = std::sqrt(dx2 + dy * dy);
            } else {
                v = eval_pair(phi, fx, fy, ax[i], by[j]);
            }
            const double err = std::fabs(v - target);
            if (err >= best) continue;
            // candidate must differ from every chosen point, exactly
            bool collides = false;
            for (std::size_t t = 0; t < taken_d.size() && !collides; ++t) {
                if (taken_d[t].first == ax[i] && taken_d[t].second == by[j]) {
                    collides = taken[t].x == ar[i] && taken[t].y == br[j];
                }
            }
            if (collides) continue;
            best = err;
            bi = i;
            bj = j;
            found = true;
        }
    }
    if (!found) fail(Errc::NoRealization, "all cloud pairs collide with chosen points");
    best_point = {ar[bi], br[bj]};
    return best;
}

}  // namespace

ChainRealization realize_chain(const PhiSpec& phi, const Pt2& y0, const std::vector<Rat>& target,
                               const std::vector<ProductCloud>& clouds, double tol) {
    if (target.size() != clouds.size())
        fail(Errc::MalformedSpec, "one cloud per chain link required");
    if (target.empty()) fail(Errc::MalformedSpec, "empty chain target");
    if (!(tol > 0)) fail(Errc::MalformedSpec, "tolerance must be positive");

    ChainRealization out;
    std::vector<Pt2> taken = {y0};
    Pt2 cur = y0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        Pt2 next{Rat(0), Rat(0)};
        double err = scan_link(phi, cur, clouds[i], rat_to_double_down(target[i]), taken, next);
        if (err > tol) {
            std::ostringstream msg;
            msg << "link " << i << " missed its target: best error " << err << " > tol " << tol;
            fail(Errc::NoRealization, msg.str());
        }
        out.points.push_back(next);
        out.errors.push_back(err);
        taken.push_back(next);
        cur = next;
    }
    return out;
}

TreeRealization realize_tree(const PhiSpec& phi, const LabeledTree& t, const Pt2& y_root,
                             const std::vector<Rat>& target,
                             const std::map<Label, ProductCloud>& clouds, double tol) {
    EdgeOrder eo = kb_order(t);
    if (target.size() != eo.edges.size())
        fail(Errc::MalformedSpec, "target length must match the edge count");
    if (!(tol > 0)) fail(Errc::MalformedSpec, "tolerance must be positive");

    TreeRealization out;
    out.points[LabeledTree::root()] = y_root;
    std::vector<Pt2> taken = {y_root};
    for (std::size_t e = 0; e < eo.edges.size(); ++e) {
        const auto& [parent, child] = eo.edges[e];
        auto it = clouds.find(child);
        if (it == clouds.end())
            fail(Errc::MalformedSpec, "no cloud for vertex " + label_to_string(child));
        // kb_order emits parents before children, so the parent is placed
        const Pt2& from = out.points.at(parent);
        Pt2 next{Rat(0), Rat(0)};
        double err = scan_link(phi, from, it->second, rat_to_double_down(target[e]), taken, next);
        if (err > tol) {
            std::ostringstream msg;
            msg << "edge " << e << " (" << label_to_string(parent) << " -> "
                << label_to_string(child) << ") missed its target: best error " << err
                << " > tol " << tol;
            fail(Errc::NoRealization, msg.str());
        }
        out.points[child] = next;
        out.errors.push_back(err);
        taken.push_back(next);
    }
    return out;
}

namespace {

Rat coarsest_width_decay(const CantorSet& s) {
    switch (s.kind()) {
        case ModelKind::Ifs: {
            Rat m(0);
            for (const AffineMap& a : s.ifs_maps()) m = rat_max(m, a.ratio);
            return m;
        }
        case ModelKind::Gaps:
            return Rat(1, 2);
        case ModelKind::Union: {
            Rat m(0);
            for (const CantorSet& p : s.union_parts()) m = rat_max(m, coarsest_width_decay(p));
            return m;
        }
    }
    fail(Errc::Internal, "unhandled model kind");
}

}  // namespace

Rat default_sample_tol(const CantorSet& set, unsigned depth) {
    Rat rho = coarsest_width_decay(set);
    unsigned e = depth > 2 ? depth - 2 : 0;
    return Rat(set.hull().width() * rat_pow_uint(rho, e));
}

}  // namespace cantordist
