#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace cantordist {

namespace {

double moran_from_ratios(const std::vector<Rat>& ratios) {
    std::vector<double> rs;
    rs.reserve(ratios.size());
    for (const Rat& r : ratios) rs.push_back(rat_to_double_up(r));
    auto f = [&](double s) {
        double t = 0;
        for (double r : rs) t += std::pow(r, s);
        return t;
    };
    // f(0) = N >= 2 and strict separation forces sum r_i < 1 = f at s = 1,
    // so the root lies in (0,1); bisect to machine precision
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && (hi - lo) > 4e-16; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// gaps between consecutive cells of one level, left to right
struct ObservedGap {
    Rat lo, hi, len;
};

std::vector<ObservedGap> level_gaps(const std::vector<Iv>& cells) {
    std::vector<ObservedGap> gaps;
    gaps.reserve(cells.size() - 1);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
        gaps.push_back({cells[i].hi, cells[i + 1].lo, Rat(cells[i + 1].lo - cells[i].hi)});
    }
    return gaps;
}

constexpr std::size_t kMaxThicknessCells = 4096;

}  // namespace

double moran_dimension(const CantorSet& s, double tol) {
    if (s.kind() != ModelKind::Ifs)
        fail(Errc::InvalidModel, "moran dimension needs a self-similar model");
    if (!(tol >= 1e-13)) fail(Errc::MalformedSpec, "tolerance below double bisection reach");
    std::vector<Rat> ratios;
    for (const AffineMap& m : s.ifs_maps()) ratios.push_back(m.ratio);
    return moran_from_ratios(ratios);
}

DimensionReport dimension_bounds(const CantorSet& s, double tol) {
    switch (s.kind()) {
        case ModelKind::Ifs: {
            double d = moran_dimension(s, tol);
            return {d, d, d, "moran-bisection"};
        }
        case ModelKind::Gaps:
            // positive Lebesgue measure pins every dimension at 1
            return {1.0, 1.0, 1.0, "positive-measure"};
        case ModelKind::Union: {
            DimensionReport out{0, 0, 0, "union-max"};
            for (const CantorSet& p : s.union_parts()) {
                DimensionReport r = dimension_bounds(p, tol);
                out.hausdorff_lower = std::max(out.hausdorff_lower, r.hausdorff_lower);
                out.hausdorff_upper = std::max(out.hausdorff_upper, r.hausdorff_upper);
                out.box_upper = std::max(out.box_upper, r.box_upper);
            }
            return out;
        }
    }
    fail(Errc::Internal, "unhandled model kind");
}

DimensionReport product_dimension_bounds(const DimensionReport& a, const DimensionReport& b) {
    DimensionReport out;
    out.hausdorff_lower = a.hausdorff_lower + b.hausdorff_lower;
    out.hausdorff_upper = a.hausdorff_upper + b.box_upper;
    out.box_upper = a.box_upper + b.box_upper;
    out.method = "product";
    return out;
}

ThicknessReport thickness(const CantorSet& s, unsigned depth) {
    if (depth < 1) fail(Errc::MalformedSpec, "thickness needs depth >= 1");

    // closed-form path: equal ratios and equal first-level gaps repeat the
    // same pattern at every scale, so level 1 already gives the infimum
    if (s.kind() == ModelKind::Ifs) {
        const auto& maps = s.ifs_maps();
        bool uniform = true;
        for (const AffineMap& m : maps) uniform = uniform && m.ratio == maps.front().ratio;
        std::vector<Iv> cells = s.level_cells(1, maps.size());
        std::vector<ObservedGap> gaps = level_gaps(cells);
        for (std::size_t i = 0; uniform && i < gaps.size(); ++i)
            uniform = gaps[i].len == gaps.front().len;
        if (uniform) {
            Rat bridge = cells.front().width();  // every cell has this width
            Rat tau = Rat(bridge / gaps.front().len);
            ThicknessReport rep;
            rep.value_lo = rep.value_hi = tau;
            rep.exact = true;
            rep.truncated = false;
            rep.depth = 1;
            for (const ObservedGap& g : gaps) rep.records.push_back({bridge, bridge, g.len});
            return rep;
        }
    }

    // observation path: inspect every gap present at `depth`, reporting the
    // minimum bridge/gap ratio seen; never extrapolated past the cells read
    unsigned d = depth;
    while (d > 1 && s.level_cell_count(d) > kMaxThicknessCells) --d;
    std::vector<Iv> cells = s.level_cells(d, kMaxThicknessCells);
    std::vector<ObservedGap> gaps = level_gaps(cells);
    Iv hull = s.hull();

    ThicknessReport rep;
    rep.exact = false;
    rep.truncated = true;
    rep.depth = d;
    bool first = true;
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        Rat lb = Rat(gaps[j].lo - hull.lo);
        for (std::size_t k = j; k-- > 0;) {
            if (gaps[k].len >= gaps[j].len) {
                lb = Rat(gaps[j].lo - gaps[k].hi);
                break;
            }
        }
        Rat rb = Rat(hull.hi - gaps[j].hi);
        for (std::size_t k = j + 1; k < gaps.size(); ++k) {
            if (gaps[k].len >= gaps[j].len) {
                rb = Rat(gaps[k].lo - gaps[j].hi);
                break;
            }
        }
        rep.records.push_back({lb, rb, gaps[j].len});
        Rat ratio = Rat(rat_min(lb, rb) / gaps[j].len);
        if (first || ratio < rep.value_lo) {
            rep.value_lo = rep.value_hi = ratio;
            first = false;
        }
    }
    if (first) fail(Errc::Internal, "no gaps observed");  // models always have >= 1 gap
    return rep;
}

}  // namespace cantordist
