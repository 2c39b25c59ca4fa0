#pragma once

#include <string>
#include <vector>

#include "cantor.hpp"

namespace cantordist {

// Hausdorff and upper box dimension bounds with the method that produced
// them; lower <= upper always, and the three coincide for strictly
// separated self-similar sets.
struct DimensionReport {
    double hausdorff_lower = 0;
    double hausdorff_upper = 0;
    double box_upper = 0;
    std::string method;
};

// Solves sum r_i^s = 1 by bisection on the strictly decreasing left side;
// the residual at the returned s is at most tol (tol >= 1e-13).
double moran_dimension(const CantorSet& s, double tol);

// Dimension report for any supported set: Moran value for strictly
// separated IFS, exactly 1 for positive-measure gap schedules, fieldwise
// max over the parts of a union.
DimensionReport dimension_bounds(const CantorSet& s, double tol = 1e-12);

// Product bounds dim(A) + dim(B) <= dim(A x B) <= dim(A) + boxdim(B).
DimensionReport product_dimension_bounds(const DimensionReport& a, const DimensionReport& b);

// One bounded complementary gap with its two bridges: the stretches from
// the gap's endpoints to the nearest gap at least as long (or the hull end).
struct GapRecord {
    Rat left_bridge;
    Rat right_bridge;
    Rat gap;
};

struct ThicknessReport {
    // inf over recorded gaps of min(bridge)/gap; lo == hi in both current
    // paths, kept as an interval for callers that widen it
    Rat value_lo, value_hi;
    bool exact = false;      // closed form from level-wise self-similarity
    bool truncated = false;  // observation to finite depth, not extrapolated
    unsigned depth = 0;      // level actually inspected
    std::vector<GapRecord> records;
    Rat value() const { return value_lo; }
};

// Newhouse thickness. Exact for level-homogeneous constructions (equal
// contraction ratios and equal first-level gaps: every level then repeats
// the same bridge/gap ratio); otherwise the infimum observed over all gaps
// down to `depth`, flagged truncated.
ThicknessReport thickness(const CantorSet& s, unsigned depth);

}  // namespace cantordist
