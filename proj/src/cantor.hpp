#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "interval.hpp"

namespace cantordist {

// Branch indices from the root; the empty word addresses the hull.
using Address = std::vector<unsigned>;

std::string address_to_string(const Address& a);
Address address_from_string(const std::string& s);

// x -> ratio*x + offset, 0 < ratio < 1.
struct AffineMap {
    Rat ratio;
    Rat offset;
};

enum class ModelKind { Ifs, Gaps, Union };

// Per-split descent constants for one (sub)model, all exact rationals and
// valid at every depth below the cell they were computed for:
//   - a child of a cell of width w has width in [w*width_lb_decay, w*width_ub_decay];
//   - the split of a cell reached by k refinements removes a gap of length
//     <= gap1_ub * gap_decay^k;
//   - children retain both parent endpoints, so refinement loses no end length.
struct DescentGeometry {
    Rat width;           // width of the cell itself
    Rat gap1_ub;         // bound on the gap removed by the cell's own split
    Rat gap_decay;       // per-refinement decay factor for gap bounds
    Rat width_lb_decay;  // per-refinement lower bound on child/parent width
    Rat width_ub_decay;  // per-refinement upper bound on child/parent width
};

// A finitely described Cantor set in R: an affine IFS with separated images,
// a fat centered-gap schedule, or a finite disjoint union. Immutable; copies
// share the model.
class CantorSet {
  public:
    // maps' images of hull must be pairwise separated, lie in hull, and the
    // extreme images must reach the hull endpoints (the declared hull is the
    // attractor's convex hull).
    static CantorSet affine_ifs(const Iv& hull, std::vector<AffineMap> maps);
    // Level n removes a centered open gap of g*(rho/2)^(n-1) from each of the
    // 2^(n-1) cells; requires g/(1-rho) < |hull| strictly, which makes every
    // gap fit at every depth. feasible_depth records the explicitly swept
    // witness depth.
    static CantorSet gap_schedule(const Iv& hull, const Rat& g, const Rat& rho,
                                  unsigned feasible_depth = 64);
    // Parts must have pairwise separated hulls; nested unions are flattened.
    static CantorSet finite_union(std::vector<CantorSet> parts);

    ModelKind kind() const;
    const Iv& hull() const;

    unsigned branch_count(const Address& a) const;
    Iv cell(const Address& a) const;
    // A point of the attractor inside cell(a): the a-image of map 0's fixed
    // point (IFS), cell(a).lo (gap schedule), or the leftmost part's point.
    Rat member_point(const Address& a) const;

    // Union of maximal cells contained in I, re-rooted; searches to
    // depth_budget and fails with EmptyRestriction if nothing fits.
    CantorSet restrict_to(const Iv& I, unsigned depth_budget = 24) const;

    // Exact Lebesgue lower bound: 0 for an IFS, |hull| - g/(1-rho) for a
    // schedule, additive over unions.
    Rat measure_lower_bound() const;

    // Exact Lebesgue upper bound: 0 for an IFS whose contraction ratios sum
    // below 1 (always true of the separated maps accepted here), the exact
    // measure |hull| - g/(1-rho) for a schedule, additive over unions.
    Rat measure_upper_bound() const;

    // The sub-set whose attractor is (this attractor) intersected with
    // cell(a), described over hull cell(a). Identity at the empty address.
    CantorSet subset_at(const Address& a) const;

    // nullopt only at the root address of a union (parts carry their own).
    std::optional<DescentGeometry> descent_geometry(const Address& a) const;

    // All depth-`depth` cells / member points, in increasing order.
    // Fails with DepthTooLarge when the count would exceed max_count.
    std::vector<Iv> level_cells(unsigned depth, std::size_t max_count) const;
    std::vector<Rat> level_points(unsigned depth, std::size_t max_count) const;
    std::size_t level_cell_count(unsigned depth) const;  // saturates at SIZE_MAX

    // Descriptor access (serialization, metrics).
    const std::vector<AffineMap>& ifs_maps() const;                 // Ifs only
    void gaps_params(Rat& g, Rat& rho, unsigned& feasible_depth) const;  // Gaps only
    std::vector<CantorSet> union_parts() const;                     // Union only

    friend bool operator==(const CantorSet& a, const CantorSet& b);

    struct Model;  // opaque; public only so implementation helpers can name it

  private:
    explicit CantorSet(std::shared_ptr<const Model> m) : model_(std::move(m)) {}
    std::shared_ptr<const Model> model_;
};

bool operator==(const CantorSet& a, const CantorSet& b);

}  // namespace cantordist
