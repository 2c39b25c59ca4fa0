#include "cantor.hpp"

#include <algorithm>
#include <limits>
#include <variant>

#include "errors.hpp"

namespace cantordist {

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct IfsModel {
    Iv hull;
    std::vector<AffineMap> maps;  // sorted left to right; extreme images reach the hull ends
    Rat max_gap_ratio;            // largest inter-image gap / |hull|, scale-free
    Rat rho_min;
    Rat rho_max;
};

struct GapsModel {
    Iv hull;
    Rat g;    // gap removed by the hull's own split; level-n per-gap is g*(rho/2)^(n-1)
    Rat rho;
    unsigned feasible_depth = 0;
};

struct UnionModel {
    Iv hull;
    std::vector<std::shared_ptr<const CantorSet::Model>> parts;  // sorted, separated, never unions
};

}  // namespace detail

struct CantorSet::Model {
    std::variant<detail::IfsModel, detail::GapsModel, detail::UnionModel> v;
};

namespace {

using detail::GapsModel;
using detail::IfsModel;
using detail::UnionModel;
using Model = CantorSet::Model;

const Iv& model_hull(const Model& m) {
    return std::visit([](const auto& alt) -> const Iv& { return alt.hull; }, m.v);
}

[[noreturn]] void bad_letter(const Address& a, std::size_t pos) {
    fail(Errc::InvalidAddress, "branch index " + std::to_string(a[pos]) +
                                   " out of range at position " + std::to_string(pos) +
                                   " of address " + address_to_string(a));
}

Iv cell_rec(const Model& mod, const Address& a, std::size_t pos) {
    return std::visit(
        detail::overloaded{
            [&](const IfsModel& m) -> Iv {
                Rat r(1), t(0);  // running composition x -> r*x + t
                for (std::size_t k = pos; k < a.size(); ++k) {
                    if (a[k] >= m.maps.size()) bad_letter(a, k);
                    const AffineMap& s = m.maps[a[k]];
                    t = Rat(r * s.offset + t);
                    r = Rat(r * s.ratio);
                }
                return Iv(Rat(r * m.hull.lo + t), Rat(r * m.hull.hi + t));
            },
            [&](const GapsModel& m) -> Iv {
                Iv c = m.hull;
                Rat per = m.g;
                for (std::size_t k = pos; k < a.size(); ++k) {
                    if (a[k] >= 2) bad_letter(a, k);
                    Rat cw(Rat(c.width() - per) / 2);
                    if (!(cw > 0)) fail(Errc::Internal, "schedule cell vanished");
                    c = (a[k] == 0) ? Iv(c.lo, Rat(c.lo + cw)) : Iv(Rat(c.hi - cw), c.hi);
                    per = Rat(per * m.rho / 2);
                }
                return c;
            },
            [&](const UnionModel& m) -> Iv {
                if (pos == a.size()) return m.hull;
                if (a[pos] >= m.parts.size()) bad_letter(a, pos);
                return cell_rec(*m.parts[a[pos]], a, pos + 1);
            }},
        mod.v);
}

unsigned branch_rec(const Model& mod, const Address& a, std::size_t pos) {
    return std::visit(detail::overloaded{
                          [&](const IfsModel& m) -> unsigned {
                              cell_rec(mod, a, pos);  // validate letters
                              return static_cast<unsigned>(m.maps.size());
                          },
                          [&](const GapsModel&) -> unsigned {
                              cell_rec(mod, a, pos);
                              return 2u;
                          },
                          [&](const UnionModel& m) -> unsigned {
                              if (pos == a.size()) return static_cast<unsigned>(m.parts.size());
                              if (a[pos] >= m.parts.size()) bad_letter(a, pos);
                              return branch_rec(*m.parts[a[pos]], a, pos + 1);
                          }},
                      mod.v);
}

std::size_t sat_mul(std::size_t a, std::size_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<std::size_t>::max() / b)
        return std::numeric_limits<std::size_t>::max();
    return a * b;
}

std::size_t sat_add(std::size_t a, std::size_t b) {
    if (a > std::numeric_limits<std::size_t>::max() - b)
        return std::numeric_limits<std::size_t>::max();
    return a + b;
}

std::size_t count_rec(const Model& mod, unsigned depth) {
    return std::visit(detail::overloaded{
                          [&](const IfsModel& m) -> std::size_t {
                              std::size_t n = 1;
                              for (unsigned k = 0; k < depth; ++k) n = sat_mul(n, m.maps.size());
                              return n;
                          },
                          [&](const GapsModel&) -> std::size_t {
                              if (depth >= std::numeric_limits<std::size_t>::digits)
                                  return std::numeric_limits<std::size_t>::max();
                              return std::size_t{1} << depth;
                          },
                          [&](const UnionModel& m) -> std::size_t {
                              if (depth == 0) return 1;
                              std::size_t n = 0;
                              for (const auto& p : m.parts)
                                  n = sat_add(n, count_rec(*p, depth - 1));
                              return n;
                          }},
                      mod.v);
}

void cells_rec(const Model& mod, unsigned depth, std::vector<Iv>& out) {
    if (depth == 0) {
        out.push_back(model_hull(mod));
        return;
    }
    std::visit(detail::overloaded{
                   [&](const IfsModel& m) {
                       // Descend map by map; sorted maps keep the emission ordered.
                       auto emit = [&](auto&& self, Rat r, Rat t, unsigned left) -> void {
                           if (left == 0) {
                               out.emplace_back(Rat(r * m.hull.lo + t), Rat(r * m.hull.hi + t));
                               return;
                           }
                           for (const AffineMap& s : m.maps)
                               self(self, Rat(r * s.ratio), Rat(r * s.offset + t), left - 1);
                       };
                       emit(emit, Rat(1), Rat(0), depth);
                   },
                   [&](const GapsModel& m) {
                       auto emit = [&](auto&& self, const Iv& c, const Rat& per,
                                       unsigned left) -> void {
                           if (left == 0) {
                               out.push_back(c);
                               return;
                           }
                           Rat cw(Rat(c.width() - per) / 2);
                           Rat next(Rat(per * m.rho / 2));
                           self(self, Iv(c.lo, Rat(c.lo + cw)), next, left - 1);
                           self(self, Iv(Rat(c.hi - cw), c.hi), next, left - 1);
                       };
                       emit(emit, m.hull, m.g, depth);
                   },
                   [&](const UnionModel& m) {
                       for (const auto& p : m.parts) cells_rec(*p, depth - 1, out);
                   }},
               mod.v);
}

}  // namespace

std::string address_to_string(const Address& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(a[i]);
    }
    return s;
}

Address address_from_string(const std::string& s) {
    Address a;
    if (s.empty()) return a;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t dot = s.find('.', pos);
        std::string tok = s.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            fail(Errc::InvalidAddress, "bad address token '" + tok + "' in '" + s + "'");
        a.push_back(static_cast<unsigned>(std::stoul(tok)));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return a;
}

CantorSet CantorSet::affine_ifs(const Iv& hull, std::vector<AffineMap> maps) {
    if (!(hull.lo < hull.hi)) fail(Errc::InvalidModel, "IFS hull must have positive width");
    if (maps.size() < 2) fail(Errc::InvalidModel, "IFS needs at least 2 maps");
    for (const AffineMap& m : maps)
        if (!(m.ratio > 0 && m.ratio < 1))
            fail(Errc::InvalidModel, "IFS ratios must lie strictly in (0,1)");
    std::sort(maps.begin(), maps.end(), [&](const AffineMap& a, const AffineMap& b) {
        return Rat(a.ratio * hull.lo + a.offset) < Rat(b.ratio * hull.lo + b.offset);
    });
    std::vector<Iv> images;
    images.reserve(maps.size());
    for (const AffineMap& m : maps)
        images.emplace_back(Rat(m.ratio * hull.lo + m.offset), Rat(m.ratio * hull.hi + m.offset));
    // The declared hull must be the attractor's convex hull: the extreme
    // images pin both endpoints (this also makes every cell's left endpoint
    // an attractor point, and makes children retain parent endpoints).
    if (!(images.front().lo == hull.lo && images.back().hi == hull.hi))
        fail(Errc::InvalidModel, "extreme map images must reach the hull endpoints");
    Rat max_gap(0);
    for (std::size_t i = 0; i + 1 < images.size(); ++i) {
        Rat gap(images[i + 1].lo - images[i].hi);
        if (!(gap > 0)) fail(Errc::InvalidModel, "map images must be separated by positive gaps");
        max_gap = rat_max(max_gap, gap);
    }
    detail::IfsModel m;
    m.hull = hull;
    m.max_gap_ratio = Rat(max_gap / hull.width());
    m.rho_min = maps.front().ratio;
    m.rho_max = maps.front().ratio;
    for (const AffineMap& s : maps) {
        m.rho_min = rat_min(m.rho_min, s.ratio);
        m.rho_max = rat_max(m.rho_max, s.ratio);
    }
    m.maps = std::move(maps);
    return CantorSet(std::make_shared<const Model>(Model{std::move(m)}));
}

CantorSet CantorSet::gap_schedule(const Iv& hull, const Rat& g, const Rat& rho,
                                  unsigned feasible_depth) {
    if (!(hull.lo < hull.hi)) fail(Errc::InvalidModel, "schedule hull must have positive width");
    if (!(g > 0)) fail(Errc::InvalidModel, "gap budget must be positive");
    if (!(rho > 0 && rho < 1)) fail(Errc::InvalidModel, "gap decay must lie strictly in (0,1)");
    if (!(Rat(g / Rat(1 - rho)) < hull.width()))
        fail(Errc::InvalidModel,
             "total removed length g/(1-rho) must stay strictly below the hull width");
    if (feasible_depth == 0) fail(Errc::InvalidModel, "witness depth must be at least 1");
    // The strict budget bound already makes every gap fit at every level
    // (the worst ratio sup_n [rho^(n-1) + (1-rho^(n-1))/(1-rho)] is 1/(1-rho));
    // the sweep realizes the recorded witness depth explicitly.
    Rat w = hull.width();
    Rat per = g;
    for (unsigned n = 0; n < feasible_depth; ++n) {
        if (!(per < w)) fail(Errc::Internal, "gap sweep contradicts the symbolic bound");
        w = Rat(Rat(w - per) / 2);
        per = Rat(per * rho / 2);
    }
    detail::GapsModel m;
    m.hull = hull;
    m.g = g;
    m.rho = rho;
    m.feasible_depth = feasible_depth;
    return CantorSet(std::make_shared<const Model>(Model{std::move(m)}));
}

CantorSet CantorSet::finite_union(std::vector<CantorSet> parts) {
    if (parts.empty()) fail(Errc::InvalidModel, "union needs at least one part");
    std::vector<std::shared_ptr<const Model>> flat;
    for (const CantorSet& p : parts) {
        if (auto* u = std::get_if<detail::UnionModel>(&p.model_->v))
            flat.insert(flat.end(), u->parts.begin(), u->parts.end());
        else
            flat.push_back(p.model_);
    }
    std::sort(flat.begin(), flat.end(),
              [](const auto& a, const auto& b) { return model_hull(*a).lo < model_hull(*b).lo; });
    if (flat.size() == 1) return CantorSet(flat.front());
    for (std::size_t i = 0; i + 1 < flat.size(); ++i)
        if (!(model_hull(*flat[i]).hi < model_hull(*flat[i + 1]).lo))
            fail(Errc::InvalidModel, "union parts must have separated hulls");
    detail::UnionModel m;
    m.hull = Iv(model_hull(*flat.front()).lo, model_hull(*flat.back()).hi);
    m.parts = std::move(flat);
    return CantorSet(std::make_shared<const Model>(Model{std::move(m)}));
}

ModelKind CantorSet::kind() const {
    return std::visit(detail::overloaded{[](const detail::IfsModel&) { return ModelKind::Ifs; },
                                         [](const detail::GapsModel&) { return ModelKind::Gaps; },
                                         [](const detail::UnionModel&) { return ModelKind::Union; }},
                      model_->v);
}

const Iv& CantorSet::hull() const { return model_hull(*model_); }

unsigned CantorSet::branch_count(const Address& a) const { return branch_rec(*model_, a, 0); }

Iv CantorSet::cell(const Address& a) const { return cell_rec(*model_, a, 0); }

Rat CantorSet::member_point(const Address& a) const {
    // Left endpoints survive every construction step: the leftmost map fixes
    // hull.lo (so cell(a).lo is the a-image of map 0's fixed point), centered
    // gaps never remove cell ends, and unions delegate to their parts.
    return cell(a).lo;
}

Rat CantorSet::measure_lower_bound() const {
    return std::visit(
        detail::overloaded{[](const detail::IfsModel&) { return Rat(0); },
                           [](const detail::GapsModel& m) {
                               return Rat(m.hull.width() - Rat(m.g / Rat(1 - m.rho)));
                           },
                           [](const detail::UnionModel& m) {
                               Rat s(0);
                               for (const auto& p : m.parts)
                                   s = Rat(s + CantorSet(p).measure_lower_bound());
                               return s;
                           }},
        model_->v);
}

Rat CantorSet::measure_upper_bound() const {
    return std::visit(
        detail::overloaded{[](const detail::IfsModel& m) {
                               // level-d cells cover the attractor with total
                               // width |hull|*(sum ratios)^d -> 0 when the sum
                               // is below 1 (guaranteed by the positive gaps)
                               Rat s(0);
                               for (const AffineMap& map : m.maps) s = Rat(s + map.ratio);
                               return s < 1 ? Rat(0) : Rat(m.hull.width());
                           },
                           [](const detail::GapsModel& m) {
                               // the removed gaps are disjoint, so the measure
                               // is exact and the two bounds coincide
                               return Rat(m.hull.width() - Rat(m.g / Rat(1 - m.rho)));
                           },
                           [](const detail::UnionModel& m) {
                               Rat s(0);
                               for (const auto& p : m.parts)
                                   s = Rat(s + CantorSet(p).measure_upper_bound());
                               return s;
                           }},
        model_->v);
}

CantorSet CantorSet::subset_at(const Address& a) const {
    if (a.empty()) return *this;
    return std::visit(
        detail::overloaded{
            [&](const detail::IfsModel& m) -> CantorSet {
                Rat r(1), t(0);
                for (std::size_t k = 0; k < a.size(); ++k) {
                    if (a[k] >= m.maps.size()) bad_letter(a, k);
                    const AffineMap& s = m.maps[a[k]];
                    t = Rat(r * s.offset + t);
                    r = Rat(r * s.ratio);
                }
                Iv h(Rat(r * m.hull.lo + t), Rat(r * m.hull.hi + t));
                std::vector<AffineMap> conj;
                conj.reserve(m.maps.size());
                // S' = C ∘ S ∘ C⁻¹ for the address composition C(x) = r·x + t.
                for (const AffineMap& s : m.maps)
                    conj.push_back({s.ratio, Rat(t * Rat(1 - s.ratio) + r * s.offset)});
                return affine_ifs(h, std::move(conj));
            },
            [&](const detail::GapsModel& m) -> CantorSet {
                Iv c = cell(a);
                Rat per = m.g;
                for (std::size_t k = 0; k < a.size(); ++k) per = Rat(per * m.rho / 2);
                return gap_schedule(c, per, m.rho, m.feasible_depth);
            },
            [&](const detail::UnionModel& m) -> CantorSet {
                if (a[0] >= m.parts.size()) bad_letter(a, 0);
                return CantorSet(m.parts[a[0]]).subset_at(Address(a.begin() + 1, a.end()));
            }},
        model_->v);
}

std::optional<DescentGeometry> CantorSet::descent_geometry(const Address& a) const {
    return std::visit(
        detail::overloaded{
            [&](const detail::IfsModel& m) -> std::optional<DescentGeometry> {
                Rat w = cell(a).width();
                return DescentGeometry{w, Rat(m.max_gap_ratio * w), m.rho_max, m.rho_min,
                                       m.rho_max};
            },
            [&](const detail::GapsModel& m) -> std::optional<DescentGeometry> {
                Rat w = cell(a).width();
                Rat per = m.g;
                for (std::size_t k = 0; k < a.size(); ++k) per = Rat(per * m.rho / 2);
                // Γ = per/w decreases along any descent (Γ' = ρΓ/(1-Γ) ≤ Γ once
                // Γ ≤ 1-ρ, which strict feasibility gives at the root), so the
                // width bound (1-Γ)/2 stays valid at every deeper split.
                Rat gamma(per / w);
                return DescentGeometry{w, per, Rat(m.rho / 2), Rat(Rat(1 - gamma) / 2),
                                       Rat(1, 2)};
            },
            [&](const detail::UnionModel& m) -> std::optional<DescentGeometry> {
                if (a.empty()) return std::nullopt;
                if (a[0] >= m.parts.size()) bad_letter(a, 0);
                return CantorSet(m.parts[a[0]])
                    .descent_geometry(Address(a.begin() + 1, a.end()));
            }},
        model_->v);
}

CantorSet CantorSet::restrict_to(const Iv& I, unsigned depth_budget) const {
    std::vector<Address> kept;
    std::vector<Address> frontier{Address{}};
    for (unsigned depth = 0; !frontier.empty(); ++depth) {
        std::vector<Address> next;
        for (Address& a : frontier) {
            Iv c = cell(a);
            if (I.contains(c)) {
                kept.push_back(std::move(a));
            } else if (c.intersects(I) && depth < depth_budget) {
                unsigned bc = branch_count(a);
                for (unsigned i = 0; i < bc; ++i) {
                    Address child = a;
                    child.push_back(i);
                    next.push_back(std::move(child));
                }
            }
        }
        frontier = std::move(next);
    }
    if (kept.empty())
        fail(Errc::EmptyRestriction, "no construction cell of depth <= " +
                                         std::to_string(depth_budget) + " lies inside [" +
                                         rat_to_string(I.lo) + ", " + rat_to_string(I.hi) + "]");
    std::vector<CantorSet> parts;
    parts.reserve(kept.size());
    for (const Address& a : kept) parts.push_back(subset_at(a));
    if (parts.size() == 1) return parts.front();
    return finite_union(std::move(parts));
}

std::size_t CantorSet::level_cell_count(unsigned depth) const { return count_rec(*model_, depth); }

std::vector<Iv> CantorSet::level_cells(unsigned depth, std::size_t max_count) const {
    std::size_t n = level_cell_count(depth);
    if (n > max_count)
        fail(Errc::DepthTooLarge, "level " + std::to_string(depth) + " holds " +
                                      std::to_string(n) + " cells, above the cap of " +
                                      std::to_string(max_count));
    std::vector<Iv> out;
    out.reserve(n);
    cells_rec(*model_, depth, out);
    return out;
}

std::vector<Rat> CantorSet::level_points(unsigned depth, std::size_t max_count) const {
    std::vector<Iv> cells = level_cells(depth, max_count);
    std::vector<Rat> pts;
    pts.reserve(cells.size());
    for (const Iv& c : cells) pts.push_back(c.lo);
    return pts;
}

const std::vector<AffineMap>& CantorSet::ifs_maps() const {
    const auto* m = std::get_if<detail::IfsModel>(&model_->v);
    if (!m) fail(Errc::Internal, "ifs_maps on a non-IFS model");
    return m->maps;
}

void CantorSet::gaps_params(Rat& g, Rat& rho, unsigned& feasible_depth) const {
    const auto* m = std::get_if<detail::GapsModel>(&model_->v);
    if (!m) fail(Errc::Internal, "gaps_params on a non-schedule model");
    g = m->g;
    rho = m->rho;
    feasible_depth = m->feasible_depth;
}

std::vector<CantorSet> CantorSet::union_parts() const {
    const auto* m = std::get_if<detail::UnionModel>(&model_->v);
    if (!m) fail(Errc::Internal, "union_parts on a non-union model");
    std::vector<CantorSet> out;
    out.reserve(m->parts.size());
    for (const auto& p : m->parts) out.push_back(CantorSet(p));
    return out;
}

bool operator==(const CantorSet& a, const CantorSet& b) {
    if (a.model_ == b.model_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case ModelKind::Ifs: {
            if (!(a.hull() == b.hull())) return false;
            const auto& ma = a.ifs_maps();
            const auto& mb = b.ifs_maps();
            if (ma.size() != mb.size()) return false;
            for (std::size_t i = 0; i < ma.size(); ++i)
                if (ma[i].ratio != mb[i].ratio || ma[i].offset != mb[i].offset) return false;
            return true;
        }
        case ModelKind::Gaps: {
            Rat ga, ra, gb, rb;
            unsigned fa = 0, fb = 0;
            a.gaps_params(ga, ra, fa);
            b.gaps_params(gb, rb, fb);
            return a.hull() == b.hull() && ga == gb && ra == rb && fa == fb;
        }
        case ModelKind::Union: {
            auto pa = a.union_parts();
            auto pb = b.union_parts();
            if (pa.size() != pb.size()) return false;
            for (std::size_t i = 0; i < pa.size(); ++i)
                if (!(pa[i] == pb[i])) return false;
            return true;
        }
    }
    return false;
}

}  // namespace cantordist
