#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cantor.hpp"
#include "phi.hpp"

namespace cantordist {

// Resource limits for the covering search. Hitting any of them aborts with
// BudgetExhausted; that outcome only reports that no certificate was found,
// never that the target is uncoverable.
struct SearchBudget {
    unsigned max_depth = 20;             // deepest cell pair the search may open
    std::uint64_t max_tasks = 1000000;   // total certificate nodes
    unsigned wall_clock_ms = 0;          // 0 disables the time cap
};

// Leaf closure rule identifiers.
//
// descent-margin (sound): both partial derivatives of the map keep a definite
// sign with a positive magnitude floor over pin box x cell pair, and every
// split gap of either cell is bridged by the other cell's image height at the
// matching refinement round, now and (by the decay dominances) at every
// deeper round; alternating refinement then attains every value of every
// pinned image, so no finite depth is ever the last word.
//
// empirical-deepening (heuristic): coverage of the leaf target is merely
// re-verified over finitely many further generations of descendant pairs.
extern const char* const kRuleDescentMargin;
extern const char* const kRuleEmpiricalDeepening;

// Generations inspected by empirical deepening, and the widest front of
// descendant cell pairs it may hold before giving up.
inline constexpr unsigned kDeepeningGenerations = 8;
inline constexpr std::size_t kDeepeningFrontCap = std::size_t{1} << 17;

struct LeafRecord {
    std::string rule;
    bool heuristic = false;
    // Nonnegative slack data backing the closure: the two bridging slacks of
    // the passing refinement order (descent-margin), or one covering slack
    // per generation (empirical-deepening).
    std::vector<Rat> margins;
};

// One covering task: every value of `target` is attained on cell(a) x cell(b)
// by every pin, as witnessed by the stored inner image enclosure; an internal
// node splits its target exactly into the children's targets.
struct CertNode {
    Iv target;
    Address a;  // cell address in the first set
    Address b;  // cell address in the second set
    Iv image;   // inner robust-image enclosure of the cell pair at build time
    std::vector<std::uint32_t> children;  // indices into nodes, all > own index
    std::optional<LeafRecord> leaf;       // present iff the node is childless
};

struct CoverageCertificate {
    PhiSpec phi;
    Box2 pins;
    CantorSet k1;
    CantorSet k2;
    Iv target;
    ArithMode mode = ArithMode::Exact;
    unsigned prec_bits = 64;
    bool heuristic = false;            // some leaf closed by empirical deepening
    bool pin_overlap_warning = false;  // a pin coordinate range meets a hull
    std::vector<CertNode> nodes;       // nodes[0] is the root; children after parents
};

// Searches for a certificate that `target` lies inside the robust image of
// K1 x K2 for every pin in U, by greedy left-to-right covering with lockstep
// one-letter cell splits. Throws AdmissibilityFailure when the target already
// escapes the robust image of the hull pair, BudgetExhausted when the search
// gives up (which never disproves coverage).
CoverageCertificate certify_cover(const PhiSpec& phi, const Box2& U, const CantorSet& k1,
                                  const CantorSet& k2, const Iv& target,
                                  const SearchBudget& budget = {},
                                  ArithMode mode = ArithMode::Exact, unsigned prec_bits = 64);

struct VerifyReport {
    bool ok = true;
    std::string stage;     // failing stage "s1".."s7" when !ok
    std::size_t node = 0;  // failing node index when applicable
    std::string detail;
};

// Re-checks a certificate in exact arithmetic, independent of the search that
// produced it: tree shape (s1), root binding (s2), stored images against
// recomputed robust images (s3), admissibility (s4), exact target partition
// (s5), leaf closure rules (s6), and flag consistency (s7). Never throws on
// tampered content; returns false and reports the first failing stage/node.
bool verify_certificate(const CoverageCertificate& cert, VerifyReport* report = nullptr);

// Outcome of the descent-margin closure test on one cell pair.
struct DescentCheck {
    bool ok = false;
    std::vector<Rat> margins;  // the two bridging slacks when ok
    std::string reason;        // first failing condition when !ok
};

DescentCheck check_descent_margin(const PhiSpec& phi, const Box2& U, const CantorSet& k1,
                                  const Address& a, const CantorSet& k2, const Address& b,
                                  unsigned prec_bits);

// Outcome of the empirical-deepening test: target covered by the union of
// inner images of every descendant generation 1..generations below (a, b).
struct DeepeningCheck {
    bool ok = false;
    std::vector<Rat> margins;  // one covering slack per generation when ok
    std::string reason;
};

DeepeningCheck check_empirical_deepening(const PhiSpec& phi, const Box2& U, const CantorSet& k1,
                                         const Address& a, const CantorSet& k2, const Address& b,
                                         const Iv& target, unsigned generations,
                                         unsigned prec_bits, ArithMode mode);

// Heuristic target finder: descends `depth` levels along the widest
// inner-image chain of cell pairs, then returns the middle third of the
// widest merged component of the deepening union below that pair. A natural
// candidate for certify_cover; carries no guarantee by itself. Throws
// EmptyIntersection when every inner image is empty along the way.
Iv suggest_target(const PhiSpec& phi, const Box2& U, const CantorSet& k1, const CantorSet& k2,
                  unsigned depth, unsigned prec_bits = 64, ArithMode mode = ArithMode::Fast);

}  // namespace cantordist
