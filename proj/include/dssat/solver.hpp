#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dssat/formula.hpp"

namespace dssat {

struct SolveOptions {
    /// Guard on the number of candidate Skolem sets in the searched space.
    std::uint64_t max_skolem_space = std::uint64_t{1} << 20;
    /// Worker threads; 0 selects the hardware concurrency. Results do not depend on it.
    unsigned threads = 0;
    std::size_t depth_budget = 10000;
};

struct SolveStats {
    std::uint64_t candidates = 0;  ///< search nodes evaluated (bounds and leaves)
    std::uint64_t memo_hits = 0;
    double wall_seconds = 0.0;
};

struct SolveResult {
    double value = 0.0;
    SkolemSet witness;
    SolveStats stats;
};

struct DecisionResult {
    bool holds = false;
    std::optional<SkolemSet> witness;
    SolveStats stats;
};

/**
 * Parameterization of a family of Skolem sets. Each parameter ranges over
 * 0..size-1 and is bound to one or more (existential, table entry) slots;
 * all bound slots take the parameter's value. Existentials without any
 * bound slot are left to the solver.
 */
class SkolemSpace {
public:
    /// One parameter per table entry of each listed existential, ordered by
    /// existential (in the given order) and then entry.
    static SkolemSpace per_entry(const DssatFormula& formula, const std::vector<VariableId>& existentials);

    std::size_t add_parameter(std::uint32_t size);
    void bind(VariableId existential, std::size_t entry, std::size_t parameter);

    std::size_t num_parameters() const noexcept { return sizes_.size(); }
    std::uint32_t parameter_size(std::size_t p) const { return sizes_.at(p); }
    const std::vector<std::pair<VariableId, std::size_t>>& slots(std::size_t p) const { return slots_.at(p); }
    /// Existentials with at least one bound slot, in increasing id order.
    std::vector<VariableId> existentials() const;

private:
    std::vector<std::uint32_t> sizes_;
    std::vector<std::vector<std::pair<VariableId, std::size_t>>> slots_;
};

/// Existentials whose dependency set is every randomized and universal
/// variable; the exact solver maximizes these pointwise instead of searching.
std::vector<VariableId> fully_dependent_existentials(const DssatFormula& formula);

/// Maximum value over all Skolem sets. Ties prefer the lexicographically
/// smallest searched tables. Throws SearchSpaceTooLarge.
SolveResult solve_dssat_exact(const DssatFormula& formula, const SolveOptions& options = {});

/// Maximum over the Skolem sets of `space`. Existentials not covered by the
/// space must be fully dependent. Throws SearchSpaceTooLarge, SkolemMismatch.
SolveResult solve_dssat_exact(const DssatFormula& formula, const SkolemSpace& space,
                              const SolveOptions& options = {});

/// True iff some Skolem set reaches `theta` (with slack 1e-12). Stops at the
/// first candidate that does. Throws BadThreshold, SearchSpaceTooLarge.
DecisionResult decide_dssat(const DssatFormula& formula, double theta, const SolveOptions& options = {});

/// Linear-prefix solving by the max rule; the witness holds each
/// existential's choices over its preceding randomized/universal variables.
/// Throws NotLinearPrefix.
SolveResult solve_ssat(const DssatFormula& formula, const SolveOptions& options = {});

/// Slack used by decisions and by incumbent comparisons.
inline constexpr double decision_tolerance = 1e-12;

}  // namespace dssat
