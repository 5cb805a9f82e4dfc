#pragma once

#include <cstddef>

#include "dssat/formula.hpp"

namespace dssat {

enum class EvalEngine {
    /// Gray-code enumeration of every randomized assignment (reference route).
    enumerate,
    /// Exact recursive search with component splitting and caching.
    search,
};

struct EvalOptions {
    /// Enumeration guard: the randomized assignment space may hold at most
    /// 2^max_random_vars points.
    std::size_t max_random_vars = 24;
    EvalEngine engine = EvalEngine::enumerate;
    /// Maximum branching depth of the recursive routes.
    std::size_t depth_budget = 10000;
};

/// Satisfying probability of a plain formula under fixed Skolem functions.
/// Throws SkolemMismatch, UnexpectedUniversal, TooManyRandomVars.
double eval_skolem(const DssatFormula& formula, const SkolemSet& skolem, const EvalOptions& options = {});

/// Value of an extended formula under fixed Skolem functions, evaluated in
/// prefix order (expectation over randomized, minimum over universal).
/// Throws SkolemMismatch, DepthBudgetExceeded.
double eval_extended(const DssatFormula& formula, const SkolemSet& skolem, const EvalOptions& options = {});

/// Value of a linear-prefix formula with existentials maximized in place.
/// Throws NotLinearPrefix, DepthBudgetExceeded.
double eval_ssat_prefix(const DssatFormula& formula, const EvalOptions& options = {});

/// Rethrows any validation failure of `skolem` against `formula` as SkolemMismatch.
void require_matching_skolem(const DssatFormula& formula, const SkolemSet& skolem);

}  // namespace dssat
