#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "dssat/formula.hpp"

namespace dssat::detail {

/// Table entry marking an undecided Skolem value. An existential whose
/// dependency assignment selects such an entry satisfies every literal on it,
/// which turns an evaluation into an upper bound over all completions.
inline constexpr std::uint32_t wild_entry = std::numeric_limits<std::uint32_t>::max() - 1;

enum class BranchOrder {
    prefix,     ///< randomized/universal/maximized variables strictly in prefix order
    heuristic,  ///< randomized variables in any order (no universals allowed)
};

enum class ExistentialMode {
    skolem,    ///< value read from a table once all dependencies are assigned
    maximize,  ///< branched on, max over values
};

struct EngineStats {
    std::uint64_t nodes = 0;
    std::uint64_t cache_hits = 0;
};

/**
 * Exact recursive evaluator over the prefix of a formula.
 *
 * Randomized variables contribute expectations, universals minima and
 * maximized existentials maxima. Skolem existentials are substituted as soon
 * as their dependencies are fixed. Residual formulas split into independent
 * components whose values multiply; component values are cached under a
 * canonical key (sorted residual clauses plus the dependency context of
 * pending Skolem existentials).
 */
class SearchEngine {
public:
    SearchEngine(const DssatFormula& formula, BranchOrder order, std::size_t depth_budget);

    /// Skolem mode; `table` must outlive the engine and may be edited between evaluations.
    void use_table(VariableId y, const std::vector<std::uint32_t>* table);
    /// Maximize mode. `late` existentials are branched after every randomized
    /// and universal variable of their component.
    void use_maximize(VariableId y, bool late);

    /// Value of the whole formula from an empty assignment. Clears the cache.
    double evaluate();

    // Incremental interface: reset(), then assign() variables and query
    // solve_current(); the cache survives between queries.
    void reset();
    std::size_t mark() const noexcept { return trail_.size(); }
    void assign(VariableId v, std::uint32_t value);
    void undo(std::size_t mark);
    double solve_current();
    std::uint32_t value_of(VariableId v) const { return value_[v.slot()]; }

    const EngineStats& stats() const noexcept { return stats_; }

private:
    static constexpr std::uint32_t unassigned = std::numeric_limits<std::uint32_t>::max();
    static constexpr std::uint32_t wild = std::numeric_limits<std::uint32_t>::max() - 1;

    struct Lit {
        std::uint32_t var;
        std::uint32_t value;
        bool positive;
    };

    struct KeyHash {
        std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept;
    };

    enum class Kind : std::uint8_t { random, universal, skolem, maximize };

    void assign_slot(std::uint32_t v, std::uint32_t value);
    void assign_ready_skolems();
    double solve(std::vector<std::uint32_t> ids, std::size_t depth);
    double solve_component(const std::vector<std::uint32_t>& ids, std::size_t depth);
    std::vector<std::vector<std::uint32_t>> split(const std::vector<std::uint32_t>& ids);
    std::uint32_t choose_branch(const std::vector<std::uint32_t>& ids) const;
    std::vector<std::uint32_t> make_key(const std::vector<std::uint32_t>& ids) const;
    bool is_open(std::uint32_t v) const noexcept { return value_[v] == unassigned; }

    BranchOrder order_;
    std::size_t depth_budget_;

    std::vector<Kind> kind_;
    std::vector<std::uint32_t> domain_;
    std::vector<const std::vector<double>*> dist_;
    std::vector<std::uint64_t> order_key_;
    std::vector<std::vector<std::uint32_t>> deps_;
    std::vector<std::vector<std::uint64_t>> strides_;
    std::vector<std::vector<std::uint32_t>> dependents_;
    std::vector<const std::vector<std::uint32_t>*> table_;
    std::vector<std::vector<Lit>> clauses_;

    std::vector<std::uint32_t> value_;
    std::vector<std::uint32_t> pending_;
    std::vector<std::uint32_t> trail_;

    // scratch for split()
    mutable std::vector<std::uint32_t> parent_;

    std::unordered_map<std::vector<std::uint32_t>, double, KeyHash> cache_;
    EngineStats stats_;
};

}  // namespace dssat::detail
