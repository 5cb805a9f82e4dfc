#include "dssat/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "dssat/evaluator.hpp"
#include "parallel.hpp"
#include "search_engine.hpp"

namespace dssat {

namespace {

using detail::BranchOrder;
using detail::SearchEngine;

// The search tree is cut into a fixed number of subtrees processed in
// fixed-size batches; both constants are independent of the thread count,
// which keeps results and statistics identical for any number of workers.
constexpr std::uint64_t subtree_target = 64;
constexpr std::size_t batch_size = 16;

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

BranchOrder order_for(const DssatFormula& formula)
{
    return formula.extended() ? BranchOrder::prefix : BranchOrder::heuristic;
}

double log2_space(const SkolemSpace& space)
{
    double log_size = 0.0;
    for (std::size_t p = 0; p < space.num_parameters(); ++p) {
        log_size += std::log2(static_cast<double>(space.parameter_size(p)));
    }
    return log_size;
}

void check_space(double log_size, std::uint64_t cap)
{
    if (log_size > std::log2(static_cast<double>(cap)) + 1e-9) {
        throw Error(ErrorCode::search_space_too_large,
                    "Skolem search space of 2^" + std::to_string(log_size) + " candidates exceeds the cap of " +
                        std::to_string(cap));
    }
}

struct Problem {
    const DssatFormula& formula;
    const SkolemSpace& space;
    std::vector<VariableId> searched;
    std::vector<VariableId> late;
    std::size_t depth_budget;
};

struct Limits {
    double prune_below = -std::numeric_limits<double>::infinity();
    double stop_at = std::numeric_limits<double>::infinity();
};

struct Outcome {
    bool improved = false;
    bool stopped = false;
    double value = -1.0;
    std::vector<std::uint32_t> params;
    std::uint64_t nodes = 0;
    std::uint64_t hits = 0;
};

// Depth-first branch and bound over the parameters of one subtree.
class Searcher {
public:
    Searcher(const Problem& problem, const Limits& limits)
        : problem_(problem), limits_(limits),
          engine_(problem.formula, order_for(problem.formula), problem.depth_budget),
          params_(problem.space.num_parameters(), unset)
    {
        for (const auto y : problem.searched) {
            tables_.emplace_back(std::make_unique<SkolemSet::Table>(table_length(problem.formula, y),
                                                                    detail::wild_entry));
            slot_of_[y] = tables_.size() - 1;
            engine_.use_table(y, tables_.back().get());
        }
        for (const auto y : problem.late) engine_.use_maximize(y, true);
    }

    Outcome run(const std::vector<std::uint32_t>& prefix, double incumbent)
    {
        best_ = incumbent;
        for (std::size_t p = 0; p < prefix.size(); ++p) set(p, prefix[p]);
        dfs(prefix.size());
        outcome_.nodes = evaluations_;
        outcome_.hits = engine_.stats().cache_hits;
        return std::move(outcome_);
    }

private:
    static constexpr std::uint32_t unset = std::numeric_limits<std::uint32_t>::max();

    void set(std::size_t p, std::uint32_t value)
    {
        params_[p] = value;
        const auto entry = value == unset ? detail::wild_entry : value;
        for (const auto& [y, index] : problem_.space.slots(p)) (*tables_[slot_of_.at(y)])[index] = entry;
    }

    void dfs(std::size_t p)
    {
        ++evaluations_;
        const double bound = engine_.evaluate();
        if (bound < limits_.prune_below || bound <= best_ + decision_tolerance) return;
        if (p == params_.size()) {
            best_ = bound;
            outcome_.improved = true;
            outcome_.value = bound;
            outcome_.params = params_;
            if (bound >= limits_.stop_at) outcome_.stopped = true;
            return;
        }
        for (std::uint32_t v = 0; v < problem_.space.parameter_size(p) && !outcome_.stopped; ++v) {
            set(p, v);
            dfs(p + 1);
        }
        set(p, unset);
    }

    const Problem& problem_;
    Limits limits_;
    SearchEngine engine_;
    std::vector<std::unique_ptr<SkolemSet::Table>> tables_;
    std::map<VariableId, std::size_t> slot_of_;
    std::vector<std::uint32_t> params_;
    double best_ = -1.0;
    std::uint64_t evaluations_ = 0;
    Outcome outcome_;
};

std::vector<std::vector<std::uint32_t>> subtree_prefixes(const SkolemSpace& space)
{
    std::size_t depth = 0;
    std::uint64_t count = 1;
    while (depth < space.num_parameters() && count < subtree_target) {
        count *= space.parameter_size(depth);
        ++depth;
    }
    std::vector<std::vector<std::uint32_t>> prefixes;
    if (count == 0) return prefixes;
    std::vector<std::uint32_t> current(depth, 0);
    for (;;) {
        prefixes.push_back(current);
        std::size_t i = depth;
        while (i > 0) {
            --i;
            if (++current[i] < space.parameter_size(i)) break;
            current[i] = 0;
            if (i == 0) return prefixes;
        }
        if (depth == 0) return prefixes;
    }
}

struct Best {
    bool found = false;
    double value = -1.0;
    std::vector<std::uint32_t> params;
    SolveStats stats;
};

Best branch_and_bound(const Problem& problem, const Limits& limits, unsigned threads)
{
    const auto prefixes = subtree_prefixes(problem.space);
    Best best;
    for (std::size_t begin = 0; begin < prefixes.size(); begin += batch_size) {
        const auto end = std::min(prefixes.size(), begin + batch_size);
        std::vector<Outcome> outcomes(end - begin);
        const double incumbent = best.value;
        detail::parallel_for(outcomes.size(), threads, [&](std::size_t i) {
            Searcher searcher(problem, limits);
            outcomes[i] = searcher.run(prefixes[begin + i], incumbent);
        });
        bool stop = false;
        for (auto& o : outcomes) {
            best.stats.candidates += o.nodes;
            best.stats.memo_hits += o.hits;
            if (stop) continue;
            if (o.improved && o.value > best.value + decision_tolerance) {
                best.found = true;
                best.value = o.value;
                best.params = std::move(o.params);
            }
            if (best.found && best.value >= limits.stop_at) stop = true;
        }
        if (stop) break;
    }
    return best;
}

std::vector<SkolemSet::Table> tables_from(const Problem& problem, const std::vector<std::uint32_t>& params)
{
    std::vector<SkolemSet::Table> tables;
    std::map<VariableId, std::size_t> slot_of;
    for (const auto y : problem.searched) {
        slot_of[y] = tables.size();
        tables.emplace_back(table_length(problem.formula, y), 0);
    }
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (const auto& [y, index] : problem.space.slots(p)) tables[slot_of.at(y)][index] = params[p];
    }
    return tables;
}

// Pointwise reconstruction of the fully dependent existentials: at every
// randomized/universal assignment of positive weight, the smallest values in
// prefix order that satisfy the matrix; 0 elsewhere.
void reconstruct_late(const Problem& problem, SkolemSet& witness, SolveStats& stats)
{
    if (problem.late.empty()) return;
    const auto& formula = problem.formula;
    std::vector<VariableId> outer;
    double log_points = 0.0;
    for (const auto& e : formula.prefix()) {
        if (!e.quantifier.is_existential()) {
            outer.push_back(e.var);
            log_points += std::log2(static_cast<double>(e.domain.size()));
        }
    }
    if (log_points > 20.0 + 1e-9) {
        throw Error(ErrorCode::search_space_too_large,
                    "too many assignments to rebuild fully dependent Skolem functions");
    }

    SearchEngine engine(formula, BranchOrder::prefix, problem.depth_budget);
    for (const auto y : problem.searched) engine.use_table(y, &witness.table(y));
    for (const auto y : problem.late) engine.use_maximize(y, true);
    engine.reset();

    std::vector<SkolemSet::Table> late_tables;
    for (const auto y : problem.late) late_tables.emplace_back(table_length(formula, y), 0);

    Assignment point(formula.num_vars());
    for (const auto v : outer) point.set(v, 0);
    const auto base = engine.mark();
    for (;;) {
        bool positive = true;
        for (const auto v : formula.random_vars()) {
            if (formula.quantifier(v).distribution()[point.get(v)] == 0.0) positive = false;
        }
        if (positive) {
            for (const auto v : outer) engine.assign(v, point.get(v));
            bool satisfiable = true;
            for (std::size_t j = 0; j < problem.late.size(); ++j) {
                const auto y = problem.late[j];
                std::uint32_t chosen = 0;
                if (satisfiable) {
                    satisfiable = false;
                    for (std::uint32_t k = 0; k < formula.domain(y).size(); ++k) {
                        const auto m = engine.mark();
                        engine.assign(y, k);
                        ++stats.candidates;
                        if (engine.solve_current() > 0.5) {
                            chosen = k;
                            satisfiable = true;
                            break;
                        }
                        engine.undo(m);
                    }
                }
                late_tables[j][dependency_index(formula, y, point)] = chosen;
            }
            engine.undo(base);
        }
        std::size_t i = 0;
        for (; i < outer.size(); ++i) {
            const auto next = point.get(outer[i]) + 1;
            if (next < formula.domain(outer[i]).size()) {
                point.set(outer[i], next);
                break;
            }
            point.set(outer[i], 0);
        }
        if (i == outer.size()) break;
    }
    stats.memo_hits += engine.stats().cache_hits;
    for (std::size_t j = 0; j < problem.late.size(); ++j) witness.set(problem.late[j], std::move(late_tables[j]));
}

Best solve_problem(const Problem& problem, const Limits& limits, const SolveOptions& options, SkolemSet& witness)
{
    auto best = branch_and_bound(problem, limits, options.threads);
    if (!best.found) return best;
    auto tables = tables_from(problem, best.params);
    for (std::size_t j = 0; j < problem.searched.size(); ++j) witness.set(problem.searched[j], std::move(tables[j]));
    reconstruct_late(problem, witness, best.stats);
    return best;
}

Problem make_problem(const DssatFormula& formula, const SkolemSpace& space, const SolveOptions& options)
{
    Problem problem{formula, space, space.existentials(), {}, options.depth_budget};
    const auto full = fully_dependent_existentials(formula);
    for (const auto y : formula.existential_vars()) {
        if (std::binary_search(problem.searched.begin(), problem.searched.end(), y)) continue;
        if (std::find(full.begin(), full.end(), y) == full.end()) {
            throw Error(ErrorCode::skolem_mismatch,
                        "existential " + std::to_string(y.index()) + " is neither searched nor fully dependent");
        }
        problem.late.push_back(y);
    }
    for (const auto y : problem.searched) {
        if (!formula.quantifier(y).is_existential()) {
            throw Error(ErrorCode::skolem_mismatch, "variable " + std::to_string(y.index()) + " is not existential");
        }
        const auto length = table_length(formula, y);
        std::vector<bool> covered(length, false);
        for (std::size_t p = 0; p < space.num_parameters(); ++p) {
            for (const auto& [v, index] : space.slots(p)) {
                if (v != y) continue;
                if (index >= length) {
                    throw Error(ErrorCode::wrong_table_length, "bound entry outside the table");
                }
                if (space.parameter_size(p) > formula.domain(y).size()) {
                    throw Error(ErrorCode::bad_domain, "parameter range exceeds the existential's domain");
                }
                covered[index] = true;
            }
        }
        if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
            throw Error(ErrorCode::skolem_mismatch,
                        "table of existential " + std::to_string(y.index()) + " is not fully parameterized");
        }
    }
    check_space(log2_space(space), options.max_skolem_space);
    return problem;
}

}  // namespace

SkolemSpace SkolemSpace::per_entry(const DssatFormula& formula, const std::vector<VariableId>& existentials)
{
    SkolemSpace space;
    for (const auto y : existentials) {
        const auto length = table_length(formula, y);
        const auto size = formula.domain(y).size();
        for (std::size_t b = 0; b < length; ++b) space.bind(y, b, space.add_parameter(size));
    }
    return space;
}

std::size_t SkolemSpace::add_parameter(std::uint32_t size)
{
    sizes_.push_back(size);
    slots_.emplace_back();
    return sizes_.size() - 1;
}

void SkolemSpace::bind(VariableId existential, std::size_t entry, std::size_t parameter)
{
    slots_.at(parameter).emplace_back(existential, entry);
}

std::vector<VariableId> SkolemSpace::existentials() const
{
    std::vector<VariableId> result;
    for (const auto& slots : slots_) {
        for (const auto& [y, entry] : slots) result.push_back(y);
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

std::vector<VariableId> fully_dependent_existentials(const DssatFormula& formula)
{
    std::vector<VariableId> outer;
    for (const auto& e : formula.prefix()) {
        if (!e.quantifier.is_existential()) outer.push_back(e.var);
    }
    std::vector<VariableId> result;
    for (const auto y : formula.existential_vars()) {
        auto deps = formula.quantifier(y).deps();
        std::sort(deps.begin(), deps.end());
        if (deps == outer) result.push_back(y);
    }
    return result;
}

SolveResult solve_dssat_exact(const DssatFormula& formula, const SolveOptions& options)
{
    const auto full = fully_dependent_existentials(formula);
    std::vector<VariableId> searched;
    double log_size = 0.0;
    for (const auto y : formula.existential_vars()) {
        if (std::find(full.begin(), full.end(), y) != full.end()) continue;
        searched.push_back(y);
        log_size += static_cast<double>(table_length(formula, y)) *
                    std::log2(static_cast<double>(formula.domain(y).size()));
    }
    check_space(log_size, options.max_skolem_space);
    return solve_dssat_exact(formula, SkolemSpace::per_entry(formula, searched), options);
}

SolveResult solve_dssat_exact(const DssatFormula& formula, const SkolemSpace& space, const SolveOptions& options)
{
    const Stopwatch clock;
    const auto problem = make_problem(formula, space, options);
    SolveResult result;
    const auto best = solve_problem(problem, Limits{}, options, result.witness);
    result.value = std::clamp(best.value, 0.0, 1.0);
    result.stats = best.stats;
    result.stats.wall_seconds = clock.seconds();
    return result;
}

DecisionResult decide_dssat(const DssatFormula& formula, double theta, const SolveOptions& options)
{
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw Error(ErrorCode::bad_threshold, "threshold must lie in [0,1]");
    }
    const Stopwatch clock;
    const auto full = fully_dependent_existentials(formula);
    std::vector<VariableId> searched;
    for (const auto y : formula.existential_vars()) {
        if (std::find(full.begin(), full.end(), y) == full.end()) searched.push_back(y);
    }
    double log_size = 0.0;
    for (const auto y : searched) {
        log_size += static_cast<double>(table_length(formula, y)) *
                    std::log2(static_cast<double>(formula.domain(y).size()));
    }
    check_space(log_size, options.max_skolem_space);
    const auto space = SkolemSpace::per_entry(formula, searched);
    const auto problem = make_problem(formula, space, options);

    Limits limits;
    limits.prune_below = theta - decision_tolerance;
    limits.stop_at = theta - decision_tolerance;
    SkolemSet witness;
    const auto best = solve_problem(problem, limits, options, witness);

    DecisionResult result;
    result.holds = best.found && best.value >= theta - decision_tolerance;
    if (result.holds) result.witness = std::move(witness);
    result.stats = best.stats;
    result.stats.wall_seconds = clock.seconds();
    return result;
}

SolveResult solve_ssat(const DssatFormula& formula, const SolveOptions& options)
{
    const Stopwatch clock;
    EvalOptions eval_options;
    eval_options.depth_budget = options.depth_budget;
    SolveResult result;
    result.value = eval_ssat_prefix(formula, eval_options);

    SearchEngine engine(formula, BranchOrder::prefix, options.depth_budget);
    for (const auto y : formula.existential_vars()) engine.use_maximize(y, false);
    engine.reset();

    Assignment point(formula.num_vars());
    for (const auto y : formula.existential_vars()) {
        const auto& deps = formula.quantifier(y).deps();
        const auto length = table_length(formula, y);
        if (length > (std::size_t{1} << 20)) {
            throw Error(ErrorCode::search_space_too_large, "witness table too large to rebuild");
        }
        SkolemSet::Table table(length, 0);
        for (std::size_t index = 0; index < length; ++index) {
            std::size_t rest = index;
            for (const auto d : deps) {
                const auto k = formula.domain(d).size();
                point.set(d, static_cast<std::uint32_t>(rest % k));
                rest /= k;
            }
            const auto base = engine.mark();
            for (const auto& e : formula.prefix()) {
                if (e.var == y) break;
                if (e.quantifier.is_existential()) {
                    engine.assign(e.var, result.witness.table(e.var)[dependency_index(formula, e.var, point)]);
                } else {
                    engine.assign(e.var, point.get(e.var));
                }
            }
            double best = -1.0;
            std::uint32_t choice = 0;
            for (std::uint32_t k = 0; k < formula.domain(y).size(); ++k) {
                const auto m = engine.mark();
                engine.assign(y, k);
                ++result.stats.candidates;
                const double v = engine.solve_current();
                engine.undo(m);
                if (v > best + 1e-13) {
                    best = v;
                    choice = k;
                }
            }
            table[index] = choice;
            engine.undo(base);
        }
        result.witness.set(y, std::move(table));
    }
    result.stats.memo_hits = engine.stats().cache_hits;
    result.stats.wall_seconds = clock.seconds();
    return result;
}

}  // namespace dssat
