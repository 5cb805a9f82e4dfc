#include "dssat/evaluator.hpp"

#include <cmath>
#include <string>

#include "search_engine.hpp"

namespace dssat {

namespace {

// Compensated (Neumaier) running sum.
class Accumulator {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// Weight of a randomized assignment as the product of two precomputed
// half-products, each indexed by the mixed-radix code of its half.
class SplitWeights {
public:
    SplitWeights(const std::vector<const std::vector<double>*>& dists, std::size_t split)
        : split_(split)
    {
        build(dists, 0, split, low_, low_strides_);
        build(dists, split, dists.size(), high_, high_strides_);
    }

    double at(std::size_t low_index, std::size_t high_index) const noexcept
    {
        return low_[low_index] * high_[high_index];
    }
    /// Index delta in the owning half when digit j moves by `delta`.
    std::ptrdiff_t step(std::size_t j, int delta) const noexcept
    {
        const auto stride = j < split_ ? low_strides_[j] : high_strides_[j - split_];
        return static_cast<std::ptrdiff_t>(stride) * delta;
    }
    bool in_low(std::size_t j) const noexcept { return j < split_; }

private:
    static void build(const std::vector<const std::vector<double>*>& dists, std::size_t begin, std::size_t end,
                      std::vector<double>& table, std::vector<std::size_t>& strides)
    {
        std::size_t size = 1;
        for (std::size_t j = begin; j < end; ++j) {
            strides.push_back(size);
            size *= dists[j]->size();
        }
        table.assign(size, 1.0);
        for (std::size_t index = 0; index < size; ++index) {
            std::size_t rest = index;
            double w = 1.0;
            for (std::size_t j = begin; j < end; ++j) {
                const auto k = dists[j]->size();
                w *= (*dists[j])[rest % k];
                rest /= k;
            }
            table[index] = w;
        }
    }

    std::size_t split_;
    std::vector<double> low_;
    std::vector<double> high_;
    std::vector<std::size_t> low_strides_;
    std::vector<std::size_t> high_strides_;
};

struct Occurrence {
    std::uint32_t clause;
    std::uint32_t value;
    bool positive;
};

// Reference summation: walks all randomized assignments in reflected
// mixed-radix Gray order, keeping per-clause true-literal counts current.
class Enumerator {
public:
    Enumerator(const DssatFormula& formula, const SkolemSet& skolem)
        : formula_(formula), value_(formula.num_vars(), 0), occurrences_(formula.num_vars()),
          dependents_(formula.num_vars()), tables_(formula.num_vars(), nullptr),
          table_index_(formula.num_vars(), 0)
    {
        const auto& clauses = formula.matrix().clauses();
        true_count_.assign(clauses.size(), 0);
        for (std::uint32_t c = 0; c < clauses.size(); ++c) {
            for (const auto& l : clauses[c]) occurrences_[l.var.slot()].push_back({c, l.value, l.positive});
        }
        for (const auto y : formula.existential_vars()) {
            const auto slot = static_cast<std::uint32_t>(y.slot());
            tables_[slot] = &skolem.table(y);
            std::size_t stride = 1;
            for (const auto d : formula.quantifier(y).deps()) {
                dependents_[d.slot()].push_back({slot, stride});
                stride *= formula.domain(d).size();
            }
            value_[slot] = (*tables_[slot])[0];
        }
        for (std::uint32_t c = 0; c < clauses.size(); ++c) {
            for (const auto& l : clauses[c]) {
                if (l.holds(value_[l.var.slot()])) ++true_count_[c];
            }
            if (true_count_[c] == 0) ++unsatisfied_;
        }
    }

    double run(std::size_t max_random_vars)
    {
        const auto& randoms = formula_.random_vars();
        std::vector<const std::vector<double>*> dists;
        double log_size = 0.0;
        for (const auto v : randoms) {
            dists.push_back(&formula_.quantifier(v).distribution());
            log_size += std::log2(static_cast<double>(dists.back()->size()));
        }
        if (log_size > static_cast<double>(max_random_vars) + 1e-9) {
            throw Error(ErrorCode::too_many_random_vars,
                        "randomized assignment space exceeds 2^" + std::to_string(max_random_vars));
        }

        // Split so that both halves hold about the same number of points.
        std::size_t split = 0;
        double low_log = 0.0;
        while (split < dists.size() && low_log < log_size / 2) {
            low_log += std::log2(static_cast<double>(dists[split]->size()));
            ++split;
        }
        const SplitWeights weights(dists, split);

        std::uint64_t total = 1;
        for (const auto* d : dists) total *= d->size();

        std::vector<int> direction(randoms.size(), 1);
        std::size_t low_index = 0;
        std::size_t high_index = 0;
        Accumulator sum;
        for (std::uint64_t step = 0;; ++step) {
            if (unsatisfied_ == 0) sum.add(weights.at(low_index, high_index));
            if (step + 1 == total) break;
            std::size_t j = 0;
            for (;; ++j) {
                const auto slot = randoms[j].slot();
                const auto next = static_cast<std::int64_t>(value_[slot]) + direction[j];
                if (next >= 0 && next < static_cast<std::int64_t>(dists[j]->size())) break;
                direction[j] = -direction[j];
            }
            const auto delta = weights.step(j, direction[j]);
            if (weights.in_low(j)) {
                low_index = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(low_index) + delta);
            } else {
                high_index = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(high_index) + delta);
            }
            const auto slot = static_cast<std::uint32_t>(randoms[j].slot());
            change(slot, static_cast<std::uint32_t>(static_cast<int>(value_[slot]) + direction[j]));
        }
        return sum.value();
    }

private:
    struct Dependent {
        std::uint32_t existential;
        std::size_t stride;
    };

    void change(std::uint32_t slot, std::uint32_t next)
    {
        const auto previous = value_[slot];
        recount(slot, previous, next);
        value_[slot] = next;
        for (const auto& [y, stride] : dependents_[slot]) {
            table_index_[y] = table_index_[y] + stride * next - stride * previous;
            const auto updated = (*tables_[y])[table_index_[y]];
            if (updated != value_[y]) {
                recount(y, value_[y], updated);
                value_[y] = updated;
            }
        }
    }

    void recount(std::uint32_t slot, std::uint32_t previous, std::uint32_t next)
    {
        for (const auto& o : occurrences_[slot]) {
            const bool before = (previous == o.value) == o.positive;
            const bool after = (next == o.value) == o.positive;
            if (before == after) continue;
            auto& count = true_count_[o.clause];
            if (after) {
                if (count++ == 0) --unsatisfied_;
            } else {
                if (--count == 0) ++unsatisfied_;
            }
        }
    }

    const DssatFormula& formula_;
    std::vector<std::uint32_t> value_;
    std::vector<std::vector<Occurrence>> occurrences_;
    std::vector<std::vector<Dependent>> dependents_;
    std::vector<const SkolemSet::Table*> tables_;
    std::vector<std::size_t> table_index_;
    std::vector<std::uint32_t> true_count_;
    std::size_t unsatisfied_ = 0;
};

double clamp_unit(double v) noexcept
{
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

}  // namespace

void require_matching_skolem(const DssatFormula& formula, const SkolemSet& skolem)
{
    try {
        skolem.validate(formula);
    } catch (const Error& e) {
        throw Error(ErrorCode::skolem_mismatch, std::string(to_string(e.code())) + ": " + e.what());
    }
}

double eval_skolem(const DssatFormula& formula, const SkolemSet& skolem, const EvalOptions& options)
{
    if (formula.extended()) {
        throw Error(ErrorCode::unexpected_universal, "formula has universal variables; use the extended evaluator");
    }
    require_matching_skolem(formula, skolem);
    if (options.engine == EvalEngine::search) {
        detail::SearchEngine engine(formula, detail::BranchOrder::heuristic, options.depth_budget);
        for (const auto y : formula.existential_vars()) engine.use_table(y, &skolem.table(y));
        return clamp_unit(engine.evaluate());
    }
    Enumerator enumerator(formula, skolem);
    return clamp_unit(enumerator.run(options.max_random_vars));
}

double eval_extended(const DssatFormula& formula, const SkolemSet& skolem, const EvalOptions& options)
{
    require_matching_skolem(formula, skolem);
    detail::SearchEngine engine(formula, detail::BranchOrder::prefix, options.depth_budget);
    for (const auto y : formula.existential_vars()) engine.use_table(y, &skolem.table(y));
    return clamp_unit(engine.evaluate());
}

double eval_ssat_prefix(const DssatFormula& formula, const EvalOptions& options)
{
    if (!formula.is_linear_prefix()) {
        throw Error(ErrorCode::not_linear_prefix,
                    "every existential must depend on exactly the randomized and universal variables before it");
    }
    detail::SearchEngine engine(formula, detail::BranchOrder::prefix, options.depth_budget);
    for (const auto y : formula.existential_vars()) engine.use_maximize(y, false);
    return clamp_unit(engine.evaluate());
}

}  // namespace dssat
