#include "search_engine.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dssat::detail {

namespace {

// Residual keys are dropped wholesale past this many entries.
constexpr std::size_t cache_limit = 1u << 22;

constexpr std::uint32_t clause_end = 0xFFFFFFFFu;
constexpr std::uint32_t context_mark = 0xFFFFFFFEu;

}  // namespace

std::size_t SearchEngine::KeyHash::operator()(const std::vector<std::uint32_t>& key) const noexcept
{
    std::uint64_t h = 1469598103934665603ull;
    for (const auto x : key) {
        h ^= x;
        h *= 1099511628211ull;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

SearchEngine::SearchEngine(const DssatFormula& formula, BranchOrder order, std::size_t depth_budget)
    : order_(order), depth_budget_(depth_budget)
{
    if (order == BranchOrder::heuristic && formula.extended()) {
        throw Error(ErrorCode::unexpected_universal, "free branching order requires a formula without universals");
    }
    const auto n = formula.num_vars();
    kind_.resize(n);
    domain_.resize(n);
    dist_.assign(n, nullptr);
    order_key_.resize(n);
    deps_.resize(n);
    strides_.resize(n);
    dependents_.resize(n);
    table_.assign(n, nullptr);
    value_.assign(n, unassigned);
    pending_.assign(n, 0);
    parent_.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = formula.prefix()[i];
        domain_[i] = e.domain.size();
        order_key_[i] = i;
        switch (e.quantifier.kind()) {
        case QuantifierKind::random:
            kind_[i] = Kind::random;
            dist_[i] = &e.quantifier.distribution();
            break;
        case QuantifierKind::universal:
            kind_[i] = Kind::universal;
            break;
        case QuantifierKind::existential: {
            kind_[i] = Kind::skolem;
            std::uint64_t stride = 1;
            for (const auto d : e.quantifier.deps()) {
                deps_[i].push_back(static_cast<std::uint32_t>(d.slot()));
                strides_[i].push_back(stride);
                stride *= formula.domain(d).size();
            }
            break;
        }
        }
    }

    clauses_.reserve(formula.matrix().size());
    for (const auto& clause : formula.matrix().clauses()) {
        std::vector<Lit> lits;
        lits.reserve(clause.size());
        for (const auto& l : clause) {
            lits.push_back({static_cast<std::uint32_t>(l.var.slot()), l.value, l.positive});
        }
        clauses_.push_back(std::move(lits));
    }
}

void SearchEngine::use_table(VariableId y, const std::vector<std::uint32_t>* table)
{
    const auto i = y.slot();
    if (kind_.at(i) != Kind::skolem && kind_[i] != Kind::maximize) {
        throw std::logic_error("use_table on a non-existential variable");
    }
    kind_[i] = Kind::skolem;
    table_[i] = table;
    order_key_[i] = i;
}

void SearchEngine::use_maximize(VariableId y, bool late)
{
    const auto i = y.slot();
    if (kind_.at(i) != Kind::skolem && kind_[i] != Kind::maximize) {
        throw std::logic_error("use_maximize on a non-existential variable");
    }
    if (order_ == BranchOrder::heuristic && !late) {
        throw std::logic_error("free branching order only supports late maximized existentials");
    }
    kind_[i] = Kind::maximize;
    table_[i] = nullptr;
    order_key_[i] = late ? kind_.size() + i : i;
}

void SearchEngine::reset()
{
    const auto n = kind_.size();
    std::fill(value_.begin(), value_.end(), unassigned);
    trail_.clear();
    cache_.clear();
    for (auto& d : dependents_) d.clear();
    for (std::size_t y = 0; y < n; ++y) {
        if (kind_[y] != Kind::skolem) continue;
        if (table_[y] == nullptr) {
            throw Error(ErrorCode::skolem_mismatch, "no Skolem function for variable " + std::to_string(y + 1));
        }
        pending_[y] = static_cast<std::uint32_t>(deps_[y].size());
        for (const auto d : deps_[y]) dependents_[d].push_back(static_cast<std::uint32_t>(y));
    }
    assign_ready_skolems();
}

void SearchEngine::assign_ready_skolems()
{
    for (std::size_t y = 0; y < kind_.size(); ++y) {
        if (kind_[y] == Kind::skolem && deps_[y].empty()) {
            const auto entry = (*table_[y])[0];
            value_[y] = entry == wild_entry ? wild : entry;
            trail_.push_back(static_cast<std::uint32_t>(y));
        }
    }
}

void SearchEngine::assign(VariableId v, std::uint32_t value)
{
    const auto i = v.slot();
    if (value >= domain_.at(i)) throw Error(ErrorCode::bad_domain, "value outside the domain");
    assign_slot(static_cast<std::uint32_t>(i), value);
}

void SearchEngine::assign_slot(std::uint32_t v, std::uint32_t value)
{
    value_[v] = value;
    trail_.push_back(v);
    for (const auto y : dependents_[v]) {
        if (--pending_[y] != 0) continue;
        std::uint64_t index = 0;
        for (std::size_t k = 0; k < deps_[y].size(); ++k) index += strides_[y][k] * value_[deps_[y][k]];
        const auto entry = (*table_[y])[index];
        value_[y] = entry == wild_entry ? wild : entry;
        trail_.push_back(y);
    }
}

void SearchEngine::undo(std::size_t mark)
{
    while (trail_.size() > mark) {
        const auto u = trail_.back();
        trail_.pop_back();
        value_[u] = unassigned;
        if (kind_[u] != Kind::skolem) {
            for (const auto y : dependents_[u]) ++pending_[y];
        }
    }
}

double SearchEngine::evaluate()
{
    reset();
    return solve_current();
}

double SearchEngine::solve_current()
{
    std::vector<std::uint32_t> ids(clauses_.size());
    std::iota(ids.begin(), ids.end(), 0u);
    return solve(std::move(ids), 0);
}

double SearchEngine::solve(std::vector<std::uint32_t> ids, std::size_t depth)
{
    if (depth > depth_budget_) {
        throw Error(ErrorCode::depth_budget_exceeded,
                    "recursion depth exceeded the budget of " + std::to_string(depth_budget_));
    }
    ++stats_.nodes;
    const auto start = trail_.size();
    double factor = 1.0;
    std::vector<std::uint32_t> open;
    open.reserve(ids.size());

    for (;;) {
        open.clear();
        bool propagated = false;
        for (const auto c : ids) {
            bool satisfied = false;
            std::uint32_t open_count = 0;
            const Lit* last = nullptr;
            for (const auto& l : clauses_[c]) {
                const auto val = value_[l.var];
                if (val == unassigned) {
                    ++open_count;
                    last = &l;
                } else if (val == wild || (val == l.value) == l.positive) {
                    satisfied = true;
                    break;
                }
            }
            if (satisfied) continue;
            if (open_count == 0) {
                undo(start);
                return 0.0;
            }
            open.push_back(c);
            if (open_count != 1 || propagated) continue;

            const auto v = last->var;
            if (kind_[v] == Kind::skolem) continue;
            if (kind_[v] == Kind::universal) {
                undo(start);
                return 0.0;
            }
            std::uint32_t forced;
            if (last->positive) {
                forced = last->value;
            } else if (domain_[v] == 2) {
                forced = 1 - last->value;
            } else {
                continue;
            }
            if (kind_[v] == Kind::random) {
                const double p = (*dist_[v])[forced];
                if (p == 0.0) {
                    undo(start);
                    return 0.0;
                }
                factor *= p;
            }
            assign_slot(v, forced);
            propagated = true;
        }
        if (!propagated) break;
        ids.swap(open);
    }

    if (open.empty()) {
        undo(start);
        return factor;
    }

    double result = factor;
    for (const auto& component : split(open)) {
        result *= solve_component(component, depth);
        if (result == 0.0) break;
    }
    undo(start);
    return result;
}

double SearchEngine::solve_component(const std::vector<std::uint32_t>& ids, std::size_t depth)
{
    auto key = make_key(ids);
    if (const auto it = cache_.find(key); it != cache_.end()) {
        ++stats_.cache_hits;
        return it->second;
    }

    const auto v = choose_branch(ids);
    double value = 0.0;
    const auto mark = trail_.size();
    switch (kind_[v]) {
    case Kind::random: {
        const auto& dist = *dist_[v];
        for (std::uint32_t k = 0; k < domain_[v]; ++k) {
            if (dist[k] == 0.0) continue;
            assign_slot(v, k);
            value += dist[k] * solve(ids, depth + 1);
            undo(mark);
        }
        break;
    }
    case Kind::universal: {
        value = 1.0;
        for (std::uint32_t k = 0; k < domain_[v] && value > 0.0; ++k) {
            assign_slot(v, k);
            value = std::min(value, solve(ids, depth + 1));
            undo(mark);
        }
        break;
    }
    case Kind::maximize: {
        for (std::uint32_t k = 0; k < domain_[v] && value < 1.0; ++k) {
            assign_slot(v, k);
            value = std::max(value, solve(ids, depth + 1));
            undo(mark);
        }
        break;
    }
    case Kind::skolem:
        throw std::logic_error("cannot branch on a Skolem existential");
    }

    if (cache_.size() >= cache_limit) cache_.clear();
    cache_.emplace(std::move(key), value);
    return value;
}

std::vector<std::vector<std::uint32_t>> SearchEngine::split(const std::vector<std::uint32_t>& ids)
{
    std::vector<std::uint32_t> touched;
    auto find = [this](std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    };
    auto touch = [&](std::uint32_t x) {
        if (std::find(touched.begin(), touched.end(), x) == touched.end()) {
            parent_[x] = x;
            touched.push_back(x);
        }
    };
    auto unite = [&](std::uint32_t a, std::uint32_t b) {
        touch(a);
        touch(b);
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    };

    for (const auto c : ids) {
        std::uint32_t first = unassigned;
        for (const auto& l : clauses_[c]) {
            if (!is_open(l.var)) continue;
            if (first == unassigned) {
                first = l.var;
                touch(first);
            } else {
                unite(first, l.var);
            }
            if (kind_[l.var] == Kind::skolem) {
                for (const auto d : deps_[l.var]) {
                    if (is_open(d)) unite(l.var, d);
                }
            }
        }
    }

    std::vector<std::vector<std::uint32_t>> components;
    std::vector<std::pair<std::uint32_t, std::size_t>> root_index;
    for (const auto c : ids) {
        std::uint32_t first = unassigned;
        for (const auto& l : clauses_[c]) {
            if (is_open(l.var)) {
                first = l.var;
                break;
            }
        }
        const auto root = find(first);
        auto it = std::find_if(root_index.begin(), root_index.end(), [root](const auto& p) { return p.first == root; });
        if (it == root_index.end()) {
            root_index.emplace_back(root, components.size());
            components.emplace_back();
            it = std::prev(root_index.end());
        }
        components[it->second].push_back(c);
    }
    return components;
}

std::uint32_t SearchEngine::choose_branch(const std::vector<std::uint32_t>& ids) const
{
    std::vector<std::uint32_t> candidates;
    std::vector<std::uint32_t> occurrences;
    std::vector<std::uint32_t> dependent_count;
    std::vector<std::uint32_t> seen_skolem;
    auto slot_of = [&](std::uint32_t v) -> std::size_t {
        const auto it = std::find(candidates.begin(), candidates.end(), v);
        if (it != candidates.end()) return static_cast<std::size_t>(it - candidates.begin());
        candidates.push_back(v);
        occurrences.push_back(0);
        dependent_count.push_back(0);
        return candidates.size() - 1;
    };

    for (const auto c : ids) {
        for (const auto& l : clauses_[c]) {
            if (!is_open(l.var)) continue;
            if (kind_[l.var] == Kind::skolem) {
                if (std::find(seen_skolem.begin(), seen_skolem.end(), l.var) != seen_skolem.end()) continue;
                seen_skolem.push_back(l.var);
                for (const auto d : deps_[l.var]) {
                    if (is_open(d)) ++dependent_count[slot_of(d)];
                }
            } else {
                ++occurrences[slot_of(l.var)];
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const auto a = candidates[i];
        const auto b = candidates[best];
        bool better;
        if (order_ == BranchOrder::prefix) {
            better = order_key_[a] < order_key_[b];
        } else {
            const bool a_late = kind_[a] == Kind::maximize;
            const bool b_late = kind_[b] == Kind::maximize;
            if (a_late != b_late) {
                better = !a_late;
            } else if (a_late) {
                better = order_key_[a] < order_key_[b];
            } else {
                const auto sa = std::uint64_t{dependent_count[i]} * 1024 + occurrences[i];
                const auto sb = std::uint64_t{dependent_count[best]} * 1024 + occurrences[best];
                better = sa > sb || (sa == sb && a < b);
            }
        }
        if (better) best = i;
    }
    return candidates[best];
}

std::vector<std::uint32_t> SearchEngine::make_key(const std::vector<std::uint32_t>& ids) const
{
    std::vector<std::vector<std::uint32_t>> parts;
    parts.reserve(ids.size());
    std::vector<std::uint32_t> skolems;
    for (const auto c : ids) {
        std::vector<Lit> lits;
        for (const auto& l : clauses_[c]) {
            if (!is_open(l.var)) continue;
            lits.push_back(l);
            if (kind_[l.var] == Kind::skolem) skolems.push_back(l.var);
        }
        std::sort(lits.begin(), lits.end(), [](const Lit& a, const Lit& b) {
            return std::tie(a.var, a.value, a.positive) < std::tie(b.var, b.value, b.positive);
        });
        std::vector<std::uint32_t> part;
        part.reserve(lits.size() * 2 + 1);
        for (const auto& l : lits) {
            part.push_back((l.var << 1) | (l.positive ? 1u : 0u));
            part.push_back(l.value);
        }
        part.push_back(clause_end);
        parts.push_back(std::move(part));
    }
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());

    std::vector<std::uint32_t> key;
    for (const auto& p : parts) key.insert(key.end(), p.begin(), p.end());

    std::sort(skolems.begin(), skolems.end());
    skolems.erase(std::unique(skolems.begin(), skolems.end()), skolems.end());
    for (const auto y : skolems) {
        key.push_back(context_mark);
        key.push_back(y);
        for (const auto d : deps_[y]) key.push_back(value_[d]);
    }
    return key;
}

}  // namespace dssat::detail
