#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gen {

using namespace dssat;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double unit(Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double probability(Rng& rng)
{
    static constexpr double grid[] = {0.0, 0.1, 0.2, 0.25, 0.3, 0.5, 0.5, 0.6, 0.7, 0.75, 0.9, 1.0};
    if (uniform(rng, 0, 3) == 0) return unit(rng);
    return grid[uniform(rng, 0, std::size(grid) - 1)];
}

std::vector<double> distribution(Rng& rng, std::size_t k)
{
    std::vector<double> w(k);
    for (auto& x : w) x = uniform(rng, 0, 4) == 0 ? 0.0 : unit(rng) + 0.05;
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) w[uniform(rng, 0, k - 1)] = 1.0;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    return w;
}

namespace {

std::vector<VariableId> pick_subset(Rng& rng, std::vector<VariableId> pool, std::size_t max_size)
{
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(pool.size(), uniform(rng, 0, max_size)));
    return pool;
}

DssatFormula assemble(Rng& rng, std::vector<PrefixEntry> prefix, const FormulaShape& shape)
{
    const auto base = build_formula(prefix, Matrix{});
    return build_formula(std::move(prefix), matrix(rng, base, uniform(rng, 0, shape.max_clauses), shape.max_clause_len));
}

}  // namespace

Matrix matrix(Rng& rng, const DssatFormula& base, std::size_t clauses, std::size_t max_len)
{
    Matrix m;
    const auto n = base.num_vars();
    if (n == 0) return m;
    for (std::size_t c = 0; c < clauses; ++c) {
        Clause clause;
        const auto len = uniform(rng, 1, max_len);
        for (std::size_t i = 0; i < len; ++i) {
            const VariableId v(static_cast<std::uint32_t>(uniform(rng, 1, n)));
            const auto k = base.domain(v).size();
            const bool positive = uniform(rng, 0, 1) == 1;
            if (base.domain(v).is_boolean()) {
                clause.push_back(positive ? Literal::pos(v) : Literal::neg(v));
            } else {
                const auto value = static_cast<std::uint32_t>(uniform(rng, 0, k - 1));
                clause.push_back(positive ? Literal::eq(v, value) : Literal::neq(v, value));
            }
        }
        m.add_clause(std::move(clause));
    }
    return m;
}

DssatFormula formula(Rng& rng, const FormulaShape& shape)
{
    const auto n = uniform(rng, shape.min_vars, shape.max_vars);
    std::vector<bool> existential(n);
    std::vector<PrefixEntry> prefix;
    std::vector<VariableId> outer;
    for (std::size_t i = 0; i < n; ++i) {
        existential[i] = unit(rng) < shape.existential_share;
        if (!existential[i]) outer.push_back(VariableId(static_cast<std::uint32_t>(i + 1)));
    }
    std::size_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const VariableId v(static_cast<std::uint32_t>(i + 1));
        if (existential[i]) {
            auto deps = pick_subset(rng, outer, shape.max_deps);
            while (bits + (std::size_t{1} << deps.size()) > shape.max_table_bits && !deps.empty()) deps.pop_back();
            bits += std::size_t{1} << deps.size();
            prefix.push_back({v, Quantifier::existential(std::move(deps)), Domain::boolean()});
        } else if (unit(rng) < shape.universal_share) {
            prefix.push_back({v, Quantifier::universal(), Domain::boolean()});
        } else {
            prefix.push_back({v, Quantifier::random(shape.random_probabilities ? probability(rng) : 0.5), Domain::boolean()});
        }
    }
    return assemble(rng, std::move(prefix), shape);
}

DssatFormula linear_formula(Rng& rng, const FormulaShape& shape)
{
    const auto n = uniform(rng, shape.min_vars, shape.max_vars);
    std::vector<PrefixEntry> prefix;
    std::vector<VariableId> outer;
    std::size_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const VariableId v(static_cast<std::uint32_t>(i + 1));
        const bool fits = bits + (std::size_t{1} << outer.size()) <= shape.max_table_bits;
        if (fits && unit(rng) < shape.existential_share) {
            bits += std::size_t{1} << outer.size();
            prefix.push_back({v, Quantifier::existential(outer), Domain::boolean()});
        } else if (unit(rng) < shape.universal_share) {
            prefix.push_back({v, Quantifier::universal(), Domain::boolean()});
            outer.push_back(v);
        } else {
            prefix.push_back({v, Quantifier::random(shape.random_probabilities ? probability(rng) : 0.5), Domain::boolean()});
            outer.push_back(v);
        }
    }
    return assemble(rng, std::move(prefix), shape);
}

DssatFormula finite_domain_formula(Rng& rng, std::size_t fd_vars, std::uint32_t max_k)
{
    std::vector<PrefixEntry> prefix;
    std::vector<VariableId> randoms;
    std::uint32_t next = 1;
    const auto booleans = uniform(rng, 0, 2);
    const auto fds = uniform(rng, 1, fd_vars);
    std::size_t existentials = 0;
    std::size_t table_cells = 1;
    for (std::size_t i = 0; i < booleans + fds; ++i) {
        const VariableId v(next++);
        const bool fd = i >= booleans;
        const auto k = fd ? static_cast<std::uint32_t>(uniform(rng, 2, max_k)) : 2u;
        const auto domain = fd ? Domain::finite(k) : Domain::boolean();
        const bool exists = !randoms.empty() && existentials < 2 && uniform(rng, 0, 2) == 0;
        if (!exists) {
            prefix.push_back({v, fd ? Quantifier::random(distribution(rng, k)) : Quantifier::random(probability(rng)), domain});
            randoms.push_back(v);
            continue;
        }
        // Keep the number of Skolem sets small enough to enumerate.
        auto deps = pick_subset(rng, randoms, 2);
        auto count = [&](const std::vector<VariableId>& d) {
            std::size_t len = 1;
            for (const auto x : d) len *= prefix[x.slot()].domain.size();
            double sets = 1.0;
            for (std::size_t j = 0; j < len; ++j) sets *= k;
            return sets;
        };
        while (!deps.empty() && count(deps) * static_cast<double>(table_cells) > 4096.0) deps.pop_back();
        table_cells *= static_cast<std::size_t>(count(deps));
        ++existentials;
        prefix.push_back({v, Quantifier::existential(std::move(deps)), domain});
    }
    const auto base = build_formula(prefix, Matrix{});
    return build_formula(std::move(prefix), matrix(rng, base, uniform(rng, 1, 6), 3));
}

SkolemSet skolem(Rng& rng, const DssatFormula& f)
{
    SkolemSet s;
    for (const auto y : f.existential_vars()) {
        SkolemSet::Table t(table_length(f, y));
        for (auto& x : t) x = static_cast<std::uint32_t>(uniform(rng, 0, f.domain(y).size() - 1));
        s.set(y, std::move(t));
    }
    return s;
}

DqbfFormula dqbf(Rng& rng, std::size_t max_universals, std::size_t max_existentials, std::size_t max_table_bits)
{
    DqbfFormula d;
    const auto u = uniform(rng, 1, max_universals);
    const auto e = uniform(rng, 1, max_existentials);
    std::uint32_t next = 1;
    for (std::size_t i = 0; i < u; ++i) d.universals.push_back(VariableId(next++));
    std::size_t bits = 0;
    for (std::size_t j = 0; j < e && bits < max_table_bits; ++j) {
        auto deps = pick_subset(rng, d.universals, u);
        std::sort(deps.begin(), deps.end());
        while (bits + (std::size_t{1} << deps.size()) > max_table_bits && !deps.empty()) {
            deps.erase(deps.begin() + static_cast<std::ptrdiff_t>(uniform(rng, 0, deps.size() - 1)));
        }
        bits += std::size_t{1} << deps.size();
        d.existentials.emplace_back(VariableId(next++), std::move(deps));
    }
    const auto n = d.universals.size() + d.existentials.size();
    const auto clauses = uniform(rng, 1, 2 * n + 1);
    for (std::size_t c = 0; c < clauses; ++c) {
        std::vector<std::uint32_t> vars(n);
        std::iota(vars.begin(), vars.end(), 1u);
        std::shuffle(vars.begin(), vars.end(), rng);
        vars.resize(std::min<std::size_t>(3, n));
        Clause clause;
        for (const auto v : vars) {
            clause.push_back(uniform(rng, 0, 1) ? Literal::pos(VariableId(v)) : Literal::neg(VariableId(v)));
        }
        d.matrix.add_clause(std::move(clause));
    }
    return d;
}

DecPomdpModel decpomdp(Rng& rng, const PomdpShape& shape)
{
    const auto agents = uniform(rng, 1, shape.max_agents);
    std::vector<std::uint32_t> actions, observations;
    for (std::size_t i = 0; i < agents; ++i) {
        actions.push_back(static_cast<std::uint32_t>(uniform(rng, 1, shape.max_actions)));
        observations.push_back(static_cast<std::uint32_t>(uniform(rng, 1, shape.max_observations)));
    }
    const auto states = static_cast<std::uint32_t>(uniform(rng, 1, shape.max_states));
    auto m = DecPomdpModel::with_shape(states, actions, observations, uniform(rng, 1, shape.max_horizon));
    m.start = distribution(rng, states);
    const auto ja = m.joint_actions();
    const auto jo = m.joint_observations();
    for (std::uint32_t s = 0; s < states; ++s) {
        for (std::uint32_t a = 0; a < ja; ++a) {
            const auto t = distribution(rng, states);
            for (std::uint32_t s2 = 0; s2 < states; ++s2) m.T(s, a, s2) = t[s2];
            m.R(s, a) = std::round((unit(rng) * 5.0 - 2.0) * 100.0) / 100.0;
        }
    }
    for (std::uint32_t s2 = 0; s2 < states; ++s2) {
        for (std::uint32_t a = 0; a < ja; ++a) {
            const auto o = distribution(rng, jo);
            for (std::uint32_t k = 0; k < jo; ++k) m.O(s2, a, k) = o[k];
        }
    }
    return m;
}

JointPolicy policy(Rng& rng, const DecPomdpModel& m)
{
    auto p = JointPolicy::zeros(m);
    for (std::size_t i = 0; i < m.agents; ++i) {
        for (auto& row : p.actions[i]) {
            for (auto& a : row) a = static_cast<std::uint32_t>(uniform(rng, 0, m.actions[i] - 1));
        }
    }
    return p;
}

Circuit circuit(Rng& rng, std::size_t inputs, std::size_t gates, double error_chance, std::size_t outputs)
{
    static constexpr NodeKind kinds[] = {NodeKind::and_gate, NodeKind::or_gate,  NodeKind::nand_gate,
                                         NodeKind::nor_gate, NodeKind::xor_gate, NodeKind::not_gate};
    Circuit c;
    std::uint32_t next = 1;
    for (std::size_t i = 0; i < inputs; ++i) c.add({NodeId(next++), NodeKind::input, {}, 0.0, probability(rng)});
    for (std::size_t g = 0; g < gates; ++g) {
        Node n;
        n.id = NodeId(next);
        n.kind = kinds[uniform(rng, 0, std::size(kinds) - 1)];
        const std::size_t arity = n.kind == NodeKind::not_gate   ? 1
                                  : n.kind == NodeKind::xor_gate ? 2
                                                                 : uniform(rng, 1, 3);
        for (std::size_t k = 0; k < arity; ++k) n.fanins.push_back(NodeId(static_cast<std::uint32_t>(uniform(rng, 1, next - 1))));
        if (unit(rng) < error_chance) n.error_rate = probability(rng);
        c.add(std::move(n));
        ++next;
    }
    for (std::size_t o = 0; o < outputs; ++o) c.add_output(NodeId(static_cast<std::uint32_t>(uniform(rng, 1, next - 1))));
    return c;
}

}  // namespace gen
