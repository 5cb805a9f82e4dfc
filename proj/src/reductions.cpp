#include "dssat/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace dssat {

namespace {

constexpr std::uint32_t max_domain = 1u << 16;
constexpr double residual_floor = 1e-12;

enum class Encoding { boolean, chain, one_hot };

// A Boolean literal over the rewritten variables.
struct BitLiteral {
    VariableId var;
    bool positive;
    auto operator<=>(const BitLiteral&) const = default;
};

// A rewritten atom is either a disjunction of bit literals (usable inside a
// clause directly) or a conjunction (distributed over the clause).
struct Rewritten {
    bool conjunction = false;
    std::vector<BitLiteral> lits;  // empty disjunction = false, empty conjunction = true
};

}  // namespace

DssatFormula dqbf_to_dssat(const DqbfFormula& dqbf)
{
    std::vector<PrefixEntry> prefix;
    for (const auto x : dqbf.universals) prefix.push_back({x, Quantifier::random(0.5), Domain::boolean()});
    for (const auto& [y, deps] : dqbf.existentials) prefix.push_back({y, Quantifier::existential(deps), Domain::boolean()});
    return build_formula(std::move(prefix), dqbf.matrix);
}

bool dqbf_check(const DqbfFormula& dqbf, const DqbfCheckOptions& options)
{
    std::map<VariableId, int> kind;  // 0 universal, 1 existential
    for (const auto x : dqbf.universals) {
        if (!x.valid()) throw Error(ErrorCode::dangling_variable, "variable id 0");
        if (!kind.emplace(x, 0).second) throw Error(ErrorCode::duplicate_quantifier, "variable quantified twice");
    }
    for (const auto& [y, deps] : dqbf.existentials) {
        if (!y.valid()) throw Error(ErrorCode::dangling_variable, "variable id 0");
        if (!kind.emplace(y, 1).second) throw Error(ErrorCode::duplicate_quantifier, "variable quantified twice");
    }
    for (const auto& [y, deps] : dqbf.existentials) {
        for (const auto d : deps) {
            const auto it = kind.find(d);
            if (it == kind.end()) throw Error(ErrorCode::dangling_variable, "dependency on an unquantified variable");
            if (it->second != 0) throw Error(ErrorCode::illegal_dependency, "dependency on an existential");
        }
    }
    for (const auto& c : dqbf.matrix.clauses()) {
        for (const auto& l : c) {
            if (!kind.count(l.var)) throw Error(ErrorCode::dangling_variable, "matrix variable is not quantified");
        }
    }
    if (dqbf.universals.size() > options.max_universals) {
        throw Error(ErrorCode::search_space_too_large, "too many universal variables");
    }
    std::size_t table_bits = 0;
    for (const auto& [y, deps] : dqbf.existentials) {
        if (deps.size() >= 40) throw Error(ErrorCode::search_space_too_large, "dependency set too large");
        table_bits += std::size_t{1} << deps.size();
        if (table_bits > 63 || (std::uint64_t{1} << table_bits) > options.max_skolem_space) {
            throw Error(ErrorCode::search_space_too_large, "Skolem space exceeds the cap");
        }
    }

    // Candidate k assigns bit j of k to the j-th table entry overall.
    const std::uint64_t candidates = std::uint64_t{1} << table_bits;
    const std::uint64_t points = std::uint64_t{1} << dqbf.universals.size();
    Assignment alpha;
    for (std::uint64_t k = 0; k < candidates; ++k) {
        bool all = true;
        for (std::uint64_t u = 0; u < points && all; ++u) {
            for (std::size_t i = 0; i < dqbf.universals.size(); ++i) alpha.set(dqbf.universals[i], (u >> i) & 1u);
            std::size_t offset = 0;
            for (const auto& [y, deps] : dqbf.existentials) {
                std::size_t index = 0;
                for (std::size_t j = 0; j < deps.size(); ++j) index |= std::size_t{alpha.get(deps[j])} << j;
                alpha.set(y, (k >> (offset + index)) & 1u);
                offset += std::size_t{1} << deps.size();
            }
            all = eval_matrix(dqbf.matrix, alpha);
        }
        if (all) return true;
    }
    return false;
}

std::uint32_t decode_chain(std::span<const std::uint32_t> bits, std::uint32_t k)
{
    for (std::uint32_t t = 0; t < bits.size(); ++t) {
        if (bits[t] != 0) return t;
    }
    return k - 1;
}

Booleanization booleanize(const DssatFormula& formula)
{
    const auto n = formula.num_vars();
    std::vector<Encoding> encoding(n);
    Booleanization result;
    result.bits.resize(n);
    std::vector<PrefixEntry> prefix;
    std::uint32_t next_id = 1;
    auto fresh = [&] { return VariableId(next_id++); };

    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = formula.prefix()[i];
        const auto k = e.domain.size();
        if (k > max_domain) {
            throw Error(ErrorCode::domain_too_large,
                        "variable " + std::to_string(i + 1) + " has " + std::to_string(k) + " values");
        }
        auto& bits = result.bits[i];
        if (e.domain.is_boolean()) {
            encoding[i] = Encoding::boolean;
            bits.push_back(fresh());
            continue;
        }
        if (e.quantifier.is_universal()) {
            throw Error(ErrorCode::bad_domain, "universal variables must be Boolean");
        }
        if (e.quantifier.is_random()) {
            encoding[i] = Encoding::chain;
            for (std::uint32_t t = 1; t < k; ++t) bits.push_back(fresh());
        } else {
            encoding[i] = Encoding::one_hot;
            for (std::uint32_t t = 0; t < k; ++t) bits.push_back(fresh());
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = formula.prefix()[i];
        const auto& bits = result.bits[i];
        switch (e.quantifier.kind()) {
        case QuantifierKind::universal:
            prefix.push_back({bits[0], Quantifier::universal(), Domain::boolean()});
            break;
        case QuantifierKind::random: {
            const auto& dist = e.quantifier.distribution();
            if (encoding[i] == Encoding::boolean) {
                prefix.push_back({bits[0], Quantifier::random(dist[1]), Domain::boolean()});
                break;
            }
            // Bit t carries the mass of value t relative to the mass of values >= t.
            std::vector<double> residual(dist.size() + 1, 0.0);
            for (std::size_t t = dist.size(); t-- > 0;) residual[t] = residual[t + 1] + dist[t];
            for (std::size_t t = 0; t < bits.size(); ++t) {
                double p = 0.0;
                if (residual[t] > residual_floor) p = std::clamp(dist[t] / residual[t], 0.0, 1.0);
                prefix.push_back({bits[t], Quantifier::random(p), Domain::boolean()});
            }
            break;
        }
        case QuantifierKind::existential: {
            std::vector<VariableId> deps;
            for (const auto d : e.quantifier.deps()) {
                const auto& dbits = result.bits[d.slot()];
                deps.insert(deps.end(), dbits.begin(), dbits.end());
            }
            for (const auto b : bits) prefix.push_back({b, Quantifier::existential(deps), Domain::boolean()});
            break;
        }
        }
    }

    auto rewrite = [&](const Literal& l) {
        const auto i = l.var.slot();
        const auto& bits = result.bits[i];
        const auto k = formula.domain(l.var).size();
        Rewritten r;
        switch (encoding[i]) {
        case Encoding::boolean:
            r.lits.push_back({bits[0], l.positive});
            break;
        case Encoding::one_hot:
            r.lits.push_back({bits[l.value], l.positive});
            break;
        case Encoding::chain: {
            // value v <=> !b_1 .. !b_v, b_{v+1}; the last value has no true bit.
            std::vector<BitLiteral> pattern;
            for (std::uint32_t t = 0; t < l.value; ++t) pattern.push_back({bits[t], false});
            if (l.value + 1 < k) pattern.push_back({bits[l.value], true});
            if (l.positive) {
                r.conjunction = true;
                r.lits = std::move(pattern);
            } else {
                for (auto& b : pattern) b.positive = !b.positive;
                r.lits = std::move(pattern);
            }
            break;
        }
        }
        return r;
    };

    Matrix matrix;
    for (const auto& clause : formula.matrix().clauses()) {
        std::vector<std::vector<BitLiteral>> partial{{}};
        bool satisfied = false;
        for (const auto& l : clause) {
            auto r = rewrite(l);
            if (!r.conjunction) {
                for (auto& p : partial) p.insert(p.end(), r.lits.begin(), r.lits.end());
                continue;
            }
            if (r.lits.empty()) {
                satisfied = true;
                break;
            }
            std::vector<std::vector<BitLiteral>> expanded;
            expanded.reserve(partial.size() * r.lits.size());
            for (const auto& p : partial) {
                for (const auto& b : r.lits) {
                    expanded.push_back(p);
                    expanded.back().push_back(b);
                }
            }
            partial = std::move(expanded);
        }
        if (satisfied) continue;
        for (auto& p : partial) {
            std::sort(p.begin(), p.end());
            p.erase(std::unique(p.begin(), p.end()), p.end());
            bool tautology = false;
            for (std::size_t j = 0; j + 1 < p.size(); ++j) {
                if (p[j].var == p[j + 1].var) tautology = true;
            }
            if (tautology) continue;
            Clause c;
            for (const auto& b : p) c.push_back(b.positive ? Literal::pos(b.var) : Literal::neg(b.var));
            matrix.add_clause(std::move(c));
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (encoding[i] != Encoding::one_hot) continue;
        const auto& bits = result.bits[i];
        Clause at_least_one;
        for (const auto b : bits) at_least_one.push_back(Literal::pos(b));
        matrix.add_clause(std::move(at_least_one));
        for (std::size_t a = 0; a < bits.size(); ++a) {
            for (std::size_t b = a + 1; b < bits.size(); ++b) {
                matrix.add_clause({Literal::neg(bits[a]), Literal::neg(bits[b])});
            }
        }
    }

    result.formula = build_formula(std::move(prefix), std::move(matrix));
    return result;
}

SkolemSet Booleanization::map_skolem(const DssatFormula& original, const SkolemSet& skolem) const
{
    SkolemSet mapped;
    for (const auto y : original.existential_vars()) {
        const auto& table = skolem.table(y);
        const auto& ybits = bits[y.slot()];
        const auto new_length = table_length(formula, ybits.front());
        const auto& deps = original.quantifier(y).deps();

        std::vector<SkolemSet::Table> out(ybits.size(), SkolemSet::Table(new_length, 0));
        std::vector<std::uint32_t> scratch;
        for (std::size_t index = 0; index < new_length; ++index) {
            // Bits of the rewritten dependencies, first bit least significant.
            std::size_t rest = index;
            std::size_t original_index = 0;
            std::size_t stride = 1;
            for (const auto d : deps) {
                const auto& dbits = bits[d.slot()];
                const auto k = original.domain(d).size();
                scratch.assign(dbits.size(), 0);
                for (auto& b : scratch) {
                    b = static_cast<std::uint32_t>(rest & 1u);
                    rest >>= 1;
                }
                const auto value = original.domain(d).is_boolean() ? scratch[0] : decode_chain(scratch, k);
                original_index += stride * value;
                stride *= k;
            }
            const auto value = table.at(original_index);
            if (original.domain(y).is_boolean()) {
                out[0][index] = value;
            } else {
                out[value][index] = 1;
            }
        }
        for (std::size_t j = 0; j < ybits.size(); ++j) mapped.set(ybits[j], std::move(out[j]));
    }
    return mapped;
}

}  // namespace dssat
