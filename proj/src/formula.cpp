#include "dssat/formula.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

namespace dssat {

namespace {

constexpr double distribution_tolerance = 1e-12;
constexpr std::uint32_t max_domain_size = 1u << 24;

std::string var_name(VariableId v)
{
    return "variable " + std::to_string(v.index());
}

void check_distribution(const PrefixEntry& e)
{
    const auto& dist = e.quantifier.distribution();
    if (dist.size() != e.domain.size()) {
        throw Error(ErrorCode::bad_domain, var_name(e.var) + ": distribution has " +
                                               std::to_string(dist.size()) + " entries, domain has " +
                                               std::to_string(e.domain.size()));
    }
    double sum = 0.0;
    for (double p : dist) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw Error(ErrorCode::bad_probability, var_name(e.var) + ": probability outside [0,1]");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > distribution_tolerance) {
        throw Error(ErrorCode::bad_probability, var_name(e.var) + ": distribution does not sum to 1");
    }
}

}  // namespace

Quantifier Quantifier::random(double p)
{
    Quantifier q;
    q.kind_ = QuantifierKind::random;
    q.distribution_ = {1.0 - p, p};
    return q;
}

Quantifier Quantifier::random(std::vector<double> distribution)
{
    Quantifier q;
    q.kind_ = QuantifierKind::random;
    q.distribution_ = std::move(distribution);
    return q;
}

Quantifier Quantifier::universal()
{
    return Quantifier();
}

Quantifier Quantifier::existential(std::vector<VariableId> deps)
{
    Quantifier q;
    q.kind_ = QuantifierKind::existential;
    q.deps_ = std::move(deps);
    return q;
}

void Matrix::add_implication(std::span<const Literal> antecedent, std::span<const Literal> consequent)
{
    Clause base;
    base.reserve(antecedent.size() + 1);
    for (const auto& l : antecedent) base.push_back(~l);
    if (consequent.empty()) {
        clauses_.push_back(std::move(base));
        return;
    }
    for (const auto& c : consequent) {
        Clause clause = base;
        clause.push_back(c);
        clauses_.push_back(std::move(clause));
    }
}

bool Matrix::is_bottom() const noexcept
{
    for (const auto& c : clauses_) {
        if (c.empty()) return true;
    }
    return false;
}

const PrefixEntry& DssatFormula::entry(VariableId v) const
{
    if (!v.valid() || v.slot() >= prefix_.size()) {
        throw Error(ErrorCode::unknown_variable, var_name(v) + " is not part of the formula");
    }
    return prefix_[v.slot()];
}

bool DssatFormula::is_linear_prefix() const
{
    std::vector<VariableId> preceding;
    for (const auto& e : prefix_) {
        if (e.quantifier.is_existential()) {
            std::vector<VariableId> deps = e.quantifier.deps();
            std::sort(deps.begin(), deps.end());
            if (deps != preceding) return false;
        } else {
            preceding.push_back(e.var);  // ids are increasing along the prefix
        }
    }
    return true;
}

DssatFormula build_formula(std::vector<PrefixEntry> prefix, Matrix matrix)
{
    std::unordered_map<std::uint32_t, std::uint32_t> renumber;
    renumber.reserve(prefix.size());
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        const auto v = prefix[i].var;
        if (!v.valid()) {
            throw Error(ErrorCode::dangling_variable, "variable id 0 is not allowed");
        }
        if (!renumber.emplace(v.index(), static_cast<std::uint32_t>(i + 1)).second) {
            throw Error(ErrorCode::duplicate_quantifier, var_name(v) + " is quantified more than once");
        }
    }

    std::vector<QuantifierKind> kinds;
    kinds.reserve(prefix.size());
    for (const auto& e : prefix) kinds.push_back(e.quantifier.kind());

    DssatFormula f;
    f.prefix_.reserve(prefix.size());
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        PrefixEntry e = std::move(prefix[i]);
        const auto size = e.domain.size();
        if (e.domain.is_boolean() ? size != 2 : (size < 1 || size > max_domain_size)) {
            throw Error(ErrorCode::bad_domain, var_name(e.var) + ": unsupported domain size");
        }
        switch (e.quantifier.kind()) {
        case QuantifierKind::random:
            check_distribution(e);
            break;
        case QuantifierKind::universal:
            if (!e.domain.is_boolean()) {
                throw Error(ErrorCode::bad_domain, var_name(e.var) + ": universal variables must be Boolean");
            }
            break;
        case QuantifierKind::existential: {
            std::vector<VariableId> deps;
            deps.reserve(e.quantifier.deps().size());
            for (const auto d : e.quantifier.deps()) {
                const auto it = renumber.find(d.index());
                if (it == renumber.end()) {
                    throw Error(ErrorCode::dangling_variable,
                                var_name(e.var) + " depends on unquantified " + var_name(d));
                }
                if (kinds[it->second - 1] == QuantifierKind::existential) {
                    throw Error(ErrorCode::illegal_dependency,
                                var_name(e.var) + " depends on existential " + var_name(d));
                }
                const VariableId mapped(it->second);
                for (const auto seen : deps) {
                    if (seen == mapped) {
                        throw Error(ErrorCode::illegal_dependency,
                                    var_name(e.var) + " lists " + var_name(d) + " twice");
                    }
                }
                deps.push_back(mapped);
            }
            e.quantifier = Quantifier::existential(std::move(deps));
            break;
        }
        }
        e.var = VariableId(static_cast<std::uint32_t>(i + 1));
        if (!e.domain.is_boolean()) f.boolean_ = false;
        switch (e.quantifier.kind()) {
        case QuantifierKind::random: f.random_.push_back(e.var); break;
        case QuantifierKind::universal: f.universal_.push_back(e.var); break;
        case QuantifierKind::existential: f.existential_.push_back(e.var); break;
        }
        f.prefix_.push_back(std::move(e));
    }

    std::vector<Clause> clauses = matrix.clauses();
    for (auto& clause : clauses) {
        for (auto& lit : clause) {
            const auto it = renumber.find(lit.var.index());
            if (it == renumber.end()) {
                throw Error(ErrorCode::dangling_variable, var_name(lit.var) + " occurs in the matrix but is not quantified");
            }
            lit.var = VariableId(it->second);
            const auto& dom = f.prefix_[lit.var.slot()].domain;
            if (lit.value >= dom.size()) {
                throw Error(ErrorCode::bad_domain, "literal value " + std::to_string(lit.value) +
                                                       " outside the domain of " + var_name(lit.var));
            }
            if (dom.is_boolean() && lit.value == 0) {
                lit = Literal{lit.var, 1, !lit.positive};
            }
        }
    }
    f.matrix_ = Matrix(std::move(clauses));
    return f;
}

void Assignment::set(VariableId v, std::uint32_t value)
{
    if (!v.valid()) throw Error(ErrorCode::unknown_variable, "variable id 0");
    if (v.slot() >= values_.size()) values_.resize(v.slot() + 1, unset);
    values_[v.slot()] = value;
}

void Assignment::clear(VariableId v)
{
    if (v.valid() && v.slot() < values_.size()) values_[v.slot()] = unset;
}

std::uint32_t Assignment::get(VariableId v) const
{
    if (!has(v)) throw Error(ErrorCode::partial_assignment, var_name(v) + " is unassigned");
    return values_[v.slot()];
}

std::optional<std::uint32_t> Assignment::find(VariableId v) const
{
    if (!has(v)) return std::nullopt;
    return values_[v.slot()];
}

double weight(const Assignment& assignment, const DssatFormula& formula)
{
    double w = 1.0;
    for (const auto v : formula.random_vars()) {
        const auto value = assignment.get(v);
        const auto& dist = formula.quantifier(v).distribution();
        if (value >= dist.size()) {
            throw Error(ErrorCode::bad_domain, var_name(v) + " assigned a value outside its domain");
        }
        w *= dist[value];
    }
    return w;
}

bool eval_matrix(const Matrix& matrix, const Assignment& assignment)
{
    bool result = true;
    for (const auto& clause : matrix.clauses()) {
        bool satisfied = false;
        for (const auto& lit : clause) {
            // Every literal is read so that a partial assignment is always reported.
            if (lit.holds(assignment.get(lit.var))) satisfied = true;
        }
        if (!satisfied) result = false;
    }
    return result;
}

const SkolemSet::Table& SkolemSet::table(VariableId y) const
{
    const auto it = tables_.find(y);
    if (it == tables_.end()) {
        throw Error(ErrorCode::missing_function, "no Skolem function for " + var_name(y));
    }
    return it->second;
}

void SkolemSet::validate(const DssatFormula& formula) const
{
    for (const auto& [y, table] : tables_) {
        if (!y.valid() || y.slot() >= formula.num_vars() || !formula.quantifier(y).is_existential()) {
            throw Error(ErrorCode::unknown_variable, var_name(y) + " is not an existential variable");
        }
        if (table.size() != table_length(formula, y)) {
            throw Error(ErrorCode::wrong_table_length,
                        var_name(y) + ": table has " + std::to_string(table.size()) + " entries, expected " +
                            std::to_string(table_length(formula, y)));
        }
        const auto k = formula.domain(y).size();
        for (const auto value : table) {
            if (value >= k) {
                throw Error(ErrorCode::bad_domain, var_name(y) + ": table value outside the domain");
            }
        }
    }
    for (const auto y : formula.existential_vars()) {
        if (!contains(y)) throw Error(ErrorCode::missing_function, "no Skolem function for " + var_name(y));
    }
}

std::size_t table_length(const DssatFormula& formula, VariableId y)
{
    std::size_t length = 1;
    for (const auto d : formula.quantifier(y).deps()) {
        const std::size_t k = formula.domain(d).size();
        if (k != 0 && length > (std::size_t{1} << 40) / k) {
            throw Error(ErrorCode::search_space_too_large, var_name(y) + ": Skolem table is too large");
        }
        length *= k;
    }
    return length;
}

std::size_t dependency_index(const DssatFormula& formula, VariableId y, const Assignment& assignment)
{
    std::size_t index = 0;
    std::size_t stride = 1;
    for (const auto d : formula.quantifier(y).deps()) {
        index += stride * assignment.get(d);
        stride *= formula.domain(d).size();
    }
    return index;
}

}  // namespace dssat
