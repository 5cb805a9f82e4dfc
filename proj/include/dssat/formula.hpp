#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dssat/error.hpp"

/**
 * \file formula.hpp
 * \brief Data model for DSSAT and extended DSSAT formulas.
 *
 * A formula is a prefix of quantified variables followed by a CNF matrix.
 * Variables are randomized (Boolean with a probability of being true, or
 * finite-domain with a distribution), universal, or Henkin-existential with
 * an explicit dependency set. Literals are equality atoms `var == value`
 * or their negation; for Boolean variables value 1 stands for true.
 */

namespace dssat {

/// 1-based variable index. After build_formula() ids are dense 1..N in prefix order.
class VariableId {
public:
    constexpr VariableId() = default;
    constexpr explicit VariableId(std::uint32_t index) : index_(index) {}

    constexpr std::uint32_t index() const noexcept { return index_; }
    /// 0-based position, valid for ids produced by build_formula().
    constexpr std::size_t slot() const noexcept { return index_ - 1; }
    constexpr bool valid() const noexcept { return index_ != 0; }

    auto operator<=>(const VariableId&) const = default;

private:
    std::uint32_t index_ = 0;
};

class Domain {
public:
    static constexpr Domain boolean() noexcept { return Domain(2, true); }
    static constexpr Domain finite(std::uint32_t size) noexcept { return Domain(size, false); }

    constexpr std::uint32_t size() const noexcept { return size_; }
    constexpr bool is_boolean() const noexcept { return boolean_; }

    bool operator==(const Domain&) const = default;

private:
    constexpr Domain(std::uint32_t size, bool boolean) : size_(size), boolean_(boolean) {}

    std::uint32_t size_;
    bool boolean_;
};

enum class QuantifierKind { random, universal, existential };

class Quantifier {
public:
    /// Boolean randomized quantifier, `p` = Pr[var is true].
    static Quantifier random(double p);
    /// Finite-domain randomized quantifier; entry k = Pr[var == k].
    static Quantifier random(std::vector<double> distribution);
    static Quantifier universal();
    /// Henkin existential. Dependency order fixes the Skolem table layout.
    static Quantifier existential(std::vector<VariableId> deps);

    QuantifierKind kind() const noexcept { return kind_; }
    bool is_random() const noexcept { return kind_ == QuantifierKind::random; }
    bool is_universal() const noexcept { return kind_ == QuantifierKind::universal; }
    bool is_existential() const noexcept { return kind_ == QuantifierKind::existential; }

    const std::vector<double>& distribution() const noexcept { return distribution_; }
    /// Pr[true] of a Boolean randomized variable.
    double probability() const { return distribution_.at(1); }
    const std::vector<VariableId>& deps() const noexcept { return deps_; }

    bool operator==(const Quantifier&) const = default;

private:
    QuantifierKind kind_ = QuantifierKind::universal;
    std::vector<double> distribution_;
    std::vector<VariableId> deps_;
};

struct PrefixEntry {
    VariableId var;
    Quantifier quantifier;
    Domain domain = Domain::boolean();

    bool operator==(const PrefixEntry&) const = default;
};

struct Literal {
    VariableId var;
    std::uint32_t value = 1;
    bool positive = true;

    static constexpr Literal pos(VariableId v) noexcept { return {v, 1, true}; }
    static constexpr Literal neg(VariableId v) noexcept { return {v, 1, false}; }
    static constexpr Literal eq(VariableId v, std::uint32_t k) noexcept { return {v, k, true}; }
    static constexpr Literal neq(VariableId v, std::uint32_t k) noexcept { return {v, k, false}; }

    constexpr Literal operator~() const noexcept { return {var, value, !positive}; }
    constexpr bool holds(std::uint32_t assigned) const noexcept
    {
        return (assigned == value) == positive;
    }

    auto operator<=>(const Literal&) const = default;
};

using Clause = std::vector<Literal>;

/// Conjunction of clauses. No clauses is the constant true; a matrix
/// holding an empty clause is the constant false.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::vector<Clause> clauses) : clauses_(std::move(clauses)) {}

    static Matrix top() { return Matrix(); }
    static Matrix bottom() { return Matrix({Clause{}}); }

    void add_clause(Clause clause) { clauses_.push_back(std::move(clause)); }
    /// Adds `a1 & ... & ak -> c` as one clause per consequent atom. An empty
    /// consequent adds the single clause `!a1 | ... | !ak`.
    void add_implication(std::span<const Literal> antecedent, std::span<const Literal> consequent);

    const std::vector<Clause>& clauses() const noexcept { return clauses_; }
    std::size_t size() const noexcept { return clauses_.size(); }
    bool is_top() const noexcept { return clauses_.empty(); }
    bool is_bottom() const noexcept;

    bool operator==(const Matrix&) const = default;

private:
    std::vector<Clause> clauses_;
};

class DssatFormula {
public:
    DssatFormula() = default;

    std::size_t num_vars() const noexcept { return prefix_.size(); }
    const std::vector<PrefixEntry>& prefix() const noexcept { return prefix_; }
    const PrefixEntry& entry(VariableId v) const;
    const Quantifier& quantifier(VariableId v) const { return entry(v).quantifier; }
    const Domain& domain(VariableId v) const { return entry(v).domain; }
    const Matrix& matrix() const noexcept { return matrix_; }

    /// Extended formulas contain universal quantifiers.
    bool extended() const noexcept { return !universal_.empty(); }
    /// Boolean formulas contain no finite-domain variables.
    bool is_boolean() const noexcept { return boolean_; }
    /// Every existential depends on exactly the randomized/universal
    /// variables that precede it in the prefix.
    bool is_linear_prefix() const;

    const std::vector<VariableId>& random_vars() const noexcept { return random_; }
    const std::vector<VariableId>& universal_vars() const noexcept { return universal_; }
    const std::vector<VariableId>& existential_vars() const noexcept { return existential_; }

    bool operator==(const DssatFormula& other) const
    {
        return prefix_ == other.prefix_ && matrix_ == other.matrix_;
    }

private:
    friend DssatFormula build_formula(std::vector<PrefixEntry> prefix, Matrix matrix);

    std::vector<PrefixEntry> prefix_;
    Matrix matrix_;
    bool boolean_ = true;
    std::vector<VariableId> random_;
    std::vector<VariableId> universal_;
    std::vector<VariableId> existential_;
};

/// Validates a prefix and matrix and renumbers variables densely (1..N in
/// prefix order). Boolean literals are normalized to value 1.
/// Throws Error with DuplicateQuantifier, DanglingVariable, BadProbability,
/// IllegalDependency or BadDomain.
DssatFormula build_formula(std::vector<PrefixEntry> prefix, Matrix matrix);

/// Partial map from variables to values (Boolean: 0/1, finite: domain index).
class Assignment {
public:
    static constexpr std::uint32_t unset = std::numeric_limits<std::uint32_t>::max();

    Assignment() = default;
    explicit Assignment(std::size_t num_vars) : values_(num_vars, unset) {}

    void set(VariableId v, std::uint32_t value);
    void clear(VariableId v);
    bool has(VariableId v) const noexcept
    {
        return v.valid() && v.slot() < values_.size() && values_[v.slot()] != unset;
    }
    /// Throws PartialAssignment when `v` is unassigned.
    std::uint32_t get(VariableId v) const;
    std::optional<std::uint32_t> find(VariableId v) const;
    std::size_t capacity() const noexcept { return values_.size(); }

private:
    std::vector<std::uint32_t> values_;
};

/// Product of the selected distribution entries of all randomized variables.
double weight(const Assignment& assignment, const DssatFormula& formula);

/// True iff every clause has a satisfied literal. Every matrix variable must be assigned.
bool eval_matrix(const Matrix& matrix, const Assignment& assignment);

/// Skolem functions as value tables. Entry b of the table for y is the
/// value of y under the dependency assignment whose mixed-radix encoding
/// (first dependency least significant) is b.
class SkolemSet {
public:
    using Table = std::vector<std::uint32_t>;

    void set(VariableId y, Table table) { tables_[y] = std::move(table); }
    bool contains(VariableId y) const { return tables_.count(y) != 0; }
    /// Throws MissingFunction.
    const Table& table(VariableId y) const;
    const std::map<VariableId, Table>& tables() const noexcept { return tables_; }
    std::size_t size() const noexcept { return tables_.size(); }

    /// Throws UnknownVariable, MissingFunction or WrongTableLength when the
    /// set does not fit `formula`.
    void validate(const DssatFormula& formula) const;

    bool operator==(const SkolemSet&) const = default;

private:
    std::map<VariableId, Table> tables_;
};

/// Number of entries of y's table: the product of its dependency domain sizes.
std::size_t table_length(const DssatFormula& formula, VariableId y);

/// Table position selected by the dependency values in `assignment`.
std::size_t dependency_index(const DssatFormula& formula, VariableId y, const Assignment& assignment);

}  // namespace dssat
