#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dssat/formula.hpp"

namespace dssat {

/// Dependency QBF: universals, Henkin existentials over universals, CNF matrix.
struct DqbfFormula {
    std::vector<VariableId> universals;
    std::vector<std::pair<VariableId, std::vector<VariableId>>> existentials;
    Matrix matrix;
};

/// Same prefix with every universal turned into a fair coin. Variable and
/// clause counts are unchanged.
DssatFormula dqbf_to_dssat(const DqbfFormula& dqbf);

struct DqbfCheckOptions {
    std::size_t max_universals = 16;
    std::uint64_t max_skolem_space = std::uint64_t{1} << 20;
};

/// Brute force: true iff some choice of Skolem tables satisfies the matrix
/// under every universal assignment. Throws SearchSpaceTooLarge.
bool dqbf_check(const DqbfFormula& dqbf, const DqbfCheckOptions& options = {});

/// Result of rewriting finite-domain variables into Boolean ones.
struct Booleanization {
    DssatFormula formula;
    /// New variables replacing each original variable (indexed by slot).
    /// Boolean variables map to one variable; randomized finite-domain
    /// variables to a chain of K-1 bits; existential ones to K one-hot bits.
    std::vector<std::vector<VariableId>> bits;

    /// Tables of the rewritten existentials realizing the same functions.
    SkolemSet map_skolem(const DssatFormula& original, const SkolemSet& skolem) const;
};

/// Throws DomainTooLarge for domains above 2^16 values.
Booleanization booleanize(const DssatFormula& formula);

/// Value of a chain-encoded variable with K values from its bits: the
/// position of the first true bit, K-1 when none is true.
std::uint32_t decode_chain(std::span<const std::uint32_t> bits, std::uint32_t k);

}  // namespace dssat
