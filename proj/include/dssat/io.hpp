#pragma once

#include <string>
#include <string_view>

#include "dssat/decpomdp.hpp"
#include "dssat/formula.hpp"

/**
 * \file io.hpp
 * \brief Text formats.
 *
 * Formulas (extended SDIMACS):
 *
 *     c comment
 *     p cnf <vars> <clauses>
 *     r <prob> <v>+ 0      randomized, Pr[v] = prob
 *     a <v>+ 0             universal
 *     e <v>+ 0             existential over all preceding r/a variables
 *     d <v> <dep>* 0       existential over the listed variables
 *     <lit>+ 0             clauses, DIMACS style
 *
 * Variables are renumbered in prefix order; a prefix that lists variables
 * in increasing order keeps the file's ids.
 *
 * Skolem functions: one line "f <var> <table>" per existential, where the
 * table lists the outputs for dependency encodings 0, 1, ... as digits.
 *
 * Dec-POMDP models: header lines "agents:", "states:", "actions:",
 * "observations:", "horizon:", "start:" followed by sparse
 * "T: s a1..an s' p", "O: s' a1..an o1..on p" and "R: s a1..an r" lines.
 *
 * Joint policies: lines "a <agent> <t> <action>+" listing the actions of
 * one agent at one stage for histories 0, 1, ... (agent is 1-based).
 *
 * All parsers accept LF or CRLF line ends and report errors with 1-based
 * line numbers.
 */

namespace dssat {

/// Throws SyntaxError, CountMismatch, BadProbability, UnknownVariable,
/// DuplicateQuantifier, IllegalDependency.
DssatFormula parse_sdimacs(std::string_view text);

/// Throws NonBooleanFormula.
std::string print_sdimacs(const DssatFormula& formula);

/// Throws SyntaxError, UnknownVariable, WrongTableLength, MissingFunction.
SkolemSet parse_skolem(std::string_view text, const DssatFormula& formula);
std::string print_skolem(const SkolemSet& skolem);

/// Throws SyntaxError, RowNotNormalized, BadHorizon, BadProbability, InvalidModel.
DecPomdpModel parse_decpomdp(std::string_view text);
std::string print_decpomdp(const DecPomdpModel& model);

/// Throws SyntaxError, PartialPolicy, OutOfRange.
JointPolicy parse_policy(std::string_view text, const DecPomdpModel& model);
std::string print_policy(const JointPolicy& policy);

}  // namespace dssat
