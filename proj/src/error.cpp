#include "dssat/error.hpp"

namespace dssat {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::duplicate_quantifier: return "DuplicateQuantifier";
    case ErrorCode::dangling_variable: return "DanglingVariable";
    case ErrorCode::bad_probability: return "BadProbability";
    case ErrorCode::illegal_dependency: return "IllegalDependency";
    case ErrorCode::bad_domain: return "BadDomain";
    case ErrorCode::partial_assignment: return "PartialAssignment";
    case ErrorCode::syntax_error: return "SyntaxError";
    case ErrorCode::count_mismatch: return "CountMismatch";
    case ErrorCode::unknown_variable: return "UnknownVariable";
    case ErrorCode::non_boolean_formula: return "NonBooleanFormula";
    case ErrorCode::wrong_table_length: return "WrongTableLength";
    case ErrorCode::missing_function: return "MissingFunction";
    case ErrorCode::row_not_normalized: return "RowNotNormalized";
    case ErrorCode::bad_horizon: return "BadHorizon";
    case ErrorCode::too_many_random_vars: return "TooManyRandomVars";
    case ErrorCode::skolem_mismatch: return "SkolemMismatch";
    case ErrorCode::depth_budget_exceeded: return "DepthBudgetExceeded";
    case ErrorCode::not_linear_prefix: return "NotLinearPrefix";
    case ErrorCode::unexpected_universal: return "UnexpectedUniversal";
    case ErrorCode::search_space_too_large: return "SearchSpaceTooLarge";
    case ErrorCode::bad_threshold: return "BadThreshold";
    case ErrorCode::domain_too_large: return "DomainTooLarge";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::partial_policy: return "PartialPolicy";
    case ErrorCode::policy_space_too_large: return "PolicySpaceTooLarge";
    case ErrorCode::policy_mismatch: return "PolicyMismatch";
    case ErrorCode::invalid_model: return "InvalidModel";
    case ErrorCode::unsupported_gate: return "UnsupportedGate";
    case ErrorCode::shared_input_mismatch: return "SharedInputMismatch";
    case ErrorCode::cyclic_black_box: return "CyclicBlackBox";
    case ErrorCode::error_rates_present: return "ErrorRatesPresent";
    case ErrorCode::invalid_circuit: return "InvalidCircuit";
    }
    return "Unknown";
}

bool is_resource_error(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::too_many_random_vars:
    case ErrorCode::search_space_too_large:
    case ErrorCode::policy_space_too_large:
    case ErrorCode::depth_budget_exceeded:
    case ErrorCode::domain_too_large:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      code_(code),
      line_(line)
{
}

}  // namespace dssat
