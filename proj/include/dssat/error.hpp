#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dssat {

enum class ErrorCode {
    // formula construction
    duplicate_quantifier,
    dangling_variable,
    bad_probability,
    illegal_dependency,
    bad_domain,
    partial_assignment,
    // parsing
    syntax_error,
    count_mismatch,
    unknown_variable,
    non_boolean_formula,
    wrong_table_length,
    missing_function,
    row_not_normalized,
    bad_horizon,
    // evaluation and solving
    too_many_random_vars,
    skolem_mismatch,
    depth_budget_exceeded,
    not_linear_prefix,
    unexpected_universal,
    search_space_too_large,
    bad_threshold,
    // reductions
    domain_too_large,
    // dec-pomdp
    out_of_range,
    partial_policy,
    policy_space_too_large,
    policy_mismatch,
    invalid_model,
    // circuits
    unsupported_gate,
    shared_input_mismatch,
    cyclic_black_box,
    error_rates_present,
    invalid_circuit,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors raised by a configurable desk-scale guard rather than by
/// malformed input.
bool is_resource_error(ErrorCode code) noexcept;

/// The single exception type of the library. `line()` is 1-based and is 0
/// when the error is not tied to a position in a text document.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::size_t line = 0);

    ErrorCode code() const noexcept { return code_; }
    std::size_t line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::size_t line_;
};

}  // namespace dssat
