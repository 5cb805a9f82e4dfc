#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dssat/formula.hpp"

/**
 * \file circuits.hpp
 * \brief Gate-level circuits with error rates and black boxes, and their
 * encodings as (extended) DSSAT formulas.
 *
 * Text format, one node per line ('#' starts a comment):
 *
 *     <id> input [prob <p>]
 *     <id> and|or|nand|nor|xor|not <fanin>+ [err <p>]
 *     <id> bb <dep>* [err <p>]
 *     output <id>+
 *
 * Ids are non-negative integers; nodes may be listed in any order.
 */

namespace dssat {

class NodeId {
public:
    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t value) : value_(value) {}
    constexpr std::uint32_t value() const noexcept { return value_; }
    auto operator<=>(const NodeId&) const = default;

private:
    std::uint32_t value_ = 0;
};

enum class NodeKind { input, and_gate, or_gate, nand_gate, nor_gate, xor_gate, not_gate, black_box };

/// Lower-case keyword used by the text format.
std::string_view node_kind_name(NodeKind kind);

struct Node {
    NodeId id;
    NodeKind kind = NodeKind::input;
    /// Gate fan-ins, or the dependency set of a black box.
    std::vector<NodeId> fanins;
    /// Probability that the node output is flipped.
    double error_rate = 0.0;
    /// Pr[input = true]; inputs only.
    double probability = 0.5;
};

class Circuit {
public:
    /// Throws InvalidCircuit on duplicate ids.
    void add(Node node);
    void add_output(NodeId id) { outputs_.push_back(id); }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<NodeId>& outputs() const noexcept { return outputs_; }
    bool contains(NodeId id) const { return index_.count(id) != 0; }
    /// Throws InvalidCircuit for unknown ids.
    const Node& node(NodeId id) const;

    /// Input ids in increasing order.
    std::vector<NodeId> inputs() const;
    /// Black-box ids in increasing order.
    std::vector<NodeId> black_boxes() const;
    bool has_errors() const;

    /// Fan-ins before fan-outs; ties broken by increasing id. Throws like validate().
    std::vector<NodeId> topological_order() const;

    /// Throws InvalidCircuit (dangling reference, bad arity, rate outside
    /// [0,1], missing outputs, cycle not through a black box) or
    /// CyclicBlackBox (a cycle through a black-box dependency).
    void validate() const;

private:
    std::vector<Node> nodes_;
    std::map<NodeId, std::size_t> index_;
    std::vector<NodeId> outputs_;
};

/// Throws SyntaxError, UnsupportedGate (unknown kind), BadProbability and
/// the validate() errors, all with line numbers where one applies.
Circuit parse_circuit(std::string_view text);
std::string print_circuit(const Circuit& circuit);

struct AuxInput {
    NodeId input;     ///< fresh input that triggers the error
    NodeId gate;      ///< node whose output it flips
    double probability;
};

struct DistilledCircuit {
    Circuit circuit;
    /// Error-triggering inputs in topological order of the gates they flip.
    std::vector<AuxInput> aux;
};

/// Every node with a non-zero error rate keeps its id on an error-free XOR
/// of the original (renamed, error-free) node and a fresh auxiliary input.
/// Fresh ids start above the largest id in the circuit.
DistilledCircuit distill(const Circuit& circuit);

struct TseitinEncoding {
    Matrix matrix;
    /// Variable carrying the value of every node.
    std::map<NodeId, VariableId> node_vars;
    /// One defined variable per gate, in topological order.
    std::vector<VariableId> defined;
};

/// Defines one fresh variable per gate, numbered from `first_fresh`.
/// `leaves` must bind every input and black box. Throws UnsupportedGate for
/// gates with a non-zero error rate, InvalidCircuit for unbound leaves.
TseitinEncoding tseitin(const Circuit& circuit, const std::map<NodeId, VariableId>& leaves,
                        std::uint32_t first_fresh);

/// Variable roles of a partial-design encoding.
struct PartialDesignEncoding {
    DssatFormula formula;
    std::map<NodeId, VariableId> inputs;         ///< shared primary inputs
    std::vector<AuxInput> aux;                   ///< error triggers, in prefix order
    std::vector<VariableId> aux_vars;
    std::map<NodeId, VariableId> intermediates;  ///< universally quantified referenced nodes
    std::map<NodeId, VariableId> black_boxes;    ///< existential black-box outputs
};

/// Equivalence of a partial design with errors against an error-free,
/// black-box-free specification. The implementation is distilled first.
/// Prefix: inputs (random), error triggers (random), referenced
/// intermediates (universal), black boxes (existential), then the Tseitin
/// variables as existentials over every randomized and universal variable.
/// Throws SharedInputMismatch, CyclicBlackBox, InvalidCircuit, ErrorRatesPresent
/// (errors in the specification).
PartialDesignEncoding encode_probabilistic_partial(const Circuit& spec, const Circuit& impl);

/// As above without error triggers. Throws ErrorRatesPresent when either
/// circuit has a non-zero error rate.
PartialDesignEncoding encode_approx_partial(const Circuit& spec, const Circuit& impl);

}  // namespace dssat
