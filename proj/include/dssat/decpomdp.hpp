#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dssat/formula.hpp"
#include "dssat/solver.hpp"

namespace dssat {

/// Mixed-radix number of a tuple, first component least significant.
/// Throws OutOfRange when some component is not below its set size.
std::uint64_t tuple_number(std::span<const std::uint32_t> values, std::span<const std::uint32_t> sizes);

/// Inverse of tuple_number.
std::vector<std::uint32_t> tuple_values(std::uint64_t number, std::span<const std::uint32_t> sizes);

/**
 * Finite-horizon Dec-POMDP with dense tables. Joint actions and joint
 * observations are addressed by their tuple numbers.
 *
 *   transition[(s * joint_actions + ja) * states + s2]
 *   observation[(s2 * joint_actions + ja) * joint_observations + jo]
 *   reward[s * joint_actions + ja]
 */
struct DecPomdpModel {
    std::size_t agents = 1;
    std::uint32_t states = 1;
    std::vector<std::uint32_t> actions;
    std::vector<std::uint32_t> observations;
    std::size_t horizon = 1;
    std::vector<double> start;
    std::vector<double> transition;
    std::vector<double> observation;
    std::vector<double> reward;

    /// Model with all tables allocated and zero-filled (start uniform).
    static DecPomdpModel with_shape(std::uint32_t states, std::vector<std::uint32_t> actions,
                                    std::vector<std::uint32_t> observations, std::size_t horizon);

    std::uint32_t joint_actions() const;
    std::uint32_t joint_observations() const;

    double& T(std::uint32_t s, std::uint32_t ja, std::uint32_t s2);
    double T(std::uint32_t s, std::uint32_t ja, std::uint32_t s2) const;
    double& O(std::uint32_t s2, std::uint32_t ja, std::uint32_t jo);
    double O(std::uint32_t s2, std::uint32_t ja, std::uint32_t jo) const;
    double& R(std::uint32_t s, std::uint32_t ja);
    double R(std::uint32_t s, std::uint32_t ja) const;

    /// Throws InvalidModel (shape), BadHorizon, BadProbability or
    /// RowNotNormalized (row sums off by more than 1e-9).
    void validate() const;

    bool operator==(const DecPomdpModel&) const = default;
};

/// Deterministic joint policy: actions[agent][t][history], where the
/// history o^0..o^{t-1} of the agent's own observations is numbered with
/// o^0 least significant.
struct JointPolicy {
    std::vector<std::vector<std::vector<std::uint32_t>>> actions;

    /// Policy selecting action 0 everywhere.
    static JointPolicy zeros(const DecPomdpModel& model);

    std::uint32_t action(std::size_t agent, std::size_t t, std::uint64_t history) const
    {
        return actions[agent][t][history];
    }

    bool operator==(const JointPolicy&) const = default;
};

/// Number of histories of `agent` at stage t: |O_i|^t.
std::uint64_t history_count(const DecPomdpModel& model, std::size_t agent, std::size_t t);

/// Throws PartialPolicy when some history lacks an action, OutOfRange when
/// an action is not in the agent's action set.
void validate_policy(const DecPomdpModel& model, const JointPolicy& policy);

struct ScaledReward {
    std::vector<double> r;  ///< same layout as DecPomdpModel::reward
    double scale = 0.0;     ///< sum of (reward - offset); 0 marks the degenerate uniform case
    double offset = 0.0;    ///< minimum reward
    bool degenerate() const noexcept { return scale == 0.0; }
};

ScaledReward scaled_reward(const DecPomdpModel& model);

/// Expected total reward over the horizon (Bellman recursion). Throws PartialPolicy.
double policy_value(const DecPomdpModel& model, const JointPolicy& policy);
/// Same recursion with the reward table replaced by `reward`.
double policy_value(const DecPomdpModel& model, const JointPolicy& policy, std::span<const double> reward);

/// Product over agents and stages of |A_i|^(|O_i|^t), saturating at UINT64_MAX.
std::uint64_t policy_space_size(const DecPomdpModel& model);

struct PolicySearchOptions {
    std::uint64_t max_policy_space = 1000000;
};

struct OptimalPolicy {
    JointPolicy policy;
    double value = 0.0;
};

/// Exhaustive search; ties keep the policy that comes first in
/// lexicographic order of (agent, stage, history) entries. Throws PolicySpaceTooLarge.
OptimalPolicy optimal_policy_bruteforce(const DecPomdpModel& model, const PolicySearchOptions& options = {});

/// Formula variables of one stage of the encoding. Families are indexed by
/// s + |S| * joint_action.
struct StageVariables {
    VariableId state;
    VariableId reward;
    VariableId stop;  ///< invalid for horizon 1
    std::vector<VariableId> actions;       ///< one per agent
    std::vector<VariableId> observations;  ///< one per agent; empty at the last stage
    std::vector<VariableId> transitions;   ///< empty at the last stage
    std::vector<VariableId> emissions;     ///< empty at the last stage
};

struct EncodingArtifact {
    DssatFormula formula;
    std::uint64_t kappa = 1;
    double scale = 0.0;
    double offset = 0.0;
    std::size_t horizon = 1;
    std::vector<StageVariables> stages;
    std::vector<std::size_t> variable_stage;  ///< by variable slot
    std::vector<std::size_t> clause_stage;    ///< by clause position

    /// Readable name of every variable, e.g. "x_a^{2,0}" or "x_T^1[0,1]".
    std::vector<std::pair<std::string, VariableId>> directory() const;
};

/// Finite-domain formula whose value under a policy-shaped Skolem set,
/// multiplied by kappa, is the policy's scaled-reward value.
EncodingArtifact encode_decpomdp(const DecPomdpModel& model);

/// Skolem set simulating `policy`. Histories after a stop use the action of
/// the history truncated at the first stop. Throws PolicyMismatch.
SkolemSet policy_to_skolem(const DecPomdpModel& model, const JointPolicy& policy, const EncodingArtifact& artifact);

/// Skolem space whose points are exactly the Skolem sets of policies: one
/// parameter per (agent, stage, history), ordered that way.
SkolemSpace policy_space(const DecPomdpModel& model, const EncodingArtifact& artifact);

/// Original expected total reward from a scaled value.
double descale(double scaled_value, double scale, double offset, std::size_t horizon);

}  // namespace dssat
