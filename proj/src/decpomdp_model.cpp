#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dssat/decpomdp.hpp"

namespace dssat {

namespace {

constexpr double row_tolerance = 1e-9;

void check_row(std::span<const double> row, const std::string& what)
{
    double sum = 0.0;
    for (const double p : row) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw Error(ErrorCode::bad_probability, what + ": probability outside [0,1]");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > row_tolerance) {
        throw Error(ErrorCode::row_not_normalized, what + " sums to " + std::to_string(sum));
    }
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b)
{
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exponent)
{
    std::uint64_t result = 1;
    for (std::uint64_t i = 0; i < exponent; ++i) result = saturating_mul(result, base);
    return result;
}

struct Evaluator {
    const DecPomdpModel& model;
    const JointPolicy& policy;
    std::span<const double> reward;
    std::uint32_t joint_actions;
    std::uint32_t joint_observations;

    // Expected reward from stage t onward in state s with the given agent histories.
    double value(std::uint32_t s, std::size_t t, std::vector<std::uint64_t>& histories) const
    {
        std::vector<std::uint32_t> chosen(model.agents);
        for (std::size_t i = 0; i < model.agents; ++i) chosen[i] = policy.action(i, t, histories[i]);
        const auto ja = static_cast<std::uint32_t>(tuple_number(chosen, model.actions));
        double total = reward[s * joint_actions + ja];
        if (t + 1 == model.horizon) return total;

        std::vector<std::uint64_t> next(model.agents);
        std::vector<std::uint64_t> weight(model.agents);
        for (std::size_t i = 0; i < model.agents; ++i) weight[i] = history_count(model, i, t);
        for (std::uint32_t s2 = 0; s2 < model.states; ++s2) {
            const double pt = model.T(s, ja, s2);
            if (pt == 0.0) continue;
            for (std::uint32_t jo = 0; jo < joint_observations; ++jo) {
                const double po = model.O(s2, ja, jo);
                if (po == 0.0) continue;
                const auto obs = tuple_values(jo, model.observations);
                for (std::size_t i = 0; i < model.agents; ++i) next[i] = histories[i] + weight[i] * obs[i];
                total += pt * po * value(s2, t + 1, next);
            }
        }
        return total;
    }
};

}  // namespace

std::uint64_t tuple_number(std::span<const std::uint32_t> values, std::span<const std::uint32_t> sizes)
{
    if (values.size() != sizes.size()) {
        throw Error(ErrorCode::out_of_range, "tuple has " + std::to_string(values.size()) + " components, expected " +
                                                 std::to_string(sizes.size()));
    }
    std::uint64_t number = 0;
    std::uint64_t stride = 1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= sizes[i]) {
            throw Error(ErrorCode::out_of_range, "component " + std::to_string(i) + " = " + std::to_string(values[i]) +
                                                     " is not below " + std::to_string(sizes[i]));
        }
        number += values[i] * stride;
        stride *= sizes[i];
    }
    return number;
}

std::vector<std::uint32_t> tuple_values(std::uint64_t number, std::span<const std::uint32_t> sizes)
{
    std::vector<std::uint32_t> values(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        values[i] = static_cast<std::uint32_t>(number % sizes[i]);
        number /= sizes[i];
    }
    return values;
}

DecPomdpModel DecPomdpModel::with_shape(std::uint32_t states, std::vector<std::uint32_t> actions,
                                        std::vector<std::uint32_t> observations, std::size_t horizon)
{
    DecPomdpModel m;
    m.agents = actions.size();
    m.states = states;
    m.actions = std::move(actions);
    m.observations = std::move(observations);
    m.horizon = horizon;
    m.start.assign(states, states == 0 ? 0.0 : 1.0 / states);
    const auto ja = m.joint_actions();
    m.transition.assign(std::size_t{states} * ja * states, 0.0);
    m.observation.assign(std::size_t{states} * ja * m.joint_observations(), 0.0);
    m.reward.assign(std::size_t{states} * ja, 0.0);
    return m;
}

std::uint32_t DecPomdpModel::joint_actions() const
{
    std::uint64_t n = 1;
    for (const auto k : actions) n *= k;
    return static_cast<std::uint32_t>(n);
}

std::uint32_t DecPomdpModel::joint_observations() const
{
    std::uint64_t n = 1;
    for (const auto k : observations) n *= k;
    return static_cast<std::uint32_t>(n);
}

double& DecPomdpModel::T(std::uint32_t s, std::uint32_t ja, std::uint32_t s2)
{
    return transition[(std::size_t{s} * joint_actions() + ja) * states + s2];
}
double DecPomdpModel::T(std::uint32_t s, std::uint32_t ja, std::uint32_t s2) const
{
    return transition[(std::size_t{s} * joint_actions() + ja) * states + s2];
}
double& DecPomdpModel::O(std::uint32_t s2, std::uint32_t ja, std::uint32_t jo)
{
    return observation[(std::size_t{s2} * joint_actions() + ja) * joint_observations() + jo];
}
double DecPomdpModel::O(std::uint32_t s2, std::uint32_t ja, std::uint32_t jo) const
{
    return observation[(std::size_t{s2} * joint_actions() + ja) * joint_observations() + jo];
}
double& DecPomdpModel::R(std::uint32_t s, std::uint32_t ja)
{
    return reward[std::size_t{s} * joint_actions() + ja];
}
double DecPomdpModel::R(std::uint32_t s, std::uint32_t ja) const
{
    return reward[std::size_t{s} * joint_actions() + ja];
}

void DecPomdpModel::validate() const
{
    if (horizon < 1) throw Error(ErrorCode::bad_horizon, "horizon must be at least 1");
    if (agents < 1 || actions.size() != agents || observations.size() != agents) {
        throw Error(ErrorCode::invalid_model, "action and observation counts must be given for each of the agents");
    }
    if (states < 1) throw Error(ErrorCode::invalid_model, "at least one state is required");
    double space = 1.0;
    for (std::size_t i = 0; i < agents; ++i) {
        if (actions[i] < 1 || observations[i] < 1) {
            throw Error(ErrorCode::invalid_model, "every agent needs at least one action and one observation");
        }
        space *= static_cast<double>(actions[i]) * observations[i];
    }
    if (space * states > 1e8) throw Error(ErrorCode::invalid_model, "model tables are too large");
    const auto ja = joint_actions();
    const auto jo = joint_observations();
    if (start.size() != states || transition.size() != std::size_t{states} * ja * states ||
        observation.size() != std::size_t{states} * ja * jo || reward.size() != std::size_t{states} * ja) {
        throw Error(ErrorCode::invalid_model, "table sizes do not match the declared shape");
    }
    for (const double v : reward) {
        if (!std::isfinite(v)) throw Error(ErrorCode::invalid_model, "rewards must be finite");
    }
    check_row(start, "start distribution");
    for (std::uint32_t s = 0; s < states; ++s) {
        for (std::uint32_t a = 0; a < ja; ++a) {
            check_row(std::span(transition).subspan((std::size_t{s} * ja + a) * states, states),
                      "transition row (s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")");
            check_row(std::span(observation).subspan((std::size_t{s} * ja + a) * jo, jo),
                      "observation row (s'=" + std::to_string(s) + ", a=" + std::to_string(a) + ")");
        }
    }
}

JointPolicy JointPolicy::zeros(const DecPomdpModel& model)
{
    JointPolicy p;
    p.actions.resize(model.agents);
    for (std::size_t i = 0; i < model.agents; ++i) {
        for (std::size_t t = 0; t < model.horizon; ++t) {
            p.actions[i].emplace_back(history_count(model, i, t), 0);
        }
    }
    return p;
}

std::uint64_t history_count(const DecPomdpModel& model, std::size_t agent, std::size_t t)
{
    return saturating_pow(model.observations.at(agent), t);
}

void validate_policy(const DecPomdpModel& model, const JointPolicy& policy)
{
    if (policy.actions.size() != model.agents) {
        throw Error(ErrorCode::partial_policy, "policy covers " + std::to_string(policy.actions.size()) +
                                                   " agents, model has " + std::to_string(model.agents));
    }
    for (std::size_t i = 0; i < model.agents; ++i) {
        if (policy.actions[i].size() != model.horizon) {
            throw Error(ErrorCode::partial_policy, "agent " + std::to_string(i + 1) + " lacks stages");
        }
        for (std::size_t t = 0; t < model.horizon; ++t) {
            const auto& row = policy.actions[i][t];
            if (row.size() != history_count(model, i, t)) {
                throw Error(ErrorCode::partial_policy, "agent " + std::to_string(i + 1) + ", stage " +
                                                           std::to_string(t) + ": wrong number of histories");
            }
            for (const auto a : row) {
                if (a >= model.actions[i]) {
                    throw Error(ErrorCode::out_of_range, "agent " + std::to_string(i + 1) + ": action " +
                                                             std::to_string(a) + " does not exist");
                }
            }
        }
    }
}

ScaledReward scaled_reward(const DecPomdpModel& model)
{
    ScaledReward sr;
    if (model.reward.empty()) return sr;
    double lowest = model.reward.front();
    for (const double v : model.reward) lowest = std::min(lowest, v);
    double total = 0.0;
    for (const double v : model.reward) total += v - lowest;
    sr.offset = lowest;
    sr.r.resize(model.reward.size());
    if (total > 0.0) {
        sr.scale = total;
        for (std::size_t k = 0; k < model.reward.size(); ++k) sr.r[k] = (model.reward[k] - lowest) / total;
    } else {
        sr.scale = 0.0;
        std::fill(sr.r.begin(), sr.r.end(), 1.0 / static_cast<double>(model.reward.size()));
    }
    return sr;
}

double policy_value(const DecPomdpModel& model, const JointPolicy& policy)
{
    return policy_value(model, policy, model.reward);
}

double policy_value(const DecPomdpModel& model, const JointPolicy& policy, std::span<const double> reward)
{
    validate_policy(model, policy);
    const Evaluator eval{model, policy, reward, model.joint_actions(), model.joint_observations()};
    double total = 0.0;
    std::vector<std::uint64_t> histories(model.agents, 0);
    for (std::uint32_t s = 0; s < model.states; ++s) {
        if (model.start[s] == 0.0) continue;
        total += model.start[s] * eval.value(s, 0, histories);
    }
    return total;
}

std::uint64_t policy_space_size(const DecPomdpModel& model)
{
    std::uint64_t size = 1;
    for (std::size_t i = 0; i < model.agents; ++i) {
        for (std::size_t t = 0; t < model.horizon; ++t) {
            size = saturating_mul(size, saturating_pow(model.actions[i], history_count(model, i, t)));
        }
    }
    return size;
}

OptimalPolicy optimal_policy_bruteforce(const DecPomdpModel& model, const PolicySearchOptions& options)
{
    model.validate();
    const auto size = policy_space_size(model);
    if (size > options.max_policy_space) {
        throw Error(ErrorCode::policy_space_too_large,
                    "policy space of " + std::to_string(size) + " exceeds the cap of " +
                        std::to_string(options.max_policy_space));
    }
    // Entries in (agent, stage, history) order; the last entry varies fastest,
    // so policies are visited in lexicographic order.
    auto current = JointPolicy::zeros(model);
    std::vector<std::pair<std::uint32_t*, std::uint32_t>> digits;
    for (std::size_t i = 0; i < model.agents; ++i) {
        for (auto& row : current.actions[i]) {
            for (auto& a : row) digits.emplace_back(&a, model.actions[i]);
        }
    }
    OptimalPolicy best{current, policy_value(model, current)};
    for (;;) {
        std::size_t d = digits.size();
        while (d > 0) {
            --d;
            if (++*digits[d].first < digits[d].second) break;
            *digits[d].first = 0;
            if (d == 0) return best;
        }
        if (digits.empty()) return best;
        const double v = policy_value(model, current);
        if (v > best.value + 1e-12) best = {current, v};
    }
}

double descale(double scaled_value, double scale, double offset, std::size_t horizon)
{
    const double base = static_cast<double>(horizon) * offset;
    return scale == 0.0 ? base : scale * scaled_value + base;
}

}  // namespace dssat
