#include <limits>
#include <string>

#include "dssat/decpomdp.hpp"

namespace dssat {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        throw Error(ErrorCode::out_of_range, "scaling factor does not fit in 64 bits");
    }
    return a * b;
}

std::vector<double> uniform(std::uint32_t k)
{
    return std::vector<double>(k, 1.0 / k);
}

// Distribution of the reward variable: value s + |S| * ja carries r(s, ja).
std::vector<double> reward_distribution(const DecPomdpModel& model, const ScaledReward& sr)
{
    const auto ja_count = model.joint_actions();
    std::vector<double> dist(sr.r.size());
    for (std::uint32_t s = 0; s < model.states; ++s) {
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) dist[s + model.states * ja] = sr.r[s * ja_count + ja];
    }
    return dist;
}

// Builds the prefix and matrix while recording the stage of every
// variable and clause.
class Builder {
public:
    VariableId random(std::vector<double> dist, std::size_t stage)
    {
        const auto k = static_cast<std::uint32_t>(dist.size());
        return add({next(), Quantifier::random(std::move(dist)), Domain::finite(k)}, stage);
    }
    VariableId coin(std::size_t stage) { return add({next(), Quantifier::random(0.5), Domain::boolean()}, stage); }
    VariableId existential(std::vector<VariableId> deps, std::uint32_t k, std::size_t stage)
    {
        return add({next(), Quantifier::existential(std::move(deps)), Domain::finite(k)}, stage);
    }

    void implication(std::vector<Literal> antecedent, std::vector<Literal> consequent, std::size_t stage)
    {
        const auto before = matrix_.size();
        matrix_.add_implication(antecedent, consequent);
        clause_stage_.insert(clause_stage_.end(), matrix_.size() - before, stage);
    }
    void clause(Clause c, std::size_t stage)
    {
        matrix_.add_clause(std::move(c));
        clause_stage_.push_back(stage);
    }

    void finish(EncodingArtifact& artifact)
    {
        artifact.formula = build_formula(std::move(prefix_), std::move(matrix_));
        artifact.variable_stage = std::move(variable_stage_);
        artifact.clause_stage = std::move(clause_stage_);
    }

private:
    VariableId next() const { return VariableId(static_cast<std::uint32_t>(prefix_.size() + 1)); }
    VariableId add(PrefixEntry e, std::size_t stage)
    {
        prefix_.push_back(std::move(e));
        variable_stage_.push_back(stage);
        return prefix_.back().var;
    }

    std::vector<PrefixEntry> prefix_;
    Matrix matrix_;
    std::vector<std::size_t> variable_stage_;
    std::vector<std::size_t> clause_stage_;
};

// Atoms binding each agent's action variable to the components of joint action ja.
void push_actions(std::vector<Literal>& atoms, const DecPomdpModel& model, const StageVariables& stage,
                  std::uint32_t ja)
{
    const auto a = tuple_values(ja, model.actions);
    for (std::size_t i = 0; i < model.agents; ++i) atoms.push_back(Literal::eq(stage.actions[i], a[i]));
}

void push_observations(std::vector<Literal>& atoms, const DecPomdpModel& model, const StageVariables& stage,
                       std::uint32_t jo)
{
    const auto o = tuple_values(jo, model.observations);
    for (std::size_t i = 0; i < model.agents; ++i) atoms.push_back(Literal::eq(stage.observations[i], o[i]));
}

void encode_single_stage(const DecPomdpModel& model, const ScaledReward& sr, EncodingArtifact& artifact)
{
    Builder b;
    StageVariables st;
    st.state = b.random(model.start, 0);
    st.reward = b.random(reward_distribution(model, sr), 0);
    for (std::size_t i = 0; i < model.agents; ++i) st.actions.push_back(b.existential({}, model.actions[i], 0));

    const auto ja_count = model.joint_actions();
    for (std::uint32_t s = 0; s < model.states; ++s) {
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            std::vector<Literal> ante{Literal::eq(st.state, s)};
            push_actions(ante, model, st, ja);
            b.implication(ante, {Literal::eq(st.reward, s + model.states * ja)}, 0);
        }
    }
    artifact.stages.push_back(std::move(st));
    b.finish(artifact);
    artifact.kappa = 1;
}

void encode_multi_stage(const DecPomdpModel& model, const ScaledReward& sr, EncodingArtifact& artifact)
{
    const auto h = model.horizon;
    const auto ja_count = model.joint_actions();
    const auto jo_count = model.joint_observations();
    const auto states = model.states;
    Builder b;
    auto& stages = artifact.stages;
    stages.resize(h);

    // Policy selection: actions see the agent's own observations and all stop bits so far.
    for (std::size_t t = 0; t < h; ++t) {
        for (std::size_t i = 0; i < model.agents; ++i) {
            std::vector<VariableId> deps;
            for (std::size_t j = 0; j < t; ++j) deps.push_back(stages[j].observations[i]);
            for (std::size_t j = 0; j < t; ++j) deps.push_back(stages[j].stop);
            stages[t].actions.push_back(b.existential(std::move(deps), model.actions[i], t));
        }
        stages[t].stop = b.coin(t);
        if (t + 2 <= h) {
            for (std::size_t i = 0; i < model.agents; ++i) {
                stages[t].observations.push_back(b.random(uniform(model.observations[i]), t));
            }
        }
    }

    // Policy evaluation: the hidden random mechanism.
    for (std::size_t t = 0; t < h; ++t) {
        stages[t].state = b.random(t == 0 ? model.start : uniform(states), t);
        stages[t].reward = b.random(reward_distribution(model, sr), t);
        if (t + 2 > h) continue;
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            for (std::uint32_t s = 0; s < states; ++s) {
                std::vector<double> row(states);
                for (std::uint32_t s2 = 0; s2 < states; ++s2) row[s2] = model.T(s, ja, s2);
                stages[t].transitions.push_back(b.random(std::move(row), t));
            }
        }
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            for (std::uint32_t s2 = 0; s2 < states; ++s2) {
                std::vector<double> row(jo_count);
                for (std::uint32_t jo = 0; jo < jo_count; ++jo) row[jo] = model.O(s2, ja, jo);
                stages[t].emissions.push_back(b.random(std::move(row), t));
            }
        }
    }

    for (std::size_t t = 0; t < h; ++t) {
        const auto& st = stages[t];
        if (t + 2 <= h) {
            // A stopped process keeps observations, next state and later stop bits at 0.
            std::vector<Literal> frozen;
            for (const auto o : st.observations) frozen.push_back(Literal::eq(o, 0));
            frozen.push_back(Literal::eq(stages[t + 1].state, 0));
            frozen.push_back(Literal::neg(stages[t + 1].stop));
            b.implication({Literal::neg(st.stop)}, frozen, t);
        } else {
            b.clause({Literal::neg(st.stop)}, t);
        }

        // Reward is earned at the stage where the process stops.
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            for (std::uint32_t s = 0; s < states; ++s) {
                std::vector<Literal> ante;
                if (t > 0) ante.push_back(Literal::pos(stages[t - 1].stop));
                ante.push_back(Literal::neg(st.stop));
                ante.push_back(Literal::eq(st.state, s));
                push_actions(ante, model, st, ja);
                b.implication(ante, {Literal::eq(st.reward, s + states * ja)}, t);
            }
        }
        if (t + 2 > h) continue;

        const auto& next = stages[t + 1];
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            for (std::uint32_t s = 0; s < states; ++s) {
                for (std::uint32_t s2 = 0; s2 < states; ++s2) {
                    std::vector<Literal> ante{Literal::pos(st.stop), Literal::eq(st.state, s)};
                    push_actions(ante, model, st, ja);
                    ante.push_back(Literal::eq(next.state, s2));
                    b.implication(ante, {Literal::eq(st.transitions[s + states * ja], s2)}, t);
                }
            }
        }
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            for (std::uint32_t s2 = 0; s2 < states; ++s2) {
                for (std::uint32_t jo = 0; jo < jo_count; ++jo) {
                    std::vector<Literal> ante{Literal::pos(st.stop), Literal::eq(next.state, s2)};
                    push_actions(ante, model, st, ja);
                    push_observations(ante, model, st, jo);
                    b.implication(ante, {Literal::eq(st.emissions[s2 + states * ja], jo)}, t);
                }
            }
        }
    }
    b.finish(artifact);

    std::uint64_t kappa = std::uint64_t{1} << h;
    for (std::size_t t = 0; t + 1 < h; ++t) kappa = checked_mul(kappa, std::uint64_t{jo_count} * states);
    artifact.kappa = kappa;
}

// Action for (agent, t) under dependency values of x_a^{i,t}: the policy
// entry for the observation history, truncated at the first stop.
std::pair<std::size_t, std::uint64_t> policy_entry(const DecPomdpModel& model, std::size_t agent, std::size_t t,
                                                   std::size_t table_index)
{
    const auto k = model.observations[agent];
    std::vector<std::uint32_t> obs(t);
    std::size_t rest = table_index;
    for (std::size_t j = 0; j < t; ++j) {
        obs[j] = static_cast<std::uint32_t>(rest % k);
        rest /= k;
    }
    std::size_t stage = t;
    for (std::size_t j = 0; j < t; ++j) {
        if ((rest & 1u) == 0) {
            stage = j;
            break;
        }
        rest >>= 1;
    }
    std::uint64_t history = 0;
    std::uint64_t weight = 1;
    for (std::size_t j = 0; j < stage; ++j) {
        history += obs[j] * weight;
        weight *= k;
    }
    return {stage, history};
}

void check_artifact(const DecPomdpModel& model, const EncodingArtifact& artifact)
{
    if (artifact.stages.size() != model.horizon || artifact.horizon != model.horizon) {
        throw Error(ErrorCode::policy_mismatch, "encoding horizon does not match the model");
    }
    for (const auto& st : artifact.stages) {
        if (st.actions.size() != model.agents) {
            throw Error(ErrorCode::policy_mismatch, "encoding agent count does not match the model");
        }
        for (std::size_t i = 0; i < model.agents; ++i) {
            if (!st.actions[i].valid() || st.actions[i].slot() >= artifact.formula.num_vars() ||
                artifact.formula.domain(st.actions[i]).size() != model.actions[i]) {
                throw Error(ErrorCode::policy_mismatch, "encoding action variables do not match the model");
            }
        }
    }
}

}  // namespace

EncodingArtifact encode_decpomdp(const DecPomdpModel& model)
{
    model.validate();
    const auto sr = scaled_reward(model);
    EncodingArtifact artifact;
    artifact.scale = sr.scale;
    artifact.offset = sr.offset;
    artifact.horizon = model.horizon;
    if (model.horizon == 1) {
        encode_single_stage(model, sr, artifact);
    } else {
        encode_multi_stage(model, sr, artifact);
    }
    return artifact;
}

std::vector<std::pair<std::string, VariableId>> EncodingArtifact::directory() const
{
    std::vector<std::pair<std::string, VariableId>> names;
    for (std::size_t t = 0; t < stages.size(); ++t) {
        const auto& st = stages[t];
        const auto ts = std::to_string(t);
        for (std::size_t i = 0; i < st.actions.size(); ++i) {
            names.emplace_back("x_a^{" + std::to_string(i + 1) + "," + ts + "}", st.actions[i]);
        }
        if (st.stop.valid()) names.emplace_back("x_p^" + ts, st.stop);
        for (std::size_t i = 0; i < st.observations.size(); ++i) {
            names.emplace_back("x_o^{" + std::to_string(i + 1) + "," + ts + "}", st.observations[i]);
        }
        names.emplace_back("x_s^" + ts, st.state);
        names.emplace_back("x_r^" + ts, st.reward);
        if (st.transitions.empty()) continue;
        const auto states = formula.domain(st.state).size();
        for (std::size_t k = 0; k < st.transitions.size(); ++k) {
            names.emplace_back("x_T^" + ts + "[" + std::to_string(k % states) + "," + std::to_string(k / states) + "]",
                               st.transitions[k]);
        }
        for (std::size_t k = 0; k < st.emissions.size(); ++k) {
            names.emplace_back("x_O^" + ts + "[" + std::to_string(k % states) + "," + std::to_string(k / states) + "]",
                               st.emissions[k]);
        }
    }
    return names;
}

SkolemSet policy_to_skolem(const DecPomdpModel& model, const JointPolicy& policy, const EncodingArtifact& artifact)
{
    check_artifact(model, artifact);
    try {
        validate_policy(model, policy);
    } catch (const Error& e) {
        throw Error(ErrorCode::policy_mismatch, e.what());
    }
    SkolemSet skolem;
    for (std::size_t t = 0; t < model.horizon; ++t) {
        for (std::size_t i = 0; i < model.agents; ++i) {
            const auto y = artifact.stages[t].actions[i];
            SkolemSet::Table table(table_length(artifact.formula, y));
            for (std::size_t b = 0; b < table.size(); ++b) {
                const auto [stage, history] = policy_entry(model, i, t, b);
                table[b] = policy.action(i, stage, history);
            }
            skolem.set(y, std::move(table));
        }
    }
    return skolem;
}

SkolemSpace policy_space(const DecPomdpModel& model, const EncodingArtifact& artifact)
{
    check_artifact(model, artifact);
    SkolemSpace space;
    std::vector<std::vector<std::size_t>> first_parameter(model.agents, std::vector<std::size_t>(model.horizon));
    for (std::size_t i = 0; i < model.agents; ++i) {
        for (std::size_t t = 0; t < model.horizon; ++t) {
            first_parameter[i][t] = space.num_parameters();
            const auto histories = history_count(model, i, t);
            for (std::uint64_t hst = 0; hst < histories; ++hst) space.add_parameter(model.actions[i]);
        }
    }
    for (std::size_t t = 0; t < model.horizon; ++t) {
        for (std::size_t i = 0; i < model.agents; ++i) {
            const auto y = artifact.stages[t].actions[i];
            const auto length = table_length(artifact.formula, y);
            for (std::size_t b = 0; b < length; ++b) {
                const auto [stage, history] = policy_entry(model, i, t, b);
                space.bind(y, b, first_parameter[i][stage] + history);
            }
        }
    }
    return space;
}

}  // namespace dssat
