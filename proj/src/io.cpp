#include "dssat/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <map>
#include <optional>

namespace dssat {

namespace {

constexpr std::int64_t max_variables = std::int64_t{1} << 24;
constexpr double row_tolerance = 1e-9;

struct Line {
    std::size_t number;
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text)
{
    std::vector<Line> lines;
    std::size_t number = 1;
    while (!text.empty()) {
        const auto end = text.find('\n');
        auto line = text.substr(0, end);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back({number++, line});
        if (end == std::string_view::npos) break;
        text.remove_prefix(end + 1);
    }
    return lines;
}

std::vector<std::string_view> tokens(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
    while (i < s.size()) {
        while (i < s.size() && space(s[i])) ++i;
        const auto start = i;
        while (i < s.size() && !space(s[i])) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

[[noreturn]] void syntax(std::size_t line, const std::string& why)
{
    throw Error(ErrorCode::syntax_error, why, line);
}

std::string quoted(std::string_view token)
{
    std::string s(token.substr(0, 32));
    for (auto& c : s) {
        if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f) c = '?';
    }
    return "'" + s + (token.size() > 32 ? "...'" : "'");
}

std::int64_t to_int(std::string_view token, std::size_t line)
{
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) syntax(line, "expected an integer, got " + quoted(token));
    return value;
}

double to_real(std::string_view token, std::size_t line)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) syntax(line, "expected a number, got " + quoted(token));
    return value;
}

double to_probability(std::string_view token, std::size_t line)
{
    const double p = to_real(token, line);
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::bad_probability, "probability " + quoted(token) + " outside [0,1]", line);
    return p;
}

std::uint32_t to_index(std::string_view token, std::uint64_t bound, std::size_t line, const char* what)
{
    const auto v = to_int(token, line);
    if (v < 0 || static_cast<std::uint64_t>(v) >= bound) {
        syntax(line, std::string(what) + " " + quoted(token) + " out of range");
    }
    return static_cast<std::uint32_t>(v);
}

std::string format_real(double v)
{
    return fmt::format("{}", v);
}

}  // namespace

// ---------------------------------------------------------------- SDIMACS

DssatFormula parse_sdimacs(std::string_view text)
{
    const auto lines = split_lines(text);
    std::optional<std::int64_t> num_vars;
    std::int64_t num_clauses = 0;
    std::vector<QuantifierKind> kind;
    std::vector<bool> quantified;
    std::vector<PrefixEntry> prefix;
    std::vector<VariableId> outer;  // r/a variables so far, in prefix order
    struct Pending {
        std::size_t entry;
        std::vector<std::int64_t> deps;
        std::size_t line;
    };
    std::vector<Pending> henkin;
    Matrix matrix;
    Clause current;
    bool in_clause = false;
    bool clauses_started = false;
    std::size_t last_line = 0;

    auto variable = [&](std::string_view token, std::size_t line) {
        const auto v = to_int(token, line);
        if (v < 1 || v > *num_vars) {
            throw Error(ErrorCode::unknown_variable, "variable " + quoted(token) + " outside 1.." + std::to_string(*num_vars), line);
        }
        return v;
    };
    auto declare = [&](std::int64_t v, Quantifier q, std::size_t line) {
        if (quantified[v]) {
            throw Error(ErrorCode::duplicate_quantifier, "variable " + std::to_string(v) + " is quantified twice", line);
        }
        quantified[v] = true;
        kind[v] = q.kind();
        const VariableId id(static_cast<std::uint32_t>(v));
        if (!q.is_existential()) outer.push_back(id);
        prefix.push_back({id, std::move(q), Domain::boolean()});
    };
    // Tokens between the keyword and the terminating 0.
    auto body = [&](const std::vector<std::string_view>& tok, std::size_t from, std::size_t line) {
        if (tok.size() <= from || tok.back() != "0") syntax(line, "quantifier line must end with 0");
        return std::vector<std::string_view>(tok.begin() + static_cast<std::ptrdiff_t>(from), tok.end() - 1);
    };

    for (const auto& [number, raw] : lines) {
        last_line = number;
        const auto tok = tokens(raw);
        if (tok.empty()) continue;
        if (tok[0][0] == 'c') continue;
        if (!num_vars) {
            if (tok[0] != "p") syntax(number, "expected header 'p cnf <vars> <clauses>'");
            if (tok.size() != 4 || tok[1] != "cnf") syntax(number, "malformed header");
            const auto n = to_int(tok[2], number);
            const auto m = to_int(tok[3], number);
            if (n < 0 || m < 0) syntax(number, "negative count in header");
            if (n > max_variables) syntax(number, "too many variables");
            num_vars = n;
            num_clauses = m;
            kind.assign(static_cast<std::size_t>(n) + 1, QuantifierKind::universal);
            quantified.assign(static_cast<std::size_t>(n) + 1, false);
            continue;
        }
        if (tok[0] == "p") syntax(number, "duplicate header");
        const auto key = tok[0];
        if (key == "r" || key == "a" || key == "e" || key == "d") {
            if (clauses_started) syntax(number, "quantifier line after the first clause");
            if (key == "r") {
                if (tok.size() < 2) syntax(number, "missing probability");
                const double p = to_probability(tok[1], number);
                const auto vars = body(tok, 2, number);
                if (vars.empty()) syntax(number, "no variables listed");
                for (const auto t : vars) declare(variable(t, number), Quantifier::random(p), number);
            } else if (key == "a") {
                const auto vars = body(tok, 1, number);
                if (vars.empty()) syntax(number, "no variables listed");
                for (const auto t : vars) declare(variable(t, number), Quantifier::universal(), number);
            } else if (key == "e") {
                const auto vars = body(tok, 1, number);
                if (vars.empty()) syntax(number, "no variables listed");
                for (const auto t : vars) declare(variable(t, number), Quantifier::existential(outer), number);
            } else {
                const auto vars = body(tok, 1, number);
                if (vars.empty()) syntax(number, "missing variable");
                const auto v = variable(vars[0], number);
                std::vector<std::int64_t> deps;
                for (std::size_t i = 1; i < vars.size(); ++i) deps.push_back(variable(vars[i], number));
                declare(v, Quantifier::existential({}), number);
                henkin.push_back({prefix.size() - 1, std::move(deps), number});
            }
            continue;
        }
        clauses_started = true;
        for (const auto t : tok) {
            const auto lit = to_int(t, number);
            if (lit == 0) {
                matrix.add_clause(std::move(current));
                current.clear();
                in_clause = false;
                continue;
            }
            if (lit < -*num_vars || lit > *num_vars) {
                throw Error(ErrorCode::unknown_variable, "literal " + quoted(t) + " refers to an undeclared variable", number);
            }
            const VariableId id(static_cast<std::uint32_t>(lit < 0 ? -lit : lit));
            current.push_back(lit < 0 ? Literal::neg(id) : Literal::pos(id));
            in_clause = true;
        }
    }

    if (!num_vars) syntax(last_line == 0 ? 1 : last_line, "missing header 'p cnf <vars> <clauses>'");
    if (in_clause) syntax(last_line, "last clause is not terminated by 0");
    if (static_cast<std::int64_t>(matrix.size()) != num_clauses) {
        throw Error(ErrorCode::count_mismatch, "header declares " + std::to_string(num_clauses) + " clauses, found " +
                                                   std::to_string(matrix.size()), last_line);
    }
    for (std::int64_t v = 1; v <= *num_vars; ++v) {
        if (!quantified[v]) {
            throw Error(ErrorCode::unknown_variable, "variable " + std::to_string(v) + " is not quantified", last_line);
        }
    }
    for (const auto& h : henkin) {
        std::vector<VariableId> deps;
        for (const auto d : h.deps) {
            if (kind[d] == QuantifierKind::existential) {
                throw Error(ErrorCode::illegal_dependency, "dependency " + std::to_string(d) + " is existential", h.line);
            }
            const VariableId id(static_cast<std::uint32_t>(d));
            if (std::find(deps.begin(), deps.end(), id) != deps.end()) {
                throw Error(ErrorCode::illegal_dependency, "dependency " + std::to_string(d) + " listed twice", h.line);
            }
            deps.push_back(id);
        }
        prefix[h.entry].quantifier = Quantifier::existential(std::move(deps));
    }
    return build_formula(std::move(prefix), std::move(matrix));
}

std::string print_sdimacs(const DssatFormula& formula)
{
    if (!formula.is_boolean()) {
        throw Error(ErrorCode::non_boolean_formula, "only Boolean formulas can be written as SDIMACS");
    }
    std::string out = fmt::format("p cnf {} {}\n", formula.num_vars(), formula.matrix().size());
    const auto& prefix = formula.prefix();
    for (std::size_t i = 0; i < prefix.size();) {
        const auto& q = prefix[i].quantifier;
        if (q.is_existential()) {
            out += fmt::format("d {}", prefix[i].var.index());
            for (const auto d : q.deps()) out += fmt::format(" {}", d.index());
            out += " 0\n";
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < prefix.size() && prefix[j].quantifier.kind() == q.kind() &&
               (!q.is_random() || prefix[j].quantifier.probability() == q.probability())) {
            ++j;
        }
        out += q.is_random() ? "r " + format_real(q.probability()) : std::string("a");
        for (; i < j; ++i) out += fmt::format(" {}", prefix[i].var.index());
        out += " 0\n";
    }
    for (const auto& clause : formula.matrix().clauses()) {
        for (const auto& l : clause) out += fmt::format("{}{} ", l.positive ? "" : "-", l.var.index());
        out += "0\n";
    }
    return out;
}

// ---------------------------------------------------------------- Skolem tables

SkolemSet parse_skolem(std::string_view text, const DssatFormula& formula)
{
    SkolemSet skolem;
    for (const auto& [number, raw] : split_lines(text)) {
        const auto tok = tokens(raw);
        if (tok.empty() || tok[0][0] == 'c') continue;
        if (tok[0] != "f" || tok.size() != 3) syntax(number, "expected 'f <var> <table>'");
        const auto v = to_int(tok[1], number);
        if (v < 1 || static_cast<std::size_t>(v) > formula.num_vars() ||
            !formula.quantifier(VariableId(static_cast<std::uint32_t>(v))).is_existential()) {
            throw Error(ErrorCode::unknown_variable, "variable " + quoted(tok[1]) + " is not existential", number);
        }
        const VariableId y(static_cast<std::uint32_t>(v));
        if (skolem.contains(y)) syntax(number, "second table for variable " + std::to_string(v));
        const auto k = formula.domain(y).size();
        SkolemSet::Table table;
        table.reserve(tok[2].size());
        for (const char c : tok[2]) {
            if (c < '0' || c > '9' || static_cast<std::uint32_t>(c - '0') >= k) {
                syntax(number, "table entry " + quoted(std::string_view(&c, 1)) + " outside the variable's domain");
            }
            table.push_back(static_cast<std::uint32_t>(c - '0'));
        }
        const auto expected = table_length(formula, y);
        if (table.size() != expected) {
            throw Error(ErrorCode::wrong_table_length, "table for variable " + std::to_string(v) + " has " +
                                                           std::to_string(table.size()) + " entries, expected " +
                                                           std::to_string(expected), number);
        }
        skolem.set(y, std::move(table));
    }
    for (const auto y : formula.existential_vars()) {
        if (!skolem.contains(y)) {
            throw Error(ErrorCode::missing_function, "no table for variable " + std::to_string(y.index()));
        }
    }
    return skolem;
}

std::string print_skolem(const SkolemSet& skolem)
{
    std::string out;
    for (const auto& [y, table] : skolem.tables()) {
        out += fmt::format("f {} ", y.index());
        for (const auto v : table) {
            if (v > 9) throw Error(ErrorCode::bad_domain, "table values above 9 have no digit form");
            out += static_cast<char>('0' + v);
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------- Dec-POMDP

DecPomdpModel parse_decpomdp(std::string_view text)
{
    const auto lines = split_lines(text);
    std::map<std::string, std::pair<std::vector<std::string_view>, std::size_t>> header;
    DecPomdpModel model;
    bool shaped = false;
    std::size_t last_line = lines.empty() ? 1 : lines.back().number;
    std::vector<std::size_t> t_line, o_line;
    std::vector<bool> t_seen, o_seen, r_seen;
    std::size_t start_line = 0;

    auto build_shape = [&](std::size_t line) {
        for (const char* key : {"agents", "states", "actions", "observations", "horizon", "start"}) {
            if (!header.count(key)) syntax(line, std::string("missing '") + key + ":' line before model entries");
        }
        auto single = [&](const char* key) {
            const auto& [tok, ln] = header.at(key);
            if (tok.size() != 1) syntax(ln, std::string("'") + key + ":' takes one value");
            return std::pair{to_int(tok[0], ln), ln};
        };
        const auto [agents, agents_line] = single("agents");
        if (agents < 1 || agents > 16) syntax(agents_line, "agent count must be between 1 and 16");
        const auto [states, states_line] = single("states");
        if (states < 1 || states > 4096) syntax(states_line, "state count must be between 1 and 4096");
        const auto [horizon, horizon_line] = single("horizon");
        if (horizon < 1) throw Error(ErrorCode::bad_horizon, "horizon must be at least 1", horizon_line);
        if (horizon > 64) syntax(horizon_line, "horizon too large");
        auto per_agent = [&](const char* key) {
            const auto& [tok, ln] = header.at(key);
            if (tok.size() != static_cast<std::size_t>(agents)) syntax(ln, std::string("'") + key + ":' needs one count per agent");
            std::vector<std::uint32_t> counts;
            for (const auto t : tok) {
                const auto c = to_int(t, ln);
                if (c < 1 || c > 4096) syntax(ln, "counts must be between 1 and 4096");
                counts.push_back(static_cast<std::uint32_t>(c));
            }
            return counts;
        };
        auto actions = per_agent("actions");
        auto observations = per_agent("observations");
        double size = static_cast<double>(states) * states;
        for (std::size_t i = 0; i < actions.size(); ++i) size *= static_cast<double>(actions[i]) * observations[i];
        if (size > 1e8) syntax(line, "model tables would be too large");
        model = DecPomdpModel::with_shape(static_cast<std::uint32_t>(states), std::move(actions), std::move(observations),
                                          static_cast<std::size_t>(horizon));
        const auto& [start_tok, sl] = header.at("start");
        start_line = sl;
        if (start_tok.size() != model.states) syntax(sl, "'start:' needs one probability per state");
        for (std::size_t s = 0; s < model.states; ++s) model.start[s] = to_probability(start_tok[s], sl);
        const auto rows = std::size_t{model.states} * model.joint_actions();
        t_line.assign(rows, 0);
        o_line.assign(rows, 0);
        t_seen.assign(model.transition.size(), false);
        o_seen.assign(model.observation.size(), false);
        r_seen.assign(model.reward.size(), false);
        shaped = true;
    };
    auto joint_action = [&](const std::vector<std::string_view>& tok, std::size_t from, std::size_t line) {
        std::vector<std::uint32_t> a;
        for (std::size_t i = 0; i < model.agents; ++i) a.push_back(to_index(tok[from + i], model.actions[i], line, "action"));
        return static_cast<std::uint32_t>(tuple_number(a, model.actions));
    };

    for (const auto& [number, raw0] : lines) {
        auto raw = raw0.substr(0, raw0.find('#'));
        if (tokens(raw).empty()) continue;
        const auto colon = raw.find(':');
        if (colon == std::string_view::npos) syntax(number, "expected '<key>: <values>'");
        const auto key_tok = tokens(raw.substr(0, colon));
        if (key_tok.size() != 1) syntax(number, "expected '<key>: <values>'");
        const std::string key(key_tok[0]);
        const auto tok = tokens(raw.substr(colon + 1));
        if (key == "T" || key == "O" || key == "R") {
            if (!shaped) build_shape(number);
            const auto n = model.agents;
            if (key == "T") {
                if (tok.size() != n + 3) syntax(number, "expected 'T: s a1..an s' p'");
                const auto s = to_index(tok[0], model.states, number, "state");
                const auto ja = joint_action(tok, 1, number);
                const auto s2 = to_index(tok[n + 1], model.states, number, "state");
                const auto p = to_probability(tok[n + 2], number);
                const auto at = (std::size_t{s} * model.joint_actions() + ja) * model.states + s2;
                if (t_seen[at]) syntax(number, "duplicate transition entry");
                t_seen[at] = true;
                model.transition[at] = p;
                auto& first = t_line[std::size_t{s} * model.joint_actions() + ja];
                if (first == 0) first = number;
            } else if (key == "O") {
                if (tok.size() != 2 * n + 2) syntax(number, "expected 'O: s' a1..an o1..on p'");
                const auto s2 = to_index(tok[0], model.states, number, "state");
                const auto ja = joint_action(tok, 1, number);
                std::vector<std::uint32_t> o;
                for (std::size_t i = 0; i < n; ++i) {
                    o.push_back(to_index(tok[1 + n + i], model.observations[i], number, "observation"));
                }
                const auto jo = static_cast<std::uint32_t>(tuple_number(o, model.observations));
                const auto p = to_probability(tok[2 * n + 1], number);
                const auto at = (std::size_t{s2} * model.joint_actions() + ja) * model.joint_observations() + jo;
                if (o_seen[at]) syntax(number, "duplicate observation entry");
                o_seen[at] = true;
                model.observation[at] = p;
                auto& first = o_line[std::size_t{s2} * model.joint_actions() + ja];
                if (first == 0) first = number;
            } else {
                if (tok.size() != n + 2) syntax(number, "expected 'R: s a1..an r'");
                const auto s = to_index(tok[0], model.states, number, "state");
                const auto ja = joint_action(tok, 1, number);
                const double r = to_real(tok[n + 1], number);
                if (!std::isfinite(r)) syntax(number, "reward must be finite");
                const auto at = std::size_t{s} * model.joint_actions() + ja;
                if (r_seen[at]) syntax(number, "duplicate reward entry");
                r_seen[at] = true;
                model.reward[at] = r;
            }
            continue;
        }
        if (key != "agents" && key != "states" && key != "actions" && key != "observations" && key != "horizon" &&
            key != "start") {
            syntax(number, "unknown key " + quoted(key));
        }
        if (shaped) syntax(number, "'" + key + ":' must precede all model entries");
        if (!header.emplace(key, std::pair{tok, number}).second) syntax(number, "duplicate '" + key + ":' line");
    }
    if (!shaped) build_shape(last_line);

    auto check_row = [&](std::span<const double> row, std::size_t line, const std::string& what) {
        double sum = 0.0;
        for (const double p : row) sum += p;
        if (std::abs(sum - 1.0) > row_tolerance) {
            throw Error(ErrorCode::row_not_normalized, what + " sums to " + format_real(sum), line);
        }
    };
    check_row(model.start, start_line, "start distribution");
    const auto ja_count = model.joint_actions();
    const auto jo_count = model.joint_observations();
    for (std::uint32_t s = 0; s < model.states; ++s) {
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            const auto row = std::size_t{s} * ja_count + ja;
            const auto label = "(" + std::to_string(s) + ", joint action " + std::to_string(ja) + ")";
            check_row(std::span(model.transition).subspan(row * model.states, model.states),
                      t_line[row] == 0 ? last_line : t_line[row], "transition row " + label);
            check_row(std::span(model.observation).subspan(row * jo_count, jo_count),
                      o_line[row] == 0 ? last_line : o_line[row], "observation row " + label);
        }
    }
    model.validate();
    return model;
}

std::string print_decpomdp(const DecPomdpModel& model)
{
    auto join = [](const std::vector<std::uint32_t>& v) {
        std::string s;
        for (const auto x : v) s += fmt::format(" {}", x);
        return s;
    };
    std::string out;
    out += fmt::format("agents: {}\nstates: {}\n", model.agents, model.states);
    out += "actions:" + join(model.actions) + "\n";
    out += "observations:" + join(model.observations) + "\n";
    out += fmt::format("horizon: {}\nstart:", model.horizon);
    for (const double p : model.start) out += " " + format_real(p);
    out += "\n";
    const auto ja_count = model.joint_actions();
    const auto jo_count = model.joint_observations();
    for (std::uint32_t s = 0; s < model.states; ++s) {
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            const auto a = join(tuple_values(ja, model.actions));
            for (std::uint32_t s2 = 0; s2 < model.states; ++s2) {
                if (model.T(s, ja, s2) != 0.0) out += fmt::format("T: {}{} {} {}\n", s, a, s2, format_real(model.T(s, ja, s2)));
            }
        }
    }
    for (std::uint32_t s2 = 0; s2 < model.states; ++s2) {
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            const auto a = join(tuple_values(ja, model.actions));
            for (std::uint32_t jo = 0; jo < jo_count; ++jo) {
                if (model.O(s2, ja, jo) == 0.0) continue;
                out += fmt::format("O: {}{}{} {}\n", s2, a, join(tuple_values(jo, model.observations)),
                                   format_real(model.O(s2, ja, jo)));
            }
        }
    }
    for (std::uint32_t s = 0; s < model.states; ++s) {
        for (std::uint32_t ja = 0; ja < ja_count; ++ja) {
            if (model.R(s, ja) == 0.0) continue;
            out += fmt::format("R: {}{} {}\n", s, join(tuple_values(ja, model.actions)), format_real(model.R(s, ja)));
        }
    }
    return out;
}

// ---------------------------------------------------------------- policies

JointPolicy parse_policy(std::string_view text, const DecPomdpModel& model)
{
    JointPolicy policy;
    policy.actions.assign(model.agents, std::vector<std::vector<std::uint32_t>>(model.horizon));
    std::vector<std::vector<bool>> seen(model.agents, std::vector<bool>(model.horizon, false));
    for (const auto& [number, raw0] : split_lines(text)) {
        const auto tok = tokens(raw0.substr(0, raw0.find('#')));
        if (tok.empty()) continue;
        if (tok[0] != "a" || tok.size() < 4) syntax(number, "expected 'a <agent> <t> <action>+'");
        const auto agent = to_int(tok[1], number);
        if (agent < 1 || static_cast<std::size_t>(agent) > model.agents) syntax(number, "agent out of range");
        const auto t = to_int(tok[2], number);
        if (t < 0 || static_cast<std::size_t>(t) >= model.horizon) syntax(number, "stage out of range");
        const auto i = static_cast<std::size_t>(agent - 1);
        const auto st = static_cast<std::size_t>(t);
        if (seen[i][st]) syntax(number, "duplicate line for this agent and stage");
        seen[i][st] = true;
        const auto expected = history_count(model, i, st);
        if (tok.size() - 3 != expected) {
            throw Error(ErrorCode::partial_policy, "expected " + std::to_string(expected) + " actions, found " +
                                                       std::to_string(tok.size() - 3), number);
        }
        auto& row = policy.actions[i][st];
        for (std::size_t k = 3; k < tok.size(); ++k) {
            const auto a = to_int(tok[k], number);
            if (a < 0 || static_cast<std::uint64_t>(a) >= model.actions[i]) {
                throw Error(ErrorCode::out_of_range, "action " + quoted(tok[k]) + " does not exist", number);
            }
            row.push_back(static_cast<std::uint32_t>(a));
        }
    }
    for (std::size_t i = 0; i < model.agents; ++i) {
        for (std::size_t t = 0; t < model.horizon; ++t) {
            if (!seen[i][t]) {
                throw Error(ErrorCode::partial_policy,
                            "no actions for agent " + std::to_string(i + 1) + " at stage " + std::to_string(t));
            }
        }
    }
    return policy;
}

std::string print_policy(const JointPolicy& policy)
{
    std::string out;
    for (std::size_t i = 0; i < policy.actions.size(); ++i) {
        for (std::size_t t = 0; t < policy.actions[i].size(); ++t) {
            out += fmt::format("a {} {}", i + 1, t);
            for (const auto a : policy.actions[i][t]) out += fmt::format(" {}", a);
            out += '\n';
        }
    }
    return out;
}

}  // namespace dssat
