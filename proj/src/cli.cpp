#include "dssat/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <new>
#include <ostream>
#include <sstream>

#include "dssat/circuits.hpp"
#include "dssat/decpomdp.hpp"
#include "dssat/evaluator.hpp"
#include "dssat/io.hpp"
#include "dssat/reductions.hpp"
#include "dssat/solver.hpp"

namespace dssat::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double certify_tolerance = 1e-9;

struct Settings {
    bool json = false;
    unsigned threads = 0;
    std::size_t max_random_vars = EvalOptions{}.max_random_vars;
    std::uint64_t max_skolem_space = SolveOptions{}.max_skolem_space;
    std::uint64_t max_policy_space = PolicySearchOptions{}.max_policy_space;
    std::string engine = "auto";

    SolveOptions solve() const
    {
        SolveOptions o;
        o.threads = threads;
        o.max_skolem_space = max_skolem_space;
        return o;
    }
};

/// Unreadable or unwritable files; reported as input errors.
struct FileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot read '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw FileError("cannot write '" + path + "'");
}

/// Shortest round-trip form that always shows a decimal point or exponent.
std::string number(double v)
{
    auto s = fmt::format("{}", v);
    if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::string table_text(const SkolemSet::Table& table)
{
    const bool digits = std::all_of(table.begin(), table.end(), [](std::uint32_t v) { return v <= 9; });
    std::string s;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (digits) {
            s += static_cast<char>('0' + table[i]);
        } else {
            s += (i ? "," : "") + std::to_string(table[i]);
        }
    }
    return s;
}

Json witness_json(const SkolemSet& skolem)
{
    Json w = Json::object();
    for (const auto& [y, table] : skolem.tables()) w[std::to_string(y.index())] = table_text(table);
    return w;
}

std::string witness_text(const SkolemSet& skolem)
{
    std::string s;
    for (const auto& [y, table] : skolem.tables()) s += fmt::format("f {} {}\n", y.index(), table_text(table));
    return s;
}

Json stats_json(const SolveStats& stats)
{
    return Json{{"candidates", stats.candidates}, {"memo_hits", stats.memo_hits}};
}

double evaluate(const DssatFormula& formula, const SkolemSet& skolem, const Settings& settings)
{
    EvalOptions options;
    options.max_random_vars = settings.max_random_vars;
    auto with = [&](EvalEngine engine) {
        options.engine = engine;
        return formula.extended() ? eval_extended(formula, skolem, options) : eval_skolem(formula, skolem, options);
    };
    if (settings.engine == "enumerate") return with(EvalEngine::enumerate);
    if (settings.engine == "search" || formula.extended()) return with(EvalEngine::search);
    try {
        return with(EvalEngine::enumerate);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::too_many_random_vars) throw;
        return with(EvalEngine::search);
    }
}

Json formula_summary(const DssatFormula& f)
{
    return Json{{"variables", f.num_vars()},
                {"clauses", f.matrix().size()},
                {"randomized", f.random_vars().size()},
                {"universal", f.universal_vars().size()},
                {"existential", f.existential_vars().size()},
                {"boolean", f.is_boolean()},
                {"linear_prefix", f.is_linear_prefix()}};
}

DqbfFormula as_dqbf(const DssatFormula& f)
{
    if (!f.random_vars().empty()) {
        throw Error(ErrorCode::syntax_error, "a DQBF input must not contain randomized variables");
    }
    DqbfFormula dqbf;
    dqbf.universals = f.universal_vars();
    for (const auto y : f.existential_vars()) dqbf.existentials.emplace_back(y, f.quantifier(y).deps());
    dqbf.matrix = f.matrix();
    return dqbf;
}

Json directory_json(const EncodingArtifact& artifact, const Booleanization& b)
{
    Json vars = Json::object();
    for (const auto& [name, v] : artifact.directory()) {
        Json ids = Json::array();
        for (const auto bit : b.bits[v.slot()]) ids.push_back(bit.index());
        const auto& domain = artifact.formula.domain(v);
        const auto& q = artifact.formula.quantifier(v);
        const char* encoding = domain.is_boolean() ? "boolean" : q.is_random() ? "chain" : "one_hot";
        vars[name] = Json{{"ids", ids}, {"values", domain.size()}, {"encoding", encoding}};
    }
    return Json{{"kappa", artifact.kappa},
                {"scale", artifact.scale},
                {"offset", artifact.offset},
                {"horizon", artifact.horizon},
                {"variables", vars}};
}

int emit(std::ostream& out, const Settings& s, const Json& json, const std::string& text, int code = success)
{
    if (s.json) {
        out << json.dump(2) << '\n';
    } else {
        out << text;
    }
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dependency stochastic Boolean satisfiability toolkit", "dssat"};
    app.require_subcommand(1);
    Settings s;
    app.add_flag("--json", s.json, "Machine-readable output");
    app.add_option("--threads", s.threads, "Worker threads (0 = all cores)")->envname("DSSAT_THREADS");
    app.add_option("--max-random-vars", s.max_random_vars, "Enumeration cap, in random bits");
    app.add_option("--max-skolem-space", s.max_skolem_space, "Cap on candidate Skolem sets");
    app.add_option("--max-policy-space", s.max_policy_space, "Cap on joint policies for brute force");
    app.add_option("--engine", s.engine, "Evaluation route")->check(CLI::IsMember({"auto", "enumerate", "search"}));

    std::string file, skolem_file, policy_file, out_file, dir_file, spec_file, impl_file, format = "sdimacs";
    double theta = 0.0;
    bool check = false, optimal = false, approx = false, solve_too = false;
    std::function<int()> action;

    auto* parse = app.add_subcommand("parse", "Validate a file and echo it normalized");
    parse->add_option("file", file)->required();
    parse->add_option("--format", format)->check(CLI::IsMember({"sdimacs", "decpomdp", "circuit"}));

    auto* solve = app.add_subcommand("solve", "Maximum satisfying probability with a witness");
    solve->add_option("file", file)->required();

    auto* decide = app.add_subcommand("decide", "Does some Skolem set reach the threshold");
    decide->add_option("file", file)->required();
    decide->add_option("--theta", theta)->required();

    auto* eval = app.add_subcommand("eval", "Satisfying probability under given Skolem functions");
    eval->add_option("file", file)->required();
    eval->add_option("--skolem", skolem_file)->required();

    auto* ssat = app.add_subcommand("ssat", "Solve a linear-prefix formula by the max rule");
    ssat->add_option("file", file)->required();

    auto* dqbf = app.add_subcommand("dqbf2dssat", "Turn a DQBF into a DSSAT formula");
    dqbf->add_option("file", file)->required();
    dqbf->add_flag("--check", check, "Also decide the DQBF by brute force");

    auto* encode = app.add_subcommand("encode-decpomdp", "Encode a Dec-POMDP model");
    encode->add_option("file", file)->required();
    encode->add_option("--out", out_file, "Write the Boolean SDIMACS here instead of standard output");
    encode->add_option("--dir", dir_file, "Write the variable directory (JSON) here");

    auto* certify = app.add_subcommand("certify-policy", "Check a policy's value through the encoding");
    certify->add_option("file", file)->required();
    certify->add_option("--policy", policy_file)->required();
    certify->add_flag("--optimal", optimal, "Also compare the optimal values");

    auto* circuit = app.add_subcommand("encode-circuit", "Encode partial-design equivalence checking");
    circuit->add_option("--spec", spec_file)->required();
    circuit->add_option("--impl", impl_file)->required();
    circuit->add_flag("--approx", approx, "Approximate design (no error rates)");
    circuit->add_option("--out", out_file, "Write the SDIMACS here instead of standard output");
    circuit->add_flag("--solve", solve_too, "Also solve the encoding");

    parse->callback([&] {
        action = [&] {
            const auto text = read_file(file);
            if (format == "decpomdp") {
                const auto model = parse_decpomdp(text);
                return emit(out, s,
                            Json{{"command", "parse"}, {"format", format}, {"agents", model.agents},
                                 {"states", model.states}, {"horizon", model.horizon}},
                            print_decpomdp(model));
            }
            if (format == "circuit") {
                const auto c = parse_circuit(text);
                return emit(out, s,
                            Json{{"command", "parse"}, {"format", format}, {"nodes", c.nodes().size()},
                                 {"outputs", c.outputs().size()}},
                            print_circuit(c));
            }
            const auto f = parse_sdimacs(text);
            Json j{{"command", "parse"}, {"format", format}};
            j.update(formula_summary(f));
            return emit(out, s, j, f.is_boolean() ? print_sdimacs(f) : std::string{});
        };
    });
    solve->callback([&] {
        action = [&] {
            const auto f = parse_sdimacs(read_file(file));
            const auto r = solve_dssat_exact(f, s.solve());
            return emit(out, s,
                        Json{{"command", "solve"}, {"value", r.value}, {"witness", witness_json(r.witness)},
                             {"stats", stats_json(r.stats)}},
                        "value " + number(r.value) + "\n" + witness_text(r.witness));
        };
    });
    decide->callback([&] {
        action = [&] {
            const auto f = parse_sdimacs(read_file(file));
            const auto r = decide_dssat(f, theta, s.solve());
            Json j{{"command", "decide"}, {"theta", theta}, {"holds", r.holds}};
            std::string text = r.holds ? "yes\n" : "no\n";
            if (r.witness) {
                j["witness"] = witness_json(*r.witness);
                text += witness_text(*r.witness);
            }
            j["stats"] = stats_json(r.stats);
            return emit(out, s, j, text, r.holds ? success : answered_no);
        };
    });
    eval->callback([&] {
        action = [&] {
            const auto f = parse_sdimacs(read_file(file));
            const auto skolem = parse_skolem(read_file(skolem_file), f);
            const double v = evaluate(f, skolem, s);
            return emit(out, s, Json{{"command", "eval"}, {"value", v}}, "value " + number(v) + "\n");
        };
    });
    ssat->callback([&] {
        action = [&] {
            const auto f = parse_sdimacs(read_file(file));
            const auto r = solve_ssat(f, s.solve());
            return emit(out, s,
                        Json{{"command", "ssat"}, {"value", r.value}, {"witness", witness_json(r.witness)}},
                        "value " + number(r.value) + "\n" + witness_text(r.witness));
        };
    });
    dqbf->callback([&] {
        action = [&] {
            const auto dq = as_dqbf(parse_sdimacs(read_file(file)));
            const auto converted = print_sdimacs(dqbf_to_dssat(dq));
            Json j{{"command", "dqbf2dssat"}, {"formula", converted}};
            std::string text = converted;
            if (check) {
                const bool holds = dqbf_check(dq, {16, s.max_skolem_space});
                j["dqbf_true"] = holds;
                text = (holds ? "c dqbf true\n" : "c dqbf false\n") + text;
            }
            return emit(out, s, j, text);
        };
    });
    encode->callback([&] {
        action = [&] {
            const auto model = parse_decpomdp(read_file(file));
            const auto artifact = encode_decpomdp(model);
            const auto boolean = booleanize(artifact.formula);
            const auto formula = print_sdimacs(boolean.formula);
            const auto directory = directory_json(artifact, boolean);
            if (!dir_file.empty()) write_file(dir_file, directory.dump(2) + "\n");
            Json j{{"command", "encode-decpomdp"},
                   {"kappa", artifact.kappa},
                   {"scale", artifact.scale},
                   {"offset", artifact.offset},
                   {"finite_domain", formula_summary(artifact.formula)},
                   {"boolean", formula_summary(boolean.formula)}};
            std::string text;
            if (!out_file.empty()) {
                write_file(out_file, formula);
                text = fmt::format("kappa {}\nscale {}\noffset {}\nvariables {}\nclauses {}\n", artifact.kappa,
                                   number(artifact.scale), number(artifact.offset), boolean.formula.num_vars(),
                                   boolean.formula.matrix().size());
            } else {
                text = formula;
                j["formula"] = formula;
            }
            return emit(out, s, j, text);
        };
    });
    certify->callback([&] {
        action = [&] {
            const auto model = parse_decpomdp(read_file(file));
            const auto policy = parse_policy(read_file(policy_file), model);
            const auto artifact = encode_decpomdp(model);
            const auto skolem = policy_to_skolem(model, policy, artifact);
            const double scaled = static_cast<double>(artifact.kappa) * evaluate(artifact.formula, skolem, s);
            const double through = descale(scaled, artifact.scale, artifact.offset, artifact.horizon);
            const double direct = policy_value(model, policy);
            bool agree = std::abs(through - direct) <= certify_tolerance;
            Json j{{"command", "certify-policy"},
                   {"kappa", artifact.kappa},
                   {"scaled_value", scaled},
                   {"encoded_value", through},
                   {"policy_value", direct},
                   {"agree", agree}};
            std::string text = fmt::format("encoded {}\ndirect {}\n", number(through), number(direct));
            if (optimal) {
                const auto best = optimal_policy_bruteforce(model, {s.max_policy_space});
                const auto solved = solve_dssat_exact(artifact.formula, policy_space(model, artifact), s.solve());
                const double solved_value = descale(static_cast<double>(artifact.kappa) * solved.value,
                                                    artifact.scale, artifact.offset, artifact.horizon);
                const bool optimum_agrees = std::abs(solved_value - best.value) <= certify_tolerance;
                j["optimal_value"] = best.value;
                j["solved_optimal_value"] = solved_value;
                j["optimal_agree"] = optimum_agrees;
                text += fmt::format("optimal {}\nsolved {}\n", number(best.value), number(solved_value));
                agree = agree && optimum_agrees;
            }
            text += agree ? "agree\n" : "disagree\n";
            return emit(out, s, j, text, agree ? success : answered_no);
        };
    });
    circuit->callback([&] {
        action = [&] {
            const auto g = parse_circuit(read_file(spec_file));
            const auto f = parse_circuit(read_file(impl_file));
            const auto enc = approx ? encode_approx_partial(g, f) : encode_probabilistic_partial(g, f);
            const auto formula = print_sdimacs(enc.formula);
            Json boxes = Json::object();
            for (const auto& [t, v] : enc.black_boxes) boxes[std::to_string(t.value())] = v.index();
            Json j{{"command", "encode-circuit"}, {"black_boxes", boxes}};
            j.update(formula_summary(enc.formula));
            std::string text;
            if (!out_file.empty()) {
                write_file(out_file, formula);
            } else {
                text = formula;
                j["formula"] = formula;
            }
            if (solve_too) {
                const auto r = solve_dssat_exact(enc.formula, s.solve());
                Json tables = Json::object();
                std::string lines;
                for (const auto& [t, v] : enc.black_boxes) {
                    tables[std::to_string(t.value())] = table_text(r.witness.table(v));
                    lines += fmt::format("c black box {} = {}\n", t.value(), table_text(r.witness.table(v)));
                }
                j["value"] = r.value;
                j["black_box_tables"] = tables;
                text += "c value " + number(r.value) + "\n" + lines;
            }
            return emit(out, s, j, text);
        };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? success : input_error;
    }

    try {
        return action();
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return is_resource_error(e.code()) ? resource_cap : input_error;
    } catch (const FileError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return resource_cap;
    }
}

}  // namespace dssat::cli
