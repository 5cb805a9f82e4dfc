#include "catch_amalgamated.hpp"

#include "dssat/decpomdp.hpp"
#include "dssat/io.hpp"
#include "support/errors.hpp"
#include "support/generators.hpp"

using namespace dssat;

namespace {

const VariableId x1{1}, x2{2}, x3{3};

const char* tiny_model = R"(# one state, one action
agents: 1
states: 1
actions: 1
observations: 1
horizon: 1
start: 1.0
T: 0 0 0 1.0
O: 0 0 0 1.0
R: 0 0 5.0
)";

}  // namespace

TEST_CASE("parse_sdimacs transcribes Henkin prefixes", "[io]")
{
    const auto f = parse_sdimacs("p cnf 2 1\nr 0.5 1 0\nd 2 1 0\n1 -2 0\n");
    REQUIRE(f.num_vars() == 2);
    CHECK(f.quantifier(x1).is_random());
    CHECK(f.quantifier(x1).probability() == 0.5);
    CHECK(f.quantifier(x2).deps() == std::vector{x1});
    CHECK(f.matrix().clauses() == std::vector<Clause>{{Literal::pos(x1), Literal::neg(x2)}});
}

TEST_CASE("e lines depend on all preceding random and universal variables", "[io]")
{
    const auto lone = parse_sdimacs("p cnf 1 1\ne 1 0\n1 0\n");
    CHECK(lone.quantifier(x1).is_existential());
    CHECK(lone.quantifier(x1).deps().empty());

    const auto f = parse_sdimacs("p cnf 3 0\nr 0.2 1 0\na 2 0\ne 3 0\n");
    CHECK(f.quantifier(x3).deps() == std::vector{x1, x2});
    CHECK(f.extended());
    CHECK(f.is_linear_prefix());
}

TEST_CASE("parse_sdimacs reports structured errors with line numbers", "[io]")
{
    CHECK(error_code([] { parse_sdimacs("p cnf 1 0\nr 1.2 1 0\n"); }) == ErrorCode::bad_probability);
    CHECK(error_line([] { parse_sdimacs("p cnf 1 0\nr 1.2 1 0\n"); }) == 2);
    CHECK(error_code([] { parse_sdimacs("p cnf 1 2\nr 0.5 1 0\n1 0\n"); }) == ErrorCode::count_mismatch);
    CHECK(error_code([] { parse_sdimacs("p cnf 1 1\nr 0.5 1 0\n2 0\n"); }) == ErrorCode::unknown_variable);
    CHECK(error_code([] { parse_sdimacs("p cnf 2 0\nr 0.5 1 0\n"); }) == ErrorCode::unknown_variable);
    CHECK(error_code([] { parse_sdimacs("p cnf 1 0\nr 0.5 1 0\na 1 0\n"); }) == ErrorCode::duplicate_quantifier);
    CHECK(error_code([] { parse_sdimacs("p cnf 2 0\ne 1 0\nd 2 1 0\n"); }) == ErrorCode::illegal_dependency);
    CHECK(error_code([] { parse_sdimacs("r 0.5 1 0\n"); }) == ErrorCode::syntax_error);
    CHECK(error_code([] { parse_sdimacs("p cnf 1 1\nr 0.5 1\n1 0\n"); }) == ErrorCode::syntax_error);
    CHECK(error_code([] { parse_sdimacs("p cnf 1 1\nr 0.5 1 0\n1\n"); }) == ErrorCode::syntax_error);
    CHECK(error_code([] { parse_sdimacs("p cnf 2 1\nr 0.5 1 0\n1 0\na 2 0\n"); }) == ErrorCode::syntax_error);
    CHECK(error_line([] { parse_sdimacs("c hi\np cnf 1 1\nr 0.5 1 0\nx 0\n"); }) == 4);
}

TEST_CASE("d lines may name dependencies declared later", "[io]")
{
    const auto f = parse_sdimacs("p cnf 2 0\nd 1 2 0\nr 0.5 2 0\n");
    // Renumbered in prefix order: the existential keeps slot 1.
    CHECK(f.quantifier(x1).deps() == std::vector{x2});
}

TEST_CASE("parser tolerates CRLF, comments and clauses spanning lines", "[io]")
{
    const auto f = parse_sdimacs("c header\r\np cnf 2 2\r\nr 1e-1 1 0\r\na 2 0\r\n1\r\n2 0 -1 0\r\n");
    CHECK(f.matrix().size() == 2);
    CHECK(f.quantifier(x1).probability() == 0.1);
}

TEST_CASE("print_sdimacs output parses back to the same formula", "[io][property]")
{
    const auto empty = parse_sdimacs("p cnf 1 0\nr 0.5 1 0\n");
    CHECK(print_sdimacs(empty) == "p cnf 1 0\nr 0.5 1 0\n");

    gen::Rng rng(21);
    for (int round = 0; round < 300; ++round) {
        gen::FormulaShape shape;
        shape.max_vars = 12;
        shape.universal_share = 0.25;
        const auto f = round % 2 ? gen::formula(rng, shape) : gen::linear_formula(rng, shape);
        const auto text = print_sdimacs(f);
        const auto back = parse_sdimacs(text);
        CHECK(back == f);
        CHECK(print_sdimacs(back) == text);
    }
}

TEST_CASE("print_sdimacs rejects finite-domain formulas", "[io]")
{
    const auto f = build_formula({{x1, Quantifier::random(std::vector{0.5, 0.5, 0.0}), Domain::finite(3)}}, Matrix{});
    CHECK(error_code([&] { (void)print_sdimacs(f); }) == ErrorCode::non_boolean_formula);
}

TEST_CASE("parser never crashes on arbitrary bytes", "[io][property]")
{
    gen::Rng rng(22);
    const std::string alphabet = "pcnfrade0123456789-. \n\r\t#:eTOR\xff\x01";
    const std::string seed = "p cnf 3 2\nr 0.5 1 0\na 2 0\nd 3 1 2 0\n1 -3 0\n2 3 0\n";
    for (int round = 0; round < 3000; ++round) {
        std::string text;
        if (round % 2) {
            text = seed;
            for (int k = 0; k < 3; ++k) {
                const auto at = gen::uniform(rng, 0, text.size() - 1);
                text[at] = alphabet[gen::uniform(rng, 0, alphabet.size() - 1)];
            }
        } else {
            const auto len = gen::uniform(rng, 0, 60);
            for (std::size_t i = 0; i < len; ++i) text += alphabet[gen::uniform(rng, 0, alphabet.size() - 1)];
        }
        for (const auto& parse : std::vector<std::function<void()>>{
                 [&] { (void)parse_sdimacs(text); }, [&] { (void)parse_decpomdp(text); }}) {
            try {
                parse();
            } catch (const Error& e) {
                CHECK(e.line() >= 1);
            }
        }
    }
}

TEST_CASE("Skolem files use one digit per table entry", "[io]")
{
    const auto f = parse_sdimacs("p cnf 2 1\nr 0.5 1 0\nd 2 1 0\n1 -2 0\n");
    const auto s = parse_skolem("c witness\nf 2 10\n", f);
    CHECK(s.table(x2) == SkolemSet::Table{1, 0});
    CHECK(print_skolem(s) == "f 2 10\n");
    CHECK(parse_skolem(print_skolem(s), f) == s);

    CHECK(error_code([&] { parse_skolem("f 2 1\n", f); }) == ErrorCode::wrong_table_length);
    CHECK(error_code([&] { parse_skolem("", f); }) == ErrorCode::missing_function);
    CHECK(error_code([&] { parse_skolem("f 1 10\n", f); }) == ErrorCode::unknown_variable);
    CHECK(error_code([&] { parse_skolem("f 2 12\n", f); }) == ErrorCode::syntax_error);
    CHECK(error_code([&] { parse_skolem("f 2 10\nf 2 01\n", f); }) == ErrorCode::syntax_error);
}

TEST_CASE("parse_decpomdp builds dense tables", "[io][decpomdp]")
{
    const auto m = parse_decpomdp(tiny_model);
    CHECK(m.agents == 1);
    CHECK(m.horizon == 1);
    CHECK(m.R(0, 0) == 5.0);
    CHECK(m.T(0, 0, 0) == 1.0);

    const auto again = parse_decpomdp(print_decpomdp(m));
    CHECK(again == m);
}

TEST_CASE("parse_decpomdp reports model errors", "[io][decpomdp]")
{
    std::string text = tiny_model;
    auto replace = [&](const std::string& from, const std::string& to) {
        auto copy = text;
        copy.replace(copy.find(from), from.size(), to);
        return copy;
    };
    CHECK(error_code([&] { parse_decpomdp(replace("T: 0 0 0 1.0", "T: 0 0 0 0.9")); }) == ErrorCode::row_not_normalized);
    CHECK(error_code([&] { parse_decpomdp(replace("horizon: 1", "horizon: 0")); }) == ErrorCode::bad_horizon);
    CHECK(error_line([&] { parse_decpomdp(replace("horizon: 1", "horizon: 0")); }) == 6);
    CHECK(error_code([&] { parse_decpomdp(replace("T: 0 0 0 1.0", "T: 0 0 1 1.0")); }) == ErrorCode::syntax_error);
    CHECK(error_code([&] { parse_decpomdp(replace("O: 0 0 0 1.0", "O: 0 0 0 1.5")); }) == ErrorCode::bad_probability);
    CHECK(error_code([&] { parse_decpomdp(replace("agents: 1\n", "")); }) == ErrorCode::syntax_error);
    CHECK(error_code([&] { parse_decpomdp(replace("R: 0 0 5.0", "R: 0 0 five")); }) == ErrorCode::syntax_error);
}

TEST_CASE("Dec-POMDP documents round-trip", "[io][decpomdp][property]")
{
    gen::Rng rng(23);
    for (int round = 0; round < 50; ++round) {
        const auto m = gen::decpomdp(rng, {});
        const auto back = parse_decpomdp(print_decpomdp(m));
        CHECK(back == m);
    }
}

TEST_CASE("policies parse per agent and stage", "[io][decpomdp]")
{
    auto m = DecPomdpModel::with_shape(1, {2}, {2}, 2);
    m.T(0, 0, 0) = m.T(0, 1, 0) = 1.0;
    m.O(0, 0, 0) = m.O(0, 1, 1) = 1.0;
    const auto p = parse_policy("a 1 0 1\na 1 1 0 1\n", m);
    CHECK(p.actions[0][0] == std::vector<std::uint32_t>{1});
    CHECK(p.actions[0][1] == std::vector<std::uint32_t>{0, 1});
    CHECK(parse_policy(print_policy(p), m) == p);
    CHECK(error_code([&] { parse_policy("a 1 0 1\n", m); }) == ErrorCode::partial_policy);
    CHECK(error_code([&] { parse_policy("a 1 0 1\na 1 1 0\n", m); }) == ErrorCode::partial_policy);
    CHECK(error_code([&] { parse_policy("a 1 0 2\na 1 1 0 1\n", m); }) == ErrorCode::out_of_range);
}
