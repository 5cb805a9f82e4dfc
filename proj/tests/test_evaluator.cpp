#include "catch_amalgamated.hpp"

#include "dssat/evaluator.hpp"
#include "dssat/io.hpp"
#include "support/errors.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace dssat;
using Catch::Matchers::WithinAbs;

namespace {

const VariableId x1{1}, x2{2}, x3{3};

SkolemSet tables(std::initializer_list<std::pair<VariableId, SkolemSet::Table>> entries)
{
    SkolemSet s;
    for (const auto& [y, t] : entries) s.set(y, t);
    return s;
}

EvalOptions searching()
{
    EvalOptions o;
    o.engine = EvalEngine::search;
    return o;
}

}  // namespace

TEST_CASE("eval_skolem sums the weights of satisfying assignments", "[evaluator]")
{
    for (const auto& options : {EvalOptions{}, searching()}) {
        const auto top = parse_sdimacs("p cnf 2 0\nr 0.4 1 0\nd 2 1 0\n");
        CHECK(eval_skolem(top, tables({{x2, {0, 1}}}), options) == 1.0);

        const auto xor_matrix = parse_sdimacs("p cnf 2 2\nr 0.5 1 0\nd 2 1 0\n1 2 0\n-1 -2 0\n");
        CHECK_THAT(eval_skolem(xor_matrix, tables({{x2, {1, 0}}}), options), WithinAbs(1.0, 1e-15));

        const auto disjunction = parse_sdimacs("p cnf 2 1\nr 0.3 1 0\nd 2 0\n1 2 0\n");
        CHECK_THAT(eval_skolem(disjunction, tables({{x2, {0}}}), options), WithinAbs(0.3, 1e-15));
    }
}

TEST_CASE("eval_extended applies the min rule to universals", "[evaluator]")
{
    const auto equiv = parse_sdimacs("p cnf 2 2\na 1 0\nr 0.7 2 0\n1 -2 0\n-1 2 0\n");
    CHECK_THAT(eval_extended(equiv, SkolemSet{}), WithinAbs(0.3, 1e-15));
    const auto top = parse_sdimacs("p cnf 1 0\na 1 0\n");
    CHECK(eval_extended(top, SkolemSet{}) == 1.0);
    const auto plain = parse_sdimacs("p cnf 2 1\nr 0.3 1 0\nd 2 0\n1 2 0\n");
    CHECK_THAT(eval_extended(plain, tables({{x2, {0}}})), WithinAbs(0.3, 1e-15));
}

TEST_CASE("eval_ssat_prefix applies the max rule", "[evaluator]")
{
    CHECK(eval_ssat_prefix(parse_sdimacs("p cnf 1 0\nr 0.5 1 0\n")) == 1.0);
    const auto exists_first = parse_sdimacs("p cnf 2 2\ne 1 0\nr 0.6 2 0\n1 -2 0\n-1 2 0\n");
    CHECK_THAT(eval_ssat_prefix(exists_first), WithinAbs(0.6, 1e-15));
    const auto random_first = parse_sdimacs("p cnf 2 2\nr 0.5 1 0\ne 2 0\n1 -2 0\n-1 2 0\n");
    CHECK_THAT(eval_ssat_prefix(random_first), WithinAbs(1.0, 1e-15));
}

TEST_CASE("evaluator errors", "[evaluator]")
{
    std::string many = "p cnf 25 0\nr 0.5";
    for (int v = 1; v <= 25; ++v) many += " " + std::to_string(v);
    many += " 0\n";
    const auto wide = parse_sdimacs(many);
    CHECK(error_code([&] { (void)eval_skolem(wide, SkolemSet{}); }) == ErrorCode::too_many_random_vars);
    EvalOptions raised;
    raised.max_random_vars = 25;
    CHECK(eval_skolem(wide, SkolemSet{}, raised) == 1.0);

    const auto f = parse_sdimacs("p cnf 2 1\nr 0.5 1 0\nd 2 1 0\n1 2 0\n");
    CHECK(error_code([&] { (void)eval_skolem(f, SkolemSet{}); }) == ErrorCode::skolem_mismatch);
    CHECK(error_code([&] { (void)eval_skolem(f, tables({{x2, {1}}})); }) == ErrorCode::skolem_mismatch);
    CHECK(error_code([&] { (void)eval_extended(f, tables({{x2, {1, 1, 1}}})); }) == ErrorCode::skolem_mismatch);

    const auto extended = parse_sdimacs("p cnf 1 0\na 1 0\n");
    CHECK(error_code([&] { (void)eval_skolem(extended, SkolemSet{}); }) == ErrorCode::unexpected_universal);

    const auto henkin = parse_sdimacs("p cnf 3 0\nr 0.5 1 2 0\nd 3 2 0\n");
    CHECK(error_code([&] { (void)eval_ssat_prefix(henkin); }) == ErrorCode::not_linear_prefix);

    const auto deep = parse_sdimacs("p cnf 4 2\na 1 0\nr 0.5 2 3 4 0\n1 2 3 0\n-1 -2 4 0\n");
    EvalOptions shallow;
    shallow.depth_budget = 1;
    CHECK(error_code([&] { (void)eval_extended(deep, SkolemSet{}, shallow); }) == ErrorCode::depth_budget_exceeded);
}

TEST_CASE("evaluation routes agree with the brute-force oracle", "[evaluator][property]")
{
    gen::Rng rng(31);
    gen::FormulaShape shape;
    shape.max_vars = 14;
    shape.max_clauses = 12;
    for (int round = 0; round < 400; ++round) {
        const auto f = gen::formula(rng, shape);
        const auto s = gen::skolem(rng, f);
        const double expected = oracle::skolem_value(f, s);
        const double enumerated = eval_skolem(f, s);
        CHECK_THAT(enumerated, WithinAbs(expected, 1e-12));
        CHECK_THAT(eval_skolem(f, s, searching()), WithinAbs(expected, 1e-12));
        CHECK_THAT(eval_extended(f, s), WithinAbs(enumerated, 1e-12));
        CHECK(enumerated >= 0.0);
        CHECK(enumerated <= 1.0);
    }
}

TEST_CASE("extended evaluation matches the prefix-order oracle", "[evaluator][property]")
{
    gen::Rng rng(32);
    gen::FormulaShape shape;
    shape.max_vars = 12;
    shape.universal_share = 0.4;
    for (int round = 0; round < 300; ++round) {
        const auto f = gen::formula(rng, shape);
        const auto s = gen::skolem(rng, f);
        const double v = eval_extended(f, s);
        CHECK_THAT(v, WithinAbs(oracle::skolem_value(f, s), 1e-12));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("eval_ssat_prefix matches the recursive oracle", "[evaluator][property]")
{
    gen::Rng rng(33);
    gen::FormulaShape shape;
    shape.max_vars = 10;
    shape.universal_share = 0.3;
    shape.existential_share = 0.4;
    shape.max_table_bits = 64;
    for (int round = 0; round < 300; ++round) {
        const auto f = gen::linear_formula(rng, shape);
        CHECK_THAT(eval_ssat_prefix(f), WithinAbs(oracle::ssat_value(f), 1e-12));
    }
}

TEST_CASE("adding a clause never increases a value", "[evaluator][property]")
{
    gen::Rng rng(34);
    gen::FormulaShape shape;
    shape.max_vars = 10;
    for (int round = 0; round < 200; ++round) {
        const auto f = gen::linear_formula(rng, shape);
        const auto s = gen::skolem(rng, f);
        auto clauses = f.matrix().clauses();
        const auto extra = gen::matrix(rng, f, 1, 3).clauses();
        clauses.insert(clauses.end(), extra.begin(), extra.end());
        const auto g = build_formula(f.prefix(), Matrix(clauses));
        CHECK(eval_skolem(g, s) <= eval_skolem(f, s) + 1e-15);
        CHECK(eval_extended(g, s) <= eval_extended(f, s) + 1e-15);
        CHECK(eval_ssat_prefix(g) <= eval_ssat_prefix(f) + 1e-15);
    }
}

TEST_CASE("without existentials the value is a weighted model count", "[evaluator][property]")
{
    gen::Rng rng(35);
    gen::FormulaShape shape;
    shape.max_vars = 12;
    shape.existential_share = 0.0;
    for (int round = 0; round < 150; ++round) {
        const auto f = gen::formula(rng, shape);
        CHECK_THAT(eval_skolem(f, SkolemSet{}), WithinAbs(oracle::weighted_count(f), 1e-12));
    }
    gen::Rng fd_rng(36);
    for (int round = 0; round < 50; ++round) {
        auto f = gen::finite_domain_formula(fd_rng, 3, 4);
        const auto s = gen::skolem(fd_rng, f);
        CHECK_THAT(eval_skolem(f, s), WithinAbs(oracle::skolem_value(f, s), 1e-12));
        CHECK_THAT(eval_skolem(f, s, searching()), WithinAbs(oracle::skolem_value(f, s), 1e-12));
    }
}
