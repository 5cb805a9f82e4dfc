#include "catch_amalgamated.hpp"

#include <functional>

#include "dssat/evaluator.hpp"
#include "dssat/reductions.hpp"
#include "dssat/solver.hpp"
#include "support/errors.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace dssat;
using Catch::Matchers::WithinAbs;

namespace {

const VariableId x1{1}, x2{2}, x3{3};

Matrix equivalence(VariableId a, VariableId b)
{
    return Matrix({{Literal::neg(a), Literal::pos(b)}, {Literal::pos(a), Literal::neg(b)}});
}

/// Calls `visit` with every Skolem set of `f`.
void for_each_skolem(const DssatFormula& f, const std::function<void(const SkolemSet&)>& visit)
{
    struct Slot {
        VariableId y;
        std::size_t entry;
        std::uint32_t radix;
    };
    std::vector<Slot> slots;
    SkolemSet s;
    for (const auto y : f.existential_vars()) {
        const auto len = table_length(f, y);
        s.set(y, SkolemSet::Table(len, 0));
        for (std::size_t b = 0; b < len; ++b) slots.push_back({y, b, f.domain(y).size()});
    }
    std::map<VariableId, SkolemSet::Table> tables = s.tables();
    while (true) {
        SkolemSet current;
        for (const auto& [y, t] : tables) current.set(y, t);
        visit(current);
        std::size_t i = 0;
        for (; i < slots.size(); ++i) {
            auto& digit = tables[slots[i].y][slots[i].entry];
            if (++digit < slots[i].radix) break;
            digit = 0;
        }
        if (i == slots.size()) return;
    }
}

}  // namespace

TEST_CASE("dqbf_to_dssat turns universals into fair coins", "[reductions]")
{
    const DqbfFormula copy{{x1}, {{x2, {x1}}}, equivalence(x1, x2)};
    const auto f = dqbf_to_dssat(copy);
    CHECK(f.quantifier(x1).is_random());
    CHECK(f.quantifier(x1).probability() == 0.5);
    CHECK(f.quantifier(x2).deps() == std::vector{x1});
    CHECK(f.matrix() == copy.matrix);
    CHECK_THAT(solve_dssat_exact(f).value, WithinAbs(1.0, 1e-12));

    const DqbfFormula blind{{x1}, {{x2, {}}}, equivalence(x1, x2)};
    CHECK_THAT(solve_dssat_exact(dqbf_to_dssat(blind)).value, WithinAbs(0.5, 1e-12));

    const DqbfFormula wrong_dep{{x1, x2}, {{x3, {x2}}}, equivalence(x3, x1)};
    CHECK_THAT(solve_dssat_exact(dqbf_to_dssat(wrong_dep)).value, WithinAbs(0.5, 1e-12));
}

TEST_CASE("dqbf_check examples", "[reductions]")
{
    CHECK(dqbf_check({{x1}, {{x2, {x1}}}, equivalence(x1, x2)}));
    CHECK_FALSE(dqbf_check({{x1}, {{x2, {}}}, equivalence(x1, x2)}));
    CHECK_FALSE(dqbf_check({{x1}, {{x2, {x1}}}, Matrix::bottom()}));
    CHECK(dqbf_check({{x1}, {{x2, {x1}}}, Matrix::top()}));

    DqbfFormula wide;
    for (std::uint32_t v = 1; v <= 17; ++v) wide.universals.push_back(VariableId(v));
    CHECK(error_code([&] { (void)dqbf_check(wide); }) == ErrorCode::search_space_too_large);
    DqbfFormula deep{{x1, x2, x3}, {}, Matrix{}};
    for (std::uint32_t v = 4; v <= 6; ++v) deep.existentials.push_back({VariableId(v), {x1, x2, x3}});
    DqbfCheckOptions tight;
    tight.max_skolem_space = (std::uint64_t{1} << 24) - 1;
    CHECK(error_code([&] { (void)dqbf_check(deep, tight); }) == ErrorCode::search_space_too_large);
}

TEST_CASE("DQBF truth coincides with a solved value of one", "[reductions][property]")
{
    gen::Rng rng(51);
    int truths = 0;
    for (int round = 0; round < 150; ++round) {
        const auto d = gen::dqbf(rng, 4, 3, 20);
        const bool holds = dqbf_check(d);
        CHECK(holds == oracle::dqbf_true(d));
        const auto f = dqbf_to_dssat(d);
        CHECK(holds == (solve_dssat_exact(f).value >= 1.0 - 1e-12));
        truths += holds;
    }
    // Both outcomes must be exercised.
    CHECK(truths > 10);
    CHECK(truths < 140);
}

TEST_CASE("dqbf_to_dssat preserves sizes", "[reductions][property]")
{
    gen::Rng rng(52);
    for (int round = 0; round < 100; ++round) {
        const auto d = gen::dqbf(rng, 4, 3, 20);
        const auto f = dqbf_to_dssat(d);
        CHECK(f.num_vars() == d.universals.size() + d.existentials.size());
        CHECK(f.matrix().size() == d.matrix.size());
        CHECK(f.random_vars().size() == d.universals.size());
    }
}

TEST_CASE("booleanize examples", "[reductions]")
{
    const auto binary = booleanize(
        build_formula({{x1, Quantifier::random(std::vector{0.4, 0.6}), Domain::finite(2)}}, Matrix{}));
    REQUIRE(binary.bits[0].size() == 1);
    CHECK_THAT(binary.formula.quantifier(binary.bits[0][0]).probability(), WithinAbs(0.4, 1e-15));

    const auto ternary = booleanize(
        build_formula({{x1, Quantifier::random(std::vector{0.5, 0.3, 0.2}), Domain::finite(3)}}, Matrix{}));
    REQUIRE(ternary.bits[0].size() == 2);
    const double b1 = ternary.formula.quantifier(ternary.bits[0][0]).probability();
    const double b2 = ternary.formula.quantifier(ternary.bits[0][1]).probability();
    CHECK_THAT(b1, WithinAbs(0.5, 1e-15));
    CHECK_THAT(b2, WithinAbs(0.6, 1e-15));
    CHECK_THAT((1 - b1) * b2, WithinAbs(0.3, 1e-15));
    CHECK(ternary.formula.matrix().size() == 0);

    const auto point = booleanize(
        build_formula({{x1, Quantifier::random(std::vector{1.0, 0.0, 0.0}), Domain::finite(3)}}, Matrix{}));
    CHECK(point.formula.quantifier(point.bits[0][0]).probability() == 1.0);
    CHECK(point.formula.quantifier(point.bits[0][1]).probability() == 0.0);

    const auto tail = booleanize(
        build_formula({{x1, Quantifier::random(std::vector{0.5, 0.5, 0.0}), Domain::finite(3)}}, Matrix{}));
    CHECK(tail.formula.quantifier(tail.bits[0][1]).probability() == 1.0);

    const auto choice = booleanize(build_formula(
        {{x1, Quantifier::random(0.5)}, {x2, Quantifier::existential({x1}), Domain::finite(3)}}, Matrix{}));
    CHECK(choice.bits[0].size() == 1);
    CHECK(choice.bits[1].size() == 3);
    for (const auto bit : choice.bits[1]) CHECK(choice.formula.quantifier(bit).deps() == choice.bits[0]);
}

TEST_CASE("decode_chain reads the first true bit", "[reductions]")
{
    CHECK(decode_chain(std::vector<std::uint32_t>{1, 0}, 3) == 0);
    CHECK(decode_chain(std::vector<std::uint32_t>{0, 1}, 3) == 1);
    CHECK(decode_chain(std::vector<std::uint32_t>{0, 0}, 3) == 2);
    CHECK(decode_chain(std::vector<std::uint32_t>{0, 1, 1}, 4) == 1);
    CHECK(decode_chain(std::vector<std::uint32_t>{}, 1) == 0);
}

TEST_CASE("booleanize rejects oversized domains", "[reductions]")
{
    const std::uint32_t k = (1u << 16) + 1;
    std::vector<double> dist(k, 0.0);
    dist[0] = 1.0;
    const auto f = build_formula({{x1, Quantifier::random(dist), Domain::finite(k)}}, Matrix{});
    CHECK(error_code([&] { (void)booleanize(f); }) == ErrorCode::domain_too_large);
}

TEST_CASE("booleanize preserves the value of every Skolem set", "[reductions][property]")
{
    gen::Rng rng(53);
    for (int round = 0; round < 40; ++round) {
        const auto f = gen::finite_domain_formula(rng, 3, 4);
        const auto b = booleanize(f);
        REQUIRE(b.formula.is_boolean());
        for_each_skolem(f, [&](const SkolemSet& s) {
            const auto mapped = b.map_skolem(f, s);
            mapped.validate(b.formula);
            CHECK_THAT(eval_skolem(b.formula, mapped), WithinAbs(oracle::skolem_value(f, s), 1e-12));
        });
    }
}
