#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "minegame/bounds.hpp"

using namespace minegame;
using Catch::Approx;

TEST_CASE("overtake closed form agrees with the chain solve", "[bounds]") {
    for (double p : {0.1, 0.2, 0.3, 0.4})
        for (int deficit = 0; deficit <= 20; ++deficit) {
            INFO("p=" << p << " deficit=" << deficit);
            REQUIRE(r_infinity(p, {1, deficit}) ==
                    Approx(overtake_probability_chain(p, deficit)).margin(1e-12));
        }
    CHECK(r_infinity(0.3, {3, 2}) == 1.0);  // deficit 0
    CHECK_THROWS_AS(r_infinity(0.5, {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(r_infinity(0.3, {4, 2}), std::invalid_argument);
    CHECK_THROWS_AS(overtake_probability_chain(0.3, -1), std::invalid_argument);
    CHECK_THROWS_AS(overtake_probability_chain(0.3, 300, 200), std::invalid_argument);
}

TEST_CASE("threshold constants satisfy their polynomials", "[bounds]") {
    const double h0 = polynomial_threshold(ThresholdKind::h0_lower);
    CHECK(2 * h0 * h0 - std::pow(1 - h0, 3) == Approx(0.0).margin(1e-12));
    CHECK(h0 == Approx(0.361103).margin(5e-6));

    const double g = polynomial_threshold(ThresholdKind::golden);
    CHECK(g == Approx((3.0 - std::sqrt(5.0)) / 2.0).margin(1e-15));
    CHECK(g * g - 3 * g + 1 == Approx(0.0).margin(1e-12));

    const double w = polynomial_threshold(ThresholdKind::h0_upper_witness);
    CHECK(w == 0.455);

    const double sl = polynomial_threshold(ThresholdKind::strategic_lower);
    CHECK(sl * sl * sl - 6 * sl * sl + 5 * sl - 1 == Approx(0.0).margin(1e-12));
    CHECK(sl == Approx(0.30798).margin(5e-5));

    // they order as expected: strategic < h0 lower < golden
    BoundCatalog cat = BoundCatalog::standard();
    CHECK(cat.strategic_lower < cat.h0_lower);
    CHECK(cat.h0_lower < cat.golden);
    CHECK(cat.golden < 0.5);
}

TEST_CASE("fixed depth-3 strategy gain", "[bounds]") {
    // rational closed form; hand-checked spot value
    CHECK(fixed_strategy_gain_d3(0.455) == Approx(0.45513).margin(5e-5));
    CHECK(fixed_strategy_gain_d3(0.455) > 0.455);
    CHECK(fixed_strategy_gain_d3(0.44) < 0.44);
    CHECK(fixed_strategy_gain_d3(0.0) == 0.0);
    CHECK_THROWS_AS(fixed_strategy_gain_d3(1.5), std::invalid_argument);
}

TEST_CASE("threshold search reproduces the known depths", "[bounds]") {
    ThresholdResult r2 = find_threshold(Model::immediate, 2);
    CHECK(r2.p_hat == 0.5);  // no profitable deviation at depth 2
    CHECK(r2.bracket_hi == 0.5);

    ThresholdResult r3 = find_threshold(Model::immediate, 3);
    CHECK(r3.p_hat == Approx(0.454).margin(2e-3));
    CHECK(r3.bracket_lo <= r3.p_hat);
    CHECK(r3.p_hat <= r3.bracket_hi);
    CHECK(r3.bracket_hi - r3.bracket_lo <= 1e-4 + 1e-12);
    CHECK(r3.gap_at_bracket > 0.0);

    // a crossing must sit above every certified lower bound
    BoundCatalog cat = BoundCatalog::standard();
    CHECK(r3.p_hat > cat.h0_lower);
}

TEST_CASE("threshold search validates its inputs", "[bounds]") {
    CHECK_THROWS_AS(find_threshold(Model::immediate, 3, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(find_threshold(Model::immediate, 3, 1e-4, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(find_threshold(Model::immediate, 1), std::invalid_argument);
}

TEST_CASE("lemma bounds hold on solver output", "[bounds]") {
    for (double p : {0.10, 0.25, 0.35, 0.45}) {
        GameParams gp{Model::immediate, p, 10, 0};
        SolveReport rep = solve(gp);
        for (const LemmaCheck& c : verify_lemma_bounds(rep, 1e-9)) {
            INFO("p=" << p << " check " << c.name << " note " << c.note);
            CHECK(c.status != CheckStatus::fail);
        }
    }

    // shallow tables skip the d >= 3 gated checks rather than fail
    GameParams g2{Model::immediate, 0.3, 2, 0};
    int skipped = 0;
    for (const LemmaCheck& c : verify_lemma_bounds(solve(g2), 1e-9))
        skipped += c.status == CheckStatus::skipped ? 1 : 0;
    CHECK(skipped >= 2);
}
