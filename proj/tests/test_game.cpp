#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <stdexcept>

#include "minegame/game.hpp"

using namespace minegame;
using Catch::Approx;

TEST_CASE("parameter validation", "[game]") {
    CHECK_NOTHROW(validate_params({Model::immediate, 0.3, 2, 0}));
    CHECK_NOTHROW(validate_params({Model::immediate, 0.0, 2, 0}));
    CHECK_THROWS_AS(validate_params({Model::immediate, -0.1, 3, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_params({Model::immediate, 1.0, 3, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_params({Model::immediate, 0.3, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_params({Model::immediate, 0.3, 3, 8}), std::invalid_argument);
    CHECK_THROWS_AS(validate_params({Model::strategic, 0.3, 5, 6}), std::invalid_argument);
    CHECK_NOTHROW(validate_params({Model::strategic, 0.3, 5, 7}));
    CHECK(effective_a_max({Model::strategic, 0.3, 5, 0}) == 12);
    CHECK(effective_a_max({Model::strategic, 0.3, 5, 9}) == 9);
}

TEST_CASE("state classification", "[game]") {
    GameParams gp{Model::immediate, 0.3, 10, 0};
    CHECK(classify(gp, {3, 2}) == StateClass::winning);
    CHECK(classify(gp, {1, 0}) == StateClass::winning);
    CHECK(classify(gp, {0, 10}) == StateClass::forced_capitulation);
    CHECK(classify(gp, {0, 0}) == StateClass::choice);
    CHECK(classify(gp, {2, 2}) == StateClass::choice);

    GameParams sp{Model::strategic, 0.3, 10, 0};
    CHECK(classify(sp, {3, 2}) == StateClass::choice);  // leads never auto-win here
    CHECK(classify(sp, {3, 10}) == StateClass::forced_capitulation);
    CHECK(classify(sp, {22, 10}) == StateClass::forced_capitulation);
}

TEST_CASE("transition semantics", "[game]") {
    GameParams gp{Model::immediate, 0.3, 10, 0};

    // tie race: miner 1's find releases a + 1 blocks and resets the race
    Transition t = step(gp, {1, 1}, mine_action(), Winner::miner1);
    CHECK(t.next == GameState{0, 0});
    CHECK(t.levels_advanced == 1);
    CHECK(t.miner1_paid == 2);
    CHECK(t.miner2_paid == 0);

    // behind by one: the find only draws level
    t = step(gp, {0, 1}, mine_action(), Winner::miner1);
    CHECK(t.next == GameState{1, 1});
    CHECK(t.levels_advanced == 0);
    CHECK(t.miner1_paid == 0);

    t = step(gp, {1, 1}, mine_action(), Winner::miner2);
    CHECK(t.next == GameState{1, 2});
    CHECK(t.levels_advanced == 1);
    CHECK(t.miner1_paid == 0);
    CHECK(t.miner2_paid == 0);

    // capitulation drops the private branch and cedes the gap to miner 2
    t = step(gp, {0, 3}, capitulate_to(0), Winner::miner1);
    CHECK(t.next == GameState{0, 0});
    CHECK(t.levels_advanced == 0);
    CHECK(t.miner1_paid == 0);
    CHECK(t.miner2_paid == 3);

    t = step(gp, {2, 3}, capitulate_to(1), Winner::miner1);
    CHECK(t.next == GameState{0, 1});
    CHECK(t.miner2_paid == 2);

    GameParams sp{Model::strategic, 0.3, 10, 0};

    t = step(sp, {5, 2}, release_action(), Winner::miner1);
    CHECK(t.next == GameState{2, 0});
    CHECK(t.levels_advanced == 1);
    CHECK(t.miner1_paid == 3);
    CHECK(t.miner2_paid == 0);

    // releasing with a lead of exactly one leaves nothing banked
    t = step(sp, {3, 2}, release_action(), Winner::miner1);
    CHECK(t.next == GameState{0, 0});
    CHECK(t.miner1_paid == 3);

    // strategic mining never auto-releases
    t = step(sp, {2, 2}, mine_action(), Winner::miner1);
    CHECK(t.next == GameState{3, 2});
    CHECK(t.levels_advanced == 0);
    CHECK(t.miner1_paid == 0);

    t = step(sp, {2, 2}, mine_action(), Winner::miner2);
    CHECK(t.next == GameState{2, 3});
    CHECK(t.levels_advanced == 1);
}

TEST_CASE("state grid indexing round trip", "[game]") {
    for (GameParams gp : {GameParams{Model::immediate, 0.3, 4, 0},
                          GameParams{Model::strategic, 0.3, 4, 7}}) {
        StateGrid grid = StateGrid::of(gp);
        std::set<std::size_t> seen;
        std::size_t n = 0;
        for (int b = 0; b <= gp.d; ++b)
            for (int a = 0; a <= grid.max_a(b); ++a) {
                GameState s{a, b};
                REQUIRE(grid.contains(s));
                const std::size_t idx = grid.index(s);
                REQUIRE(idx < grid.size());
                CHECK(seen.insert(idx).second);
                ++n;
            }
        CHECK(n == grid.size());
        CHECK_FALSE(grid.contains({0, gp.d + 1}));
        CHECK_FALSE(grid.contains({-1, 0}));
        CHECK_FALSE(grid.contains({grid.max_a(2) + 1, 2}));
    }
}

TEST_CASE("frontier policy shape", "[game]") {
    GameParams gp{Model::immediate, 0.3, 5, 0};
    Policy pol = frontier_policy(gp);
    CHECK_NOTHROW(validate_policy(pol));
    CHECK(pol.at({0, 0}).kind == ActionKind::mine);
    CHECK(pol.at({0, 1}).kind == ActionKind::capitulate);
    CHECK(pol.at({0, 1}).landing == 0);
    CHECK(pol.at({1, 1}).kind == ActionKind::capitulate);
    CHECK(pol.at({0, 5}).kind == ActionKind::capitulate);
    CHECK(pol.at({0, 5}).landing == 0);
}

TEST_CASE("policy validation rejects illegal actions", "[game]") {
    GameParams gp{Model::immediate, 0.3, 3, 0};
    StateGrid grid = StateGrid::of(gp);
    const Policy good = frontier_policy(gp);

    Policy bad = good;
    bad.actions[grid.index({0, 3})] = mine_action();  // mining once b = d
    CHECK_THROWS_AS(validate_policy(bad), std::invalid_argument);

    bad = good;
    bad.actions[grid.index({0, 2})] = capitulate_to(2);  // landing must be < b
    CHECK_THROWS_AS(validate_policy(bad), std::invalid_argument);

    bad = good;
    bad.actions[grid.index({0, 2})] = capitulate_to(-1);
    CHECK_THROWS_AS(validate_policy(bad), std::invalid_argument);

    bad = good;
    bad.actions[grid.index({0, 2})] = release_action();  // immediate has no release
    CHECK_THROWS_AS(validate_policy(bad), std::invalid_argument);

    bad = good;
    bad.actions.pop_back();  // wrong table size
    CHECK_THROWS_AS(validate_policy(bad), std::invalid_argument);

    GameParams sp{Model::strategic, 0.3, 3, 5};
    StateGrid sgrid = StateGrid::of(sp);
    const Policy sgood = frontier_policy(sp);
    CHECK_NOTHROW(validate_policy(sgood));

    Policy sbad = sgood;
    sbad.actions[sgrid.index({5, 1})] = mine_action();  // mining at the cap
    CHECK_THROWS_AS(validate_policy(sbad), std::invalid_argument);

    sbad = sgood;
    sbad.actions[sgrid.index({1, 1})] = release_action();  // release needs a >= b + 1
    CHECK_THROWS_AS(validate_policy(sbad), std::invalid_argument);
}

TEST_CASE("compact expansion honors forced rows", "[game]") {
    GameParams sp{Model::strategic, 0.3, 4, 6};
    Policy pol = expand(CompactPolicy{{{0, 0}, {1, 1}}, 1}, sp);
    CHECK_NOTHROW(validate_policy(pol));
    CHECK(pol.at({1, 1}).kind == ActionKind::mine);
    // capped column releases when it can
    CHECK(pol.at({6, 2}).kind == ActionKind::release);
    // defender cap forces capitulation, landing clamped to b - 1 when needed
    CHECK(pol.at({2, 4}).kind == ActionKind::capitulate);
    CHECK(pol.at({2, 4}).landing == 1);
    Policy low = expand(CompactPolicy{{{0, 0}}, 3}, sp);
    CHECK(low.at({0, 1}).landing == 0);  // min(3, b-1)
    CHECK(low.at({0, 4}).landing == 3);
}
