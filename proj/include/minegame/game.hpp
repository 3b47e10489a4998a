#ifndef MINEGAME_GAME_HPP
#define MINEGAME_GAME_HPP

#include <stdexcept>
#include <string>
#include <vector>

// Two-miner chain race.  Miner 1 (hash share p) withholds a private branch of
// length a against the honest branch of length b.  In the immediate model a
// fresh lead a = b+1 is published on the spot and ends the race; in the
// strategic model miner 1 decides when to release.  An honest branch of
// length d forces capitulation (truncation).

namespace minegame {

enum class Model { immediate, strategic };

struct GameParams {
  Model model = Model::immediate;
  double p = 0.25;
  int d = 2;
  int a_max = 0;  // strategic lead cap; 0 selects the default 2d+2
};

inline int effective_a_max(const GameParams& gp) {
  return gp.a_max > 0 ? gp.a_max : 2 * gp.d + 2;
}

inline void validate_params(const GameParams& gp) {
  if (!(gp.p >= 0.0 && gp.p < 1.0))
    throw std::invalid_argument("p out of range: need 0 <= p < 1");
  if (gp.d < 2) throw std::invalid_argument("d must be at least 2");
  if (gp.model == Model::immediate && gp.a_max != 0)
    throw std::invalid_argument("a_max applies to the strategic model only");
  if (gp.model == Model::strategic && effective_a_max(gp) < gp.d + 2)
    throw std::invalid_argument("a_max must be at least d + 2");
}

struct GameState {
  int a = 0;
  int b = 0;
  friend bool operator==(GameState, GameState) = default;
};

inline void validate_state(const GameParams& gp, GameState s) {
  if (s.a < 0 || s.b < 0 || s.b > gp.d)
    throw std::invalid_argument("state outside the truncated grid");
  if (gp.model == Model::immediate && s.a > s.b + 1)
    throw std::invalid_argument("immediate model requires a <= b + 1");
  if (gp.model == Model::strategic && s.a > effective_a_max(gp))
    throw std::invalid_argument("a exceeds a_max");
}

enum class StateClass { winning, forced_capitulation, choice };

inline StateClass classify(const GameParams& gp, GameState s) {
  validate_state(gp, s);
  if (gp.model == Model::immediate && s.a == s.b + 1) return StateClass::winning;
  if (s.b == gp.d) return StateClass::forced_capitulation;
  return StateClass::choice;
}

enum class ActionKind { mine, capitulate, release };

struct Action {
  ActionKind kind = ActionKind::mine;
  int landing = 0;  // capitulation target (0, landing); ignored otherwise
  friend bool operator==(Action, Action) = default;
};

inline Action mine_action() { return {ActionKind::mine, 0}; }
inline Action capitulate_to(int s) { return {ActionKind::capitulate, s}; }
inline Action release_action() { return {ActionKind::release, 0}; }

enum class Winner { miner1, miner2 };

struct Transition {
  GameState next;
  int levels_advanced = 0;
  int miner1_paid = 0;
  int miner2_paid = 0;
};

// One decision epoch.  Mine consumes a block draw (winner); the other two
// actions resolve before any drawing happens.  Every paid block corresponds
// to exactly one advanced level once the race is settled.
inline Transition step(const GameParams& gp, GameState s, Action act,
                       Winner w = Winner::miner1) {
  validate_state(gp, s);
  switch (act.kind) {
    case ActionKind::mine: {
      if (classify(gp, s) != StateClass::choice)
        throw std::invalid_argument("mine is not available in this state");
      if (w == Winner::miner1) {
        int a2 = s.a + 1;
        if (gp.model == Model::immediate && a2 == s.b + 1)
          return {{0, 0}, 1, a2, 0};  // lead published, whole branch adopted
        if (gp.model == Model::strategic && a2 > effective_a_max(gp))
          throw std::invalid_argument("mine would exceed a_max");
        return {{a2, s.b}, 0, 0, 0};
      }
      return {{s.a, s.b + 1}, 1, 0, 0};
    }
    case ActionKind::capitulate: {
      if (act.landing < 0 || act.landing >= s.b)
        throw std::invalid_argument("capitulation landing needs 0 <= s < b");
      return {{0, act.landing}, 0, 0, s.b - act.landing};
    }
    case ActionKind::release: {
      if (gp.model != Model::strategic)
        throw std::invalid_argument("release requires the strategic model");
      if (s.a < s.b + 1)
        throw std::invalid_argument("release requires a >= b + 1");
      return {{s.a - s.b - 1, 0}, 1, s.b + 1, 0};
    }
  }
  throw std::logic_error("unreachable");
}

// Dense table over the truncated grid, rows indexed by b, cells by a.
// Immediate rows stop at a = b + 1; strategic rows run to a_max.
struct StateGrid {
  Model model = Model::immediate;
  int d = 2;
  int a_cap = 3;

  static StateGrid of(const GameParams& gp) {
    validate_params(gp);
    StateGrid g;
    g.model = gp.model;
    g.d = gp.d;
    g.a_cap = gp.model == Model::strategic ? effective_a_max(gp) : gp.d + 1;
    return g;
  }
  int max_a(int b) const { return model == Model::immediate ? b + 1 : a_cap; }
  int row_offset(int b) const {
    return model == Model::immediate ? b * (b + 3) / 2 : b * (a_cap + 1);
  }
  int size() const { return row_offset(d) + max_a(d) + 1; }
  int index(GameState s) const { return row_offset(s.b) + s.a; }
  bool contains(GameState s) const {
    return s.b >= 0 && s.b <= d && s.a >= 0 && s.a <= max_a(s.b);
  }
};

struct Policy {
  GameParams params;
  std::vector<Action> actions;  // grid-indexed; winning cells never consulted

  const Action& at(GameState s) const {
    return actions[StateGrid::of(params).index(s)];
  }
  friend bool operator==(const Policy& x, const Policy& y) {
    return x.params.model == y.params.model && x.params.p == y.params.p &&
           x.params.d == y.params.d && x.params.a_max == y.params.a_max &&
           x.actions == y.actions;
  }
};

// Compact (M, s) form: mine on M, otherwise capitulate to (0, min(s, b-1)).
struct CompactPolicy {
  std::vector<GameState> mining;
  int landing = 0;
};

inline Policy expand(const CompactPolicy& cp, const GameParams& gp) {
  validate_params(gp);
  StateGrid grid = StateGrid::of(gp);
  Policy pol{gp, std::vector<Action>(grid.size(), mine_action())};
  auto in_m = [&](GameState s) {
    for (GameState m : cp.mining)
      if (m == s) return true;
    return false;
  };
  for (int b = 0; b <= grid.d; ++b) {
    for (int a = 0; a <= grid.max_a(b); ++a) {
      GameState s{a, b};
      Action& act = pol.actions[grid.index(s)];
      if (gp.model == Model::immediate && a == b + 1) continue;  // winning
      if (b == gp.d) {
        act = capitulate_to(std::min(cp.landing, b - 1));
      } else if (gp.model == Model::strategic && a == grid.a_cap) {
        act = release_action();
      } else if (in_m(s)) {
        act = mine_action();
      } else if (b >= 1) {
        act = capitulate_to(std::min(cp.landing, b - 1));
      } else if (gp.model == Model::strategic && a >= 1) {
        act = release_action();
      } else {
        act = mine_action();  // (0,0) has no alternative
      }
    }
  }
  return pol;
}

// Honest play: mine at (0,0), concede the block race as soon as one block
// behind.  Earns exactly a p share per level against an honest opponent.
inline Policy frontier_policy(const GameParams& gp) {
  return expand(CompactPolicy{{{0, 0}}, 0}, gp);
}

inline void validate_policy(const Policy& pol) {
  validate_params(pol.params);
  const GameParams& gp = pol.params;
  StateGrid grid = StateGrid::of(gp);
  if (static_cast<int>(pol.actions.size()) != grid.size())
    throw std::invalid_argument("policy table size does not match the grid");
  for (int b = 0; b <= grid.d; ++b) {
    for (int a = 0; a <= grid.max_a(b); ++a) {
      GameState s{a, b};
      if (classify(gp, s) == StateClass::winning) continue;
      Action act = pol.actions[grid.index(s)];
      std::string where = " at (" + std::to_string(a) + "," + std::to_string(b) + ")";
      switch (act.kind) {
        case ActionKind::mine:
          if (b == gp.d) throw std::invalid_argument("mine at b = d" + where);
          if (gp.model == Model::strategic && a == grid.a_cap)
            throw std::invalid_argument("mine at a = a_max" + where);
          break;
        case ActionKind::capitulate:
          if (act.landing < 0 || act.landing >= b)
            throw std::invalid_argument("bad capitulation landing" + where);
          break;
        case ActionKind::release:
          if (gp.model != Model::strategic)
            throw std::invalid_argument("release in the immediate model" + where);
          if (a < b + 1)
            throw std::invalid_argument("release without a lead" + where);
          break;
      }
    }
  }
}

}  // namespace minegame

#endif  // MINEGAME_GAME_HPP
