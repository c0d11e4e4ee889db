#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pvpbal/data/dataset.hpp"

namespace pvpbal::games {

enum class Game { simple, rps, advanced };

Game parse_game(const std::string& name);
const char* game_name(Game game);
data::Schema game_schema(Game game);

// Three distinct elements из [1, 20]; stored sorted ascending.
struct SimpleComp {
    std::array<int, 3> elements;

    int score() const { return elements[0] + elements[1] + elements[2]; }
};

enum class RpsCategory : int { rock = 0, paper = 1, scissors = 2 };

// Simple Combination comp plus the score-derived counter category.
struct AdvancedComp {
    SimpleComp base;

    int category() const { return base.score() % 3; }
};

// True iff category a beats category b under Rock-Paper-Scissors
// (0=Rock, 1=Paper, 2=Scissors).
inline bool rps_beats(int a, int b) { return (b + 1) % 3 == a; }

// P(c1 beats c2) = s1^2 / (s1^2 + s2^2).
double simple_win_prob(const SimpleComp& c1, const SimpleComp& c2);

// 1 / 0.5 / 0 for win / tie / loss of c1.
double rps_win_value(RpsCategory c1, RpsCategory c2);

// Simple rule plus a +60 score bonus for the comp whose category wins the
// Rock-Paper-Scissors comparison.
double advanced_win_prob(const AdvancedComp& c1, const AdvancedComp& c2);

data::Features encode(const SimpleComp& comp);
data::Features encode(RpsCategory category);
data::Features encode(const AdvancedComp& comp);

SimpleComp decode_simple(const data::Features& f);
RpsCategory decode_rps(const data::Features& f);
AdvancedComp decode_advanced(const data::Features& f);

// Full composition space, in a fixed deterministic order (1140 for the
// combination games, 3 for Rock-Paper-Scissors).
std::vector<data::Features> enumerate_comps(Game game);

// Oracle win probability on encoded comps.
double oracle_win_prob(Game game, const data::Features& a, const data::Features& b);

// Uniformly samples match pairs from the composition space (two different
// comps per match) and draws binary outcomes from the game oracle;
// Rock-Paper-Scissors outcomes follow the rules directly. comp_pool > 0
// restricts sampling to a seeded random subset of that many comps.
data::Dataset generate_dataset(Game game, std::size_t n_matches, std::uint64_t seed,
                               std::size_t comp_pool = 0);

}  // namespace pvpbal::games
