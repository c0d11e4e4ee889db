#include "pvpbal/games/synthetic.hpp"

#include <algorithm>

#include "pvpbal/rng.hpp"

namespace pvpbal::games {

namespace {

// Complement-exact ratio: computes the smaller-score side directly and the
// other as 1 - p, so p(c1,c2) + p(c2,c1) rounds to exactly 1.
double squared_ratio(int s1, int s2) {
    const double a = static_cast<double>(s1) * s1;
    const double b = static_cast<double>(s2) * s2;
    if (s1 <= s2) return a / (a + b);
    return 1.0 - b / (b + a);
}

}  // namespace

Game parse_game(const std::string& name) {
    if (name == "simple") return Game::simple;
    if (name == "rps") return Game::rps;
    if (name == "advanced") return Game::advanced;
    throw Error("unknown game '" + name + "' (expected simple|rps|advanced)");
}

const char* game_name(Game game) {
    switch (game) {
        case Game::simple:
            return "simple";
        case Game::rps:
            return "rps";
        case Game::advanced:
            return "advanced";
    }
    return "?";
}

data::Schema game_schema(Game game) { return data::Schema::builtin(game_name(game)); }

double simple_win_prob(const SimpleComp& c1, const SimpleComp& c2) {
    return squared_ratio(c1.score(), c2.score());
}

double rps_win_value(RpsCategory c1, RpsCategory c2) {
    const int a = static_cast<int>(c1);
    const int b = static_cast<int>(c2);
    if (rps_beats(a, b)) return 1.0;
    if (rps_beats(b, a)) return 0.0;
    return 0.5;
}

double advanced_win_prob(const AdvancedComp& c1, const AdvancedComp& c2) {
    const int t1 = c1.category();
    const int t2 = c2.category();
    int s1 = c1.base.score();
    int s2 = c2.base.score();
    if (rps_beats(t1, t2))
        s1 += 60;
    else if (rps_beats(t2, t1))
        s2 += 60;
    return squared_ratio(s1, s2);
}

data::Features encode(const SimpleComp& comp) {
    data::Features f(20, 0.0f);
    for (int e : comp.elements) f[e - 1] = 1.0f;
    return f;
}

data::Features encode(RpsCategory category) {
    data::Features f(3, 0.0f);
    f[static_cast<int>(category)] = 1.0f;
    return f;
}

data::Features encode(const AdvancedComp& comp) {
    data::Features f = encode(comp.base);
    f.resize(23, 0.0f);
    f[20 + comp.category()] = 1.0f;
    return f;
}

SimpleComp decode_simple(const data::Features& f) {
    SimpleComp comp{};
    int n = 0;
    for (int i = 0; i < 20 && i < static_cast<int>(f.size()); ++i) {
        if (f[i] == 1.0f) {
            if (n == 3) throw SchemaError("more than 3 elements set");
            comp.elements[n++] = i + 1;
        }
    }
    if (n != 3) throw SchemaError("expected exactly 3 elements set");
    return comp;
}

RpsCategory decode_rps(const data::Features& f) {
    for (int i = 0; i < 3; ++i) {
        if (f.at(i) == 1.0f) return static_cast<RpsCategory>(i);
    }
    throw SchemaError("no category set in RPS encoding");
}

AdvancedComp decode_advanced(const data::Features& f) {
    if (f.size() != 23) throw SchemaError("advanced encoding must have 23 entries");
    AdvancedComp comp{decode_simple(data::Features(f.begin(), f.begin() + 20))};
    for (int i = 0; i < 3; ++i) {
        if (f[20 + i] == 1.0f && comp.category() != i)
            throw SchemaError("category one-hot inconsistent with element sum");
    }
    return comp;
}

std::vector<data::Features> enumerate_comps(Game game) {
    std::vector<data::Features> all;
    switch (game) {
        case Game::rps:
            for (int i = 0; i < 3; ++i) all.push_back(encode(static_cast<RpsCategory>(i)));
            break;
        case Game::simple:
        case Game::advanced:
            for (int a = 1; a <= 18; ++a)
                for (int b = a + 1; b <= 19; ++b)
                    for (int c = b + 1; c <= 20; ++c) {
                        const SimpleComp comp{{a, b, c}};
                        all.push_back(game == Game::simple ? encode(comp)
                                                           : encode(AdvancedComp{comp}));
                    }
            break;
    }
    return all;
}

double oracle_win_prob(Game game, const data::Features& a, const data::Features& b) {
    switch (game) {
        case Game::simple:
            return simple_win_prob(decode_simple(a), decode_simple(b));
        case Game::rps:
            return rps_win_value(decode_rps(a), decode_rps(b));
        case Game::advanced:
            return advanced_win_prob(decode_advanced(a), decode_advanced(b));
    }
    throw Error("bad game");
}

data::Dataset generate_dataset(Game game, std::size_t n_matches, std::uint64_t seed,
                               std::size_t comp_pool) {
    if (n_matches == 0) throw SizeError("n_matches must be >= 1");
    std::vector<data::Features> pool = enumerate_comps(game);
    Rng rng(seed);
    if (comp_pool > 0 && comp_pool < pool.size()) {
        if (comp_pool < 2) throw SizeError("comp_pool must be >= 2");
        rng.shuffle(pool);
        pool.resize(comp_pool);
    }

    data::Dataset::Builder builder(game_schema(game),
                                   std::string(game_name(game)) + ":n=" +
                                       std::to_string(n_matches) +
                                       ":seed=" + std::to_string(seed));
    std::vector<std::uint32_t> ids;
    ids.reserve(pool.size());
    for (const auto& comp : pool) ids.push_back(builder.intern(comp));

    const std::size_t m = pool.size();
    for (std::size_t i = 0; i < n_matches; ++i) {
        const std::size_t a = rng.next_below(m);
        std::size_t b = a;
        while (b == a) b = rng.next_below(m);
        double outcome;
        if (game == Game::rps) {
            outcome = oracle_win_prob(game, pool[a], pool[b]);
        } else {
            const double p = oracle_win_prob(game, pool[a], pool[b]);
            outcome = rng.next_bernoulli(p) ? 1.0 : 0.0;
        }
        builder.add_indexed(ids[a], ids[b], outcome);
    }
    return builder.build();
}

}  // namespace pvpbal::games
