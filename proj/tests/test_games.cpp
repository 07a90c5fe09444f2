#include <gtest/gtest.h>

#include <cmath>

#include "dptkit/games.hpp"

using namespace dptkit;

namespace {

GamePredicate always_true(std::size_t players = 2) {
    std::vector<LabelSet> in(players, LabelSet{"0", "1"}), out(players, LabelSet{"0", "1"});
    const std::size_t n = std::size_t{1} << players;
    return GamePredicate("true", in, out, std::vector<double>(n, 1.0 / n), [](std::size_t, std::size_t) { return true; });
}

ComplexMatrix projector_at_angle(double theta) {
    const CVector v{std::cos(theta), std::sin(theta)};
    return ComplexMatrix::outer(v);
}

// Textbook optimal CHSH strategy on |Phi+>: Alice at angles 0, pi/4; Bob at +-pi/8.
QuantumStrategy tsirelson() {
    auto binary = [](double theta) {
        const auto p = projector_at_angle(theta);
        return std::vector<ComplexMatrix>{p, ComplexMatrix::identity(2) - p};
    };
    const double pi = std::acos(-1.0);
    return QuantumStrategy(PureState::normalized({1.0, 0.0, 0.0, 1.0}), SubsystemSpec({2, 2}),
                           {{binary(0.0), binary(pi / 4)}, {binary(pi / 8), binary(-pi / 8)}});
}

// Oracle: brute force over every deterministic strategy tuple.
double brute_force_classical(const GamePredicate& g) {
    std::vector<std::size_t> counts;
    for (std::size_t j = 0; j < g.players(); ++j)
        counts.push_back(static_cast<std::size_t>(std::pow(g.output_size(j), g.input_size(j))));
    const MixedRadix tuples(counts);
    double best = 0.0;
    for (std::size_t t = 0; t < tuples.total(); ++t) {
        ClassicalStrategy s;
        for (std::size_t j = 0; j < g.players(); ++j) {
            std::size_t code = tuples.digit(t, j);
            std::vector<std::size_t> map(g.input_size(j));
            for (auto& a : map) {
                a = code % g.output_size(j);
                code /= g.output_size(j);
            }
            s.maps.push_back(map);
        }
        best = std::max(best, evaluate_classical_strategy(g, s));
    }
    return best;
}

} // namespace

TEST(MagicSquare, Shape) {
    const auto g = magic_square();
    EXPECT_EQ(g.output_size(0), 4u);
    EXPECT_EQ(g.output_size(1), 4u);
    EXPECT_DOUBLE_EQ(g.prob(1 * 3 + 2), 1.0 / 9);
    // a = 000, b = 100 at x = y = 0: a[0] = 0, b[0] = 1.
    const std::size_t a = 0, b = 2;
    ASSERT_EQ(ms_bob_outputs()[b], "100");
    EXPECT_FALSE(g.wins(a * 4 + b, 0));
    for (const auto& s : ms_alice_outputs()) EXPECT_EQ((s[0] - '0') ^ (s[1] - '0') ^ (s[2] - '0'), 0);
    for (const auto& s : ms_bob_outputs()) EXPECT_EQ((s[0] - '0') ^ (s[1] - '0') ^ (s[2] - '0'), 1);
}

TEST(Mse, Shape) {
    const auto g = mse();
    EXPECT_EQ(g.players(), 3u);
    EXPECT_EQ(g.output_size(2), 36u);
    EXPECT_EQ(g.input_size(0), 6u);
    EXPECT_EQ(g.input_size(2), 1u);
}

TEST(Mse, PerfectPairWithEveGuessingZeroZero) {
    // Alice and Bob play a deterministic strategy that wins MS at (0,0); Eve
    // outputs (0,0,0,c) with c = a[0]. Only inputs with x = y = 0 can win,
    // and both values of z do: probability 2/18 = 1/9.
    const auto g = mse();
    const auto ms = classical_value(magic_square());
    ASSERT_TRUE(ms.classical);
    const std::size_t a00 = ms.classical->maps[0][0];
    const std::size_t b00 = ms.classical->maps[1][0];
    const int c = ms_alice_outputs()[a00][0] - '0';
    ClassicalStrategy s;
    s.maps.push_back(std::vector<std::size_t>(6, a00));
    s.maps.push_back(std::vector<std::size_t>(3, b00));
    s.maps.push_back({static_cast<std::size_t>(c)});  // eve label "000c"
    ASSERT_EQ(g.output_labels(2)[s.maps[2][0]], "000" + std::to_string(c));
    EXPECT_NEAR(evaluate_classical_strategy(g, s), 1.0 / 9, 1e-12);
}

TEST(Chsh, PredicateAndValues) {
    const auto g = chsh();
    EXPECT_FALSE(g.wins(0, 3));  // a = b = 0, x = y = 1
    EXPECT_NEAR(classical_value(g).value, 0.75, 1e-12);
    EXPECT_NEAR(classical_value(g).value, brute_force_classical(g), 1e-12);
    const double tsirelson_value = std::pow(std::cos(std::acos(-1.0) / 8), 2);
    EXPECT_NEAR(evaluate_quantum_strategy(g, tsirelson()), tsirelson_value, 1e-9);
}

TEST(ClassicalValue, MagicSquareIsEightNinths) {
    const auto r = classical_value(magic_square());
    EXPECT_NEAR(r.value, 8.0 / 9.0, 1e-12);
    EXPECT_EQ(r.kind, GameValueResult::Kind::exact);
    ASSERT_TRUE(r.classical);
    EXPECT_NEAR(evaluate_classical_strategy(magic_square(), *r.classical), r.value, 1e-15);
}

TEST(ClassicalValue, AlwaysTrueIsOne) {
    EXPECT_NEAR(classical_value(always_true(3)).value, 1.0, 1e-15);
}

TEST(ClassicalValue, MatchesBruteForceOnRandomGames) {
    Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t players = 1 + uniform_index(rng, 3);
        std::vector<LabelSet> in, out;
        for (std::size_t j = 0; j < players; ++j) {
            in.push_back(detail::index_labels(1 + uniform_index(rng, 2)));
            out.push_back(detail::index_labels(1 + uniform_index(rng, 3)));
        }
        std::size_t ni = 1, no = 1;
        for (std::size_t j = 0; j < players; ++j) ni *= in[j].size(), no *= out[j].size();
        std::vector<std::uint8_t> table(ni * no);
        for (auto& t : table) t = bernoulli(rng, 0.5);
        const GamePredicate g("random", in, out, random_distribution(rng, ni), table);
        EXPECT_NEAR(classical_value(g).value, brute_force_classical(g), 1e-12);
    }
}

TEST(ClassicalValue, BudgetIsEnforced) {
    EXPECT_THROW(classical_value(magic_square(), 100.0), BudgetExceeded);
}

TEST(CanonicalStrategy, WinsMagicSquarePerfectly) {
    const auto s = canonical_ms_strategy();
    EXPECT_GE(evaluate_quantum_strategy(magic_square(), s), 1.0 - 1e-9);
}

TEST(CanonicalStrategy, RowObservablesCommute) {
    const auto square = detail::mermin_peres_square();
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) {
                const auto& p = square[r][a];
                const auto& q = square[r][b];
                EXPECT_LT((p * q - q * p).max_abs(), 1e-15);
                const auto& u = square[a][r];
                const auto& v = square[b][r];
                EXPECT_LT((u * v - v * u).max_abs(), 1e-15);
            }
        EXPECT_LT((square[r][0] * square[r][1] * square[r][2] - ComplexMatrix::identity(4)).max_abs(), 1e-15);
        EXPECT_LT((square[0][r] * square[1][r] * square[2][r] + ComplexMatrix::identity(4)).max_abs(), 1e-15);
    }
}

TEST(CanonicalStrategy, CorrelationIsNormalizedAndConsistent) {
    const auto g = magic_square();
    const auto q = quantum_correlation(g, canonical_ms_strategy());
    for (std::size_t i = 0; i < g.num_inputs(); ++i) {
        EXPECT_NEAR(q.mass(i), 1.0, 1e-9);
        for (std::size_t o = 0; o < g.num_outputs(); ++o) EXPECT_GE(q.at(o, i), 0.0);
    }
    EXPECT_NEAR(correlation_value(g, q), 1.0, 1e-9);
}

TEST(QuantumStrategy, RejectsBrokenPovm) {
    const auto half = ComplexMatrix::identity(2) * 0.5;
    EXPECT_THROW(QuantumStrategy(PureState::normalized({1.0, 0.0, 0.0, 1.0}), SubsystemSpec({2, 2}),
                                 {{{half, half * 0.9}, {half, half}}, {{half, half}, {half, half}}}),
                 DomainError);
    EXPECT_NEAR(evaluate_quantum_strategy(always_true(), tsirelson()), 1.0, 1e-12);
}

TEST(Seesaw, ChshReachesTsirelson) {
    const auto r = seesaw(chsh(), {2, 2});
    EXPECT_GE(r.value, 0.8535);
    EXPECT_LE(r.value, 1.0 + 1e-9);
    EXPECT_EQ(r.kind, GameValueResult::Kind::lower_bound);
    ASSERT_TRUE(r.quantum);
    EXPECT_NEAR(evaluate_quantum_strategy(chsh(), *r.quantum), r.value, 1e-9);
    EXPECT_LE(classical_value(chsh()).value, r.value + 1e-6);
}

TEST(Seesaw, MagicSquareReachesOne) {
    const auto r = seesaw(magic_square(), {4, 4});
    EXPECT_GE(r.value, 1.0 - 1e-6);
    EXPECT_LE(classical_value(magic_square()).value, r.value + 1e-6);
}

TEST(Seesaw, HistoryIsMonotone) {
    SeesawOptions opt;
    opt.restarts = 5;
    for (const auto& g : {chsh(), magic_square()}) {
        const auto r = seesaw(g, {}, opt);
        for (const auto& h : r.history)
            for (std::size_t k = 1; k < h.size(); ++k) EXPECT_GE(h[k], h[k - 1] - 1e-12);
    }
}

TEST(Repeat, OneCopyIsIdentity) {
    const auto g = chsh();
    const auto r = repeat(g, 1);
    EXPECT_EQ(r.num_inputs(), g.num_inputs());
    for (std::size_t o = 0; o < g.num_outputs(); ++o)
        for (std::size_t i = 0; i < g.num_inputs(); ++i) EXPECT_EQ(r.wins(o, i), g.wins(o, i));
}

TEST(Repeat, MagicSquareSquared) {
    const auto g = magic_square();
    const auto r = repeat(g, 2);
    EXPECT_EQ(r.output_size(0), 16u);
    EXPECT_EQ(r.output_size(1), 16u);
    EXPECT_EQ(r.input_labels(0)[5], "1,2");
    // Product of the optimal single-copy strategy.
    const auto single = *classical_value(g).classical;
    ClassicalStrategy prod;
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<std::size_t> map(9);
        for (std::size_t x = 0; x < 9; ++x) map[x] = single.maps[j][x / 3] * 4 + single.maps[j][x % 3];
        prod.maps.push_back(map);
    }
    EXPECT_NEAR(evaluate_classical_strategy(r, prod), std::pow(8.0 / 9.0, 2), 1e-12);
}

TEST(Repeat, ValueDoesNotIncreaseForChsh) {
    const auto g = chsh();
    EXPECT_LE(classical_value(repeat(g, 2)).value, classical_value(g).value + 1e-12);
}

TEST(Repeat, LargeTablesUseCallable) {
    const auto r = repeat(chsh(), 2, 10);
    EXPECT_FALSE(r.is_dense());
    const auto dense = repeat(chsh(), 2);
    for (std::size_t o = 0; o < r.num_outputs(); ++o)
        for (std::size_t i = 0; i < r.num_inputs(); ++i) EXPECT_EQ(r.wins(o, i), dense.wins(o, i));
}

TEST(RandomSubsetValue, Examples) {
    const auto g = magic_square();
    const auto perfect = quantum_correlation(g, canonical_ms_strategy());
    EXPECT_EQ(random_subset_value(g, 10, 0, product_sampler(perfect), 10, 1), 1.0);
    EXPECT_EQ(random_subset_value(g, 10, 5, product_sampler(perfect), 1000, 1), 1.0);

    const auto classical = classical_correlation(g, *classical_value(g).classical);
    const std::size_t trials = 100000;
    const double est = random_subset_value(g, 10, 5, product_sampler(classical), trials, 7);
    const double expect = std::pow(8.0 / 9.0, 5);
    EXPECT_NEAR(est, expect, 3 * std::sqrt(expect * (1 - expect) / trials));
}

TEST(Properties, StrategyCorrelationsAreNormalized) {
    Rng rng(12);
    for (const auto& g : {chsh(), magic_square()}) {
        SeesawOptions opt;
        opt.restarts = 2;
        opt.seed = 3;
        const auto q = quantum_correlation(g, *seesaw(g, {}, opt).quantum);
        ClassicalStrategy s;
        for (std::size_t j = 0; j < g.players(); ++j) {
            std::vector<std::size_t> map(g.input_size(j));
            for (auto& a : map) a = uniform_index(rng, g.output_size(j));
            s.maps.push_back(map);
        }
        const auto c = classical_correlation(g, s);
        for (std::size_t i = 0; i < g.num_inputs(); ++i) {
            EXPECT_NEAR(q.mass(i), 1.0, 1e-9);
            EXPECT_NEAR(c.mass(i), 1.0, 1e-15);
            for (double x : q.q) EXPECT_GE(x, 0.0);
        }
    }
}
