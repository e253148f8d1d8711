#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "advgame/game.hpp"
#include "advgame/saa.hpp"

namespace advgame {

/// 101 vectors v_r; type 1 gains r and loses 30 (r mod 10) when caught, type 2 mirrors it.
struct Game1Params {
    double theta0 = 0.2;
    double p_attack = 0.2;
    std::vector<double> priors{0.5, 0.5};
    double false_alarm_cost = 140.0;
};

/// Integer transaction amounts 0..max_amount with U^u = A, U^d = 0 and c_fa = ell * A.
struct Game2Params {
    double ell = 0.05;
    int max_amount = 25691;
    double mean_amount = 88.0;
    double p_attack = 0.00172;
};

/// 2^k binary feature vectors with uniform [10, 20] payoffs and a random P0.
struct Game3Params {
    int k = 10;
    int m = 4;
    double p_attack = 0.1;
    std::uint64_t seed = 0;
    bool features = false;  // store the k bits of each id as its feature tuple
};

inline constexpr int kGame3MaxK = 24;

/// Binomial(n, p) probabilities for 0..n.
std::vector<double> binomial_pmf(int n, double p);

GameSpec make_game1(const Game1Params& params = {});
GameSpec make_game2(const Game2Params& params = {});
GameSpec make_game3(const Game3Params& params = {});

struct FraudData {
    GameSpec game;
    std::vector<SampleRecord> samples;
    std::size_t rows = 0;
    std::size_t attacks = 0;
    double mean_amount = 0.0;
    int max_amount = 0;
};

/// Reads a transactions CSV with Amount and Class columns. Amounts are floored to integer ids.
FraudData ingest_fraud_csv(const std::filesystem::path& path, double ell);

}  // namespace advgame
