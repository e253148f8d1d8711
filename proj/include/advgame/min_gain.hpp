#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "advgame/game.hpp"
#include "advgame/simplex.hpp"

namespace advgame {

/// Concave piecewise-linear objective shared by the defender LP, the SAA LP and the
/// hindsight comparator of the online learner:
///
///   F(G) = -sum_i q_i G_i - sum_k w_k max{0, max_i (a_ki - G_i) / d_ki}
///
/// over a box. Entries with d_ki = 0 are inert and never enter the inner max.
class MinGainProblem {
public:
    MinGainProblem(std::vector<double> type_weights, Box box);

    std::size_t num_types() const noexcept { return type_weights_.size(); }
    std::size_t num_items() const noexcept { return item_weights_.size(); }
    const Box& box() const noexcept { return box_; }
    std::span<const double> type_weights() const noexcept { return type_weights_; }
    double item_weight(std::size_t k) const { return item_weights_[k]; }
    double gain(std::size_t k, std::size_t i) const { return gains_[k * num_types() + i]; }
    double span(std::size_t k, std::size_t i) const { return spans_[k * num_types() + i]; }

    void add_item(double weight, std::span<const double> gains, std::span<const double> spans);

    /// Merges items with identical payoffs by summing their weights.
    void merge_duplicates();

    double detection(std::size_t k, std::span<const double> g) const;
    double value(std::span<const double> g) const;
    std::vector<double> supergradient(std::span<const double> g) const;

private:
    std::vector<double> type_weights_;
    Box box_;
    std::vector<double> item_weights_;
    std::vector<double> gains_;
    std::vector<double> spans_;
};

enum class MinGainMethod {
    Auto,           // dense simplex when the tableau is small, interior point otherwise
    DirectSimplex,  // one exact LP over the whole box
    InteriorPoint,  // interior point, then exact trust-region LP polish
};

struct MinGainOptions {
    MinGainMethod method = MinGainMethod::Auto;
    std::size_t direct_cell_limit = 2'000'000;
    std::size_t polish_item_limit = 2'500;
    int ipm_max_iterations = 200;
    double ipm_tolerance = 1e-10;
    int polish_max_rounds = 60;
    lp::SimplexOptions simplex{};
};

struct MinGainResult {
    std::vector<double> g;
    double value = 0.0;
    std::string method;
    int ipm_iterations = 0;
    int polish_rounds = 0;
    std::size_t pivots = 0;
    bool certified = false;  // exact LP confirmed no better point nearby
};

MinGainResult maximize_min_gain(const MinGainProblem& problem, const MinGainOptions& options = {});

/// Interior-point stage alone; returns an approximate maximizer inside the box.
std::vector<double> interior_point_center(const MinGainProblem& problem, const MinGainOptions& options,
                                          int* iterations = nullptr);

}  // namespace advgame
