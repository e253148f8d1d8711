#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace advgame::lp {

enum class Relation { LessEqual, GreaterEqual, Equal };

struct Term {
    std::size_t var;
    double coef;
};

/// maximize c^T x  subject to  rows,  x >= 0.
class LinearProgram {
public:
    explicit LinearProgram(std::size_t num_vars);

    std::size_t num_vars() const noexcept { return objective_.size(); }
    std::size_t num_constraints() const noexcept { return rows_.size(); }

    void set_objective(std::size_t var, double coef);
    void add_constraint(std::vector<Term> terms, Relation relation, double rhs);

    struct Row {
        std::vector<Term> terms;
        Relation relation;
        double rhs;
    };
    const std::vector<double>& objective() const noexcept { return objective_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }

private:
    std::vector<double> objective_;
    std::vector<Row> rows_;
};

enum class Status { Optimal, Infeasible, Unbounded, PivotLimit };

std::string_view to_string(Status status);

enum class PivotRule {
    Bland,                     // lowest-index entering column throughout
    DantzigWithBlandFallback,  // steepest reduced cost until a degenerate stall, then Bland
};

struct SimplexOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-11;
    std::size_t max_pivots = 2'000'000;
    PivotRule rule = PivotRule::Bland;
    std::size_t degenerate_stall = 50;  // consecutive degenerate pivots before falling back to Bland
};

struct Result {
    Status status = Status::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

/// Two-phase primal simplex on a dense tableau.
Result maximize(const LinearProgram& program, const SimplexOptions& options = {});

}  // namespace advgame::lp
