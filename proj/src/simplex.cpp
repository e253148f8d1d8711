#include "advgame/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advgame/error.hpp"

namespace advgame::lp {

LinearProgram::LinearProgram(std::size_t num_vars) : objective_(num_vars, 0.0) {}

void LinearProgram::set_objective(std::size_t var, double coef) {
    if (var >= objective_.size()) throw Error(ErrorKind::InvalidArgument, "objective variable out of range");
    objective_[var] = coef;
}

void LinearProgram::add_constraint(std::vector<Term> terms, Relation relation, double rhs) {
    for (const Term& t : terms) {
        if (t.var >= objective_.size()) throw Error(ErrorKind::InvalidArgument, "constraint variable out of range");
    }
    rows_.push_back({std::move(terms), relation, rhs});
}

std::string_view to_string(Status status) {
    switch (status) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::PivotLimit: return "pivot limit";
    }
    return "unknown";
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Rows 0..rows-1 are constraints, row `rows` is the objective row holding reduced costs
// d_j (entering candidates have d_j < 0) and the current objective value in the rhs column.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(cols + 1), cells_((rows + 1) * stride_, 0.0),
          basis_(rows, kNone), may_enter_(cols, 1) {}

    double& at(std::size_t r, std::size_t c) { return cells_[r * stride_ + c]; }
    double at(std::size_t r, std::size_t c) const { return cells_[r * stride_ + c]; }
    double& rhs(std::size_t r) { return cells_[r * stride_ + cols_]; }
    double& cost(std::size_t c) { return at(rows_, c); }
    double& value() { return rhs(rows_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::vector<char>& may_enter() { return may_enter_; }

    void pivot(std::size_t r, std::size_t s) {
        double* prow = &cells_[r * stride_];
        const double inv = 1.0 / prow[s];
        nonzero_.clear();
        for (std::size_t j = 0; j < stride_; ++j) {
            if (prow[j] != 0.0) {
                prow[j] *= inv;
                nonzero_.push_back(j);
            }
        }
        prow[s] = 1.0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            double* row = &cells_[i * stride_];
            const double f = row[s];
            if (f == 0.0) continue;
            for (std::size_t j : nonzero_) row[j] -= f * prow[j];
            row[s] = 0.0;
        }
        basis_[r] = s;
    }

    // Removes constraint row r (used for redundant rows after phase 1).
    void drop_row(std::size_t r) {
        const std::size_t last = rows_ - 1;
        if (r != last) {
            std::copy_n(&cells_[last * stride_], stride_, &cells_[r * stride_]);
            basis_[r] = basis_[last];
        }
        std::copy_n(&cells_[rows_ * stride_], stride_, &cells_[last * stride_]);
        cells_.resize(rows_ * stride_);
        basis_.pop_back();
        --rows_;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t stride_;
    std::vector<double> cells_;
    std::vector<std::size_t> basis_;
    std::vector<char> may_enter_;
    std::vector<std::size_t> nonzero_;
};

enum class PhaseOutcome { Optimal, Unbounded, PivotLimit };

PhaseOutcome run_phase(Tableau& t, const SimplexOptions& options, std::size_t& pivots) {
    bool bland = options.rule == PivotRule::Bland;
    std::size_t stall = 0;
    auto& basis = t.basis();
    auto& may_enter = t.may_enter();
    for (;;) {
        std::size_t enter = kNone;
        double most_negative = -options.optimality_tol;
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (!may_enter[j]) continue;
            const double d = t.cost(j);
            if (bland) {
                if (d < -options.optimality_tol) {
                    enter = j;
                    break;
                }
            } else if (d < most_negative) {
                most_negative = d;
                enter = j;
            }
        }
        if (enter == kNone) return PhaseOutcome::Optimal;

        std::size_t leave = kNone;
        double best_ratio = 0.0;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= options.pivot_tol) continue;
            const double ratio = std::max(t.rhs(i), 0.0) / a;
            if (leave == kNone) {
                leave = i;
                best_ratio = ratio;
                continue;
            }
            const double slack = 1e-12 * (1.0 + std::abs(best_ratio));
            if (ratio < best_ratio - slack || (ratio <= best_ratio + slack && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = std::min(ratio, best_ratio);
            }
        }
        if (leave == kNone) return PhaseOutcome::Unbounded;
        if (++pivots > options.max_pivots) return PhaseOutcome::PivotLimit;

        if (!bland) {
            stall = best_ratio <= options.feasibility_tol ? stall + 1 : 0;
            if (stall >= options.degenerate_stall) bland = true;
        }
        t.pivot(leave, enter);
        for (std::size_t i = 0; i < t.rows(); ++i) {
            if (t.rhs(i) < 0.0 && t.rhs(i) > -options.feasibility_tol) t.rhs(i) = 0.0;
        }
    }
}

}  // namespace

Result maximize(const LinearProgram& program, const SimplexOptions& options) {
    const std::size_t n = program.num_vars();
    const auto& rows = program.rows();
    const std::size_t r_count = rows.size();

    // Normalize: scale each row by its largest coefficient, make rhs >= 0.
    struct NormRow {
        std::vector<Term> terms;
        Relation relation;
        double rhs;
    };
    std::vector<NormRow> norm;
    norm.reserve(r_count);
    std::size_t slack_count = 0;
    std::size_t artificial_count = 0;
    for (const auto& row : rows) {
        double scale = 0.0;
        for (const Term& t : row.terms) scale = std::max(scale, std::abs(t.coef));
        if (scale == 0.0) scale = 1.0;
        NormRow nr{row.terms, row.relation, row.rhs / scale};
        for (Term& t : nr.terms) t.coef /= scale;
        if (nr.rhs < 0.0) {
            nr.rhs = -nr.rhs;
            for (Term& t : nr.terms) t.coef = -t.coef;
            if (nr.relation == Relation::LessEqual) {
                nr.relation = Relation::GreaterEqual;
            } else if (nr.relation == Relation::GreaterEqual) {
                nr.relation = Relation::LessEqual;
            }
        }
        if (nr.relation != Relation::Equal) ++slack_count;
        if (nr.relation != Relation::LessEqual) ++artificial_count;
        norm.push_back(std::move(nr));
    }

    const std::size_t slack_base = n;
    const std::size_t art_base = n + slack_count;
    const std::size_t cols = n + slack_count + artificial_count;
    Tableau t(r_count, cols);

    std::size_t next_slack = slack_base;
    std::size_t next_art = art_base;
    for (std::size_t r = 0; r < r_count; ++r) {
        const NormRow& nr = norm[r];
        for (const Term& term : nr.terms) t.at(r, term.var) += term.coef;
        t.rhs(r) = nr.rhs;
        switch (nr.relation) {
            case Relation::LessEqual:
                t.at(r, next_slack) = 1.0;
                t.basis()[r] = next_slack++;
                break;
            case Relation::GreaterEqual:
                t.at(r, next_slack++) = -1.0;
                t.at(r, next_art) = 1.0;
                t.basis()[r] = next_art++;
                break;
            case Relation::Equal:
                t.at(r, next_art) = 1.0;
                t.basis()[r] = next_art++;
                break;
        }
    }

    Result result;
    double rhs_scale = 1.0;
    for (const auto& nr : norm) rhs_scale = std::max(rhs_scale, nr.rhs);

    if (artificial_count > 0) {
        // Phase 1: maximize -sum(artificials).
        for (std::size_t j = art_base; j < cols; ++j) t.cost(j) = 1.0;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            if (t.basis()[r] < art_base) continue;
            for (std::size_t j = 0; j <= cols; ++j) t.at(t.rows(), j) -= t.at(r, j);
        }
        const PhaseOutcome outcome = run_phase(t, options, result.pivots);
        if (outcome == PhaseOutcome::PivotLimit) {
            result.status = Status::PivotLimit;
            return result;
        }
        if (t.value() < -options.feasibility_tol * rhs_scale) {
            result.status = Status::Infeasible;
            return result;
        }
        // Drive remaining (zero-level) artificials out of the basis.
        for (std::size_t r = 0; r < t.rows();) {
            if (t.basis()[r] < art_base) {
                ++r;
                continue;
            }
            std::size_t enter = kNone;
            double best = options.pivot_tol;
            for (std::size_t j = 0; j < art_base; ++j) {
                if (std::abs(t.at(r, j)) > best) {
                    best = std::abs(t.at(r, j));
                    enter = j;
                }
            }
            if (enter == kNone) {
                t.drop_row(r);
            } else {
                t.pivot(r, enter);
                ++r;
            }
        }
        for (std::size_t j = art_base; j < cols; ++j) t.may_enter()[j] = 0;
    }

    // Phase 2 with the objective scaled to unit max magnitude.
    const auto& c = program.objective();
    double c_scale = 0.0;
    for (double v : c) c_scale = std::max(c_scale, std::abs(v));
    if (c_scale == 0.0) c_scale = 1.0;
    for (std::size_t j = 0; j <= cols; ++j) t.cost(j) = 0.0;
    for (std::size_t j = 0; j < n; ++j) t.cost(j) = -c[j] / c_scale;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const std::size_t b = t.basis()[r];
        const double f = t.cost(b);
        if (f == 0.0) continue;
        for (std::size_t j = 0; j <= cols; ++j) t.at(t.rows(), j) -= f * t.at(r, j);
    }

    const PhaseOutcome outcome = run_phase(t, options, result.pivots);
    if (outcome == PhaseOutcome::PivotLimit) {
        result.status = Status::PivotLimit;
        return result;
    }
    if (outcome == PhaseOutcome::Unbounded) {
        result.status = Status::Unbounded;
        return result;
    }

    result.status = Status::Optimal;
    result.x.assign(n, 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const std::size_t b = t.basis()[r];
        if (b < n) result.x[b] = std::max(t.rhs(r), 0.0);
    }
    result.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
    return result;
}

}  // namespace advgame::lp
