#include "advgame/min_gain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

#include "advgame/error.hpp"

namespace advgame {

MinGainProblem::MinGainProblem(std::vector<double> type_weights, Box box)
    : type_weights_(std::move(type_weights)), box_(std::move(box)) {
    if (type_weights_.size() != box_.size()) {
        throw Error(ErrorKind::InvalidArgument, "type weights and box differ in dimension");
    }
    for (double q : type_weights_) {
        if (!(q >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative type weight");
    }
}

void MinGainProblem::add_item(double weight, std::span<const double> gains, std::span<const double> spans) {
    if (gains.size() != num_types() || spans.size() != num_types()) {
        throw Error(ErrorKind::InvalidArgument, "item payoffs have wrong dimension");
    }
    if (!(weight >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative item weight");
    item_weights_.push_back(weight);
    gains_.insert(gains_.end(), gains.begin(), gains.end());
    spans_.insert(spans_.end(), spans.begin(), spans.end());
}

void MinGainProblem::merge_duplicates() {
    const std::size_t m = num_types();
    std::map<std::vector<double>, std::size_t> seen;
    std::vector<double> weights, gains, spans;
    for (std::size_t k = 0; k < num_items(); ++k) {
        std::vector<double> key(2 * m);
        std::copy_n(&gains_[k * m], m, key.begin());
        std::copy_n(&spans_[k * m], m, key.begin() + static_cast<std::ptrdiff_t>(m));
        auto [it, fresh] = seen.emplace(std::move(key), weights.size());
        if (fresh) {
            weights.push_back(item_weights_[k]);
            gains.insert(gains.end(), &gains_[k * m], &gains_[k * m] + m);
            spans.insert(spans.end(), &spans_[k * m], &spans_[k * m] + m);
        } else {
            weights[it->second] += item_weights_[k];
        }
    }
    item_weights_ = std::move(weights);
    gains_ = std::move(gains);
    spans_ = std::move(spans);
}

double MinGainProblem::detection(std::size_t k, std::span<const double> g) const {
    double best = 0.0;
    for (std::size_t i = 0; i < num_types(); ++i) {
        const double d = span(k, i);
        if (d <= 0.0) continue;
        best = std::max(best, (gain(k, i) - g[i]) / d);
    }
    return best;
}

double MinGainProblem::value(std::span<const double> g) const {
    double total = 0.0;
    for (std::size_t i = 0; i < num_types(); ++i) total -= type_weights_[i] * g[i];
    for (std::size_t k = 0; k < num_items(); ++k) {
        if (item_weights_[k] > 0.0) total -= item_weights_[k] * detection(k, g);
    }
    return total;
}

std::vector<double> MinGainProblem::supergradient(std::span<const double> g) const {
    std::vector<double> out(num_types());
    for (std::size_t i = 0; i < num_types(); ++i) out[i] = -type_weights_[i];
    for (std::size_t k = 0; k < num_items(); ++k) {
        double best = 0.0;
        std::size_t arg = num_types();
        for (std::size_t i = 0; i < num_types(); ++i) {
            const double d = span(k, i);
            if (d <= 0.0) continue;
            const double t = (gain(k, i) - g[i]) / d;
            if (t > best) {
                best = t;
                arg = i;
            }
        }
        if (arg < num_types()) out[arg] += item_weights_[k] / span(k, arg);
    }
    return out;
}

namespace {

// Exact LP restricted to a sub-box. Items whose inner max is constant or carried by a single
// type throughout the sub-box are folded into the objective; the rest keep a variable.
struct TrustLp {
    std::vector<double> g;
    bool touches = false;
    std::size_t kinked = 0;
    std::size_t pivots = 0;
};

TrustLp solve_trust_lp(const MinGainProblem& problem, std::span<const double> lo, std::span<const double> hi,
                       std::size_t kinked_limit, const lp::SimplexOptions& simplex) {
    const std::size_t m = problem.num_types();
    const Box& box = problem.box();
    TrustLp out;

    std::vector<double> u_coef(m);
    for (std::size_t i = 0; i < m; ++i) u_coef[i] = problem.type_weights()[i];

    struct Kinked {
        std::size_t item;
        double pi_min;
    };
    std::vector<Kinked> kinked;
    std::vector<double> lo_t(m), hi_t(m);
    for (std::size_t k = 0; k < problem.num_items(); ++k) {
        const double w = problem.item_weight(k);
        if (w <= 0.0) continue;
        double floor = 0.0;
        double ceil = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = problem.span(k, i);
            if (d <= 0.0) continue;
            lo_t[i] = (problem.gain(k, i) - hi[i]) / d;
            hi_t[i] = (problem.gain(k, i) - lo[i]) / d;
            floor = std::max(floor, lo_t[i]);
            ceil = std::max(ceil, hi_t[i]);
        }
        if (ceil <= 0.0) continue;
        std::size_t relevant = 0;
        std::size_t only = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (problem.span(k, i) > 0.0 && hi_t[i] > floor) {
                ++relevant;
                only = i;
            }
        }
        if (relevant == 0) continue;  // constant on the sub-box
        if (relevant == 1 && lo_t[only] >= floor) {
            u_coef[only] -= w / problem.span(k, only);
            continue;
        }
        kinked.push_back({k, floor});
    }
    out.kinked = kinked.size();
    if (kinked.size() > kinked_limit) return out;

    // Variables: u_i = hi_i - G_i for i < m, then one shifted detection variable per kinked item.
    lp::LinearProgram program(m + kinked.size());
    for (std::size_t i = 0; i < m; ++i) {
        program.set_objective(i, u_coef[i]);
        const double width = hi[i] - lo[i];
        program.add_constraint({{i, 1.0}}, lp::Relation::LessEqual, width);
    }
    for (std::size_t j = 0; j < kinked.size(); ++j) {
        const std::size_t k = kinked[j].item;
        const std::size_t var = m + j;
        program.set_objective(var, -problem.item_weight(k));
        for (std::size_t i = 0; i < m; ++i) {
            const double d = problem.span(k, i);
            if (d <= 0.0) continue;
            const double a = problem.gain(k, i);
            if (a - lo[i] <= d * kinked[j].pi_min) continue;
            const double rhs = std::max(0.0, hi[i] - a + d * kinked[j].pi_min);
            program.add_constraint({{i, 1.0}, {var, -d}}, lp::Relation::LessEqual, rhs);
        }
    }
    const lp::Result res = lp::maximize(program, simplex);
    out.pivots = res.pivots;
    if (res.status != lp::Status::Optimal) {
        throw Error(ErrorKind::SolverFailure, std::string("min-gain LP ended with status ") +
                                                  std::string(lp::to_string(res.status)));
    }
    out.g.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.g[i] = std::clamp(hi[i] - res.x[i], lo[i], hi[i]);
        const double tol = 1e-9 * (hi[i] - lo[i]);
        if (lo[i] > box.lower(i) && out.g[i] <= lo[i] + tol) out.touches = true;
        if (hi[i] < box.upper(i) && out.g[i] >= hi[i] - tol) out.touches = true;
    }
    return out;
}

}  // namespace

std::vector<double> interior_point_center(const MinGainProblem& problem, const MinGainOptions& options,
                                          int* iterations) {
    const std::size_t m = problem.num_types();
    const Box& box = problem.box();
    if (iterations) *iterations = 0;

    // Free types are rescaled to g in [0, 1]; fixed types become lower bounds on detection.
    std::vector<std::size_t> free_index(m, m);
    std::vector<std::size_t> free_type;
    for (std::size_t i = 0; i < m; ++i) {
        if (box.width(i) > 0.0) {
            free_index[i] = free_type.size();
            free_type.push_back(i);
        }
    }
    std::vector<double> result(box.lower().begin(), box.lower().end());
    const std::size_t mf = free_type.size();
    if (mf == 0) return result;

    std::vector<double> c(mf);
    std::vector<std::size_t> ptr{0};
    std::vector<double> w;
    std::vector<std::size_t> etype;
    std::vector<double> alpha, beta, rhs;
    for (std::size_t f = 0; f < mf; ++f) c[f] = problem.type_weights()[free_type[f]] * box.width(free_type[f]);
    double wmax = 0.0;
    for (std::size_t f = 0; f < mf; ++f) wmax = std::max(wmax, c[f]);
    for (std::size_t k = 0; k < problem.num_items(); ++k) wmax = std::max(wmax, problem.item_weight(k));
    // negligible items are left to the polish
    const double wfloor = 1e-12 * wmax;
    for (std::size_t k = 0; k < problem.num_items(); ++k) {
        const double wk = problem.item_weight(k);
        if (wk <= wfloor) continue;
        double pi0 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = problem.span(k, i);
            if (free_index[i] == m && d > 0.0) pi0 = std::max(pi0, (problem.gain(k, i) - box.lower(i)) / d);
        }
        const std::size_t before = etype.size();
        for (std::size_t f = 0; f < mf; ++f) {
            const std::size_t i = free_type[f];
            const double d = problem.span(k, i);
            if (d <= 0.0) continue;
            const double b = problem.gain(k, i) - d * pi0 - box.lower(i);
            if (b <= 0.0) continue;
            const double width = box.width(i);
            const double scale = std::max(width, d);
            etype.push_back(f);
            alpha.push_back(width / scale);
            beta.push_back(d / scale);
            rhs.push_back(b / scale);
        }
        if (etype.size() > before) {
            w.push_back(wk);
            ptr.push_back(etype.size());
        }
    }
    const std::size_t nv = w.size();
    const std::size_t ne = etype.size();

    double cscale = 0.0;
    for (double x : c) cscale = std::max(cscale, x);
    for (double x : w) cscale = std::max(cscale, x);
    if (cscale <= 0.0) cscale = 1.0;
    for (double& x : c) x /= cscale;
    for (double& x : w) x /= cscale;

    std::vector<double> g(mf, 0.5), rho(nv), s(ne), y(ne), z(nv), zl(mf), zu(mf);
    for (std::size_t v = 0; v < nv; ++v) {
        double need = 0.0;
        for (std::size_t e = ptr[v]; e < ptr[v + 1]; ++e) {
            need = std::max(need, (rhs[e] - alpha[e] * g[etype[e]]) / beta[e]);
        }
        rho[v] = need + 1.0;
        const double count = static_cast<double>(ptr[v + 1] - ptr[v]);
        for (std::size_t e = ptr[v]; e < ptr[v + 1]; ++e) {
            s[e] = alpha[e] * g[etype[e]] + beta[e] * rho[v] - rhs[e];
            y[e] = w[v] / (2.0 * count * beta[e]);
        }
        z[v] = 0.5 * w[v];
    }
    {
        std::vector<double> t(c);
        for (std::size_t e = 0; e < ne; ++e) t[etype[e]] -= alpha[e] * y[e];
        for (std::size_t f = 0; f < mf; ++f) {
            const double delta = 0.1 * std::max(1e-2, std::abs(t[f]));
            zl[f] = std::max(t[f], 0.0) + delta;
            zu[f] = std::max(-t[f], 0.0) + delta;
        }
    }

    const double pairs = static_cast<double>(ne + nv + 2 * mf);
    double rhs_norm = 0.0;
    for (double b : rhs) rhs_norm = std::max(rhs_norm, b);

    std::vector<double> rp(ne), rg(mf), rr(nv);
    std::vector<double> theta(ne), h(ne), pv(nv), fv(nv);
    std::vector<double> dg(mf), drho(nv), ds(ne), dy(ne), dz(nv), dzl(mf), dzu(mf);
    std::vector<double> ag(mf), arho(nv), as(ne), ay(ne), az(nv), azl(mf), azu(mf);
    std::vector<double> rc(ne), rcv(nv), rcl(mf), rcu(mf);
    Eigen::MatrixXd mat(mf, mf);
    Eigen::VectorXd vec(mf);

    auto newton = [&](std::vector<double>& og, std::vector<double>& orho, std::vector<double>& os,
                      std::vector<double>& oy, std::vector<double>& oz, std::vector<double>& ozl,
                      std::vector<double>& ozu) {
        mat.setZero();
        vec.setZero();
        for (std::size_t e = 0; e < ne; ++e) {
            theta[e] = y[e] / s[e];
            h[e] = rc[e] / s[e] - theta[e] * rp[e];
        }
        for (std::size_t f = 0; f < mf; ++f) {
            const double up = 1.0 - g[f];
            mat(f, f) += zl[f] / g[f] + zu[f] / up;
            vec(f) += -rg[f] + rcl[f] / g[f] - rcu[f] / up;
        }
        for (std::size_t e = 0; e < ne; ++e) {
            mat(etype[e], etype[e]) += alpha[e] * alpha[e] * theta[e];
            vec(etype[e]) += alpha[e] * h[e];
        }
        for (std::size_t v = 0; v < nv; ++v) {
            double p = z[v] / rho[v];
            double f = -rr[v] + rcv[v] / rho[v];
            for (std::size_t e = ptr[v]; e < ptr[v + 1]; ++e) {
                p += beta[e] * beta[e] * theta[e];
                f += beta[e] * h[e];
            }
            pv[v] = p;
            fv[v] = f;
            for (std::size_t e = ptr[v]; e < ptr[v + 1]; ++e) {
                const double ke = theta[e] * alpha[e] * beta[e];
                vec(etype[e]) -= ke * f / p;
                for (std::size_t e2 = ptr[v]; e2 < ptr[v + 1]; ++e2) {
                    mat(etype[e], etype[e2]) -= ke * theta[e2] * alpha[e2] * beta[e2] / p;
                }
            }
        }
        double diag = 0.0;
        for (std::size_t f = 0; f < mf; ++f) diag = std::max(diag, mat(f, f));
        for (std::size_t f = 0; f < mf; ++f) mat(f, f) += 1e-14 * diag;
        const Eigen::VectorXd sol = mat.ldlt().solve(vec);
        for (std::size_t f = 0; f < mf; ++f) og[f] = sol(f);
        for (std::size_t v = 0; v < nv; ++v) {
            double acc = fv[v];
            for (std::size_t e = ptr[v]; e < ptr[v + 1]; ++e) acc -= theta[e] * alpha[e] * beta[e] * og[etype[e]];
            orho[v] = acc / pv[v];
            oz[v] = (rcv[v] - z[v] * orho[v]) / rho[v];
            for (std::size_t e = ptr[v]; e < ptr[v + 1]; ++e) {
                os[e] = rp[e] + alpha[e] * og[etype[e]] + beta[e] * orho[v];
                oy[e] = (rc[e] - y[e] * os[e]) / s[e];
            }
        }
        for (std::size_t f = 0; f < mf; ++f) {
            ozl[f] = (rcl[f] - zl[f] * og[f]) / g[f];
            ozu[f] = (rcu[f] + zu[f] * og[f]) / (1.0 - g[f]);
        }
    };

    auto max_step = [](const std::vector<double>& x, const std::vector<double>& dx, double step) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (dx[k] < 0.0) step = std::min(step, -x[k] / dx[k]);
        }
        return step;
    };
    auto primal_step = [&](const std::vector<double>& dgv, const std::vector<double>& drv,
                           const std::vector<double>& dsv) {
        double step = 1.0;
        for (std::size_t f = 0; f < mf; ++f) {
            if (dgv[f] < 0.0) step = std::min(step, -g[f] / dgv[f]);
            if (dgv[f] > 0.0) step = std::min(step, (1.0 - g[f]) / dgv[f]);
        }
        step = max_step(rho, drv, step);
        return max_step(s, dsv, step);
    };
    auto dual_step = [&](const std::vector<double>& dyv, const std::vector<double>& dzv,
                         const std::vector<double>& dzlv, const std::vector<double>& dzuv) {
        double step = max_step(y, dyv, 1.0);
        step = max_step(z, dzv, step);
        step = max_step(zl, dzlv, step);
        return max_step(zu, dzuv, step);
    };

    int iter = 0;
    for (; iter < options.ipm_max_iterations; ++iter) {
        for (std::size_t e = 0; e < ne; ++e) rp[e] = -s[e] - rhs[e];
        for (std::size_t f = 0; f < mf; ++f) rg[f] = c[f] - zl[f] + zu[f];
        for (std::size_t v = 0; v < nv; ++v) {
            rr[v] = w[v] - z[v];
            for (std::size_t e = ptr[v]; e < ptr[v + 1]; ++e) {
                rp[e] += alpha[e] * g[etype[e]] + beta[e] * rho[v];
                rg[etype[e]] -= alpha[e] * y[e];
                rr[v] -= beta[e] * y[e];
            }
        }
        double comp = 0.0;
        for (std::size_t e = 0; e < ne; ++e) comp += s[e] * y[e];
        for (std::size_t v = 0; v < nv; ++v) comp += rho[v] * z[v];
        for (std::size_t f = 0; f < mf; ++f) comp += g[f] * zl[f] + (1.0 - g[f]) * zu[f];
        const double mu = comp / pairs;

        double pinf = 0.0, dinf = 0.0, pobj = 0.0;
        for (double r : rp) pinf = std::max(pinf, std::abs(r));
        for (double r : rg) dinf = std::max(dinf, std::abs(r));
        for (double r : rr) dinf = std::max(dinf, std::abs(r));
        for (std::size_t f = 0; f < mf; ++f) pobj += c[f] * g[f];
        for (std::size_t v = 0; v < nv; ++v) pobj += w[v] * rho[v];
        if (pinf <= options.ipm_tolerance * (1.0 + rhs_norm) && dinf <= options.ipm_tolerance &&
            comp <= options.ipm_tolerance * (1.0 + std::abs(pobj))) {
            break;
        }

        // Predictor.
        for (std::size_t e = 0; e < ne; ++e) rc[e] = -s[e] * y[e];
        for (std::size_t v = 0; v < nv; ++v) rcv[v] = -rho[v] * z[v];
        for (std::size_t f = 0; f < mf; ++f) {
            rcl[f] = -g[f] * zl[f];
            rcu[f] = -(1.0 - g[f]) * zu[f];
        }
        newton(ag, arho, as, ay, az, azl, azu);
        const double pa = primal_step(ag, arho, as);
        const double da = dual_step(ay, az, azl, azu);
        double comp_aff = 0.0;
        for (std::size_t e = 0; e < ne; ++e) comp_aff += (s[e] + pa * as[e]) * (y[e] + da * ay[e]);
        for (std::size_t v = 0; v < nv; ++v) comp_aff += (rho[v] + pa * arho[v]) * (z[v] + da * az[v]);
        for (std::size_t f = 0; f < mf; ++f) {
            comp_aff += (g[f] + pa * ag[f]) * (zl[f] + da * azl[f]);
            comp_aff += (1.0 - g[f] - pa * ag[f]) * (zu[f] + da * azu[f]);
        }
        const double sigma = std::pow(std::clamp(comp_aff / comp, 0.0, 1.0), 3.0);
        const double target = sigma * mu;

        // Corrector.
        for (std::size_t e = 0; e < ne; ++e) rc[e] = target - s[e] * y[e] - as[e] * ay[e];
        for (std::size_t v = 0; v < nv; ++v) rcv[v] = target - rho[v] * z[v] - arho[v] * az[v];
        for (std::size_t f = 0; f < mf; ++f) {
            rcl[f] = target - g[f] * zl[f] - ag[f] * azl[f];
            rcu[f] = target - (1.0 - g[f]) * zu[f] + ag[f] * azu[f];
        }
        newton(dg, drho, ds, dy, dz, dzl, dzu);
        const double eta = std::max(0.9, 1.0 - 10.0 * mu);
        const double pstep = std::min(1.0, eta * primal_step(dg, drho, ds));
        const double dstep = std::min(1.0, eta * dual_step(dy, dz, dzl, dzu));
        if (!(pstep > 0.0) || !(dstep > 0.0) || !std::isfinite(pstep) || !std::isfinite(dstep)) break;
        for (std::size_t f = 0; f < mf; ++f) {
            g[f] += pstep * dg[f];
            zl[f] += dstep * dzl[f];
            zu[f] += dstep * dzu[f];
        }
        for (std::size_t v = 0; v < nv; ++v) {
            rho[v] += pstep * drho[v];
            z[v] += dstep * dz[v];
        }
        for (std::size_t e = 0; e < ne; ++e) {
            s[e] += pstep * ds[e];
            y[e] += dstep * dy[e];
        }
        if (pstep < 1e-12 && dstep < 1e-12) break;
        if (mu < 1e-300) break;
    }
    if (iterations) *iterations = iter;
    for (std::size_t f = 0; f < mf; ++f) {
        const std::size_t i = free_type[f];
        result[i] = std::clamp(box.lower(i) + box.width(i) * g[f], box.lower(i), box.upper(i));
    }
    return result;
}

MinGainResult maximize_min_gain(const MinGainProblem& problem, const MinGainOptions& options) {
    const std::size_t m = problem.num_types();
    const Box& box = problem.box();
    MinGainResult out;

    std::size_t active = 0;
    for (std::size_t k = 0; k < problem.num_items(); ++k) active += problem.item_weight(k) > 0.0 ? 1 : 0;
    const double rows = static_cast<double>(active * m + m);
    const double cells = rows * (rows + static_cast<double>(active + m));
    bool direct = options.method == MinGainMethod::DirectSimplex ||
                  (options.method == MinGainMethod::Auto && cells <= static_cast<double>(options.direct_cell_limit));

    if (direct) {
        const TrustLp lp = solve_trust_lp(problem, box.lower(), box.upper(),
                                          std::numeric_limits<std::size_t>::max(), options.simplex);
        out.g = lp.g;
        out.value = problem.value(out.g);
        out.method = "simplex";
        out.pivots = lp.pivots;
        out.polish_rounds = 1;
        out.certified = true;
        return out;
    }

    std::vector<double> center = interior_point_center(problem, options, &out.ipm_iterations);
    out.method = "interior-point+polish";
    std::vector<double> best = center;
    double best_value = problem.value(center);

    std::vector<double> radius(m);
    for (std::size_t i = 0; i < m; ++i) radius[i] = 1e-6 * box.width(i);
    std::vector<double> lo(m), hi(m);
    for (int round = 0; round < options.polish_max_rounds; ++round) {
        ++out.polish_rounds;
        for (std::size_t i = 0; i < m; ++i) {
            lo[i] = std::max(box.lower(i), center[i] - radius[i]);
            hi[i] = std::min(box.upper(i), center[i] + radius[i]);
        }
        const TrustLp lp = solve_trust_lp(problem, lo, hi, options.polish_item_limit, options.simplex);
        out.pivots += lp.pivots;
        if (lp.g.empty()) {
            for (double& r : radius) r *= 0.25;
            continue;
        }
        const double center_value = problem.value(center);
        const double lp_value = problem.value(lp.g);
        if (lp_value >= best_value - 1e-12 * (1.0 + std::abs(best_value))) {
            best = lp.g;
            best_value = lp_value;
        }
        if (!lp.touches || lp_value <= center_value + 1e-11 * (1.0 + std::abs(center_value))) {
            out.certified = true;
            break;
        }
        center = lp.g;
        for (double& r : radius) r *= 4.0;
    }
    out.g = std::move(best);
    out.value = best_value;
    return out;
}

}  // namespace advgame
