#include "advgame/saa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advgame/error.hpp"
#include "advgame/parallel.hpp"

namespace advgame {

SampleRecord SampleRecord::attack(std::size_t type) {
    SampleRecord r;
    r.kind = Kind::Attack;
    r.type = type;
    return r;
}

SampleRecord SampleRecord::non_attack(double false_alarm_cost, std::vector<double> u_undetected,
                                      std::vector<double> u_detected) {
    SampleRecord r;
    r.kind = Kind::NonAttack;
    r.false_alarm_cost = false_alarm_cost;
    r.u_undetected = std::move(u_undetected);
    r.u_detected = std::move(u_detected);
    return r;
}

SampleRecord record_for_vector(const GameSpec& game, std::size_t v) {
    const std::size_t m = game.num_types();
    std::vector<double> uu(m), ud(m);
    for (std::size_t i = 0; i < m; ++i) {
        uu[i] = game.u_undetected(i, v);
        ud[i] = game.u_detected(i, v);
    }
    return SampleRecord::non_attack(game.false_alarm_cost(v), std::move(uu), std::move(ud));
}

std::vector<SampleRecord> draw_samples(const GameSpec& game, std::size_t n, Rng& rng) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample size must be at least 1");
    const std::size_t m = game.num_types();
    std::vector<double> kind_weights(m + 1);
    kind_weights[0] = 1.0 - game.p_attack();
    for (std::size_t i = 0; i < m; ++i) kind_weights[i + 1] = game.p_attack() * game.type_prior(i);
    const DiscreteSampler kind(kind_weights);
    const DiscreteSampler vectors(game.p0());
    std::vector<SampleRecord> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t c = kind.sample(rng);
        if (c == 0) {
            out.push_back(record_for_vector(game, vectors.sample(rng)));
        } else {
            out.push_back(SampleRecord::attack(c - 1));
        }
    }
    return out;
}

namespace {

double parse_double(const std::string& text, ErrorKind kind, const std::string& what) {
    try {
        std::size_t used = 0;
        const double x = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(x)) throw std::invalid_argument(text);
        return x;
    } catch (const std::exception&) {
        throw Error(kind, what + ": cannot parse '" + text + "'");
    }
}

long long parse_integer(const std::string& text, ErrorKind kind, const std::string& what) {
    const double x = parse_double(text, kind, what);
    if (x != std::floor(x)) throw Error(kind, what + ": '" + text + "' is not an integer");
    return static_cast<long long>(x);
}

}  // namespace

SampleRecord GameVectorPayoffs::evaluate(const std::vector<std::string>& cells) const {
    const long long id = parse_integer(cells.at(0), ErrorKind::MissingFeature, "vector_id");
    if (id < 0 || static_cast<std::size_t>(id) >= game_.num_vectors()) {
        throw Error(ErrorKind::MissingFeature, "vector_id " + std::to_string(id) + " is not in the game");
    }
    return record_for_vector(game_, static_cast<std::size_t>(id));
}

SampleRecord FraudAmountPayoffs::evaluate(const std::vector<std::string>& cells) const {
    const double raw = parse_double(cells.at(0), ErrorKind::MissingFeature, "Amount");
    if (raw < 0.0) throw Error(ErrorKind::MissingFeature, "negative Amount");
    const double amount = std::floor(raw);
    return SampleRecord::non_attack(ell_ * amount, {amount}, {0.0});
}

std::vector<SampleRecord> load_samples(const CsvTable& table, const PayoffModel& model, const LoadOptions& options) {
    const int label = table.column(options.label_column);
    if (label < 0) throw Error(ErrorKind::MissingFeature, "no '" + options.label_column + "' column");
    const int type_col = table.column(options.type_column);
    const std::size_t m = model.num_types();
    if (type_col < 0 && m > 1) {
        throw Error(ErrorKind::MissingFeature, "attacker type column '" + options.type_column +
                                                   "' is required when the game has several types");
    }
    std::vector<int> feature_cols;
    for (const std::string& name : model.required_columns()) {
        const int c = table.column(name);
        if (c < 0) throw Error(ErrorKind::MissingFeature, "no '" + name + "' column");
        feature_cols.push_back(c);
    }

    std::vector<SampleRecord> out;
    out.reserve(table.rows.size());
    std::vector<std::string> cells(feature_cols.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "row " + std::to_string(r + 2);
        auto cell = [&](int c) -> const std::string& {
            if (static_cast<std::size_t>(c) >= row.size()) {
                throw Error(ErrorKind::MissingFeature, where + " is too short");
            }
            return row[static_cast<std::size_t>(c)];
        };
        const std::string& lab = cell(label);
        if (lab == "1") {
            std::size_t type = 0;
            if (type_col >= 0) {
                const long long t = parse_integer(cell(type_col), ErrorKind::BadLabel, where + " type");
                if (t < 1 || static_cast<std::size_t>(t) > m) {
                    throw Error(ErrorKind::BadLabel, where + ": attacker type " + std::to_string(t) + " out of range");
                }
                type = static_cast<std::size_t>(t - 1);
            }
            out.push_back(SampleRecord::attack(type));
        } else if (lab == "0") {
            for (std::size_t k = 0; k < feature_cols.size(); ++k) cells[k] = cell(feature_cols[k]);
            out.push_back(model.evaluate(cells));
        } else {
            throw Error(ErrorKind::BadLabel, where + ": label '" + lab + "' is neither 0 nor 1");
        }
    }
    return out;
}

std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const int kind = table.column("kind");
    const int type = table.column("type");
    const int cfa = table.column("c_fa");
    if (kind < 0 || type < 0 || cfa < 0) throw Error(ErrorKind::MissingColumn, "samples file needs kind,type,c_fa");
    std::vector<int> uu, ud;
    for (std::size_t i = 1;; ++i) {
        const int a = table.column("u_undetected_" + std::to_string(i));
        const int b = table.column("u_detected_" + std::to_string(i));
        if (a < 0 || b < 0) break;
        uu.push_back(a);
        ud.push_back(b);
    }
    if (uu.empty()) throw Error(ErrorKind::MissingColumn, "samples file has no payoff columns");
    const std::size_t m = uu.size();
    std::vector<SampleRecord> out;
    for (const auto& row : table.rows) {
        if (row.size() < table.header.size()) throw Error(ErrorKind::MissingFeature, "short row in samples file");
        const std::string& k = row[static_cast<std::size_t>(kind)];
        if (k == "attack") {
            const long long t = parse_integer(row[static_cast<std::size_t>(type)], ErrorKind::BadLabel, "type");
            if (t < 1 || static_cast<std::size_t>(t) > m) throw Error(ErrorKind::BadLabel, "attacker type out of range");
            out.push_back(SampleRecord::attack(static_cast<std::size_t>(t - 1)));
        } else if (k == "non_attack") {
            std::vector<double> a(m), b(m);
            for (std::size_t i = 0; i < m; ++i) {
                a[i] = parse_double(row[static_cast<std::size_t>(uu[i])], ErrorKind::MissingFeature, "u_undetected");
                b[i] = parse_double(row[static_cast<std::size_t>(ud[i])], ErrorKind::MissingFeature, "u_detected");
            }
            const double c = parse_double(row[static_cast<std::size_t>(cfa)], ErrorKind::MissingFeature, "c_fa");
            out.push_back(SampleRecord::non_attack(c, std::move(a), std::move(b)));
        } else {
            throw Error(ErrorKind::BadLabel, "unknown sample kind '" + k + "'");
        }
    }
    return out;
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<SampleRecord>& samples,
                       std::size_t num_types) {
    std::vector<std::string> header{"kind", "type", "c_fa"};
    for (std::size_t i = 1; i <= num_types; ++i) header.push_back("u_undetected_" + std::to_string(i));
    for (std::size_t i = 1; i <= num_types; ++i) header.push_back("u_detected_" + std::to_string(i));
    CsvWriter out(path, header);
    for (const SampleRecord& s : samples) {
        if (s.is_attack()) {
            out.cell(std::string_view("attack")).cell(s.type + 1).empty();
            for (std::size_t i = 0; i < 2 * num_types; ++i) out.empty();
        } else {
            out.cell(std::string_view("non_attack")).empty().cell(s.false_alarm_cost);
            for (double x : s.u_undetected) out.cell(x);
            for (double x : s.u_detected) out.cell(x);
        }
        out.end_row();
    }
}

MinGainProblem saa_problem(const std::vector<SampleRecord>& samples, const Box& box) {
    if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "no samples");
    const std::size_t m = box.size();
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    std::vector<double> q(m, 0.0);
    for (const SampleRecord& s : samples) {
        if (!s.is_attack()) continue;
        if (s.type >= m) throw Error(ErrorKind::TypeOutOfRange, "sample attacker type out of range");
        q[s.type] += inv_n;
    }
    MinGainProblem problem(std::move(q), box);
    std::vector<double> spans(m);
    for (const SampleRecord& s : samples) {
        if (s.is_attack()) continue;
        if (s.u_undetected.size() != m || s.u_detected.size() != m) {
            throw Error(ErrorKind::InvalidArgument, "sample payoffs do not match the number of types");
        }
        for (std::size_t i = 0; i < m; ++i) spans[i] = s.u_undetected[i] + s.u_detected[i];
        problem.add_item(s.false_alarm_cost * inv_n, s.u_undetected, spans);
    }
    problem.merge_duplicates();
    return problem;
}

double empirical_min_gain(const std::vector<SampleRecord>& samples, std::span<const double> g) {
    double total = 0.0;
    for (const SampleRecord& s : samples) {
        if (s.is_attack()) {
            total += g[s.type];
            continue;
        }
        double pi = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double d = s.u_undetected[i] + s.u_detected[i];
            if (d <= 0.0) continue;
            pi = std::max(pi, (s.u_undetected[i] - g[i]) / d);
        }
        total += s.false_alarm_cost * pi;
    }
    return -total / static_cast<double>(samples.size());
}

TrainingReport saa_solve(const std::vector<SampleRecord>& samples, const Box& box, const MinGainOptions& options) {
    const MinGainProblem problem = saa_problem(samples, box);
    const MinGainResult result = maximize_min_gain(problem, options);
    TrainingReport report;
    report.g_trained = {box.project(result.g), box};
    report.empirical_value = empirical_min_gain(samples, report.g_trained.g);
    report.n_samples = samples.size();
    report.method = result.method;
    return report;
}

double approximation_ratio(const GameSpec& game, const EquilibriumSolution& solution, std::span<const double> g) {
    const double trained = min_gain(game, g);
    if (trained == 0.0 || solution.value == 0.0) {
        throw Error(ErrorKind::ZeroDenominator, "approximation ratio undefined: zero loss");
    }
    return 100.0 * solution.value / trained;
}

double value_gap(const GameSpec& game, const EquilibriumSolution& solution, std::span<const double> g) {
    return solution.value - min_gain(game, g);
}

std::vector<ReplicaResult> saa_sweep(const GameSpec& game, const EquilibriumSolution& solution,
                                     const std::vector<std::size_t>& ns, std::size_t replicas, std::uint64_t seed,
                                     const MinGainOptions& options, std::size_t threads) {
    std::vector<ReplicaResult> out(ns.size() * replicas);
    const Box box = gain_bounds(game);
    parallel_for(
        out.size(),
        [&](std::size_t job) {
            const std::size_t n = ns[job / replicas];
            const std::size_t r = job % replicas;
            Rng rng = Rng::stream(seed, r);
            const std::vector<SampleRecord> samples = draw_samples(game, n, rng);
            const TrainingReport report = saa_solve(samples, box, options);
            ReplicaResult& res = out[job];
            res.n = n;
            res.replica = r;
            res.g = report.g_trained.g;
            res.empirical_value = report.empirical_value;
            res.true_value = min_gain(game, res.g);
            res.in_argmax = res.true_value >= solution.value - kArgmaxValueGap;
            try {
                res.ratio = approximation_ratio(game, solution, res.g);
            } catch (const Error&) {
                res.ratio = std::numeric_limits<double>::quiet_NaN();
            }
        },
        threads);
    return out;
}

double estimate_pN(const GameSpec& game, const EquilibriumSolution& solution, std::size_t n, std::size_t replicas,
                   std::uint64_t seed, const MinGainOptions& options, std::size_t threads) {
    if (replicas == 0) throw Error(ErrorKind::InvalidArgument, "replicas must be positive");
    const auto results = saa_sweep(game, solution, {n}, replicas, seed, options, threads);
    std::size_t hits = 0;
    for (const auto& r : results) hits += r.in_argmax ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(replicas);
}

}  // namespace advgame
