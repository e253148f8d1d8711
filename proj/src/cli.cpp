#include "advgame/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "advgame/equilibrium.hpp"
#include "advgame/error.hpp"
#include "advgame/gallery.hpp"
#include "advgame/io.hpp"
#include "advgame/online.hpp"
#include "advgame/parallel.hpp"
#include "advgame/saa.hpp"

#ifndef ADVGAME_VERSION
#define ADVGAME_VERSION "dev"
#endif

namespace advgame {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kCsvSchemaVersion = 1;

struct Globals {
    std::uint64_t seed = 0;
    std::string out = ".";
    double tol = 1e-6;
    std::size_t threads = 0;
};

struct SolveArgs {
    std::string game;
    std::string method = "auto";
};

struct TrainArgs {
    std::string game;
    std::size_t n = 0;
    std::vector<std::size_t> ns;
    std::size_t replicas = 1;
    std::string samples;
    std::string method = "auto";
};

struct OnlineArgs {
    std::string game;
    std::size_t steps = 1000;
    std::string algo = "efficient";
    std::size_t replicas = 1;
    std::string g_init = "mid";
    std::size_t trace_stride = 0;
    bool sample_losses = false;
    double step_scale = 1.0;
};

struct SimulateArgs {
    std::string game;
    std::size_t steps = 1000;
    std::string policy;
    bool sample_losses = false;
};

struct GalleryArgs {
    std::string name;
    std::string file;
    std::optional<std::uint64_t> game_seed;
    double theta0 = 0.2;
    std::optional<double> p_attack;
    double false_alarm_cost = 140.0;
    double ell = 0.05;
    int max_amount = 25691;
    double mean_amount = 88.0;
    int k = 10;
    int m = 4;
    bool features = false;
};

struct IngestArgs {
    std::string csv;
    double ell = 0.05;
};

/// Collects what a run produced; written as manifest.json on the way out.
class Manifest {
public:
    Manifest(std::string subcommand, std::vector<std::string> argv, const Globals& globals)
        : subcommand_(std::move(subcommand)), argv_(std::move(argv)), globals_(globals) {}

    void config(const std::string& key, json value) { config_[key] = std::move(value); }
    void artifact(const fs::path& path) { artifacts_.push_back(path.filename().string()); }

    void write(const fs::path& dir, const std::string& status) const {
        json doc;
        doc["tool"] = "advgame";
        doc["version"] = ADVGAME_VERSION;
        doc["csv_schema"] = kCsvSchemaVersion;
        doc["subcommand"] = subcommand_;
        doc["argv"] = argv_;
        doc["seed"] = globals_.seed;
        doc["tol"] = globals_.tol;
        doc["threads"] = worker_count(globals_.threads);
        doc["config"] = config_;
        doc["artifacts"] = artifacts_;
        doc["status"] = status;
        doc["created_utc"] = timestamp();
        write_json_file(dir / "manifest.json", doc);
    }

private:
    static std::string timestamp() {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    std::string subcommand_;
    std::vector<std::string> argv_;
    Globals globals_;
    json config_ = json::object();
    std::vector<std::string> artifacts_;
};

json rounded(double x) {
    if (!std::isfinite(x)) return nullptr;
    return round_significant(x);
}

json rounded(std::span<const double> xs) {
    json arr = json::array();
    for (double x : xs) arr.push_back(rounded(x));
    return arr;
}

MinGainOptions min_gain_options(const std::string& method) {
    MinGainOptions o;
    if (method == "simplex") {
        o.method = MinGainMethod::DirectSimplex;
    } else if (method == "ipm") {
        o.method = MinGainMethod::InteriorPoint;
    } else {
        o.method = MinGainMethod::Auto;
    }
    return o;
}

std::vector<std::string> g_columns(std::size_t m) {
    std::vector<std::string> cols;
    for (std::size_t i = 1; i <= m; ++i) cols.push_back("g_" + std::to_string(i));
    return cols;
}

fs::path prepare_out(const Globals& globals) {
    fs::path dir(globals.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::FileError, "cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::string_view kind_name(const Event& e) { return e.is_attack() ? "attack" : "non_attack"; }

// ---- solve ----

int cmd_solve(const Globals& globals, const SolveArgs& args, Manifest& manifest) {
    manifest.config("game", args.game);
    manifest.config("method", args.method);
    const GameSpec game = load_game(args.game);
    const fs::path dir = prepare_out(globals);

    const EquilibriumSolution sol = solve_defender(game, min_gain_options(args.method));
    const AttackerReport att = solve_attacker_detailed(game, sol);
    const BneReport bne = verify_bne(game, att.strategy, sol.policy, globals.tol);

    json eq;
    eq["g_max"] = rounded(sol.g_max.g);
    eq["value"] = rounded(sol.value);
    eq["bounds"] = {{"lower", rounded(sol.g_max.box.lower())}, {"upper", rounded(sol.g_max.box.upper())}};
    eq["method"] = sol.method;
    eq["certified"] = sol.certified;
    eq["num_types"] = game.num_types();
    eq["num_vectors"] = game.num_vectors();
    write_json_file(dir / "equilibrium.json", eq);
    manifest.artifact(dir / "equilibrium.json");

    {
        CsvWriter csv(dir / "policy.csv", {"vector_id", "pi"});
        for (std::size_t v = 0; v < game.num_vectors(); ++v) {
            csv.cell(game.vectors()[v].id).cell(sol.policy[v]);
            csv.end_row();
        }
    }
    manifest.artifact(dir / "policy.csv");

    {
        CsvWriter csv(dir / "attacker.csv", {"type", "vector_id", "alpha"});
        for (std::size_t i = 0; i < game.num_types(); ++i) {
            for (std::size_t v = 0; v < game.num_vectors(); ++v) {
                const double a = att.strategy(i, v);
                if (a <= 0.0) continue;
                csv.cell(i + 1).cell(game.vectors()[v].id).cell(a);
                csv.end_row();
            }
        }
    }
    manifest.artifact(dir / "attacker.csv");

    json ver;
    ver["pass"] = bne.pass;
    ver["tol"] = bne.tol;
    ver["max_best_response_gap"] = rounded(bne.max_gap);
    ver["max_balance_residual"] = rounded(bne.max_residual);
    ver["worst_vector_id"] = game.vectors()[bne.worst_vector].id;
    ver["best_response_gap"] = rounded(bne.best_response_gap);
    ver["strategy_valid"] = bne.strategy_valid;
    ver["balance_band_used"] = att.used_balance_band;
    write_json_file(dir / "verification.json", ver);
    manifest.artifact(dir / "verification.json");

    std::cout << "value " << format_number(sol.value) << "  verification " << (bne.pass ? "pass" : "FAIL")
              << " (gap " << format_number(bne.max_gap) << ", residual " << format_number(bne.max_residual) << ")\n";
    return bne.pass ? kExitOk : kExitFailed;
}

// ---- train ----

int cmd_train(const Globals& globals, const TrainArgs& args, Manifest& manifest) {
    std::vector<std::size_t> ns = args.ns;
    if (args.n > 0) ns.insert(ns.begin(), args.n);
    manifest.config("game", args.game);
    manifest.config("ns", ns);
    manifest.config("replicas", args.replicas);
    manifest.config("samples", args.samples);
    manifest.config("method", args.method);
    if (args.samples.empty() && ns.empty()) throw Error(ErrorKind::InvalidArgument, "train needs --n, --ns or --samples");
    if (!args.samples.empty() && !ns.empty()) {
        throw Error(ErrorKind::InvalidArgument, "--samples cannot be combined with --n or --ns");
    }
    if (args.replicas == 0) throw Error(ErrorKind::InvalidArgument, "--replicas must be positive");
    for (std::size_t n : ns) {
        if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample sizes must be positive");
    }

    const GameSpec game = load_game(args.game);
    const fs::path dir = prepare_out(globals);
    const MinGainOptions options = min_gain_options(args.method);
    const EquilibriumSolution sol = solve_defender(game, options);
    const Box box = gain_bounds(game);

    auto report_json = [&](const TrainingReport& rep) {
        json doc;
        doc["g_trained"] = rounded(rep.g_trained.g);
        doc["empirical_value"] = rounded(rep.empirical_value);
        doc["n_samples"] = rep.n_samples;
        doc["seed"] = rep.seed;
        doc["method"] = rep.method;
        const double true_value = min_gain(game, rep.g_trained.g);
        doc["true_value"] = rounded(true_value);
        doc["optimal_value"] = rounded(sol.value);
        doc["g_max"] = rounded(sol.g_max.g);
        doc["value_gap"] = rounded(value_gap(game, sol, rep.g_trained.g));
        try {
            doc["ratio"] = rounded(approximation_ratio(game, sol, rep.g_trained.g));
        } catch (const Error&) {
            doc["ratio"] = nullptr;
        }
        doc["in_argmax"] = true_value >= sol.value - kArgmaxValueGap;
        return doc;
    };

    if (!args.samples.empty()) {
        const auto samples = read_samples_csv(args.samples);
        TrainingReport rep = saa_solve(samples, box, options);
        rep.seed = globals.seed;
        write_json_file(dir / "training.json", report_json(rep));
        manifest.artifact(dir / "training.json");
        std::cout << "trained on " << samples.size() << " samples, empirical value "
                  << format_number(rep.empirical_value) << "\n";
        return kExitOk;
    }

    if (ns.size() == 1 && args.replicas == 1) {
        Rng rng = Rng::stream(globals.seed, 0);
        const auto samples = draw_samples(game, ns[0], rng);
        TrainingReport rep = saa_solve(samples, box, options);
        rep.seed = globals.seed;
        write_json_file(dir / "training.json", report_json(rep));
        manifest.artifact(dir / "training.json");
        std::cout << "n " << ns[0] << "  empirical value " << format_number(rep.empirical_value) << "\n";
        return kExitOk;
    }

    const auto results = saa_sweep(game, sol, ns, args.replicas, globals.seed, options, globals.threads);
    {
        std::vector<std::string> header{"n", "replica", "ratio", "in_argmax", "empirical_value", "true_value"};
        for (auto& c : g_columns(game.num_types())) header.push_back(c);
        CsvWriter csv(dir / "saa_sweep.csv", header);
        for (const auto& r : results) {
            csv.cell(r.n).cell(r.replica);
            if (std::isnan(r.ratio)) {
                csv.empty();
            } else {
                csv.cell(r.ratio);
            }
            csv.cell(r.in_argmax ? 1 : 0).cell(r.empirical_value).cell(r.true_value);
            for (double x : r.g) csv.cell(x);
            csv.end_row();
        }
    }
    manifest.artifact(dir / "saa_sweep.csv");

    json summary = json::array();
    for (std::size_t n : ns) {
        std::vector<double> ratios;
        std::size_t hits = 0;
        for (const auto& r : results) {
            if (r.n != n) continue;
            if (!std::isnan(r.ratio)) ratios.push_back(r.ratio);
            hits += r.in_argmax ? 1 : 0;
        }
        json row;
        row["n"] = n;
        row["replicas"] = args.replicas;
        row["p_argmax"] = rounded(static_cast<double>(hits) / static_cast<double>(args.replicas));
        if (!ratios.empty()) {
            std::sort(ratios.begin(), ratios.end());
            const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
            const std::size_t h = ratios.size() / 2;
            const double median = ratios.size() % 2 ? ratios[h] : 0.5 * (ratios[h - 1] + ratios[h]);
            row["mean_ratio"] = rounded(mean);
            row["median_ratio"] = rounded(median);
        } else {
            row["mean_ratio"] = nullptr;
            row["median_ratio"] = nullptr;
        }
        summary.push_back(row);
        std::cout << "n " << n << "  p_argmax " << format_number(row["p_argmax"].get<double>()) << "\n";
    }
    json doc;
    doc["optimal_value"] = rounded(sol.value);
    doc["g_max"] = rounded(sol.g_max.g);
    doc["seed"] = globals.seed;
    doc["sweep"] = summary;
    write_json_file(dir / "training.json", doc);
    manifest.artifact(dir / "training.json");
    return kExitOk;
}

// ---- online ----

std::vector<double> initial_profile(const Box& box, const std::string& mode, Rng& rng) {
    const std::size_t m = box.size();
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (mode == "lower") {
            g[i] = box.lower(i);
        } else if (mode == "upper") {
            g[i] = box.upper(i);
        } else if (mode == "mid") {
            g[i] = 0.5 * (box.lower(i) + box.upper(i));
        } else if (mode == "corner") {
            g[i] = rng.below(2) ? box.upper(i) : box.lower(i);
        } else {
            g[i] = rng.uniform(box.lower(i), box.upper(i));
        }
    }
    return g;
}

struct ReplicaRun {
    OnlineTrace trace;
    std::vector<Regret> curve;
    std::vector<double> distance;
    std::vector<double> g_init;
};

int cmd_online(const Globals& globals, const OnlineArgs& args, Manifest& manifest) {
    manifest.config("game", args.game);
    manifest.config("steps", args.steps);
    manifest.config("algo", args.algo);
    manifest.config("replicas", args.replicas);
    manifest.config("g_init", args.g_init);
    manifest.config("sample_losses", args.sample_losses);
    manifest.config("step_scale", args.step_scale);
    if (args.steps == 0) throw Error(ErrorKind::InvalidArgument, "--steps must be positive");
    if (args.replicas == 0) throw Error(ErrorKind::InvalidArgument, "--replicas must be positive");
    const std::size_t stride = args.trace_stride > 0 ? args.trace_stride : std::max<std::size_t>(1, args.steps / 100);
    manifest.config("trace_stride", stride);

    const GameSpec game = load_game(args.game);
    const fs::path dir = prepare_out(globals);
    const std::size_t m = game.num_types();
    const Box box = gain_bounds(game);
    const EquilibriumSolution sol = solve_defender(game);
    const RegretBound bound = args.algo == "naive" ? naive_bound_constants(game, args.steps)
                                                   : efficient_bound_constants(game, args.steps);

    OnlineOptions opts;
    opts.step_scale = args.step_scale;
    opts.sample_losses = args.sample_losses;

    std::vector<ReplicaRun> runs(args.replicas);
    parallel_for(
        args.replicas,
        [&](std::size_t r) {
            ReplicaRun& run = runs[r];
            Rng rng = Rng::stream(globals.seed, r);
            Rng init = Rng::stream(splitmix64(globals.seed), r);
            if (args.algo == "naive") {
                run.trace = naive_ogd_run(game, args.steps, rng, opts);
            } else {
                run.g_init = initial_profile(box, args.g_init, init);
                run.trace = efficient_ogd_run(game, args.steps, run.g_init, rng, opts);
            }
            run.curve = regret_curve(run.trace, game, stride);
            run.distance = distance_to_equilibrium(run.trace, sol.g_max.g);
        },
        globals.threads);

    {
        std::vector<std::string> header{"replica",        "step",           "event_kind",          "type",
                                        "vector_id",      "realized_loss",  "surrogate_loss",      "cum_realized_regret",
                                        "cum_surrogate_regret"};
        for (auto& c : g_columns(m)) header.push_back(c);
        if (args.sample_losses) header.push_back("sampled_loss");
        CsvWriter csv(dir / "regret_trace.csv", header);
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const ReplicaRun& run = runs[r];
            std::size_t next = 0;
            double realized = 0.0, surrogate = 0.0;
            for (std::size_t t = 0; t < run.trace.steps(); ++t) {
                const Event& e = run.trace.events[t];
                realized += run.trace.realized_loss[t];
                surrogate += run.trace.surrogate_loss[t];
                csv.cell(r).cell(t + 1).cell(kind_name(e));
                if (e.is_attack()) {
                    csv.cell(e.type + 1);
                } else {
                    csv.empty();
                }
                csv.cell(game.vectors()[e.vector].id).cell(run.trace.realized_loss[t]).cell(run.trace.surrogate_loss[t]);
                if (next < run.curve.size() && run.curve[next].steps == t + 1) {
                    csv.cell(run.curve[next].realized).cell(run.curve[next].surrogate);
                    ++next;
                } else {
                    csv.empty().empty();
                }
                for (double x : run.trace.profile(t)) csv.cell(x);
                if (args.sample_losses) csv.cell(run.trace.sampled_loss[t]);
                csv.end_row();
            }
        }
    }
    manifest.artifact(dir / "regret_trace.csv");

    {
        CsvWriter csv(dir / "distance.csv", {"replica", "step", "l2_to_gmax"});
        for (std::size_t r = 0; r < runs.size(); ++r) {
            for (std::size_t t = 0; t < runs[r].distance.size(); ++t) {
                csv.cell(r).cell(t + 1).cell(runs[r].distance[t]);
                csv.end_row();
            }
        }
    }
    manifest.artifact(dir / "distance.csv");

    const double limit = regret_bound(bound);
    {
        CsvWriter csv(dir / "online_summary.csv",
                      {"replica", "steps", "realized_regret", "surrogate_regret", "comparator_loss", "bound",
                       "initial_distance", "final_distance"});
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const Regret& last = runs[r].curve.back();
            csv.cell(r).cell(last.steps).cell(last.realized).cell(last.surrogate).cell(last.comparator).cell(limit);
            csv.cell(runs[r].distance.front()).cell(runs[r].distance.back());
            csv.end_row();
        }
    }
    manifest.artifact(dir / "online_summary.csv");

    double mean = 0.0;
    for (const auto& run : runs) mean += run.curve.back().surrogate;
    mean /= static_cast<double>(runs.size());
    json doc;
    doc["algo"] = args.algo;
    doc["steps"] = args.steps;
    doc["replicas"] = args.replicas;
    doc["bound"] = {{"d", rounded(bound.d)}, {"l", rounded(bound.l_const)}, {"value", rounded(limit)}};
    doc["mean_surrogate_regret"] = rounded(mean);
    doc["g_max"] = rounded(sol.g_max.g);
    write_json_file(dir / "online.json", doc);
    manifest.artifact(dir / "online.json");
    std::cout << args.algo << "  mean surrogate regret " << format_number(mean) << "  bound " << format_number(limit)
              << "\n";
    return kExitOk;
}

// ---- simulate ----

DetectionPolicy read_policy_csv(const GameSpec& game, const fs::path& path) {
    const CsvTable table = read_csv(path);
    const int id_col = table.column("vector_id");
    const int pi_col = table.column("pi");
    if (id_col < 0 || pi_col < 0) throw Error(ErrorKind::MissingColumn, path.string() + ": needs vector_id and pi");
    std::map<int, std::size_t> index;
    for (std::size_t v = 0; v < game.num_vectors(); ++v) index[game.vectors()[v].id] = v;
    std::vector<double> pi(game.num_vectors(), 0.0);
    std::vector<bool> seen(game.num_vectors(), false);
    for (const auto& row : table.rows) {
        const int id = std::stoi(row.at(static_cast<std::size_t>(id_col)));
        const auto it = index.find(id);
        if (it == index.end()) throw Error(ErrorKind::InvalidArgument, "policy names unknown vector " + std::to_string(id));
        const double p = std::stod(row.at(static_cast<std::size_t>(pi_col)));
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "policy value outside [0, 1]");
        pi[it->second] = p;
        seen[it->second] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw Error(ErrorKind::InvalidArgument, "policy does not cover every vector");
    }
    return DetectionPolicy(std::move(pi));
}

int cmd_simulate(const Globals& globals, const SimulateArgs& args, Manifest& manifest) {
    manifest.config("game", args.game);
    manifest.config("steps", args.steps);
    manifest.config("policy", args.policy.empty() ? "equilibrium" : args.policy);
    manifest.config("sample_losses", args.sample_losses);
    const GameSpec game = load_game(args.game);
    const fs::path dir = prepare_out(globals);
    const DetectionPolicy policy = args.policy.empty() ? solve_defender(game).policy : read_policy_csv(game, args.policy);

    const Environment env(game);
    Rng rng = Rng::stream(globals.seed, 0);
    Rng coin = Rng::stream(splitmix64(globals.seed), 0);
    std::vector<std::string> header{"step", "event_kind", "type", "vector_id", "pi", "expected_loss"};
    if (args.sample_losses) header.push_back("sampled_loss");
    CsvWriter csv(dir / "simulation.csv", header);
    double total = 0.0, flagged = 0.0;
    std::size_t attacks = 0;
    for (std::size_t t = 1; t <= args.steps; ++t) {
        const Event e = env.step(policy, rng);
        const double p = policy[e.vector];
        const double loss = e.is_attack() ? attacker_value(game, e.type, e.vector, p) : p * game.false_alarm_cost(e.vector);
        total += loss;
        flagged += p;
        attacks += e.is_attack() ? 1 : 0;
        csv.cell(t).cell(kind_name(e));
        if (e.is_attack()) {
            csv.cell(e.type + 1);
        } else {
            csv.empty();
        }
        csv.cell(game.vectors()[e.vector].id).cell(p).cell(loss);
        if (args.sample_losses) {
            const bool detected = coin.uniform() < p;
            double s = 0.0;
            if (e.is_attack()) {
                s = detected ? -game.u_detected(e.type, e.vector) : game.u_undetected(e.type, e.vector);
            } else {
                s = detected ? game.false_alarm_cost(e.vector) : 0.0;
            }
            csv.cell(s);
        }
        csv.end_row();
    }
    manifest.artifact(dir / "simulation.csv");
    const double steps = static_cast<double>(std::max<std::size_t>(args.steps, 1));
    json doc;
    doc["steps"] = args.steps;
    doc["attack_fraction"] = rounded(static_cast<double>(attacks) / steps);
    doc["mean_loss"] = rounded(total / steps);
    doc["mean_detection"] = rounded(flagged / steps);
    write_json_file(dir / "simulation.json", doc);
    manifest.artifact(dir / "simulation.json");
    std::cout << "mean defender loss " << format_number(total / steps) << "\n";
    return kExitOk;
}

// ---- gallery / ingest ----

int cmd_gallery(const Globals& globals, const GalleryArgs& args, Manifest& manifest) {
    manifest.config("name", args.name);
    GameSpec game;
    if (args.name == "game1") {
        Game1Params p;
        p.theta0 = args.theta0;
        if (args.p_attack) p.p_attack = *args.p_attack;
        p.false_alarm_cost = args.false_alarm_cost;
        manifest.config("params", {{"theta0", p.theta0}, {"p_attack", p.p_attack}, {"c_fa", p.false_alarm_cost}});
        game = make_game1(p);
    } else if (args.name == "game2") {
        Game2Params p;
        p.ell = args.ell;
        p.max_amount = args.max_amount;
        p.mean_amount = args.mean_amount;
        if (args.p_attack) p.p_attack = *args.p_attack;
        manifest.config("params", {{"ell", p.ell},
                                   {"max_amount", p.max_amount},
                                   {"mean_amount", p.mean_amount},
                                   {"p_attack", p.p_attack}});
        game = make_game2(p);
    } else {
        Game3Params p;
        p.k = args.k;
        p.m = args.m;
        if (args.p_attack) p.p_attack = *args.p_attack;
        p.seed = args.game_seed.value_or(globals.seed);
        p.features = args.features;
        manifest.config("params", {{"k", p.k}, {"m", p.m}, {"p_attack", p.p_attack}, {"seed", p.seed},
                                   {"features", p.features}});
        game = make_game3(p);
    }
    const fs::path dir = prepare_out(globals);
    const fs::path file = args.file.empty() ? dir / (args.name + ".json") : fs::path(args.file);
    write_game_file(file, game);
    manifest.artifact(file);
    std::cout << "wrote " << file.string() << " (" << game.num_vectors() << " vectors, " << game.num_types()
              << " types)\n";
    return kExitOk;
}

int cmd_ingest(const Globals& globals, const IngestArgs& args, Manifest& manifest) {
    manifest.config("csv", args.csv);
    manifest.config("ell", args.ell);
    if (!(args.ell > 0.0)) throw Error(ErrorKind::InvalidArgument, "--ell must be positive");
    const FraudData data = ingest_fraud_csv(args.csv, args.ell);
    const fs::path dir = prepare_out(globals);
    write_game_file(dir / "game.json", data.game);
    manifest.artifact(dir / "game.json");
    write_samples_csv(dir / "samples.csv", data.samples, data.game.num_types());
    manifest.artifact(dir / "samples.csv");
    json doc;
    doc["rows"] = data.rows;
    doc["attacks"] = data.attacks;
    doc["p_attack"] = rounded(data.game.p_attack());
    doc["mean_amount"] = rounded(data.mean_amount);
    doc["max_amount"] = data.max_amount;
    doc["ell"] = args.ell;
    write_json_file(dir / "ingest.json", doc);
    manifest.artifact(dir / "ingest.json");
    std::cout << data.rows << " rows, p_a " << format_number(data.game.p_attack()) << "\n";
    return kExitOk;
}

int usage_kind(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::BadGameFile:
        case ErrorKind::BadDistribution:
        case ErrorKind::DegenerateDenominator:
        case ErrorKind::EmptyVectorSet:
        case ErrorKind::BadPrior:
        case ErrorKind::FileError:
        case ErrorKind::MissingColumn:
        case ErrorKind::BadLabel:
        case ErrorKind::MissingFeature:
        case ErrorKind::InvalidArgument:
        case ErrorKind::KTooLarge:
            return kExitUsage;
        default:
            return kExitFailed;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    Globals globals;
    SolveArgs solve;
    TrainArgs train;
    OnlineArgs online;
    SimulateArgs simulate;
    GalleryArgs gallery;
    IngestArgs ingest;

    CLI::App app{"Solver for Bayesian adversarial-classification games", "advgame"};
    app.set_version_flag("--version", std::string(ADVGAME_VERSION));
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", globals.seed, "base random seed")->capture_default_str();
    app.add_option("--out", globals.out, "output directory")->capture_default_str();
    app.add_option("--tol", globals.tol, "verification tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--threads", globals.threads, "worker threads (0 = all cores)")->capture_default_str();

    const std::vector<std::string> methods{"auto", "simplex", "ipm"};

    auto* s = app.add_subcommand("solve", "equilibrium of a game file");
    s->add_option("--game", solve.game, "game JSON")->required();
    s->add_option("--method", solve.method)->check(CLI::IsMember(methods))->capture_default_str();

    auto* t = app.add_subcommand("train", "sample average approximation");
    t->add_option("--game", train.game, "game JSON")->required();
    t->add_option("--n", train.n, "samples per replica");
    t->add_option("--ns", train.ns, "comma-separated sample sizes")->delimiter(',');
    t->add_option("--replicas", train.replicas)->capture_default_str();
    t->add_option("--samples", train.samples, "samples CSV instead of drawing from the game");
    t->add_option("--method", train.method)->check(CLI::IsMember(methods))->capture_default_str();

    auto* o = app.add_subcommand("online", "online learning against best-responding attackers");
    o->add_option("--game", online.game, "game JSON")->required();
    o->add_option("--steps", online.steps)->capture_default_str();
    o->add_option("--algo", online.algo)->check(CLI::IsMember({"efficient", "naive"}))->capture_default_str();
    o->add_option("--replicas", online.replicas)->capture_default_str();
    o->add_option("--g-init", online.g_init)
        ->check(CLI::IsMember({"lower", "upper", "mid", "corner", "random"}))
        ->capture_default_str();
    o->add_option("--trace-stride", online.trace_stride, "steps between regret checkpoints (0 = steps/100)");
    o->add_flag("--sample-losses", online.sample_losses, "add a Bernoulli-sampled loss column");
    o->add_option("--step-scale", online.step_scale, "eta_t = scale / sqrt(t)")->capture_default_str();

    auto* r = app.add_subcommand("simulate", "roll out the environment under a fixed policy");
    r->add_option("--game", simulate.game, "game JSON")->required();
    r->add_option("--steps", simulate.steps)->capture_default_str();
    r->add_option("--policy", simulate.policy, "policy CSV (vector_id, pi); default: equilibrium");
    r->add_flag("--sample-losses", simulate.sample_losses);

    auto* g = app.add_subcommand("gallery", "write a built-in game");
    g->add_option("--name", gallery.name)->required()->check(CLI::IsMember({"game1", "game2", "game3"}));
    g->add_option("--file", gallery.file, "output file (default <out>/<name>.json)");
    g->add_option("--game-seed", gallery.game_seed, "game3 seed (default --seed)");
    g->add_option("--theta0", gallery.theta0)->capture_default_str();
    g->add_option("--p-attack", gallery.p_attack);
    g->add_option("--c-fa", gallery.false_alarm_cost)->capture_default_str();
    g->add_option("--ell", gallery.ell)->capture_default_str();
    g->add_option("--max-amount", gallery.max_amount)->capture_default_str();
    g->add_option("--mean-amount", gallery.mean_amount)->capture_default_str();
    g->add_option("--k", gallery.k)->capture_default_str();
    g->add_option("--m", gallery.m)->capture_default_str();
    g->add_flag("--features", gallery.features, "store feature bits for game3");

    auto* f = app.add_subcommand("ingest-fraud", "transactions CSV to game file and samples");
    f->add_option("--csv", ingest.csv)->required();
    f->add_option("--ell", ingest.ell)->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    std::string name;
    for (auto* sub : app.get_subcommands()) name = sub->get_name();
    Manifest manifest(name, args, globals);
    int code = kExitFailed;
    std::string status = "error";
    try {
        if (name == "solve") {
            code = cmd_solve(globals, solve, manifest);
        } else if (name == "train") {
            code = cmd_train(globals, train, manifest);
        } else if (name == "online") {
            code = cmd_online(globals, online, manifest);
        } else if (name == "simulate") {
            code = cmd_simulate(globals, simulate, manifest);
        } else if (name == "gallery") {
            code = cmd_gallery(globals, gallery, manifest);
        } else {
            code = cmd_ingest(globals, ingest, manifest);
        }
        status = code == kExitOk ? "ok" : "failed";
    } catch (const Error& e) {
        std::cerr << "advgame " << name << ": " << e.what() << "\n";
        code = usage_kind(e);
    } catch (const std::exception& e) {
        std::cerr << "advgame " << name << ": " << e.what() << "\n";
        code = kExitFailed;
    }
    try {
        std::error_code ec;
        fs::create_directories(globals.out, ec);
        manifest.write(globals.out, status);
    } catch (const std::exception& e) {
        std::cerr << "advgame: cannot write manifest: " << e.what() << "\n";
        if (code == kExitOk) code = kExitFailed;
    }
    return code;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace advgame
