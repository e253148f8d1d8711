#include "advgame/gallery.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "advgame/error.hpp"
#include "advgame/io.hpp"
#include "advgame/rng.hpp"

namespace advgame {

std::vector<double> binomial_pmf(int n, double p) {
    if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "bad binomial parameters");
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    if (p == 0.0 || p == 1.0) {
        pmf[p == 0.0 ? 0 : static_cast<std::size_t>(n)] = 1.0;
        return pmf;
    }
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double ln = std::lgamma(n + 1.0);
    for (int r = 0; r <= n; ++r) {
        pmf[static_cast<std::size_t>(r)] =
            std::exp(ln - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0) + r * lp + (n - r) * lq);
    }
    return pmf;
}

GameSpec make_game1(const Game1Params& params) {
    if (!(params.theta0 > 0.0 && params.theta0 < 1.0)) throw Error(ErrorKind::InvalidArgument, "theta0 must be in (0, 1)");
    const std::vector<double> p0 = binomial_pmf(100, params.theta0);
    RawGame raw;
    raw.p_attack = params.p_attack;
    raw.type_priors = params.priors;
    for (int r = 0; r <= 100; ++r) {
        RawVector v;
        v.id = r;
        v.p0 = p0[static_cast<std::size_t>(r)];
        v.false_alarm_cost = params.false_alarm_cost;
        v.u_undetected = {static_cast<double>(r), 100.0 - r};
        v.u_detected = {30.0 * (r % 10), 300.0 - 30.0 * (r % 10)};
        raw.vectors.push_back(std::move(v));
    }
    return validate_game(std::move(raw));
}

GameSpec make_game2(const Game2Params& params) {
    if (!(params.ell > 0.0)) throw Error(ErrorKind::InvalidArgument, "ell must be positive");
    if (params.max_amount < 1) throw Error(ErrorKind::InvalidArgument, "max_amount must be at least 1");
    const std::vector<double> p0 = binomial_pmf(params.max_amount, params.mean_amount / params.max_amount);
    RawGame raw;
    raw.p_attack = params.p_attack;
    raw.type_priors = {1.0};
    raw.vectors.reserve(p0.size());
    for (int a = 0; a <= params.max_amount; ++a) {
        RawVector v;
        v.id = a;
        v.p0 = p0[static_cast<std::size_t>(a)];
        v.false_alarm_cost = params.ell * a;
        v.u_undetected = {static_cast<double>(a)};
        v.u_detected = {0.0};
        raw.vectors.push_back(std::move(v));
    }
    return validate_game(std::move(raw));
}

GameSpec make_game3(const Game3Params& params) {
    if (params.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
    if (params.k > kGame3MaxK) {
        throw Error(ErrorKind::KTooLarge, "k = " + std::to_string(params.k) + " exceeds " + std::to_string(kGame3MaxK));
    }
    if (params.m < 1) throw Error(ErrorKind::InvalidArgument, "m must be at least 1");
    const std::size_t n = std::size_t{1} << params.k;
    const auto m = static_cast<std::size_t>(params.m);
    Rng rng(params.seed);

    RawGame raw;
    raw.p_attack = params.p_attack;
    raw.type_priors.resize(m);
    double total = 0.0;
    for (double& p : raw.type_priors) {
        p = 1.0 - rng.uniform();  // (0, 1]
        total += p;
    }
    for (double& p : raw.type_priors) p /= total;

    raw.vectors.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        RawVector& rv = raw.vectors[v];
        rv.id = static_cast<int>(v);
        if (params.features) {
            rv.features.resize(static_cast<std::size_t>(params.k));
            for (int b = 0; b < params.k; ++b) rv.features[static_cast<std::size_t>(b)] = (v >> b) & 1U;
        }
        rv.u_undetected.resize(m);
        rv.u_detected.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            rv.u_undetected[i] = rng.uniform(10.0, 20.0);
            rv.u_detected[i] = rng.uniform(10.0, 20.0);
        }
        rv.false_alarm_cost = rng.uniform(10.0, 20.0);
    }
    total = 0.0;
    for (auto& rv : raw.vectors) {
        rv.p0 = rng.exponential();
        total += rv.p0;
    }
    for (auto& rv : raw.vectors) rv.p0 /= total;
    return validate_game(std::move(raw));
}

FraudData ingest_fraud_csv(const std::filesystem::path& path, double ell) {
    if (!(ell > 0.0)) throw Error(ErrorKind::InvalidArgument, "ell must be positive");
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileError, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::FileError, path.string() + " is empty");
    const std::vector<std::string> header = split_csv_line(line);
    int amount_col = -1, class_col = -1;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == "Amount") amount_col = static_cast<int>(k);
        if (header[k] == "Class") class_col = static_cast<int>(k);
    }
    if (amount_col < 0) throw Error(ErrorKind::MissingColumn, "no 'Amount' column");
    if (class_col < 0) throw Error(ErrorKind::MissingColumn, "no 'Class' column");

    FraudData data;
    std::vector<double> normal_counts;
    std::vector<int> amounts;
    std::vector<char> labels;
    double amount_sum = 0.0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        const std::size_t need = static_cast<std::size_t>(std::max(amount_col, class_col));
        if (cells.size() <= need) throw Error(ErrorKind::MissingColumn, "line " + std::to_string(line_no) + " is too short");
        const std::string& label = cells[static_cast<std::size_t>(class_col)];
        if (label != "0" && label != "1") {
            throw Error(ErrorKind::BadLabel, "line " + std::to_string(line_no) + ": class '" + label + "'");
        }
        double amount = 0.0;
        try {
            amount = std::stod(cells[static_cast<std::size_t>(amount_col)]);
        } catch (const std::exception&) {
            throw Error(ErrorKind::MissingColumn, "line " + std::to_string(line_no) + ": bad Amount");
        }
        if (!(amount >= 0.0) || !std::isfinite(amount)) {
            throw Error(ErrorKind::MissingColumn, "line " + std::to_string(line_no) + ": bad Amount");
        }
        amount_sum += amount;
        const int a = static_cast<int>(std::floor(amount));
        amounts.push_back(a);
        labels.push_back(label == "1" ? 1 : 0);
        data.max_amount = std::max(data.max_amount, a);
    }
    data.rows = amounts.size();
    if (data.rows == 0) throw Error(ErrorKind::FileError, path.string() + " has no data rows");
    data.mean_amount = amount_sum / static_cast<double>(data.rows);

    normal_counts.assign(static_cast<std::size_t>(data.max_amount) + 1, 0.0);
    data.samples.reserve(data.rows);
    for (std::size_t r = 0; r < data.rows; ++r) {
        if (labels[r]) {
            ++data.attacks;
            data.samples.push_back(SampleRecord::attack(0));
        } else {
            normal_counts[static_cast<std::size_t>(amounts[r])] += 1.0;
            const double a = amounts[r];
            data.samples.push_back(SampleRecord::non_attack(ell * a, {a}, {0.0}));
        }
    }
    const double normals = static_cast<double>(data.rows - data.attacks);

    RawGame raw;
    raw.p_attack = static_cast<double>(data.attacks) / static_cast<double>(data.rows);
    raw.type_priors = {1.0};
    raw.vectors.resize(normal_counts.size());
    for (std::size_t a = 0; a < normal_counts.size(); ++a) {
        RawVector& v = raw.vectors[a];
        v.id = static_cast<int>(a);
        v.p0 = normals > 0.0 ? normal_counts[a] / normals : 0.0;
        v.false_alarm_cost = ell * static_cast<double>(a);
        v.u_undetected = {static_cast<double>(a)};
        v.u_detected = {0.0};
    }
    data.game = validate_game(std::move(raw));
    return data;
}

}  // namespace advgame
