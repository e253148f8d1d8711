#include "advgame/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace advgame {

std::string format_number(double x) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.12g", x);
    return buffer;
}

double round_significant(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

namespace {

using nlohmann::json;

double number_field(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw Error(ErrorKind::BadGameFile, where + ": missing numeric field '" + key + "'");
    }
    return it->get<double>();
}

std::vector<double> number_array(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) {
        throw Error(ErrorKind::BadGameFile, where + ": missing array field '" + key + "'");
    }
    std::vector<double> out;
    out.reserve(it->size());
    for (const auto& x : *it) {
        if (!x.is_number()) throw Error(ErrorKind::BadGameFile, where + ": '" + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

RawGame parse_game_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::BadGameFile, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::BadGameFile, "game file must be a JSON object");

    RawGame raw;
    raw.p_attack = number_field(doc, "p_attack", "game");
    raw.type_priors = number_array(doc, "type_priors", "game");
    if (doc.contains("denominator_epsilon")) raw.denominator_epsilon = number_field(doc, "denominator_epsilon", "game");

    const auto vectors = doc.find("vectors");
    if (vectors == doc.end() || !vectors->is_array()) {
        throw Error(ErrorKind::BadGameFile, "game: missing array field 'vectors'");
    }
    raw.vectors.reserve(vectors->size());
    for (std::size_t k = 0; k < vectors->size(); ++k) {
        const json& item = (*vectors)[k];
        const std::string where = "vectors[" + std::to_string(k) + "]";
        if (!item.is_object()) throw Error(ErrorKind::BadGameFile, where + " must be an object");
        RawVector rv;
        const auto id = item.find("id");
        if (id == item.end() || !id->is_number_integer()) {
            throw Error(ErrorKind::BadGameFile, where + ": missing integer field 'id'");
        }
        rv.id = id->get<int>();
        if (const auto f = item.find("features"); f != item.end()) {
            if (!f->is_array()) throw Error(ErrorKind::BadGameFile, where + ": 'features' must be an array");
            for (const auto& x : *f) {
                if (x.is_boolean()) {
                    rv.features.push_back(x.get<bool>() ? 1 : 0);
                } else if (x.is_number_integer()) {
                    rv.features.push_back(x.get<std::int64_t>());
                } else {
                    throw Error(ErrorKind::BadGameFile, where + ": features must be integers or booleans");
                }
            }
        }
        rv.p0 = number_field(item, "p0", where);
        rv.false_alarm_cost = number_field(item, "c_fa", where);
        rv.u_undetected = number_array(item, "u_undetected", where);
        rv.u_detected = number_array(item, "u_detected", where);
        raw.vectors.push_back(std::move(rv));
    }
    return raw;
}

RawGame read_game_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileError, "cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_game_json(buffer.str());
}

GameSpec load_game(const std::filesystem::path& path) { return validate_game(read_game_file(path)); }

nlohmann::json game_to_json(const GameSpec& game) {
    json doc;
    doc["p_attack"] = game.p_attack();
    doc["type_priors"] = std::vector<double>(game.type_priors().begin(), game.type_priors().end());
    if (game.denominator_epsilon() != kDefaultDenominatorEpsilon) {
        doc["denominator_epsilon"] = game.denominator_epsilon();
    }
    json vectors = json::array();
    const std::size_t m = game.num_types();
    for (std::size_t v = 0; v < game.num_vectors(); ++v) {
        json item;
        item["id"] = game.vectors()[v].id;
        if (!game.vectors()[v].features.empty()) item["features"] = game.vectors()[v].features;
        item["p0"] = game.p0(v);
        item["c_fa"] = game.false_alarm_cost(v);
        std::vector<double> uu(m), ud(m);
        for (std::size_t i = 0; i < m; ++i) {
            uu[i] = game.u_undetected(i, v);
            ud[i] = game.u_detected(i, v);
        }
        item["u_undetected"] = std::move(uu);
        item["u_detected"] = std::move(ud);
        vectors.push_back(std::move(item));
    }
    doc["vectors"] = std::move(vectors);
    return doc;
}

void write_game_file(const std::filesystem::path& path, const GameSpec& game) {
    write_json_file(path, game_to_json(game));
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::FileError, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error(ErrorKind::FileError, "cannot write " + path.string());
    for (const auto& name : header) cell(std::string_view(name));
    end_row();
}

void CsvWriter::separator() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

CsvWriter& CsvWriter::cell(double x) {
    separator();
    out_ << format_number(x);
    return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
    separator();
    out_ << x;
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    separator();
    out_ << text;
    return *this;
}

CsvWriter& CsvWriter::empty() {
    separator();
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
}

int CsvTable::column(std::string_view name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return static_cast<int>(k);
    }
    return -1;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::string current;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                current += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    cells.push_back(std::move(current));
    return cells;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileError, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::FileError, path.string() + " is empty");
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        table.rows.push_back(split_csv_line(line));
    }
    return table;
}

}  // namespace advgame
