#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "advgame/game.hpp"

namespace advgame {

/// Floats in every CSV and result file use 12 significant digits.
std::string format_number(double x);
double round_significant(double x);

/// Game files: {p_attack, type_priors, denominator_epsilon?, vectors:[{id, features?, p0, c_fa,
/// u_undetected:[m], u_detected:[m]}]}. Game files keep full double precision.
RawGame parse_game_json(std::string_view text);
RawGame read_game_file(const std::filesystem::path& path);
GameSpec load_game(const std::filesystem::path& path);
nlohmann::json game_to_json(const GameSpec& game);
void write_game_file(const std::filesystem::path& path, const GameSpec& game);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

/// Header-first, comma-separated writer.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    CsvWriter& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
    CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
    CsvWriter& cell(std::string_view text);
    CsvWriter& empty();
    void end_row();

private:
    void separator();

    std::ofstream out_;
    bool row_started_ = false;
};

/// Minimal CSV reader: header row plus string cells; handles double-quoted fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name, or -1.
    int column(std::string_view name) const;
};

std::vector<std::string> split_csv_line(std::string_view line);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace advgame
