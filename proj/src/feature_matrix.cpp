#include "rolefinder/feature_matrix.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "rolefinder/errors.hpp"

namespace rolefinder {

FeatureMatrix::FeatureMatrix(std::vector<std::string> players, std::vector<std::string> columns,
                             std::vector<double> values, std::vector<PlayerInfo> info)
    : players_(std::move(players)),
      columns_(std::move(columns)),
      values_(std::move(values)),
      info_(std::move(info)) {
  if (values_.size() != players_.size() * columns_.size()) {
    throw InvariantError("feature matrix shape mismatch");
  }
  if (info_.empty()) info_.resize(players_.size());
  if (info_.size() != players_.size()) throw InvariantError("feature matrix info size mismatch");
  std::set<std::string_view> names(columns_.begin(), columns_.end());
  if (names.size() != columns_.size()) throw ValidationError("duplicate feature column name");
  std::set<std::string_view> ids(players_.begin(), players_.end());
  if (ids.size() != players_.size()) throw ValidationError("duplicate player row");
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c] == name) return c;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureMatrix::row_index(std::string_view player_id) const {
  for (std::size_t r = 0; r < players_.size(); ++r) {
    if (players_[r] == player_id) return r;
  }
  return std::nullopt;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::string> players;
  std::vector<double> values;
  std::vector<PlayerInfo> info;
  players.reserve(rows.size());
  values.reserve(rows.size() * cols());
  for (std::size_t r : rows) {
    players.push_back(players_.at(r));
    info.push_back(info_.at(r));
    auto src = row(r);
    values.insert(values.end(), src.begin(), src.end());
  }
  return {std::move(players), columns_, std::move(values), std::move(info)};
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const auto& name : names) {
    auto c = column_index(name);
    if (!c) throw ValidationError("unknown feature column '" + name + "'");
    idx.push_back(*c);
  }
  std::vector<double> values;
  values.reserve(rows() * idx.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c : idx) values.push_back(at(r, c));
  }
  return {players_, {names.begin(), names.end()}, std::move(values), info_};
}

FeatureMatrix hconcat(const FeatureMatrix& left, const FeatureMatrix& right) {
  if (left.players() != right.players()) throw InvariantError("hconcat: row sets differ");
  std::vector<std::string> columns = left.columns();
  columns.insert(columns.end(), right.columns().begin(), right.columns().end());
  std::vector<double> values;
  values.reserve(left.rows() * columns.size());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    auto a = left.row(r);
    auto b = right.row(r);
    values.insert(values.end(), a.begin(), a.end());
    values.insert(values.end(), b.begin(), b.end());
  }
  return {left.players(), std::move(columns), std::move(values), left.info()};
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw InvariantError("format_double failed");
  return {buf.data(), end};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

}  // namespace

void write_csv(std::ostream& out, const FeatureMatrix& m) {
  out << "player_id";
  for (const auto& c : m.columns()) {
    if (needs_quoting(c)) throw ValidationError("column name not CSV-safe: " + c);
    out << ',' << c;
  }
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (needs_quoting(m.player(r))) throw ValidationError("player id not CSV-safe: " + m.player(r));
    out << m.player(r);
    for (double v : m.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

FeatureMatrix read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("feature CSV is empty");
  auto header = split_csv_line(line);
  if (header.empty() || header.front() != "player_id") {
    throw ValidationError("feature CSV must start with a player_id column");
  }
  std::vector<std::string> columns(header.begin() + 1, header.end());
  std::vector<std::string> players;
  std::vector<double> values;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw ParseError(line_number, "wrong number of CSV cells");
    players.push_back(cells.front());
    for (std::size_t i = 1; i < cells.size(); ++i) {
      double v = 0.0;
      const auto& s = cells[i];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ParseError(line_number, "bad numeric cell '" + s + "'");
      }
      values.push_back(v);
    }
  }
  return {std::move(players), std::move(columns), std::move(values)};
}

}  // namespace rolefinder
