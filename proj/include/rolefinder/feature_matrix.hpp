#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rolefinder {

struct PlayerInfo {
  std::string team_id;         // team with most of the player's actions
  std::string competition_id;  // competition with most of the player's minutes
  double player_action_count = 0.0;
  double team_action_count = 0.0;
  double minutes_played = 0.0;

  friend bool operator==(const PlayerInfo&, const PlayerInfo&) = default;
};

// Dense per-player table, row-major. No missing cells.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> players, std::vector<std::string> columns,
                std::vector<double> values, std::vector<PlayerInfo> info = {});

  std::size_t rows() const { return players_.size(); }
  std::size_t cols() const { return columns_.size(); }

  const std::vector<std::string>& players() const { return players_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::string& player(std::size_t r) const { return players_[r]; }
  const std::string& column(std::size_t c) const { return columns_[c]; }
  const PlayerInfo& info(std::size_t r) const { return info_[r]; }
  const std::vector<PlayerInfo>& info() const { return info_; }

  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }
  const std::vector<double>& values() const { return values_; }

  std::optional<std::size_t> column_index(std::string_view name) const;
  std::optional<std::size_t> row_index(std::string_view player_id) const;

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  FeatureMatrix select_columns(std::span<const std::string> names) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::vector<std::string> players_;
  std::vector<std::string> columns_;
  std::vector<double> values_;
  std::vector<PlayerInfo> info_;
};

// Column-wise concatenation; both sides must list the same players in the same order.
FeatureMatrix hconcat(const FeatureMatrix& left, const FeatureMatrix& right);

// Shortest representation that parses back to the identical double.
std::string format_double(double v);

// CSV with a header row; `player_id` is the first column.
void write_csv(std::ostream& out, const FeatureMatrix& matrix);
FeatureMatrix read_csv(std::istream& in);

}  // namespace rolefinder
