#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

namespace peertruth {

// Plain aligned-column text table for terminal summaries.
class TextTable {
  public:
    explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::vector<std::string> fields) { rows_.push_back(std::move(fields)); }

    void print(std::ostream& os) const {
        std::vector<std::size_t> widths(header_.size(), 0);
        for (std::size_t i = 0; i < header_.size(); ++i) widths[i] = header_[i].size();
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i) {
                widths[i] = std::max(widths[i], row[i].size());
            }
        }
        auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t i = 0; i < widths.size(); ++i) {
                const std::string& cell = i < row.size() ? row[i] : std::string();
                os << cell << std::string(widths[i] - cell.size() + 2, ' ');
            }
            os << '\n';
        };
        emit(header_);
        for (std::size_t i = 0; i < widths.size(); ++i) {
            os << std::string(widths[i], '-') << "  ";
        }
        os << '\n';
        for (const auto& row : rows_) emit(row);
    }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace peertruth
