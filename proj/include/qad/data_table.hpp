#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qad/error.hpp"

namespace qad {

inline constexpr double missing_value = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

/// Named numeric columns of equal length; NaN marks a missing cell.
class DataTable {
public:
    DataTable() = default;

    DataTable(std::vector<std::string> names, std::vector<std::vector<double>> columns)
        : names_(std::move(names)), columns_(std::move(columns))
    {
        if (names_.size() != columns_.size()) throw data_error("column names and columns differ in number");
        std::unordered_set<std::string> seen;
        for (const auto& nm : names_) {
            if (!seen.insert(nm).second) throw data_error("duplicate column name '" + nm + "'");
        }
        for (const auto& c : columns_) {
            if (c.size() != columns_.front().size()) throw data_error("columns differ in length");
            for (double v : c) {
                if (std::isinf(v)) throw data_error("table contains infinite values");
            }
        }
    }

    std::size_t cols() const noexcept { return names_.size(); }
    std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<double>& column(std::size_t k) const { return columns_.at(k); }

    std::size_t index_of(const std::string& name) const
    {
        for (std::size_t k = 0; k < names_.size(); ++k)
            if (names_[k] == name) return k;
        throw data_error("no column named '" + name + "'");
    }
    const std::vector<double>& column(const std::string& name) const { return columns_[index_of(name)]; }

    DataTable select(const std::vector<std::size_t>& keep) const
    {
        std::vector<std::string> nm;
        std::vector<std::vector<double>> cs;
        for (auto k : keep) {
            nm.push_back(names_.at(k));
            cs.push_back(columns_.at(k));
        }
        return DataTable(std::move(nm), std::move(cs));
    }

    /// Rows with no missing cell in any column.
    DataTable complete_rows() const
    {
        std::vector<std::vector<double>> cs(cols());
        for (std::size_t r = 0; r < rows(); ++r) {
            bool ok = true;
            for (const auto& c : columns_) ok = ok && !is_missing(c[r]);
            if (!ok) continue;
            for (std::size_t k = 0; k < cols(); ++k) cs[k].push_back(columns_[k][r]);
        }
        return DataTable(names_, std::move(cs));
    }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

/// Rows where both columns are present.
inline std::pair<std::vector<double>, std::vector<double>> complete_pairs(const std::vector<double>& a,
                                                                           const std::vector<double>& b)
{
    std::pair<std::vector<double>, std::vector<double>> out;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (is_missing(a[r]) || is_missing(b[r])) continue;
        out.first.push_back(a[r]);
        out.second.push_back(b[r]);
    }
    return out;
}

}  // namespace qad
