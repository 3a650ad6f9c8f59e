#pragma once

// JSON documents for results, written with 17 significant digits.

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qad/checkerboard.hpp"
#include "qad/estimator.hpp"
#include "qad/network.hpp"
#include "qad/pairwise.hpp"
#include "qad/predictor.hpp"

namespace qad::io {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "qad/1";

namespace detail {

inline std::string number_17(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

inline void dump(std::ostream& os, const json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{' << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',' << nl;
            first = false;
            os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
            dump(os, it.value(), indent, depth + 1);
        }
        os << nl << close_pad << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        // arrays of scalars stay on one line
        bool flat = true;
        for (const auto& e : j) flat = flat && !e.is_structured();
        if (flat) {
            os << '[';
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) os << (indent > 0 ? ", " : ",");
                dump(os, j[k], indent, depth + 1);
            }
            os << ']';
            return;
        }
        os << '[' << nl;
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (k) os << ',' << nl;
            os << pad;
            dump(os, j[k], indent, depth + 1);
        }
        os << nl << close_pad << ']';
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (std::isfinite(v)) {
            os << number_17(v);
        } else {
            os << "null";
        }
        return;
    }
    default: os << j.dump(); return;
    }
}

inline json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

inline json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json matrix_rows(const SquareMatrix& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.k; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.k; ++j) row.push_back(nullable(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

/// Serializes with two-space indentation and %.17g numbers; NaN becomes null.
inline void write_json(std::ostream& os, const json& j, int indent = 2)
{
    detail::dump(os, j, indent, 0);
    os << '\n';
}

inline std::string to_json_string(const json& j, int indent = 2)
{
    std::ostringstream os;
    write_json(os, j, indent);
    return os.str();
}

inline json to_json(const QadResult& r)
{
    json j;
    j["schema"] = schema_version;
    j["type"] = "qad_result";
    j["n"] = r.n;
    j["n_unique_x"] = r.n_unique_x;
    j["n_unique_y"] = r.n_unique_y;
    j["resolution"] = r.resolution;
    j["q_xy"] = r.q_xy;
    j["q_yx"] = r.q_yx;
    j["mean_dependence"] = r.mean_dependence;
    j["asymmetry"] = r.asymmetry;
    j["p_q_xy"] = detail::nullable(r.p_q_xy);
    j["p_q_yx"] = detail::nullable(r.p_q_yx);
    j["p_asymmetry"] = detail::nullable(r.p_asymmetry);
    j["permutations"] = r.permutations;
    j["seed"] = r.seed;
    j["warnings"] = r.warnings;
    return j;
}

inline json to_json(const CheckerboardCopula& cb)
{
    json j;
    j["resolution"] = cb.resolution();
    j["mass"] = std::vector<double>(cb.masses().begin(), cb.masses().end());
    return j;
}

inline json to_json(const PredictionTable& t)
{
    json j;
    j["schema"] = schema_version;
    j["type"] = "prediction_table";
    j["direction"] = to_string(t.direction);
    j["resolution"] = t.N;
    j["x_breaks"] = t.x_breaks;
    j["y_breaks"] = t.y_breaks;
    json rows = json::array();
    for (std::size_t i = 0; i < t.N; ++i) {
        rows.push_back(std::vector<double>(t.cond.begin() + static_cast<std::ptrdiff_t>(i * t.N),
                                           t.cond.begin() + static_cast<std::ptrdiff_t>((i + 1) * t.N)));
    }
    j["cond"] = std::move(rows);
    return j;
}

inline json intervals_json(const std::vector<PredictedInterval>& iv)
{
    json a = json::array();
    for (const auto& x : iv) a.push_back(json{{"lo", x.lo}, {"hi", x.hi}, {"probability", x.probability}});
    return a;
}

inline json to_json(const Prediction& p)
{
    json j;
    j["schema"] = schema_version;
    j["type"] = "prediction";
    j["direction"] = to_string(p.direction);
    j["value"] = p.value;
    j["strip"] = p.strip + 1;
    j["strip_interval"] = {p.strip_lo, p.strip_hi};
    j["intervals"] = intervals_json(p.intervals);
    j["merged_intervals"] = intervals_json(merge_zero_width(p.intervals));
    return j;
}

/// Matrices for heatmap rendering; row f, column j holds the (f, j) entry.
inline json heatmap_bundle(const PairwiseResult& pw)
{
    json j;
    j["schema"] = schema_version;
    j["type"] = "pairwise_heatmap";
    j["variables"] = pw.variables;
    j["q"] = detail::matrix_rows(pw.q);
    j["p_q"] = detail::matrix_rows(pw.p_q);
    j["asymmetry"] = detail::matrix_rows(pw.asymmetry);
    j["p_asymmetry"] = detail::matrix_rows(pw.p_asymmetry);
    j["n_used"] = detail::matrix_rows(pw.n_used);
    j["warnings"] = pw.warnings;
    return j;
}

}  // namespace qad::io
