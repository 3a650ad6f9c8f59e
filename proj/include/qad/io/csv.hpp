#pragma once

// Delimited-text ingestion into a DataTable, and the CSV writers.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "qad/correlation.hpp"
#include "qad/data_table.hpp"
#include "qad/error.hpp"
#include "qad/network.hpp"
#include "qad/pairwise.hpp"
#include "qad/predictor.hpp"
#include "qad/sample.hpp"
#include "qad/sims.hpp"

namespace qad::io {

struct CsvOptions {
    std::vector<std::string> missing_markers{"", "NA"};
    std::optional<char> delimiter;  ///< auto-detected from the header when unset
};

struct IngestReport {
    std::size_t non_numeric_cells = 0;       ///< numeric-column cells read as missing
    std::vector<std::string> label_columns;  ///< all-text columns, skipped
};

struct Ingested {
    DataTable table;
    IngestReport report;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Splits one record; quoted fields may contain the delimiter and "" escapes.
inline std::vector<std::string> split_record(std::string_view line, char delim)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false, was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && trim(cur).empty()) {
            quoted = true;
            was_quoted = true;
            cur.clear();
        } else if (c == delim) {
            out.push_back(was_quoted ? cur : std::string(trim(cur)));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(was_quoted ? cur : std::string(trim(cur)));
    return out;
}

inline char detect_delimiter(std::string_view header)
{
    if (header.find('\t') != std::string_view::npos) return '\t';
    if (header.find(',') == std::string_view::npos && header.find(';') != std::string_view::npos) return ';';
    return ',';
}

/// Locale-independent number parse; nullopt unless the whole cell is a finite number.
inline std::optional<double> parse_number(std::string_view s)
{
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace detail

inline Ingested ingest_csv_text(const std::string& text, const CsvOptions& opts = {})
{
    std::vector<std::string> lines;
    {
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
    }
    while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw data_error("missing header row");
    if (lines.front().size() >= 3 && lines.front().compare(0, 3, "\xEF\xBB\xBF") == 0) lines.front().erase(0, 3);

    const char delim = opts.delimiter.value_or(detail::detect_delimiter(lines.front()));
    const std::vector<std::string> header = detail::split_record(lines.front(), delim);
    {
        std::unordered_set<std::string> seen;
        for (const auto& h : header) {
            if (h.empty()) throw data_error("empty column name in header");
            if (!seen.insert(h).second) throw data_error("duplicate column name '" + h + "'");
        }
    }
    const std::size_t k = header.size();

    std::vector<std::vector<std::string>> cells(k);
    std::size_t rows = 0;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (detail::trim(lines[ln]).empty()) continue;
        auto rec = detail::split_record(lines[ln], delim);
        if (rec.size() != k) {
            throw data_error("line " + std::to_string(ln + 1) + " has " + std::to_string(rec.size()) +
                             " fields, expected " + std::to_string(k));
        }
        for (std::size_t c = 0; c < k; ++c) cells[c].push_back(std::move(rec[c]));
        ++rows;
    }
    if (rows == 0) throw data_error("zero data rows");

    auto is_marker = [&](const std::string& s) {
        return std::find(opts.missing_markers.begin(), opts.missing_markers.end(), s) != opts.missing_markers.end();
    };

    Ingested out;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> col(rows, missing_value);
        std::size_t numeric = 0, text_cells = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            if (is_marker(cells[c][r])) continue;
            if (auto v = detail::parse_number(cells[c][r])) {
                col[r] = *v;
                ++numeric;
            } else {
                ++text_cells;
            }
        }
        if (numeric == 0 && text_cells > 0) {
            out.report.label_columns.push_back(header[c]);
            continue;
        }
        out.report.non_numeric_cells += text_cells;
        names.push_back(header[c]);
        columns.push_back(std::move(col));
    }
    if (names.empty()) throw data_error("no numeric columns");
    out.table = DataTable(std::move(names), std::move(columns));
    return out;
}

inline Ingested ingest_csv(const std::string& path, const CsvOptions& opts = {})
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw data_error("cannot read file '" + path + "'");
    return ingest_csv_text(buf.str(), opts);
}

inline constexpr int default_csv_precision = 6;

/// %g-style formatting at the given significant digits, independent of the
/// C locale; missing values are written as NA.
inline std::string fmt(double v, int precision = default_csv_precision)
{
    if (std::isnan(v)) return "NA";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
    return std::string(buf, r.ptr);
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_sample_csv(std::ostream& os, const BivariateSample& s, int precision = 17)
{
    os << "x,y\n";
    for (std::size_t i = 0; i < s.size(); ++i) os << fmt(s.xs()[i], precision) << ',' << fmt(s.ys()[i], precision) << '\n';
}

inline void write_qad_result_csv(std::ostream& os, const QadResult& r, int precision = default_csv_precision)
{
    auto opt = [&](const std::optional<double>& v) { return v ? fmt(*v, precision) : std::string("NA"); };
    os << "n,n_unique_x,n_unique_y,resolution,q_xy,q_yx,mean_dependence,asymmetry,p_q_xy,p_q_yx,p_asymmetry\n";
    os << r.n << ',' << r.n_unique_x << ',' << r.n_unique_y << ',' << r.resolution << ',' << fmt(r.q_xy, precision)
       << ',' << fmt(r.q_yx, precision) << ',' << fmt(r.mean_dependence, precision) << ','
       << fmt(r.asymmetry, precision) << ',' << opt(r.p_q_xy) << ',' << opt(r.p_q_yx) << ',' << opt(r.p_asymmetry)
       << '\n';
}

/// One row per ordered pair (var1, var2): q = q(var1, var2).
inline void write_pairwise_csv(std::ostream& os, const PairwiseResult& pw, int precision = default_csv_precision)
{
    os << "var1,var2,q,p_q,a,p_a,n_used\n";
    const std::size_t k = pw.variables.size();
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t j = 0; j < k; ++j) {
            if (f == j) continue;
            os << csv_field(pw.variables[f]) << ',' << csv_field(pw.variables[j]) << ',' << fmt(pw.q(f, j), precision)
               << ',' << fmt(pw.p_q(f, j), precision) << ',' << fmt(pw.asymmetry(f, j), precision) << ','
               << fmt(pw.p_asymmetry(f, j), precision) << ',' << fmt(pw.n_used(f, j), 17) << '\n';
        }
    }
}

inline void write_correlations_csv(std::ostream& os, const CorrelationMatrices& c, int precision = default_csv_precision)
{
    os << "var1,var2,pearson_r,r_squared,spearman_rho\n";
    const std::size_t k = c.variables.size();
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t j = 0; j < k; ++j) {
            if (f == j) continue;
            os << csv_field(c.variables[f]) << ',' << csv_field(c.variables[j]) << ',' << fmt(c.pearson_r(f, j), precision)
               << ',' << fmt(c.r_squared(f, j), precision) << ',' << fmt(c.spearman_rho(f, j), precision) << '\n';
        }
    }
}

inline void write_filter_report_csv(std::ostream& os, const FilterResult& fr, int precision = default_csv_precision)
{
    os << "column,max_single_value_prop,unique_prop,reason\n";
    for (const auto& d : fr.dropped) {
        os << csv_field(d.name) << ',' << fmt(d.max_single_value_prop, precision) << ','
           << fmt(d.unique_prop, precision) << ',' << csv_field(d.reason) << '\n';
    }
}

/// Rows are conditioning intervals: strip, lo, hi, then the N probabilities
/// (column p_j is target interval j of the target margin's breaks).
inline void write_prediction_table_csv(std::ostream& os, const PredictionTable& t, int precision = default_csv_precision)
{
    const auto& cb = t.conditioning_breaks();
    os << "strip,lo,hi";
    for (std::size_t j = 0; j < t.N; ++j) os << ",p_" << j + 1;
    os << '\n';
    for (std::size_t i = 0; i < t.N; ++i) {
        os << i + 1 << ',' << fmt(cb[i], precision) << ',' << fmt(cb[i + 1], precision);
        for (std::size_t j = 0; j < t.N; ++j) os << ',' << fmt(t.at(i, j), precision);
        os << '\n';
    }
}

inline void write_edges_csv(std::ostream& os, const DependencyNetwork& net, int precision = default_csv_precision)
{
    os << "source,target,weight,p_q\n";
    for (const auto& e : net.edges) {
        os << csv_field(net.nodes[e.source]) << ',' << csv_field(net.nodes[e.target]) << ','
           << fmt(e.weight, precision) << ',' << fmt(e.p_value, precision) << '\n';
    }
}

inline void write_nodes_csv(std::ostream& os, const DependencyNetwork& net, int precision = default_csv_precision)
{
    os << "node,in_degree,out_degree,degree,betweenness,hub_score\n";
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        os << csv_field(net.nodes[i]) << ',' << net.in_degree[i] << ',' << net.out_degree[i] << ',' << net.degree[i]
           << ',' << fmt(net.betweenness[i], precision) << ',' << fmt(net.hub_score[i], precision) << '\n';
    }
}

inline void write_influence_csv(std::ostream& os, const std::vector<InfluenceRow>& rows,
                                int precision = default_csv_precision)
{
    os << "variable,partners,median_I,q25_I,q75_I,mean_influence_given,mean_influence_received,p_median_positive\n";
    for (const auto& r : rows) {
        os << csv_field(r.name) << ',' << r.partners << ',' << fmt(r.median_I, precision) << ','
           << fmt(r.q25_I, precision) << ',' << fmt(r.q75_I, precision) << ',' << fmt(r.mean_influence_given, precision)
           << ',' << fmt(r.mean_influence_received, precision) << ',' << fmt(r.p_median_positive, precision) << '\n';
    }
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceResult& res, int precision = default_csv_precision)
{
    os << "model,params,n,replicate,q_xy,q_yx,ref_xy,ref_yx\n";
    const std::string name = model_name(res.model), params = model_params(res.model);
    const std::string ref_xy = fmt(res.reference.forward, precision);
    const std::string ref_yx = res.reference.transpose ? fmt(*res.reference.transpose, precision) : "NA";
    for (const auto& r : res.rows) {
        os << name << ',' << csv_field(params) << ',' << r.n << ',' << r.replicate << ',' << fmt(r.q_xy, precision) << ','
           << fmt(r.q_yx, precision) << ',' << ref_xy << ',' << ref_yx << '\n';
    }
}

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

/// GraphML with q weights and p-values on edges and the node metrics as attributes.
inline void write_graphml(std::ostream& os, const DependencyNetwork& net)
{
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
          "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
          "  <key id=\"p_q\" for=\"edge\" attr.name=\"p_q\" attr.type=\"double\"/>\n"
          "  <key id=\"degree\" for=\"node\" attr.name=\"degree\" attr.type=\"int\"/>\n"
          "  <key id=\"betweenness\" for=\"node\" attr.name=\"betweenness\" attr.type=\"double\"/>\n"
          "  <key id=\"hub_score\" for=\"node\" attr.name=\"hub_score\" attr.type=\"double\"/>\n"
          "  <graph id=\"qad\" edgedefault=\"directed\">\n";
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        os << "    <node id=\"" << xml_escape(net.nodes[i]) << "\">\n"
           << "      <data key=\"degree\">" << net.degree[i] << "</data>\n"
           << "      <data key=\"betweenness\">" << fmt(net.betweenness[i], 17) << "</data>\n"
           << "      <data key=\"hub_score\">" << fmt(net.hub_score[i], 17) << "</data>\n"
           << "    </node>\n";
    }
    for (const auto& e : net.edges) {
        os << "    <edge source=\"" << xml_escape(net.nodes[e.source]) << "\" target=\""
           << xml_escape(net.nodes[e.target]) << "\">\n"
           << "      <data key=\"weight\">" << fmt(e.weight, 17) << "</data>\n"
           << "      <data key=\"p_q\">" << fmt(e.p_value, 17) << "</data>\n"
           << "    </edge>\n";
    }
    os << "  </graph>\n</graphml>\n";
}

}  // namespace qad::io
