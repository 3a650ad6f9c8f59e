#include <gtest/gtest.h>

#include <clocale>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "qad/io/csv.hpp"
#include "qad/io/json.hpp"

using namespace qad;
using namespace qad::io;

namespace {

const std::string wdi_path = std::string(QAD_FIXTURES_DIR) + "/wdi.csv";

std::string error_of(const std::string& text)
{
    try {
        ingest_csv_text(text);
    } catch (const data_error& e) {
        return e.what();
    }
    return "";
}

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(Ingest, WdiTable)
{
    const auto in = ingest_csv(wdi_path);
    EXPECT_EQ(in.table.names(), (std::vector<std::string>{"birth", "death", "gdp"}));
    EXPECT_EQ(in.report.label_columns, (std::vector<std::string>{"country"}));
    EXPECT_EQ(in.table.names().size() + in.report.label_columns.size(), 4u);
    EXPECT_EQ(in.table.rows(), 179u);
    EXPECT_EQ(in.report.non_numeric_cells, 0u);
    std::size_t missing = 0;
    for (std::size_t c = 0; c < 3; ++c)
        for (double v : in.table.column(c)) missing += is_missing(v);
    EXPECT_GT(missing, 0u);
    EXPECT_EQ(in.table.column("birth")[0], 33.314);
    EXPECT_EQ(in.table.column("gdp")[0], 1861.12433);
}

TEST(Ingest, DominicaRowHasMissingRates)
{
    std::ifstream f(wdi_path);
    std::string line;
    std::size_t row = 0, dma = 0;
    std::getline(f, line);
    while (std::getline(f, line)) {
        if (line.rfind("DMA,", 0) == 0) dma = row;
        ++row;
    }
    const auto in = ingest_csv(wdi_path);
    EXPECT_TRUE(is_missing(in.table.column("birth")[dma]));
    EXPECT_TRUE(is_missing(in.table.column("death")[dma]));
    EXPECT_EQ(in.table.column("gdp")[dma], 10792.9615);
}

TEST(Ingest, Errors)
{
    EXPECT_NE(error_of("a,b\n").find("zero data rows"), std::string::npos);
    EXPECT_NE(error_of("a,b\n\n\n").find("zero data rows"), std::string::npos);
    EXPECT_NE(error_of("").find("missing header"), std::string::npos);
    EXPECT_NE(error_of("a,a\n1,2\n").find("duplicate"), std::string::npos);
    EXPECT_NE(error_of("a,b\n1,2,3\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("name\nfoo\n").find("no numeric columns"), std::string::npos);
    EXPECT_THROW(ingest_csv("/nonexistent/file.csv"), data_error);
}

TEST(Ingest, NonNumericCellsAreCounted)
{
    const auto in = ingest_csv_text("x,y\n1,2\nabc,3\n4,5\n");
    EXPECT_EQ(in.report.non_numeric_cells, 1u);
    EXPECT_TRUE(is_missing(in.table.column("x")[1]));
    EXPECT_EQ(in.table.column("y")[1], 3.0);
}

TEST(Ingest, FormatsAndMarkers)
{
    const auto semi = ingest_csv_text("\xEF\xBB\xBFx;y\r\n1.5;+2\r\n-3e2; 4 \r\n");
    EXPECT_EQ(semi.table.names(), (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(semi.table.column("x")[1], -300.0);
    EXPECT_EQ(semi.table.column("y")[0], 2.0);
    EXPECT_EQ(semi.table.column("y")[1], 4.0);

    const auto tab = ingest_csv_text("a\tb\n1\tNA\n\t2\n");
    EXPECT_TRUE(is_missing(tab.table.column("b")[0]));
    EXPECT_TRUE(is_missing(tab.table.column("a")[1]));
    EXPECT_EQ(tab.report.non_numeric_cells, 0u);

    const auto quoted = ingest_csv_text("\"a,1\",b\n\"1.25\",\"x\"\"y\"\n2,3\n");
    EXPECT_EQ(quoted.table.names()[0], "a,1");
    EXPECT_EQ(quoted.table.column(0)[0], 1.25);
    EXPECT_EQ(quoted.report.non_numeric_cells, 1u);

    CsvOptions o;
    o.missing_markers = {"-999"};
    const auto custom = ingest_csv_text("a,b\n-999,1\n2,NA\n", o);
    EXPECT_TRUE(is_missing(custom.table.column("a")[0]));
    EXPECT_EQ(custom.report.non_numeric_cells, 1u);

    EXPECT_FALSE(io::detail::parse_number("inf").has_value());
    EXPECT_FALSE(io::detail::parse_number("1,5").has_value());
    EXPECT_FALSE(io::detail::parse_number("nan").has_value());
}

TEST(Ingest, LocaleIndependent)
{
    const char* old = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = old ? old : "C";
    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") == nullptr) std::setlocale(LC_NUMERIC, "C");
    const auto in = ingest_csv_text("x\n0.5\n");
    EXPECT_EQ(in.table.column(0)[0], 0.5);
    EXPECT_EQ(fmt(0.25), "0.25");
    std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(Format, Precision)
{
    EXPECT_EQ(fmt(1.0 / 3.0), "0.333333");
    EXPECT_EQ(fmt(1.0 / 3.0, 3), "0.333");
    EXPECT_EQ(fmt(std::nan("")), "NA");
    EXPECT_EQ(fmt(2.0), "2");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("q\"x"), "\"q\"\"x\"");
}

TEST(Json, NumbersRoundTrip)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, (i % 21) - 10);
        const std::string s = io::detail::number_17(v);
        EXPECT_EQ(std::stod(s), v);
        EXPECT_EQ(json::parse(s).get<double>(), v);
    }
}

TEST(Json, QadResultDocument)
{
    QadResult r;
    r.q_xy = 0.1;
    r.q_yx = 2.0 / 3.0;
    r.mean_dependence = (r.q_xy + r.q_yx) / 2.0;
    r.asymmetry = r.q_xy - r.q_yx;
    r.n = 17;
    r.resolution = 4;
    r.p_q_xy = 0.01;
    r.warnings = {"w1"};
    const std::string text = to_json_string(to_json(r));
    EXPECT_NE(text.find("\"schema\": \"qad/1\""), std::string::npos);
    EXPECT_NE(text.find("0.10000000000000001"), std::string::npos);
    EXPECT_NE(text.find("\"p_q_yx\": null"), std::string::npos);
    const auto back = json::parse(text);
    EXPECT_EQ(back["q_yx"].get<double>(), r.q_yx);
    EXPECT_EQ(back["asymmetry"].get<double>(), r.asymmetry);
    EXPECT_EQ(back["n"].get<std::size_t>(), 17u);
    EXPECT_EQ(back["warnings"][0], "w1");
}

TEST(Json, NonFiniteBecomesNull)
{
    json j;
    j["a"] = std::nan("");
    j["b"] = std::vector<double>{1.5, std::numeric_limits<double>::infinity()};
    EXPECT_EQ(to_json_string(j, 0), "{\"a\":null,\"b\":[1.5,null]}\n");
}

TEST(Json, HeatmapBundle)
{
    PairwiseResult pw;
    pw.variables = {"a", "b"};
    pw.q = pw.p_q = pw.asymmetry = pw.p_asymmetry = pw.n_used = SquareMatrix(2);
    pw.q(0, 1) = 0.4;
    pw.q(1, 0) = 0.2;
    const auto back = json::parse(to_json_string(heatmap_bundle(pw)));
    EXPECT_EQ(back["type"], "pairwise_heatmap");
    EXPECT_TRUE(back["q"][0][0].is_null());
    EXPECT_EQ(back["q"][0][1].get<double>(), 0.4);
    EXPECT_EQ(back["q"][1][0].get<double>(), 0.2);
}

TEST(Json, Prediction)
{
    Prediction p;
    p.strip = 2;
    p.intervals = {{0, 0, 0.25}, {0, 1, 0.75}};
    const auto back = json::parse(to_json_string(to_json(p)));
    EXPECT_EQ(back["strip"].get<int>(), 3);
    EXPECT_EQ(back["intervals"].size(), 2u);
    EXPECT_EQ(back["merged_intervals"].size(), 1u);
    EXPECT_EQ(back["merged_intervals"][0]["probability"].get<double>(), 1.0);
}

TEST(Writers, PairwiseAndNetwork)
{
    PairwiseResult pw;
    pw.variables = {"a", "b,c", "d"};
    pw.q = pw.p_q = pw.asymmetry = pw.p_asymmetry = pw.n_used = SquareMatrix(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) {
                pw.q(i, j) = i < j ? 0.5 : 0.2;
                pw.p_q(i, j) = 0.01;
            }
    pw.has_p_values = true;
    std::ostringstream os;
    write_pairwise_csv(os, pw);
    EXPECT_EQ(count_lines(os.str()), 7u);
    EXPECT_NE(os.str().find("\"b,c\""), std::string::npos);

    const auto net = build_network(pw);
    std::ostringstream e, n, g;
    write_edges_csv(e, net);
    write_nodes_csv(n, net);
    write_graphml(g, net);
    EXPECT_EQ(count_lines(e.str()), 4u);
    EXPECT_EQ(count_lines(n.str()), 4u);
    EXPECT_NE(g.str().find("<graphml"), std::string::npos);
    EXPECT_EQ(xml_escape("a<b&\"c\""), "a&lt;b&amp;&quot;c&quot;");
}

TEST(Writers, SampleRoundTrip)
{
    const BivariateSample s({0.1, 1.0 / 3.0, 2e-17}, {5.0, -1.25, 7.0 / 9.0});
    std::ostringstream os;
    write_sample_csv(os, s);
    const auto in = ingest_csv_text(os.str());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(in.table.column("x")[i], s.xs()[i]);
        EXPECT_EQ(in.table.column("y")[i], s.ys()[i]);
    }
}
