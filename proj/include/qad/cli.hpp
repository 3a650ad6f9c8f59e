#pragma once

// The qad command-line front end. run() takes the argument list without the
// program name and writes data to `out`, diagnostics to `err`.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qad/correlation.hpp"
#include "qad/error.hpp"
#include "qad/estimator.hpp"
#include "qad/io/csv.hpp"
#include "qad/io/json.hpp"
#include "qad/network.hpp"
#include "qad/pairwise.hpp"
#include "qad/predictor.hpp"
#include "qad/sims.hpp"

namespace qad::cli {

enum exit_code : int { ok = 0, internal = 1, usage = 2, data = 3, numeric = 4 };

namespace detail {

struct Common {
    unsigned threads = 0;
    int precision = io::default_csv_precision;
    bool quiet = false;
    bool verbose = false;
    std::vector<std::string> missing{"", "NA"};
    std::string delimiter;
};

inline void add_common(CLI::App* app, Common& c)
{
    app->add_option("--threads", c.threads, "Worker threads (0: $QAD_THREADS or all cores)");
    app->add_option("--precision", c.precision, "Significant digits in CSV output")->check(CLI::Range(1, 17));
    app->add_flag("-q,--quiet", c.quiet, "Suppress warnings");
    app->add_flag("-v,--verbose", c.verbose, "Print progress details to stderr");
    app->add_option("--missing", c.missing, "Cell values read as missing")->delimiter(',');
    app->add_option("--delimiter", c.delimiter, "Input field delimiter (default: detect)");
}

inline io::Ingested read_table(const std::string& path, const Common& c, std::ostream& err)
{
    io::CsvOptions o;
    o.missing_markers = c.missing;
    if (!c.delimiter.empty()) {
        if (c.delimiter == "\\t" || c.delimiter == "tab") {
            o.delimiter = '\t';
        } else if (c.delimiter.size() == 1) {
            o.delimiter = c.delimiter[0];
        } else {
            throw argument_error("--delimiter must be a single character");
        }
    }
    io::Ingested in = io::ingest_csv(path, o);
    if (!c.quiet) {
        if (in.report.non_numeric_cells > 0)
            err << "warning: " << in.report.non_numeric_cells << " non-numeric cell(s) read as missing\n";
        for (const auto& l : in.report.label_columns) err << "warning: skipping text column '" << l << "'\n";
    }
    return in;
}

inline void warn_all(const std::vector<std::string>& ws, const Common& c, std::ostream& err)
{
    if (c.quiet) return;
    for (const auto& w : ws) err << "warning: " << w << '\n';
}

inline void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& body)
{
    if (path.empty() || path == "-") {
        body(out);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot write '" + path + "'");
    body(f);
    if (!f) throw data_error("cannot write '" + path + "'");
}

inline std::filesystem::path prepare_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw data_error("cannot create output directory '" + dir + "'");
    return dir;
}

inline BivariateSample pair_sample(const DataTable& t, const std::string& x, const std::string& y,
                                   const Common& c, std::ostream& err)
{
    auto [xs, ys] = complete_pairs(t.column(x), t.column(y));
    const std::size_t dropped = t.rows() - xs.size();
    if (dropped > 0 && !c.quiet) err << "warning: " << dropped << " row(s) with missing values excluded\n";
    return BivariateSample(std::move(xs), std::move(ys));
}

inline DataTable choose_columns(const DataTable& t, const std::vector<std::string>& cols)
{
    if (cols.empty()) return t;
    std::vector<std::size_t> keep;
    for (const auto& c : cols) keep.push_back(t.index_of(c));
    return t.select(keep);
}

inline std::vector<std::size_t> parse_sizes(const std::vector<std::string>& items)
{
    std::vector<std::size_t> out;
    for (const auto& s : items) {
        std::size_t v = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size() || v < 1)
            throw argument_error("invalid sample size '" + s + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Asymmetric copula-based dependence (qad): estimation, tests, prediction, networks"};
    app.name("qad");
    app.require_subcommand(1);
    app.set_version_flag("--version", "qad 1.0.0");

    detail::Common common;
    std::function<void()> action;

    // compute
    auto* compute = app.add_subcommand("compute", "q(X,Y), q(Y,X) and asymmetry for two columns");
    struct {
        std::string file, x, y, out, format = "json";
        std::size_t permutations = 0;
        std::uint64_t seed = 0;
        std::optional<std::size_t> resolution;
    } c_args;
    compute->add_option("file", c_args.file, "Input CSV")->required();
    compute->add_option("--x", c_args.x, "Column used as X")->required();
    compute->add_option("--y", c_args.y, "Column used as Y")->required();
    compute->add_option("-B,--permutations", c_args.permutations, "Permutations for the tests (0: skip)");
    compute->add_option("--seed", c_args.seed, "Random seed");
    compute->add_option("--resolution", c_args.resolution, "Override the checkerboard resolution N")
        ->check(CLI::PositiveNumber);
    compute->add_option("-o,--out", c_args.out, "Output file (default: stdout)");
    compute->add_option("--format", c_args.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    detail::add_common(compute, common);
    compute->callback([&] {
        action = [&] {
            const auto in = detail::read_table(c_args.file, common, err);
            const BivariateSample s = detail::pair_sample(in.table, c_args.x, c_args.y, common, err);
            QadOptions o;
            o.permutations = c_args.permutations;
            o.seed = c_args.seed;
            o.resolution_override = c_args.resolution;
            o.threads = common.threads;
            const QadResult r = qad_compute(s, o);
            detail::warn_all(r.warnings, common, err);
            if (common.verbose) err << "n = " << r.n << ", resolution N = " << r.resolution << '\n';
            detail::emit(c_args.out, out, [&](std::ostream& os) {
                if (c_args.format == "csv") {
                    io::write_qad_result_csv(os, r, common.precision);
                } else {
                    io::write_json(os, io::to_json(r));
                }
            });
        };
    });

    // pairwise
    auto* pairwise = app.add_subcommand("pairwise", "qad for every pair of columns");
    struct {
        std::string file, out;
        double filter = 0.25;
        std::optional<double> min_unique;
        std::size_t permutations = 0;
        std::uint64_t seed = 0;
        bool listwise = false;
        bool no_filter = false;
        std::vector<std::string> columns;
    } p_args;
    pairwise->add_option("file", p_args.file, "Input CSV")->required();
    pairwise->add_option("--filter-ties", p_args.filter, "Drop columns whose most frequent value covers this share")
        ->check(CLI::Range(0.0, 1.0));
    pairwise->add_flag("--no-filter", p_args.no_filter, "Keep every column");
    pairwise->add_option("--min-unique-prop", p_args.min_unique, "Drop columns with fewer distinct values");
    pairwise->add_option("-B,--permutations", p_args.permutations, "Permutations for the tests (0: skip)");
    pairwise->add_option("--seed", p_args.seed, "Random seed");
    pairwise->add_flag("--listwise", p_args.listwise, "Use only rows complete in every column");
    pairwise->add_option("--columns", p_args.columns, "Restrict to these columns")->delimiter(',');
    pairwise->add_option("-o,--out", p_args.out, "Output directory")->required();
    detail::add_common(pairwise, common);
    pairwise->callback([&] {
        action = [&] {
            const auto in = detail::read_table(p_args.file, common, err);
            DataTable table = detail::choose_columns(in.table, p_args.columns);
            FilterResult fr{table, {}};
            if (!p_args.no_filter) fr = filter_columns(table, p_args.filter, p_args.min_unique);
            if (!common.quiet)
                for (const auto& d : fr.dropped)
                    err << "warning: dropped column '" << d.name << "' (" << d.reason << ")\n";
            PairwiseOptions o;
            o.qad.permutations = p_args.permutations;
            o.qad.seed = p_args.seed;
            o.qad.threads = common.threads;
            o.listwise = p_args.listwise;
            const PairwiseResult pw = pairwise_qad(fr.table, o);
            detail::warn_all(pw.warnings, common, err);
            const auto dir = detail::prepare_dir(p_args.out);
            detail::emit((dir / "pairwise.csv").string(), out,
                         [&](std::ostream& os) { io::write_pairwise_csv(os, pw, common.precision); });
            detail::emit((dir / "heatmap.json").string(), out,
                         [&](std::ostream& os) { io::write_json(os, io::heatmap_bundle(pw)); });
            detail::emit((dir / "filter_report.csv").string(), out,
                         [&](std::ostream& os) { io::write_filter_report_csv(os, fr, common.precision); });
            const auto base_table = p_args.listwise ? fr.table.complete_rows() : fr.table;
            detail::emit((dir / "correlations.csv").string(), out, [&](std::ostream& os) {
                io::write_correlations_csv(os, baseline_correlations(base_table), common.precision);
            });
            if (common.verbose) err << "wrote pairwise results for " << pw.variables.size() << " columns\n";
        };
    });

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "Conditional distribution of one column given a value of the other");
    struct {
        std::string file, x, y, out, direction = "xy";
        double at = 0.0;
        bool at_given = false;
        bool table = false;
        std::optional<std::size_t> resolution;
    } r_args;
    predict_cmd->add_option("file", r_args.file, "Input CSV")->required();
    predict_cmd->add_option("--x", r_args.x, "Column used as X")->required();
    predict_cmd->add_option("--y", r_args.y, "Column used as Y")->required();
    auto* at_opt = predict_cmd->add_option("--at", r_args.at, "Value of the conditioning variable");
    predict_cmd->add_option("--direction", r_args.direction, "xy: predict Y from X; yx: X from Y")
        ->check(CLI::IsMember({"xy", "yx"}));
    predict_cmd->add_option("--resolution", r_args.resolution, "Override the checkerboard resolution N")
        ->check(CLI::PositiveNumber);
    predict_cmd->add_flag("--table", r_args.table, "Print the whole prediction table instead");
    predict_cmd->add_option("-o,--out", r_args.out, "Output file (default: stdout)");
    detail::add_common(predict_cmd, common);
    predict_cmd->callback([&] {
        r_args.at_given = at_opt->count() > 0;
        if (!r_args.at_given && !r_args.table) throw CLI::RequiredError("--at (or --table)");
        action = [&] {
            const auto in = detail::read_table(r_args.file, common, err);
            const BivariateSample s = detail::pair_sample(in.table, r_args.x, r_args.y, common, err);
            const PredictionTable t = prediction_table(s, parse_direction(r_args.direction), r_args.resolution);
            detail::emit(r_args.out, out, [&](std::ostream& os) {
                if (r_args.table && !r_args.at_given) {
                    io::write_json(os, io::to_json(t));
                } else {
                    io::write_json(os, io::to_json(predict(t, r_args.at)));
                }
            });
        };
    });

    // network
    auto* network = app.add_subcommand("network", "Thresholded dependency network with node metrics");
    struct {
        std::string file, out, test = "sign";
        double q_threshold = default_q_threshold, alpha = default_alpha, filter = 0.25;
        bool no_filter = false;
        bool listwise = false;
        std::size_t permutations = 0;
        std::uint64_t seed = 0;
        std::vector<std::string> columns;
    } n_args;
    network->add_option("file", n_args.file, "Input CSV")->required();
    network->add_option("--q-threshold", n_args.q_threshold, "Minimum q for an edge")->check(CLI::Range(0.0, 1.0));
    network->add_option("--alpha", n_args.alpha, "Significance level for an edge")->check(CLI::Range(0.0, 1.0));
    network->add_option("-B,--permutations", n_args.permutations, "Permutations for the tests")->required();
    network->add_option("--seed", n_args.seed, "Random seed");
    network->add_option("--filter-ties", n_args.filter, "Drop columns whose most frequent value covers this share")
        ->check(CLI::Range(0.0, 1.0));
    network->add_flag("--no-filter", n_args.no_filter, "Keep every column");
    network->add_flag("--listwise", n_args.listwise, "Use only rows complete in every column");
    network->add_option("--columns", n_args.columns, "Restrict to these columns")->delimiter(',');
    network->add_option("--influence-test", n_args.test, "sign, signed-rank or t")
        ->check(CLI::IsMember({"sign", "signed-rank", "t"}));
    network->add_option("-o,--out", n_args.out, "Output directory")->required();
    detail::add_common(network, common);
    network->callback([&] {
        if (n_args.permutations == 0) throw CLI::ValidationError("--permutations", "network needs B > 0");
        action = [&] {
            const auto in = detail::read_table(n_args.file, common, err);
            DataTable table = detail::choose_columns(in.table, n_args.columns);
            FilterResult fr{table, {}};
            if (!n_args.no_filter) fr = filter_columns(table, n_args.filter);
            if (!common.quiet)
                for (const auto& d : fr.dropped)
                    err << "warning: dropped column '" << d.name << "' (" << d.reason << ")\n";
            PairwiseOptions o;
            o.qad.permutations = n_args.permutations;
            o.qad.seed = n_args.seed;
            o.qad.threads = common.threads;
            o.listwise = n_args.listwise;
            const PairwiseResult pw = pairwise_qad(fr.table, o);
            detail::warn_all(pw.warnings, common, err);
            const DependencyNetwork net = build_network(pw, n_args.q_threshold, n_args.alpha);
            const auto infl = influence_summary(pw, parse_influence_test(n_args.test));
            const auto dir = detail::prepare_dir(n_args.out);
            detail::emit((dir / "edges.csv").string(), out,
                         [&](std::ostream& os) { io::write_edges_csv(os, net, common.precision); });
            detail::emit((dir / "nodes.csv").string(), out,
                         [&](std::ostream& os) { io::write_nodes_csv(os, net, common.precision); });
            detail::emit((dir / "influence.csv").string(), out,
                         [&](std::ostream& os) { io::write_influence_csv(os, infl, common.precision); });
            detail::emit((dir / "network.graphml").string(), out, [&](std::ostream& os) { io::write_graphml(os, net); });
            detail::emit((dir / "pairwise.csv").string(), out,
                         [&](std::ostream& os) { io::write_pairwise_csv(os, pw, common.precision); });
            if (common.verbose) err << net.edges.size() << " edge(s) among " << net.nodes.size() << " nodes\n";
        };
    });

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Convergence experiments and synthetic shapes");
    simulate->require_subcommand(1);
    struct {
        std::vector<std::string> sizes{"1000"};
        std::size_t reps = 1;
        std::uint64_t seed = 0;
        std::string out, sample_out;
    } s_args;
    auto add_sim_common = [&](CLI::App* sub) {
        sub->add_option("-n,--n", s_args.sizes, "Sample size(s), comma separated")->delimiter(',');
        sub->add_option("--reps", s_args.reps, "Replicates per sample size")->check(CLI::PositiveNumber);
        sub->add_option("--seed", s_args.seed, "Random seed");
        sub->add_option("-o,--out", s_args.out, "Experiment CSV (default: stdout)");
        sub->add_option("--sample-out", s_args.sample_out, "Also write the first replicate's sample as CSV");
        detail::add_common(sub, common);
    };
    CopulaModel model = Independence{};
    auto run_experiment = [&] {
        const auto sizes = detail::parse_sizes(s_args.sizes);
        const ConvergenceResult res = convergence_experiment(model, sizes, s_args.reps, s_args.seed, common.threads);
        if (!s_args.sample_out.empty()) {
            const BivariateSample s = sample_model(model, sizes.front(), replicate_seed(s_args.seed, sizes.front(), 0));
            detail::emit(s_args.sample_out, out, [&](std::ostream& os) { io::write_sample_csv(os, s); });
        }
        detail::emit(s_args.out, out, [&](std::ostream& os) { io::write_convergence_csv(os, res, common.precision); });
    };

    MarshallOlkin mo;
    auto* sim_mo = simulate->add_subcommand("mo", "Marshall-Olkin copula");
    sim_mo->add_option("--alpha", mo.alpha, "alpha in [0,1]")->required();
    sim_mo->add_option("--beta", mo.beta, "beta in [0,1]")->required();
    add_sim_common(sim_mo);
    sim_mo->callback([&] {
        action = [&] {
            model = mo;
            run_experiment();
        };
    });

    Fgm fgm;
    auto* sim_fgm = simulate->add_subcommand("fgm", "Farlie-Gumbel-Morgenstern copula");
    sim_fgm->add_option("--theta", fgm.theta, "theta in [-1,1]")->required();
    add_sim_common(sim_fgm);
    sim_fgm->callback([&] {
        action = [&] {
            model = fgm;
            run_experiment();
        };
    });

    CompletelyDependent cd;
    auto* sim_cd = simulate->add_subcommand("cd", "Completely dependent copula of y = a x mod 1");
    sim_cd->add_option("-a,--a", cd.a, "Positive integer slope")->required()->check(CLI::PositiveNumber);
    add_sim_common(sim_cd);
    sim_cd->callback([&] {
        action = [&] {
            model = cd;
            run_experiment();
        };
    });

    auto* sim_ind = simulate->add_subcommand("independence", "Product copula");
    add_sim_common(sim_ind);
    sim_ind->callback([&] {
        action = [&] {
            model = Independence{};
            run_experiment();
        };
    });

    struct {
        std::string name, out;
        double a = 0.0;
        std::size_t n = 1000;
        std::uint64_t seed = 0;
        bool raw = false;
    } sh_args;
    auto* sim_shape = simulate->add_subcommand("shape", "Noisy synthetic dependence shape as x,y CSV");
    sim_shape->add_option("name", sh_args.name, "linear, x_cross, two_parallel_lines, two_rotated_lines, "
                                                "non_coexistence, quadratic, sinus, torus, periodic_pattern")
        ->required();
    sim_shape->add_option("-a,--a", sh_args.a, "Noise amplitude");
    sim_shape->add_option("-n,--n", sh_args.n, "Sample size")->check(CLI::PositiveNumber);
    sim_shape->add_option("--seed", sh_args.seed, "Random seed");
    sim_shape->add_flag("--raw", sh_args.raw, "Skip the min-max rescaling");
    sim_shape->add_option("-o,--out", sh_args.out, "Output file (default: stdout)");
    detail::add_common(sim_shape, common);
    sim_shape->callback([&] {
        action = [&] {
            const ShapeGenerator g{parse_shape(sh_args.name), sh_args.a, sh_args.n};
            const BivariateSample s = sh_args.raw ? generate_shape_raw(g, sh_args.seed) : generate_shape(g, sh_args.seed);
            detail::emit(sh_args.out, out, [&](std::ostream& os) { io::write_sample_csv(os, s); });
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << "qad 1.0.0\n";
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "run 'qad --help' for usage\n";
        return usage;
    }

    try {
        if (action) action();
        out.flush();
        return ok;
    } catch (const argument_error& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const data_error& e) {
        err << "error: " << e.what() << '\n';
        return data;
    } catch (const numeric_error& e) {
        err << "error: " << e.what() << '\n';
        return numeric;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return internal;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace qad::cli
