#pragma once

// Validation copula families with closed-form zeta_1, shape generators with
// uniform noise, and the convergence-experiment runner.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qad/checkerboard.hpp"
#include "qad/error.hpp"
#include "qad/estimator.hpp"
#include "qad/pairwise.hpp"
#include "qad/parallel.hpp"
#include "qad/random.hpp"
#include "qad/sample.hpp"

namespace qad {

struct MarshallOlkin {
    double alpha = 0.0;
    double beta = 0.0;
};
struct Fgm {
    double theta = 0.0;
};
struct CompletelyDependent {
    unsigned a = 1;
};
struct Independence {};

using CopulaModel = std::variant<MarshallOlkin, Fgm, CompletelyDependent, Independence>;

inline void validate(const CopulaModel& model)
{
    if (const auto* mo = std::get_if<MarshallOlkin>(&model)) {
        if (!(mo->alpha >= 0.0 && mo->alpha <= 1.0 && mo->beta >= 0.0 && mo->beta <= 1.0))
            throw argument_error("Marshall-Olkin parameters must lie in [0, 1]");
    } else if (const auto* g = std::get_if<Fgm>(&model)) {
        if (!(g->theta >= -1.0 && g->theta <= 1.0)) throw argument_error("FGM theta must lie in [-1, 1]");
    } else if (const auto* cd = std::get_if<CompletelyDependent>(&model)) {
        if (cd->a < 1) throw argument_error("completely dependent slope a must be a positive integer");
    }
}

inline std::string model_name(const CopulaModel& model)
{
    struct V {
        std::string operator()(const MarshallOlkin&) const { return "mo"; }
        std::string operator()(const Fgm&) const { return "fgm"; }
        std::string operator()(const CompletelyDependent&) const { return "cd"; }
        std::string operator()(const Independence&) const { return "independence"; }
    };
    return std::visit(V{}, model);
}

namespace detail {

/// Shortest text that reads back to the same double.
inline std::string shortest(double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace detail

inline std::string model_params(const CopulaModel& model)
{
    std::ostringstream os;
    if (const auto* mo = std::get_if<MarshallOlkin>(&model)) {
        os << "alpha=" << detail::shortest(mo->alpha) << ";beta=" << detail::shortest(mo->beta);
    } else if (const auto* g = std::get_if<Fgm>(&model)) {
        os << "theta=" << detail::shortest(g->theta);
    } else if (const auto* cd = std::get_if<CompletelyDependent>(&model)) {
        os << "a=" << cd->a;
    }
    return os.str();
}

namespace detail {

inline double cd_map(unsigned a, double x)
{
    const double t = static_cast<double>(a) * x;
    return t - std::floor(t);
}

inline double fgm_conditional_inverse(double theta, double u, double p)
{
    const double b = theta * (1.0 - 2.0 * u);
    if (b == 0.0) return p;
    const double c = 1.0 + b;
    return 2.0 * p / (c + std::sqrt(c * c - 4.0 * b * p));
}

}  // namespace detail

/// n i.i.d. draws from the model's copula.
inline BivariateSample sample_model(const CopulaModel& model, std::size_t n, std::uint64_t seed)
{
    validate(model);
    if (n < 1) throw argument_error("sample size must be >= 1");
    Rng rng(seed);
    std::vector<double> xs(n), ys(n);
    if (const auto* mo = std::get_if<MarshallOlkin>(&model)) {
        const double al = mo->alpha, be = mo->beta;
        for (std::size_t i = 0; i < n; ++i) {
            const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
            if (al == 0.0 || be == 0.0) {
                xs[i] = u1;
                ys[i] = u2;
                continue;
            }
            // exponent 1/(1-alpha) -> infinity at alpha = 1: that term is 0
            const double x1 = al == 1.0 ? 0.0 : std::pow(u1, 1.0 / (1.0 - al));
            const double y1 = be == 1.0 ? 0.0 : std::pow(u2, 1.0 / (1.0 - be));
            xs[i] = std::max(x1, std::pow(u3, 1.0 / al));
            ys[i] = std::max(y1, std::pow(u3, 1.0 / be));
        }
    } else if (const auto* g = std::get_if<Fgm>(&model)) {
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = rng.uniform();
            ys[i] = detail::fgm_conditional_inverse(g->theta, xs[i], rng.uniform());
        }
    } else if (const auto* cd = std::get_if<CompletelyDependent>(&model)) {
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = rng.uniform();
            ys[i] = detail::cd_map(cd->a, xs[i]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = rng.uniform();
            ys[i] = rng.uniform();
        }
    }
    return BivariateSample(std::move(xs), std::move(ys));
}

/// Copula value C(x, y) of the model.
inline double copula_cdf(const CopulaModel& model, double x, double y)
{
    validate(model);
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) throw argument_error("copula_cdf: point outside [0,1]^2");
    if (const auto* mo = std::get_if<MarshallOlkin>(&model)) {
        const double al = mo->alpha, be = mo->beta;
        return std::pow(x, al) >= std::pow(y, be) ? std::pow(x, 1.0 - al) * y : x * std::pow(y, 1.0 - be);
    }
    if (const auto* g = std::get_if<Fgm>(&model)) return x * y + g->theta * x * y * (1.0 - x) * (1.0 - y);
    if (const auto* cd = std::get_if<CompletelyDependent>(&model)) {
        // lambda{t <= x : a t mod 1 <= y}: branch k covers [k/a, (k+y)/a]
        const double a = static_cast<double>(cd->a);
        double total = 0.0;
        for (unsigned k = 0; k < cd->a; ++k) {
            const double lo = k / a, hi = (k + y) / a;
            total += std::max(0.0, std::min(hi, x) - lo);
        }
        return std::min(total, std::min(x, y));
    }
    return x * y;
}

/// N-checkerboard approximation of the model's copula from its CDF.
inline CheckerboardCopula analytic_checkerboard(const CopulaModel& model, std::size_t N)
{
    if (N < 1) throw argument_error("checkerboard resolution must be >= 1");
    std::vector<double> grid((N + 1) * (N + 1));
    for (std::size_t i = 0; i <= N; ++i)
        for (std::size_t j = 0; j <= N; ++j)
            grid[i * (N + 1) + j] = copula_cdf(model, double(i) / N, double(j) / N);
    std::vector<double> mass(N * N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            const double m = grid[(i + 1) * (N + 1) + j + 1] - grid[i * (N + 1) + j + 1] -
                             grid[(i + 1) * (N + 1) + j] + grid[i * (N + 1) + j];
            mass[i * N + j] = std::max(0.0, m);
        }
    }
    return CheckerboardCopula::from_mass(N, std::move(mass), 1e-9);
}

struct ClosedFormZeta {
    double forward = 0.0;
    std::optional<double> transpose;  ///< absent where no closed form is known
};

namespace detail {

inline double mo_zeta1(double al, double be)
{
    const double z = 1.0 / al + 2.0 / be - 1.0;
    const double c = 1.0 - al;
    return 3.0 * al * std::pow(c, z) + 6.0 / be * (1.0 - std::pow(c, z)) / z -
           6.0 / be * (1.0 - std::pow(c, z + 1.0)) / (z + 1.0);
}

}  // namespace detail

inline ClosedFormZeta zeta1_closed_form(const CopulaModel& model)
{
    validate(model);
    if (const auto* mo = std::get_if<MarshallOlkin>(&model)) {
        if (mo->alpha == 0.0 || mo->beta == 0.0) return {0.0, 0.0};
        return {detail::mo_zeta1(mo->alpha, mo->beta), detail::mo_zeta1(mo->beta, mo->alpha)};
    }
    if (const auto* g = std::get_if<Fgm>(&model)) return {std::abs(g->theta) / 4.0, std::abs(g->theta) / 4.0};
    if (std::holds_alternative<CompletelyDependent>(model)) return {1.0, std::nullopt};
    return {0.0, 0.0};
}

enum class Shape {
    linear,
    x_cross,
    two_parallel_lines,
    two_rotated_lines,
    non_coexistence,
    quadratic,
    sinus,
    torus,
    periodic_pattern
};

inline const std::vector<std::pair<Shape, std::string>>& shape_names()
{
    static const std::vector<std::pair<Shape, std::string>> names = {
        {Shape::linear, "linear"},
        {Shape::x_cross, "x_cross"},
        {Shape::two_parallel_lines, "two_parallel_lines"},
        {Shape::two_rotated_lines, "two_rotated_lines"},
        {Shape::non_coexistence, "non_coexistence"},
        {Shape::quadratic, "quadratic"},
        {Shape::sinus, "sinus"},
        {Shape::torus, "torus"},
        {Shape::periodic_pattern, "periodic_pattern"},
    };
    return names;
}

inline std::string to_string(Shape s)
{
    for (const auto& [k, v] : shape_names())
        if (k == s) return v;
    return "?";
}

inline Shape parse_shape(std::string s)
{
    std::replace(s.begin(), s.end(), '-', '_');
    for (const auto& [k, v] : shape_names())
        if (v == s) return k;
    throw argument_error("unknown shape '" + s + "'");
}

struct ShapeGenerator {
    Shape shape = Shape::linear;
    double a = 0.0;  ///< noise amplitude (radius spread for torus, cut level for non_coexistence)
    std::size_t n = 1000;
};

namespace detail {

/// n equispaced points from lo to hi (one point: lo).
inline std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

inline void min_max_rescale(std::vector<double>& v)
{
    if (v.empty()) return;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo, b = *hi;
    for (auto& x : v) x = b > a ? (x - a) / (b - a) : 0.0;
}

inline const std::vector<double>& pattern_x()
{
    static const std::vector<double> v = {0.00000000, 0.06666667, 0.13333333, 0.20000000, 0.26666667, 0.33333333,
                                          0.40000000, 0.46666667, 0.53333333, 0.60000000, 0.66666667, 0.73333333,
                                          0.80000000, 0.86666667, 0.93333333, 1.00000000};
    return v;
}

inline const std::vector<double>& pattern_y()
{
    static const std::vector<double> v = {0.66666667, 0.00000000, 1.00000000, 0.33333333, 0.66666667, 0.33333333,
                                          0.00000000, 1.00000000, 0.66666667, 0.33333333, 0.00000000, 1.00000000,
                                          0.66666667, 0.33333333, 1.00000000, 0.00000000};
    return v;
}

}  // namespace detail

/// Points of the shape before min-max rescaling.
inline BivariateSample generate_shape_raw(const ShapeGenerator& gen, std::uint64_t seed)
{
    const std::size_t n = gen.n;
    const double a = gen.a;
    if (!(a >= 0.0) || !std::isfinite(a)) throw argument_error("noise amplitude must be >= 0");
    if (n < 1) throw argument_error("sample size must be >= 1");
    Rng rng(seed);
    std::vector<double> x, y;
    auto noise = [&] { return rng.uniform(-a, a); };

    switch (gen.shape) {
    case Shape::linear:
        x = detail::linspace(0.0, 1.0, n);
        for (double t : x) y.push_back(t + noise());
        break;
    case Shape::x_cross: {
        const std::size_t h1 = n / 2, h2 = n - h1;
        for (double t : detail::linspace(0.0, 1.0, h1)) {
            x.push_back(t);
            y.push_back(t + noise());
        }
        for (double t : detail::linspace(0.0, 1.0, h2)) {
            x.push_back(t);
            y.push_back(1.0 - t + noise());
        }
        break;
    }
    case Shape::two_parallel_lines: {
        x = detail::linspace(0.0, 1.0, n);
        const std::size_t h1 = n / 2, h2 = n - h1;
        y = detail::linspace(0.0, 1.0, h1);
        const auto second = detail::linspace(0.0, 1.0, h2);
        y.insert(y.end(), second.begin(), second.end());
        for (auto& t : x) t += noise();
        for (auto& t : y) t += noise();
        break;
    }
    case Shape::two_rotated_lines: {
        const double phi0 = std::numbers::pi / 20.0, phi1 = std::numbers::pi / 4.0;
        std::vector<double> px(n), py(n);
        for (auto& t : px) t = rng.uniform();
        for (auto& t : py) t = noise();
        for (std::size_t i = 0; i < n; ++i) {
            const double phi = rng.coin() ? phi1 : phi0;
            x.push_back(std::cos(phi) * px[i] - std::sin(phi) * py[i]);
            y.push_back(std::sin(phi) * px[i] + std::cos(phi) * py[i]);
        }
        break;
    }
    case Shape::non_coexistence: {
        if (a > 1.0) throw argument_error("non_coexistence level must lie in [0, 1]");
        std::vector<double> px(n), py(n);
        for (auto& t : px) t = rng.uniform();
        for (auto& t : py) t = rng.uniform();
        for (std::size_t i = 0; i < n; ++i) {
            if (px[i] <= a || py[i] <= a) {
                x.push_back(px[i]);
                y.push_back(py[i]);
            }
        }
        if (x.empty()) throw argument_error("non_coexistence kept no points; increase n or the level");
        break;
    }
    case Shape::quadratic:
        x = detail::linspace(-1.0, 1.0, n);
        for (double t : x) y.push_back(t * t + noise());
        break;
    case Shape::sinus:
        x = detail::linspace(-8.0, 8.0, n);
        for (double t : x) y.push_back(std::sin(t) + noise());
        break;
    case Shape::torus: {
        if (a > 1.0) throw argument_error("torus spread must lie in [0, 1]");
        std::vector<double> r(n), phi(n);
        for (auto& t : r) t = std::sqrt(rng.uniform(1.0 - a, 1.0 + a));
        for (auto& t : phi) t = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(r[i] * std::cos(phi[i]));
            y.push_back(r[i] * std::sin(phi[i]));
        }
        break;
    }
    case Shape::periodic_pattern: {
        const auto& bx = detail::pattern_x();
        const auto& by = detail::pattern_y();
        // round half to even, as in the reference scripts
        const auto reps = static_cast<std::size_t>(std::nearbyint(static_cast<double>(n) / bx.size()));
        if (reps == 0) throw argument_error("periodic_pattern needs n >= 9");
        for (std::size_t r = 0; r < reps; ++r) x.insert(x.end(), bx.begin(), bx.end());
        for (std::size_t r = 0; r < reps; ++r) y.insert(y.end(), by.begin(), by.end());
        for (auto& t : x) t += noise();
        for (auto& t : y) t += noise();
        break;
    }
    }
    return BivariateSample(std::move(x), std::move(y));
}

/// Shape sample min-max rescaled to [0,1] per coordinate.
inline BivariateSample generate_shape(const ShapeGenerator& gen, std::uint64_t seed)
{
    const BivariateSample raw = generate_shape_raw(gen, seed);
    std::vector<double> x(raw.xs().begin(), raw.xs().end()), y(raw.ys().begin(), raw.ys().end());
    detail::min_max_rescale(x);
    detail::min_max_rescale(y);
    return BivariateSample(std::move(x), std::move(y));
}

struct ConvergenceRow {
    std::size_t n = 0;
    std::size_t replicate = 0;
    double q_xy = 0.0;
    double q_yx = 0.0;
};

struct ConvergenceSummary {
    std::size_t n = 0;
    double q_xy_q25 = 0.0, q_xy_median = 0.0, q_xy_q75 = 0.0;
    double q_yx_q25 = 0.0, q_yx_median = 0.0, q_yx_q75 = 0.0;
};

struct ConvergenceResult {
    CopulaModel model;
    ClosedFormZeta reference;
    std::vector<ConvergenceRow> rows;
    std::vector<ConvergenceSummary> summaries;
};

/// Seed of replicate r at size n.
inline std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t r)
{
    return derive_seed(derive_seed(seed, n), r);
}

inline ConvergenceResult convergence_experiment(const CopulaModel& model, const std::vector<std::size_t>& sizes,
                                                std::size_t replicates, std::uint64_t seed, unsigned threads = 0)
{
    validate(model);
    if (replicates < 1) throw argument_error("replicates must be >= 1");
    if (sizes.empty()) throw argument_error("at least one sample size is required");
    for (auto n : sizes)
        if (n < 2) throw argument_error("sample sizes must be >= 2");

    ConvergenceResult res{model, zeta1_closed_form(model), {}, {}};
    res.rows.resize(sizes.size() * replicates);
    parallel_for(res.rows.size(), threads, [&](std::size_t k) {
        const std::size_t s = k / replicates, r = k % replicates;
        const BivariateSample sample = sample_model(model, sizes[s], replicate_seed(seed, sizes[s], r));
        QadOptions o;
        o.threads = 1;
        const QadResult q = qad_compute(sample, o);
        res.rows[k] = {sizes[s], r, q.q_xy, q.q_yx};
    });
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        std::vector<double> a, b;
        for (std::size_t r = 0; r < replicates; ++r) {
            a.push_back(res.rows[s * replicates + r].q_xy);
            b.push_back(res.rows[s * replicates + r].q_yx);
        }
        res.summaries.push_back({sizes[s], quantile_type7(a, 0.25), quantile_type7(a, 0.5), quantile_type7(a, 0.75),
                                 quantile_type7(b, 0.25), quantile_type7(b, 0.5), quantile_type7(b, 0.75)});
    }
    return res;
}

}  // namespace qad
