// Noisy parabola: y is nearly a function of x, x is not a function of y.
// Prints q with permutation p-values and the predicted distribution of y
// given x, and of x given y.
#include <cstdio>

#include "qad/qad.hpp"

namespace {

void show(const qad::Prediction& p, const char* given, const char* target)
{
    std::printf("\n%s = %g falls in strip %zu [%g, %g]; distribution of %s:\n", given, p.value, p.strip + 1,
                p.strip_lo, p.strip_hi, target);
    for (const auto& iv : qad::merge_zero_width(p.intervals))
        if (iv.probability > 0.0) std::printf("  [%8.4f, %8.4f]  %.3f\n", iv.lo, iv.hi, iv.probability);
}

}  // namespace

int main()
{
    const auto sample = qad::generate_shape({qad::Shape::quadratic, 0.01, 1000}, 42);
    qad::QadOptions opt;
    opt.permutations = 999;
    opt.seed = 42;
    const auto r = qad::qad_compute(sample, opt);
    std::printf("n = %zu, resolution N = %zu\n", r.n, r.resolution);
    std::printf("q(x,y) = %.4f  p = %.3f\n", r.q_xy, *r.p_q_xy);
    std::printf("q(y,x) = %.4f  p = %.3f\n", r.q_yx, *r.p_q_yx);
    std::printf("a      = %+.4f  p = %.3f\n", r.asymmetry, *r.p_asymmetry);

    show(qad::predict(qad::prediction_table(sample, qad::Direction::xy), 0.9), "x", "y");
    show(qad::predict(qad::prediction_table(sample, qad::Direction::yx), 0.25), "y", "x");
}
