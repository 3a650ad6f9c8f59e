// q in both directions for each synthetic shape, low and high noise.
#include <cstdio>

#include "qad/qad.hpp"

int main()
{
    std::printf("%-20s %6s %8s %8s %8s\n", "shape", "noise", "q_xy", "q_yx", "a");
    for (const auto& [shape, name] : qad::shape_names()) {
        for (double noise : {0.01, 0.5}) {
            const auto s = qad::generate_shape({shape, noise, 1000}, 1);
            const auto r = qad::qad_compute(s);
            std::printf("%-20s %6.2f %8.4f %8.4f %+8.4f\n", name.c_str(), noise, r.q_xy, r.q_yx, r.asymmetry);
        }
    }
}
