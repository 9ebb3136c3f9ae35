#include "platefocus/grid.hpp"

#include <cmath>

namespace platefocus {

PixelIndex argmax(const Field& field) {
    PixelIndex best{};
    double best_value = -INFINITY;
    for (int iy = 0; iy < field.ny(); ++iy) {
        for (int ix = 0; ix < field.nx(); ++ix) {
            if (field(ix, iy) > best_value) {
                best_value = field(ix, iy);
                best = {ix, iy};
            }
        }
    }
    return best;
}

double max_abs(const Field& field) {
    double m = 0.0;
    for (double v : field.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace platefocus
