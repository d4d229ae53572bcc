#pragma once

#include "contacton/triad.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace contacton {

// Samples gamma(t_k), t_k = k/N, with optional Legendrian endpoint tags.
struct PathGamma {
    int n = 1;
    std::vector<Vec> points;
    std::optional<LegendrianSpec> R0, R1;

    PathGamma() = default;
    PathGamma(int n_, std::vector<Vec> pts);
    static PathGamma sample(int n, int N, const std::function<Vec(double)>& f);

    int intervals() const { return static_cast<int>(points.size()) - 1; }
    double dt() const { return 1.0 / intervals(); }
    double t(int k) const { return static_cast<double>(k) / intervals(); }
    // Five-point differences (order 4) once there are 4 intervals, three-point below that.
    Vec velocity(int k) const;
    // Largest endpoint distance to the tagged Legendrians (0 when untagged).
    double tag_defect() const;
};

struct VariationField {
    std::vector<Vec> eta;
};

// Three-point derivative on a uniform grid; order 2 everywhere.
template <class Get>
auto grid_derivative(const Get& get, int k, int last, double h) {
    using T = std::decay_t<decltype(get(0))>;
    if (k == 0) return T((-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h));
    if (k == last) return T((3.0 * get(last) - 4.0 * get(last - 1) + get(last - 2)) / (2.0 * h));
    return T((get(k + 1) - get(k - 1)) / (2.0 * h));
}

// Five-point derivative, order 4 everywhere (needs last >= 4). Used where a
// derivative is differentiated again, so the outer stencil keeps its order at the edges.
template <class Get>
auto grid_derivative4(const Get& get, int k, int last, double h) {
    using T = std::decay_t<decltype(get(0))>;
    const double s = 12.0 * h;
    if (k == 0) return T((-25.0 * get(0) + 48.0 * get(1) - 36.0 * get(2) + 16.0 * get(3) - 3.0 * get(4)) / s);
    if (k == 1) return T((-3.0 * get(0) - 10.0 * get(1) + 18.0 * get(2) - 6.0 * get(3) + get(4)) / s);
    if (k == last)
        return T((25.0 * get(last) - 48.0 * get(last - 1) + 36.0 * get(last - 2) - 16.0 * get(last - 3) +
                  3.0 * get(last - 4)) / s);
    if (k == last - 1)
        return T((3.0 * get(last) + 10.0 * get(last - 1) - 18.0 * get(last - 2) + 6.0 * get(last - 3) -
                  get(last - 4)) / s);
    return T((-get(k + 2) + 8.0 * get(k + 1) - 8.0 * get(k - 1) + get(k - 2)) / s);
}

void write_path_csv(std::ostream& os, const PathGamma& g);
PathGamma read_path_csv(std::istream& is, int n);

}  // namespace contacton
