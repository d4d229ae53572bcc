#pragma once

#include "contacton/common.hpp"

#include <initializer_list>
#include <random>

namespace test {

inline contacton::Vec vec(std::initializer_list<double> xs) {
    contacton::Vec v(static_cast<int>(xs.size()));
    int k = 0;
    for (double x : xs) v(k++) = x;
    return v;
}

inline contacton::Vec random_vec(int d, std::mt19937& rng, double a = 1.0) {
    std::uniform_real_distribution<double> U(-a, a);
    contacton::Vec v(d);
    for (int k = 0; k < d; ++k) v(k) = U(rng);
    return v;
}

}  // namespace test
