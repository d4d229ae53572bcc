#pragma once

#include "contacton/strip.hpp"

#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace contacton {

using Complex = std::complex<double>;
using HoloFn = std::function<Complex(Complex)>;
using StripMap = std::function<Vec(double, double)>;

// x_i + i y_i = f_i(w), z = Re h(w), w = tau + i t. With f_i, h holomorphic the map is
// Cauchy-Riemann for H = 0 and, since Re h is harmonic, also satisfies the closedness equation.
StripMap holomorphic_lift(const std::vector<HoloFn>& f, const HoloFn& h);
// Nonlinear members used as the default smooth test family.
StripMap default_holomorphic_lift(int n);
// (tau, t, tau t): Cauchy-Riemann and closed, with Legendrian rows {y=0, z=0} and {y=1, z=x}.
StripMap legendrian_lift();
LegendrianSpec legendrian_lift_R0(const TriadChart& chart);
LegendrianSpec legendrian_lift_R1(const TriadChart& chart);

// u = (x0, 0, z0 + T t).
StripMap reeb_strip(const Vec& x0, double T, double z0 = 0.0);
LegendrianSpec x_plane(const TriadChart& chart, double z = 0.0);  // {y = 0, z = const}

// Cauchy-Riemann maps for H = z in n = 1: y = A e^{a tau + (b - 1) t}, x = (b / a) y,
// a = sin(theta) / 2, b = (1 + cos(theta)) / 2, z = Re h(w) arbitrary.
StripMap linear_z_cr_family(double A, double theta, const HoloFn& h);

// Negative controls.
StripMap non_harmonic_lift(int n);   // (tau, t, tau^2)
StripMap anti_holomorphic_map(int n);  // (tau, -t, 0)

// Samples ubar on the grid and pushes it forward by phi_H^t. Tags follow the transform.
MapField gauge_transformed(const ContactIsotopy& iso, const StripGrid& grid, const StripMap& ubar,
                           std::optional<LegendrianSpec> R0 = std::nullopt,
                           std::optional<LegendrianSpec> R1 = std::nullopt);

// Smooth random path p0 + sum of three sine modes per coordinate on N intervals.
PathGamma random_path(int n, int N, std::mt19937& rng, double amplitude = 0.5);
// Random smooth variation along g; with `tangent_to_tags` the end values are tangent vectors
// of the tagged Legendrians (the path ends must lie on them).
VariationField random_variation(const PathGamma& g, std::mt19937& rng, bool tangent_to_tags = false);

}  // namespace contacton
