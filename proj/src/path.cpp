#include "contacton/path.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace contacton {

PathGamma::PathGamma(int n_, std::vector<Vec> pts) : n(n_), points(std::move(pts)) {
    if (points.size() < 3) throw Error("a path needs at least three samples");
    for (const auto& p : points)
        if (p.size() != 2 * n + 1) throw DimensionError("path sample has wrong dimension");
}

PathGamma PathGamma::sample(int n, int N, const std::function<Vec(double)>& f) {
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) pts.push_back(f(static_cast<double>(k) / N));
    return PathGamma(n, std::move(pts));
}

Vec PathGamma::velocity(int k) const {
    const auto get = [this](int i) -> const Vec& { return points[i]; };
    if (intervals() >= 4) return grid_derivative4(get, k, intervals(), dt());
    return grid_derivative(get, k, intervals(), dt());
}

double PathGamma::tag_defect() const {
    double d = 0.0;
    if (R0) d = std::max(d, R0->distance(points.front()));
    if (R1) d = std::max(d, R1->distance(points.back()));
    return d;
}

void write_path_csv(std::ostream& os, const PathGamma& g) {
    os << "t";
    for (int i = 1; i <= g.n; ++i) os << ",x" << i;
    for (int i = 1; i <= g.n; ++i) os << ",y" << i;
    os << ",z\n";
    os << std::setprecision(17);
    for (int k = 0; k <= g.intervals(); ++k) {
        os << g.t(k);
        for (int c = 0; c < g.points[k].size(); ++c) os << ',' << g.points[k](c);
        os << '\n';
    }
}

PathGamma read_path_csv(std::istream& is, int n) {
    std::string line;
    if (!std::getline(is, line)) throw Error("path CSV is empty");
    std::vector<Vec> pts;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<int>(row.size()) != 2 * n + 2) throw Error("path CSV row has wrong column count");
        Vec p(2 * n + 1);
        for (int c = 0; c < 2 * n + 1; ++c) p(c) = row[1 + c];
        pts.push_back(p);
    }
    return PathGamma(n, std::move(pts));
}

}  // namespace contacton
