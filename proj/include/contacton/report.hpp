#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace contacton {

struct ResidualEntry {
    std::string name;
    double l2 = 0.0;
    double max = 0.0;
    std::optional<double> order;
    double tolerance = 0.0;
    bool pass = true;
};

struct ResidualReport {
    std::vector<ResidualEntry> entries;

    ResidualEntry& add(std::string name, double l2, double max, double tolerance);
    bool all_pass() const;
    const ResidualEntry* find(const std::string& name) const;
    const ResidualEntry& at(const std::string& name) const;
    double worst_max() const;
};

// Observed order between two refinement levels with spacing ratio `ratio`.
inline double observed_order(double coarse, double fine, double ratio = 2.0) {
    return std::log(coarse / fine) / std::log(ratio);
}

}  // namespace contacton
