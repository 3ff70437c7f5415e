#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace risid::cli {

// One row of a results CSV produced by `simulate`.
struct ResultRecord {
    std::string scenario;
    int ris_id = 0;
    bool reachable = false;
    std::string swept_axis;
    std::optional<double> swept_value;
    std::optional<double> p_miss;
    std::optional<double> p_false;
    double d_max_avg = 0.0;
};

// Parses and checks the header against the exact column order; throws
// FormatError naming the first offending column or line.
std::vector<ResultRecord> read_results_csv(std::istream& in, const std::string& source);

} // namespace risid::cli
