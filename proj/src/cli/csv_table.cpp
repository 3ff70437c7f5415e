#include "cli/csv_table.hpp"

#include "risid/errors.hpp"
#include "risid/montecarlo.hpp"

#include <charconv>
#include <istream>
#include <sstream>

namespace risid::cli {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

std::optional<double> optional_number(const std::string& text, const std::string& where) {
    if (text.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw FormatError(where + ": '" + text + "' is not a number");
    }
    return v;
}

} // namespace

std::vector<ResultRecord> read_results_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        throw FormatError(source + ": empty CSV");
    }
    if (line.back() == '\r') {
        line.pop_back();
    }
    const auto expected = split_fields(std::string(kCsvHeader));
    const auto header = split_fields(line);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= header.size()) {
            throw FormatError(source + ": missing column '" + expected[i] + "' at position " + std::to_string(i + 1));
        }
        if (header[i] != expected[i]) {
            throw FormatError(source + ": column " + std::to_string(i + 1) + " is '" + header[i] + "', expected '" +
                              expected[i] + "'");
        }
    }
    if (header.size() > expected.size()) {
        throw FormatError(source + ": unexpected extra column '" + header[expected.size()] + "'");
    }

    std::vector<ResultRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split_fields(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (f.size() != expected.size()) {
            throw FormatError(where + ": expected " + std::to_string(expected.size()) + " fields, got " +
                              std::to_string(f.size()));
        }
        ResultRecord r;
        r.scenario = f[0];
        const auto id = optional_number(f[1], where + " ris_id");
        const auto reachable = optional_number(f[2], where + " reachable");
        const auto d_avg = optional_number(f[12], where + " d_max_avg");
        if (!id || !reachable || !d_avg) {
            throw FormatError(where + ": ris_id, reachable and d_max_avg are required");
        }
        r.ris_id = static_cast<int>(*id);
        r.reachable = *reachable != 0.0;
        r.swept_axis = f[6];
        r.swept_value = optional_number(f[7], where + " swept_value");
        r.p_miss = optional_number(f[8], where + " p_miss");
        r.p_false = optional_number(f[10], where + " p_false");
        r.d_max_avg = *d_avg;
        records.push_back(std::move(r));
    }
    if (records.empty()) {
        throw FormatError(source + ": CSV has a header but no data rows");
    }
    return records;
}

} // namespace risid::cli
