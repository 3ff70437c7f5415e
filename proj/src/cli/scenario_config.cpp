#include "cli/scenario_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace risid::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& raw) {
    const std::string text = trim(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw UsageError("expected a number, got '" + raw + "'");
    }
    return value;
}

long long parse_integer(const std::string& raw) {
    const std::string text = trim(raw);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw UsageError("expected an integer, got '" + raw + "'");
    }
    return value;
}

bool parse_bool(const std::string& raw) {
    const std::string text = trim(raw);
    if (text == "true" || text == "yes" || text == "1") {
        return true;
    }
    if (text == "false" || text == "no" || text == "0") {
        return false;
    }
    throw UsageError("expected true or false, got '" + raw + "'");
}

// Reads one section and rejects keys outside `allowed`.
class Section {
public:
    Section(const std::string& name, const pt::ptree& tree, std::set<std::string> allowed) : name_(name) {
        for (const auto& [key, child] : tree) {
            if (!allowed.contains(key)) {
                throw UsageError("[" + name + "]: unknown key '" + key + "'");
            }
            values_[key] = child.data();
        }
    }

    bool has(const std::string& key) const { return values_.contains(key); }

    template <class Parse>
    auto get(const std::string& key, Parse parse) const -> std::optional<decltype(parse(std::string()))> {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            return std::nullopt;
        }
        try {
            return parse(it->second);
        } catch (const Error& e) {
            throw UsageError("[" + name_ + "] " + key + ": " + e.what());
        }
    }

    std::optional<std::string> text(const std::string& key) const {
        return get(key, [](const std::string& s) { return trim(s); });
    }

private:
    std::string name_;
    std::map<std::string, std::string> values_;
};

int to_int(long long v) {
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw UsageError("integer out of range");
    }
    return static_cast<int>(v);
}

} // namespace

double parse_angle(const std::string& raw) {
    const std::string text = trim(raw);
    if (text.size() >= 2 && text.ends_with("pi")) {
        const std::string factor = trim(text.substr(0, text.size() - 2));
        if (factor.empty() || factor == "+") {
            return std::numbers::pi;
        }
        if (factor == "-") {
            return -std::numbers::pi;
        }
        return parse_double(factor) * std::numbers::pi;
    }
    return parse_double(text);
}

ScenarioConfig parse_scenario_config(std::istream& in, const std::string& source) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    pt::ptree tree;
    try {
        std::istringstream body(text);
        pt::read_ini(body, tree);
    } catch (const pt::ini_parser_error& e) {
        throw UsageError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    // read_ini drops sections without keys; an empty [ris<k>] still declares a RIS.
    {
        std::istringstream lines(text);
        for (std::string line; std::getline(lines, line);) {
            const std::string t = trim(line);
            if (t.size() > 2 && t.front() == '[' && t.back() == ']') {
                const std::string name = trim(t.substr(1, t.size() - 2));
                if (tree.find(name) == tree.not_found()) {
                    tree.push_back({name, pt::ptree{}});
                }
            }
        }
    }

    ScenarioConfig config;
    ScenarioSpec& spec = config.spec;
    std::map<int, const pt::ptree*> ris_sections;

    auto as_int = [](const std::string& s) { return to_int(parse_integer(s)); };

    try {
        for (const auto& [name, section_tree] : tree) {
            if (section_tree.empty() && !section_tree.data().empty()) {
                throw UsageError("key '" + name + "' appears outside any section");
            }
            if (name == "scenario") {
                const Section s(name, section_tree,
                                {"name", "code_length", "trials", "seed", "thr_norm", "offset_range", "workers", "out"});
                spec.name = s.text("name").value_or(spec.name);
                spec.code_length = s.get("code_length", as_int).value_or(spec.code_length);
                spec.trials = s.get("trials", as_int).value_or(spec.trials);
                if (auto seed = s.get("seed", parse_integer)) {
                    if (*seed < 0) {
                        throw UsageError("[scenario] seed must be >= 0");
                    }
                    spec.seed = static_cast<std::uint64_t>(*seed);
                }
                spec.thr_norm = s.get("thr_norm", parse_double).value_or(spec.thr_norm);
                if (auto range = s.get("offset_range", [](const std::string& v) { return parse_offset_range(trim(v)); })) {
                    spec.offset_range = *range;
                }
                config.workers = s.get("workers", as_int);
                if (auto out = s.text("out")) {
                    config.out = std::filesystem::path(*out);
                }
            } else if (name == "frame") {
                const Section s(name, section_tree,
                                {"carrier_amplitude", "noise_power", "snr_db", "channel_mode", "leakage_re", "leakage_im"});
                spec.carrier_amplitude = s.get("carrier_amplitude", parse_double).value_or(spec.carrier_amplitude);
                spec.noise_power = s.get("noise_power", parse_double);
                spec.snr_db = s.get("snr_db", parse_double);
                if (spec.noise_power && spec.snr_db) {
                    throw UsageError("[frame]: noise_power and snr_db are mutually exclusive");
                }
                if (auto mode = s.get("channel_mode", [](const std::string& v) { return parse_channel_mode(trim(v)); })) {
                    spec.channel_mode = *mode;
                }
                spec.leakage = {s.get("leakage_re", parse_double).value_or(0.0),
                                s.get("leakage_im", parse_double).value_or(0.0)};
            } else if (name.starts_with("ris")) {
                const int id = [&] {
                    try {
                        return to_int(parse_integer(name.substr(3)));
                    } catch (const UsageError&) {
                        throw UsageError("bad section name [" + name + "] (expected ris<k>)");
                    }
                }();
                if (id < 1) {
                    throw UsageError("bad section name [" + name + "] (RIS ids start at 1)");
                }
                if (!ris_sections.emplace(id, &section_tree).second) {
                    throw UsageError("RIS " + std::to_string(id) + " declared twice");
                }
            } else {
                throw UsageError("unknown section [" + name + "]");
            }
        }
        if (!spec.noise_power && !spec.snr_db) {
            throw UsageError("[frame]: one of noise_power or snr_db is required");
        }
        if (ris_sections.empty()) {
            throw UsageError("no [ris<k>] sections");
        }
        int expected = 1;
        for (const auto& [id, section_tree] : ris_sections) {
            if (id != expected) {
                throw UsageError("RIS sections must be numbered 1..L without gaps; missing [ris" +
                                 std::to_string(expected) + "]");
            }
            ++expected;
            const std::string section_name = "ris" + std::to_string(id);
            const Section s(section_name, *section_tree,
                            {"n_elements", "reachable", "a_min", "delta", "gamma", "phi_1", "phi_2", "code_row",
                             "offset"});
            RisSetup ris;
            ris.ris_id = id;
            ris.n_elements = s.get("n_elements", as_int).value_or(ris.n_elements);
            ris.reachable = s.get("reachable", parse_bool).value_or(ris.reachable);
            ris.amp_params.a_min = s.get("a_min", parse_double).value_or(ris.amp_params.a_min);
            ris.amp_params.delta = s.get("delta", parse_angle).value_or(ris.amp_params.delta);
            ris.amp_params.gamma = s.get("gamma", parse_double).value_or(ris.amp_params.gamma);
            const auto phi_1 = s.get("phi_1", parse_angle);
            const auto phi_2 = s.get("phi_2", parse_angle);
            if (phi_1.has_value() != phi_2.has_value()) {
                throw UsageError("[" + section_name + "]: phi_1 and phi_2 must be given together");
            }
            if (phi_1) {
                ris.phases = PhaseStatePair{*phi_1, *phi_2};
            }
            ris.code_row = s.get("code_row", as_int);
            if (auto offset = s.text("offset"); offset && *offset != "random") {
                ris.fixed_offset = s.get("offset", as_int);
            }
            spec.ris.push_back(ris);
        }
        // Catch range and consistency problems now, with the file as context.
        materialize(spec);
    } catch (const UsageError& e) {
        throw UsageError(source + ": " + e.what());
    } catch (const Error& e) {
        throw UsageError(source + ": " + e.what());
    }
    return config;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open scenario config " + path.string());
    }
    return parse_scenario_config(in, path.string());
}

} // namespace risid::cli
