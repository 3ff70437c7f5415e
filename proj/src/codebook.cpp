#include "risid/codebook.hpp"

#include "risid/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <map>
#include <string>

namespace risid {

bool is_power_of_two(long long n) noexcept {
    return n >= 1 && (n & (n - 1)) == 0;
}

HadamardMatrix generate_hadamard(int order) {
    if (!is_power_of_two(order)) {
        throw InvalidArgument("Hadamard order must be a power of two, got " + std::to_string(order));
    }
    HadamardMatrix h(order, Symbols(order));
    for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) {
            h[i][j] = (std::popcount(static_cast<unsigned>(i & j)) % 2 == 0) ? 1 : -1;
        }
    }
    return h;
}

namespace {

// sum_m a[m] * b[(m + shift) mod M]
long cyclic_dot(std::span<const std::int8_t> a, std::span<const std::int8_t> b, std::size_t shift) {
    const std::size_t m = a.size();
    long acc = 0;
    for (std::size_t i = 0; i < m; ++i) {
        acc += a[i] * b[(i + shift) % m];
    }
    return acc;
}

} // namespace

double max_cyclic_crosscorr(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("cross-correlation needs equal lengths, got " + std::to_string(a.size()) +
                              " and " + std::to_string(b.size()));
    }
    if (a.empty()) {
        throw InvalidArgument("cross-correlation of empty sequences");
    }
    long best = 0;
    for (std::size_t s = 0; s < a.size(); ++s) {
        best = std::max(best, std::labs(cyclic_dot(a, b, s)));
    }
    return static_cast<double>(best) / static_cast<double>(a.size());
}

bool cyclically_equivalent(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
    if (a.size() != b.size() || a.empty()) {
        return false;
    }
    const long full = static_cast<long>(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (std::labs(cyclic_dot(a, b, s)) == full) {
            return true;
        }
    }
    return false;
}

namespace {

// Lexicographically smallest rotation of the row or of its negation.
Symbols canonical_form(const Symbols& row) {
    const std::size_t m = row.size();
    Symbols best = row;
    Symbols candidate(m);
    for (int sign : {1, -1}) {
        for (std::size_t s = 0; s < m; ++s) {
            for (std::size_t i = 0; i < m; ++i) {
                candidate[i] = static_cast<std::int8_t>(sign * row[(i + s) % m]);
            }
            if (candidate < best) {
                best = candidate;
            }
        }
    }
    return best;
}

} // namespace

std::vector<std::vector<int>> cyclic_ambiguity_classes(const std::vector<Symbols>& rows) {
    std::vector<std::vector<int>> classes;
    std::map<Symbols, std::size_t> class_by_form;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) {
            throw InvalidArgument("all rows must have the same length");
        }
        const auto [it, fresh] = class_by_form.try_emplace(canonical_form(rows[i]), classes.size());
        if (fresh) {
            classes.push_back({static_cast<int>(i)});
        } else {
            classes[it->second].push_back(static_cast<int>(i));
        }
    }
    return classes;
}

namespace {

void check_code_length(int code_length) {
    if (!is_power_of_two(code_length) || code_length < 4) {
        throw InvalidArgument("code length must be a power of two >= 4, got " + std::to_string(code_length));
    }
}

// Classes over Hadamard rows 1..M-1, expressed as row indices.
std::vector<std::vector<int>> row_classes(const HadamardMatrix& h) {
    std::vector<Symbols> candidates(h.begin() + 1, h.end());
    auto classes = cyclic_ambiguity_classes(candidates);
    for (auto& cls : classes) {
        for (int& idx : cls) {
            idx += 1;
        }
    }
    return classes;
}

double pairwise_max(const std::vector<ArpCode>& codes) {
    double worst = 0.0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        for (std::size_t j = i + 1; j < codes.size(); ++j) {
            worst = std::max(worst, max_cyclic_crosscorr(codes[i].symbols, codes[j].symbols));
        }
    }
    return worst;
}

} // namespace

int codebook_capacity(int code_length) {
    check_code_length(code_length);
    return static_cast<int>(row_classes(generate_hadamard(code_length)).size());
}

CodebookReport build_codebook(int code_length, int count) {
    if (count < 1) {
        throw InvalidArgument("RIS count must be >= 1, got " + std::to_string(count));
    }
    const std::vector<std::optional<int>> none(count);
    return build_codebook(code_length, none);
}

CodebookReport build_codebook(int code_length, std::span<const std::optional<int>> pinned_rows) {
    check_code_length(code_length);
    const int count = static_cast<int>(pinned_rows.size());
    if (count < 1) {
        throw InvalidArgument("RIS count must be >= 1");
    }
    const HadamardMatrix h = generate_hadamard(code_length);
    CodebookReport report;
    report.ambiguity_classes = row_classes(h);
    const int capacity = static_cast<int>(report.ambiguity_classes.size());
    if (count > capacity) {
        throw CapacityExceeded("cannot assign " + std::to_string(count) + " codes of length " +
                                   std::to_string(code_length) + ": only " + std::to_string(capacity) +
                                   " distinct cyclic-equivalence classes exist",
                               capacity);
    }

    auto class_of = [&](int row) {
        for (std::size_t c = 0; c < report.ambiguity_classes.size(); ++c) {
            const auto& cls = report.ambiguity_classes[c];
            if (std::find(cls.begin(), cls.end(), row) != cls.end()) {
                return c;
            }
        }
        return report.ambiguity_classes.size();
    };

    std::vector<bool> taken(report.ambiguity_classes.size(), false);
    std::vector<int> rows(count, 0);
    for (int i = 0; i < count; ++i) {
        if (!pinned_rows[i]) {
            continue;
        }
        const int row = *pinned_rows[i];
        if (row < 1 || row >= code_length) {
            throw InvalidArgument("RIS " + std::to_string(i + 1) + ": code row must be in [1, " +
                                  std::to_string(code_length - 1) + "], got " + std::to_string(row));
        }
        const std::size_t c = class_of(row);
        if (taken[c]) {
            throw InvalidArgument("RIS " + std::to_string(i + 1) + ": code row " + std::to_string(row) +
                                  " is a cyclic shift of a row already assigned");
        }
        taken[c] = true;
        rows[i] = row;
    }
    std::size_t next = 0;
    for (int i = 0; i < count; ++i) {
        if (rows[i] != 0) {
            continue;
        }
        while (taken[next]) {
            ++next;
        }
        taken[next] = true;
        rows[i] = report.ambiguity_classes[next].front();
    }

    for (int i = 0; i < count; ++i) {
        report.codes.push_back(ArpCode{i + 1, rows[i], h[rows[i]]});
    }
    report.max_pairwise_cyclic_corr = pairwise_max(report.codes);
    return report;
}

ArpCode code_from_row(int code_length, int row, int ris_id) {
    check_code_length(code_length);
    if (row < 1 || row >= code_length) {
        throw InvalidArgument("code row must be in [1, " + std::to_string(code_length - 1) + "], got " +
                              std::to_string(row));
    }
    return ArpCode{ris_id, row, generate_hadamard(code_length)[row]};
}

} // namespace risid
