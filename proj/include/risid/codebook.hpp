#pragma once

// Walsh-Hadamard amplitude reflection patterns (ARPs) and their assignment to
// RIS ids.
//
// A receiver that is not synchronized to the RIS sees each pattern under an
// unknown cyclic shift, and zero-centering of the amplitude removes any global
// sign information. Two Hadamard rows that are cyclic shifts of one another
// (or of each other's negation) are therefore indistinguishable, and the
// codebook hands out at most one row per such equivalence class.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace risid {

using Symbols = std::vector<std::int8_t>;

struct ArpCode {
    int ris_id = 0;
    int hadamard_row = 0;
    Symbols symbols;

    std::size_t length() const noexcept { return symbols.size(); }
};

using HadamardMatrix = std::vector<Symbols>;

struct CodebookReport {
    std::vector<ArpCode> codes;
    double max_pairwise_cyclic_corr = 0.0;
    // Partition of the candidate rows 1..M-1.
    std::vector<std::vector<int>> ambiguity_classes;
};

bool is_power_of_two(long long n) noexcept;

// Sylvester construction in natural order: H[i][j] = (-1)^popcount(i & j).
// Throws InvalidArgument unless order is a power of two.
HadamardMatrix generate_hadamard(int order);

// max over cyclic shifts s of |sum_m a[m] * b[(m + s) mod M]| / M.
double max_cyclic_crosscorr(std::span<const std::int8_t> a, std::span<const std::int8_t> b);

// True if a equals sign * shift(b, s) for some shift s and sign in {-1, +1}.
bool cyclically_equivalent(std::span<const std::int8_t> a, std::span<const std::int8_t> b);

// Classes are returned in order of their lowest member; members ascend.
// Indices refer to positions in `rows`.
std::vector<std::vector<int>> cyclic_ambiguity_classes(const std::vector<Symbols>& rows);

// Number of cyclic-equivalence classes among Hadamard rows 1..M-1.
int codebook_capacity(int code_length);

// Assign RIS ids 1..count the lowest-index row of successive classes.
// Throws InvalidArgument for bad M, CapacityExceeded when count exceeds the
// number of classes.
CodebookReport build_codebook(int code_length, int count);

// As above, but entry i may pin RIS i+1 to a specific Hadamard row. Pinned
// rows claim their class first; the rest take the lowest free classes.
// Throws InvalidArgument if two pinned rows share a class.
CodebookReport build_codebook(int code_length, std::span<const std::optional<int>> pinned_rows);

// Code for an explicit Hadamard row (1..M-1), used for per-RIS overrides.
ArpCode code_from_row(int code_length, int row, int ris_id);

} // namespace risid
