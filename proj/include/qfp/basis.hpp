#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace qfp {

// Computational-basis label for up to 256 qubits. Qubit k lives in bit k
// (little-endian: qubit 0 is the least significant bit of word 0).
struct Basis {
    static constexpr uint32_t kMaxQubits = 256;

    std::array<uint64_t, 4> words{};

    constexpr bool test(uint32_t q) const { return (words[q >> 6] >> (q & 63)) & 1u; }

    constexpr void set(uint32_t q, bool v) {
        uint64_t mask = uint64_t{1} << (q & 63);
        if (v) {
            words[q >> 6] |= mask;
        } else {
            words[q >> 6] &= ~mask;
        }
    }

    constexpr void flip(uint32_t q) { words[q >> 6] ^= uint64_t{1} << (q & 63); }

    friend bool operator==(const Basis&, const Basis&) = default;

    // Lexicographic order, high words first; used for deterministic tie-breaking.
    friend bool operator<(const Basis& a, const Basis& b) {
        for (int i = 3; i >= 0; --i) {
            if (a.words[i] != b.words[i]) return a.words[i] < b.words[i];
        }
        return false;
    }

    static Basis from_bits(uint64_t bits) {
        Basis b;
        b.words[0] = bits;
        return b;
    }

    uint64_t low_bits() const { return words[0]; }

    std::string to_string(uint32_t num_qubits) const {
        std::string s(num_qubits, '0');
        for (uint32_t q = 0; q < num_qubits; ++q) {
            if (test(q)) s[num_qubits - 1 - q] = '1';
        }
        return s;
    }
};

struct BasisHash {
    size_t operator()(const Basis& b) const {
        uint64_t h = 0x9E3779B97F4A7C15ull;
        for (uint64_t w : b.words) {
            h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            h *= 0xBF58476D1CE4E5B9ull;
            h ^= h >> 29;
        }
        return static_cast<size_t>(h);
    }
};

}  // namespace qfp
