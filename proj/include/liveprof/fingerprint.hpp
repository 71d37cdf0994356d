#pragma once

#include "liveprof/table.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace liveprof {

/// Content hash of a table: schema (column names and types) followed by every
/// cell in column-major order. The table's own name is not part of it, so two
/// bindings holding the same data share a fingerprint.
struct Fingerprint {
    std::uint64_t hash = 0;
    std::size_t nrows = 0;
    std::size_t ncols = 0;

    bool operator==(const Fingerprint&) const = default;

    /// 16 lowercase hex digits.
    [[nodiscard]] std::string hex() const;
};

/// 64-bit FNV-1a over an explicit little-endian byte encoding, so the value
/// is identical on every platform.
class Fnv1a64 {
public:
    static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
    static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

    void byte(std::uint8_t b) noexcept {
        state_ ^= b;
        state_ *= kPrime;
    }
    void u64(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void bytes(std::string_view s) noexcept {
        u64(s.size());
        for (char c : s) byte(static_cast<std::uint8_t>(c));
    }

    [[nodiscard]] std::uint64_t value() const noexcept { return state_; }

private:
    std::uint64_t state_ = kOffset;
};

[[nodiscard]] Fingerprint fingerprint(const Table& table);

}  // namespace liveprof
