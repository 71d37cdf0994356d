#include "liveprof/fingerprint.hpp"

#include <bit>
#include <cstdio>

namespace liveprof {

namespace {

constexpr std::uint8_t kNullMarker = 0x00;
constexpr std::uint8_t kValueMarker = 0x01;

void hash_cell(Fnv1a64& h, const Cell& cell) {
    if (is_null(cell)) {
        h.byte(kNullMarker);
        return;
    }
    h.byte(kValueMarker);
    struct Visitor {
        Fnv1a64& h;
        void operator()(Null) const {}
        void operator()(bool b) const { h.byte(b ? 1 : 0); }
        void operator()(std::int64_t i) const { h.u64(static_cast<std::uint64_t>(i)); }
        void operator()(double d) const { h.u64(std::bit_cast<std::uint64_t>(d)); }
        void operator()(const std::string& s) const { h.bytes(s); }
        void operator()(Timestamp t) const { h.u64(static_cast<std::uint64_t>(t.epoch_ms)); }
    };
    std::visit(Visitor{h}, cell);
}

}  // namespace

std::string Fingerprint::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

Fingerprint fingerprint(const Table& table) {
    Fnv1a64 h;
    h.u64(table.ncols());
    h.u64(table.nrows());
    for (const auto& col : table.columns()) {
        h.bytes(col.name);
        h.byte(static_cast<std::uint8_t>(col.stype));
    }
    for (const auto& col : table.columns()) {
        for (const auto& cell : col.values) hash_cell(h, cell);
    }
    return {h.value(), table.nrows(), table.ncols()};
}

}  // namespace liveprof
