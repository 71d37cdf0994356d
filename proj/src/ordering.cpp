#include "liveprof/ordering.hpp"

namespace liveprof {

std::string_view to_string(SortMode m) noexcept {
    return m == SortMode::alphabetical ? "alphabetical" : "recency";
}

std::optional<SortMode> sort_mode_from_string(std::string_view s) noexcept {
    if (s == "recency") return SortMode::recency;
    if (s == "alphabetical") return SortMode::alphabetical;
    return std::nullopt;
}

bool precedes(const OrderKey& a, const OrderKey& b, const OrderingPolicy& policy) {
    const bool pa = policy.pinned.contains(a.name);
    const bool pb = policy.pinned.contains(b.name);
    if (pa != pb) return pa;
    if (policy.mode == SortMode::recency && a.last_epoch != b.last_epoch) return a.last_epoch > b.last_epoch;
    return a.name < b.name;
}

std::vector<OrderKey> order_keys(std::vector<OrderKey> keys, const OrderingPolicy& policy) {
    order_by_policy(keys, policy, [](const OrderKey& k) -> const std::string& { return k.name; },
                    [](const OrderKey& k) { return k.last_epoch; });
    return keys;
}

}  // namespace liveprof
