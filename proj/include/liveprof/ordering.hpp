#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace liveprof {

enum class SortMode : std::uint8_t { recency, alphabetical };

[[nodiscard]] std::string_view to_string(SortMode m) noexcept;
[[nodiscard]] std::optional<SortMode> sort_mode_from_string(std::string_view s) noexcept;

/// Pinned tables first; within each group recency is last-updated epoch
/// descending (ties by name ascending) and alphabetical is name ascending.
struct OrderingPolicy {
    SortMode mode = SortMode::recency;
    std::set<std::string> pinned;
};

struct OrderKey {
    std::string name;
    std::uint64_t last_epoch = 0;
};

/// True when `a` sorts before `b` under `policy`. A strict total order over
/// keys with distinct names.
[[nodiscard]] bool precedes(const OrderKey& a, const OrderKey& b, const OrderingPolicy& policy);

[[nodiscard]] std::vector<OrderKey> order_keys(std::vector<OrderKey> keys, const OrderingPolicy& policy);

/// Sorts any range of records exposing a name and an epoch.
template <typename T, typename NameFn, typename EpochFn>
void order_by_policy(std::vector<T>& items, const OrderingPolicy& policy, NameFn name_of, EpochFn epoch_of);

}  // namespace liveprof

#include <algorithm>

template <typename T, typename NameFn, typename EpochFn>
void liveprof::order_by_policy(std::vector<T>& items, const OrderingPolicy& policy, NameFn name_of,
                               EpochFn epoch_of) {
    std::stable_sort(items.begin(), items.end(), [&](const T& a, const T& b) {
        return precedes({std::string(name_of(a)), epoch_of(a)}, {std::string(name_of(b)), epoch_of(b)}, policy);
    });
}
