#pragma once

// Open-addressing hash map from packed site keys to small payloads.
// Entries are never removed (a site once touched stays resident with a
// neutral payload), which keeps probing tombstone-free in the hot loop.

#include <cstdint>
#include <vector>

#include "shapelab/rng.hpp"

namespace shapelab::detail {

template <class V>
class SiteMap {
  public:
    explicit SiteMap(std::size_t expected = 64) { rehash(capacity_for(expected)); }

    V* find(std::uint64_t key) {
        std::size_t i = slot(key);
        while (used_[i]) {
            if (keys_[i] == key) return &vals_[i];
            i = (i + 1) & mask_;
        }
        return nullptr;
    }
    const V* find(std::uint64_t key) const {
        return const_cast<SiteMap*>(this)->find(key);
    }

    V& get_or_insert(std::uint64_t key, const V& init = V{}) {
        std::size_t i = slot(key);
        while (used_[i]) {
            if (keys_[i] == key) return vals_[i];
            i = (i + 1) & mask_;
        }
        if ((size_ + 1) * 10 > (mask_ + 1) * 7) {
            rehash((mask_ + 1) * 2);
            return get_or_insert(key, init);
        }
        used_[i] = 1;
        keys_[i] = key;
        vals_[i] = init;
        ++size_;
        return vals_[i];
    }

    std::size_t size() const { return size_; }

    template <class Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t i = 0; i <= mask_; ++i)
            if (used_[i]) fn(keys_[i], vals_[i]);
    }

  private:
    static std::size_t capacity_for(std::size_t n) {
        std::size_t c = 64;
        while (c * 7 < n * 10) c *= 2;
        return c;
    }
    std::size_t slot(std::uint64_t key) const { return mix64(key) & mask_; }

    void rehash(std::size_t cap) {
        std::vector<std::uint64_t> keys(cap);
        std::vector<V> vals(cap);
        std::vector<std::uint8_t> used(cap, 0);
        std::size_t m = cap - 1;
        if (!keys_.empty()) {
            for (std::size_t i = 0; i <= mask_; ++i) {
                if (!used_[i]) continue;
                std::size_t j = mix64(keys_[i]) & m;
                while (used[j]) j = (j + 1) & m;
                used[j] = 1;
                keys[j] = keys_[i];
                vals[j] = vals_[i];
            }
        }
        keys_.swap(keys);
        vals_.swap(vals);
        used_.swap(used);
        mask_ = m;
    }

    std::vector<std::uint64_t> keys_;
    std::vector<V> vals_;
    std::vector<std::uint8_t> used_;
    std::size_t mask_{0};
    std::size_t size_{0};
};

}  // namespace shapelab::detail
