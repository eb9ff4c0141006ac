#pragma once

#include <cstddef>
#include <deque>

namespace radar_slam {

/// Fixed-capacity boolean ring used by the M/N logics. Pushing beyond
/// capacity evicts the oldest entry.
class BoolRing {
public:
    BoolRing() = default;
    explicit BoolRing(std::size_t capacity) : capacity_(capacity) {}

    void push(bool value) {
        entries_.push_back(value);
        if (entries_.size() > capacity_) {
            entries_.pop_front();
        }
    }

    void clear() { entries_.clear(); }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool full() const { return entries_.size() == capacity_; }

    std::size_t count_true() const {
        std::size_t n = 0;
        for (bool b : entries_) {
            n += b ? 1 : 0;
        }
        return n;
    }

    bool all_true() const { return count_true() == entries_.size(); }

    bool operator[](std::size_t i) const { return entries_[i]; }

private:
    std::size_t capacity_ = 0;
    std::deque<bool> entries_;
};

}  // namespace radar_slam
