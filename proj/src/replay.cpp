#include "rcsac/replay.hpp"

#include <stdexcept>

namespace rcsac {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer: capacity must be > 0");
    items_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
    if (size_ < capacity_) {
        items_.push_back(t);
        ++size_;
    } else {
        items_[cursor_] = t;
    }
    cursor_ = (cursor_ + 1) % capacity_;
}

void ReplayBuffer::sample(std::size_t n, RngStream& rng,
                          std::vector<const Transition*>& out) const {
    if (size_ == 0) throw std::out_of_range("replay buffer: sample from empty buffer");
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = &items_[rng.uniform_index(0, size_ - 1)];
}

}  // namespace rcsac
