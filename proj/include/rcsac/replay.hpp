#pragma once

#include <cstddef>
#include <vector>

#include "rcsac/env.hpp"
#include "rcsac/rng.hpp"

namespace rcsac {

// One stored interaction: (s, a, R, r_b(s), delta, s', done).
struct Transition {
    AgentState s;
    Action a;  // policy-space action as produced by the network
    double reward = 0.0;
    double r_b = 0.0;    // immediate risk at s, in [0, 1]
    double delta = 0.0;  // episode risk bound, in [0, 1]
    AgentState s_next;
    bool done = false;
};

// Fixed-capacity ring buffer, FIFO overwrite, uniform i.i.d. sampling with
// replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return items_[i]; }

    // Throws std::out_of_range when the buffer is empty.
    void sample(std::size_t n, RngStream& rng, std::vector<const Transition*>& out) const;

private:
    std::size_t capacity_;
    std::size_t size_ = 0;
    std::size_t cursor_ = 0;
    std::vector<Transition> items_;
};

}  // namespace rcsac
