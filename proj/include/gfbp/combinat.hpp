#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace gfbp {

// Encoding x = (x_1, ..., x_n) of a jump path from level 0 to level n: the
// jump taken out of level j is x_{j+1}, and the levels skipped by a jump of
// size i are the i-1 zeros that follow it.  So x is a concatenation of blocks
// (i, 0, ..., 0) with i-1 zeros, and sum x_j = n.
class JumpPattern {
public:
    // Throws InputError unless x satisfies the block structure.
    explicit JumpPattern(std::vector<int> x);
    static JumpPattern from_jumps(std::span<const int> jumps);

    const std::vector<int>& entries() const { return x_; }
    int size() const { return static_cast<int>(x_.size()); }
    // Jump sizes in path order.
    std::vector<int> jumps() const;
    int largest_jump() const;

    auto operator<=>(const JumpPattern&) const = default;

private:
    std::vector<int> x_;
};

// Levels visited by a pattern: Lambda = {0..n} minus {j in 1..n-1 : x_{j+1} = 0},
// listed in increasing order, so levels.front() = 0 and levels.back() = n.
struct EpochSet {
    std::vector<int> levels;
    int n_star() const { return static_cast<int>(levels.size()); }
};

EpochSet epoch_set(const JumpPattern& x);

// Number of patterns with n levels and jumps of size at most k:
// T(n) = sum_{i=1}^{min(k,n)} T(n-i), T(0) = 1.  Saturates at UINT64_MAX.
std::uint64_t theta_count(int n, int k);

// The set Theta_n^k built by its defining recursion (patterns ending in a
// jump i are patterns of n-i levels padded with zeros, with i written at
// position n-i+1), sorted lexicographically.  k >= n gives Theta_n^n.
// Results for n <= 25 are memoized in a thread-safe cache.
// Throws InputError for n < 1 or k < 1.
std::vector<JumpPattern> enumerate_theta(int n, int k);

// Depth-first walk over the same set without materializing it, in the same
// lexicographic order.  `visit` receives the jump sizes of each path.
template <class Visitor>
void for_each_jump_path(int n, int k, Visitor&& visit) {
    std::vector<int> jumps;
    jumps.reserve(static_cast<std::size_t>(n));
    auto walk = [&](auto& self, int remaining) -> void {
        if (remaining == 0) {
            visit(std::span<const int>(jumps));
            return;
        }
        int top = remaining < k ? remaining : k;
        for (int i = 1; i <= top; ++i) {
            jumps.push_back(i);
            self(self, remaining - i);
            jumps.pop_back();
        }
    };
    walk(walk, n);
}

// y = (y_1, ..., y_n) with y_1 >= 0, y_j >= 1 for j >= 2 and sum y_j = i.
struct Composition {
    std::vector<int> y;
    int weight() const;
    auto operator<=>(const Composition&) const = default;
};

// All members of Omega_n^i in lexicographic order; |Omega_n^i| = C(i, n-1),
// empty when i < n-1.
std::vector<Composition> enumerate_omega(int n, int i);

}  // namespace gfbp
