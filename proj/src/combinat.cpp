#include "gfbp/combinat.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <string>
#include <utility>

#include "gfbp/errors.hpp"

namespace gfbp {

JumpPattern::JumpPattern(std::vector<int> x) : x_(std::move(x)) {
    if (x_.empty()) throw InputError("jump pattern is empty");
    const int n = size();
    int j = 0;
    while (j < n) {
        int i = x_[static_cast<std::size_t>(j)];
        if (i < 1)
            throw InputError("jump pattern: position " + std::to_string(j + 1) + " must start a jump");
        if (j + i > n) throw InputError("jump pattern: jump at position " + std::to_string(j + 1) + " overshoots n");
        for (int z = j + 1; z < j + i; ++z)
            if (x_[static_cast<std::size_t>(z)] != 0)
                throw InputError("jump pattern: position " + std::to_string(z + 1) + " must be 0");
        j += i;
    }
}

JumpPattern JumpPattern::from_jumps(std::span<const int> jumps) {
    int n = std::accumulate(jumps.begin(), jumps.end(), 0);
    std::vector<int> x(static_cast<std::size_t>(std::max(n, 0)), 0);
    int level = 0;
    for (int i : jumps) {
        if (i < 1) throw InputError("jump sizes must be positive");
        x[static_cast<std::size_t>(level)] = i;
        level += i;
    }
    return JumpPattern(std::move(x));
}

std::vector<int> JumpPattern::jumps() const {
    std::vector<int> out;
    for (int v : x_)
        if (v != 0) out.push_back(v);
    return out;
}

int JumpPattern::largest_jump() const {
    return *std::max_element(x_.begin(), x_.end());
}

EpochSet epoch_set(const JumpPattern& x) {
    const auto& e = x.entries();
    const int n = x.size();
    EpochSet out;
    out.levels.push_back(0);
    for (int j = 1; j <= n - 1; ++j)
        if (e[static_cast<std::size_t>(j)] != 0) out.levels.push_back(j);
    out.levels.push_back(n);
    return out;
}

std::uint64_t theta_count(int n, int k) {
    if (n < 0 || k < 1) return 0;
    constexpr std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> t(static_cast<std::size_t>(n) + 1, 0);
    t[0] = 1;
    for (int m = 1; m <= n; ++m) {
        std::uint64_t s = 0;
        for (int i = 1; i <= std::min(k, m); ++i) {
            std::uint64_t add = t[static_cast<std::size_t>(m - i)];
            s = (add > cap - s) ? cap : s + add;
        }
        t[static_cast<std::size_t>(m)] = s;
    }
    return t[static_cast<std::size_t>(n)];
}

namespace {

constexpr int kMaxCachedLevel = 25;
constexpr std::uint64_t kMaxCachedPatterns = 2'000'000;

using PatternSet = std::vector<JumpPattern>;

class ThetaCache {
public:
    std::shared_ptr<const PatternSet> get(int n, int k) {
        k = std::min(k, n);
        {
            std::shared_lock lock(mutex_);
            auto it = sets_.find({n, k});
            if (it != sets_.end()) return it->second;
        }
        auto built = std::make_shared<const PatternSet>(build(n, k));
        if (n <= kMaxCachedLevel && theta_count(n, k) <= kMaxCachedPatterns) {
            std::unique_lock lock(mutex_);
            sets_.emplace(std::make_pair(n, k), built);
        }
        return built;
    }

private:
    PatternSet build(int n, int k) {
        PatternSet out;
        if (n == 1) {
            out.emplace_back(std::vector<int>{1});
            return out;
        }
        // last jump i < n: extend every pattern of n-i levels
        for (int i = 1; i <= std::min(k, n - 1); ++i) {
            auto prefix = get(n - i, k);
            for (const JumpPattern& p : *prefix) {
                std::vector<int> x = p.entries();
                x.resize(static_cast<std::size_t>(n), 0);
                x[static_cast<std::size_t>(n - i)] = i;
                out.emplace_back(std::move(x));
            }
        }
        if (k >= n) {
            std::vector<int> x(static_cast<std::size_t>(n), 0);
            x[0] = n;
            out.emplace_back(std::move(x));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::shared_mutex mutex_;
    std::map<std::pair<int, int>, std::shared_ptr<const PatternSet>> sets_;
};

ThetaCache& theta_cache() {
    static ThetaCache cache;
    return cache;
}

}  // namespace

std::vector<JumpPattern> enumerate_theta(int n, int k) {
    if (n < 1) throw InputError("enumerate_theta needs n >= 1");
    if (k < 1) throw InputError("enumerate_theta needs k >= 1");
    return *theta_cache().get(n, k);
}

int Composition::weight() const {
    return std::accumulate(y.begin(), y.end(), 0);
}

std::vector<Composition> enumerate_omega(int n, int i) {
    if (n < 1) throw InputError("enumerate_omega needs n >= 1");
    std::vector<Composition> out;
    if (i < n - 1) return out;
    std::vector<int> y(static_cast<std::size_t>(n), 0);
    auto fill = [&](auto& self, int pos, int remaining) -> void {
        if (pos == n - 1) {
            int lo = (pos == 0) ? 0 : 1;
            if (remaining < lo) return;
            y[static_cast<std::size_t>(pos)] = remaining;
            out.push_back(Composition{y});
            return;
        }
        int lo = (pos == 0) ? 0 : 1;
        int reserve = n - 1 - pos;  // later parts need at least 1 each
        for (int v = lo; v <= remaining - reserve; ++v) {
            y[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    fill(fill, 0, i);
    return out;
}

}  // namespace gfbp
