#pragma once

#include <Eigen/Core>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace xmtf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
public:
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ContractViolation(message);
}

/// FNV-1a, used to derive independent seeds from (base seed, purpose tag).
/// std::hash is implementation-defined, so we pin the mixing function.
inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t h = fnv1a(tag);
    // splitmix64 finalizer over the combined word
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (h | 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) {
    return derive_seed(base, std::string(tag) + "#" + std::to_string(index));
}

/// Running per-dimension mean/variance (Welford), used to z-score user states.
/// With fewer than two observations it is the identity transform.
class RunningNorm {
public:
    RunningNorm() = default;
    explicit RunningNorm(int dim) : mean_(Vec::Zero(dim)), m2_(Vec::Zero(dim)) {}

    void observe(const Vec& x) {
        if (count_ == 0 && mean_.size() == 0) {
            mean_ = Vec::Zero(x.size());
            m2_ = Vec::Zero(x.size());
        }
        ++count_;
        Vec delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta.cwiseProduct(x - mean_);
    }

    Vec apply(const Vec& x) const {
        if (count_ < 2) return x;
        Vec sd = (m2_ / static_cast<double>(count_ - 1)).cwiseSqrt().cwiseMax(1e-6);
        return (x - mean_).cwiseQuotient(sd);
    }

    std::int64_t count() const { return count_; }
    const Vec& mean() const { return mean_; }
    const Vec& m2() const { return m2_; }
    void restore(std::int64_t count, Vec mean, Vec m2) {
        count_ = count;
        mean_ = std::move(mean);
        m2_ = std::move(m2);
    }

private:
    std::int64_t count_ = 0;
    Vec mean_;
    Vec m2_;
};

/// Shortest decimal that round-trips the double; deterministic, locale-free.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Falls back to the
/// calling thread when workers <= 1. fn must be safe to run concurrently for
/// distinct i.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    if (workers <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    int count = std::min(workers, n);
    pool.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace xmtf
