#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gef {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Typed errors mirroring the operation error clauses.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct TableHorizonError : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct DegenerateRegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BoundaryAmbiguousError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MethodFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AccuracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Compensated accumulator for long plus-part sums.
// Kahan-Babuska (Neumaier) compensated sum; unlike classic Kahan it keeps the
// correction when a later term cancels the running sum.
struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

// Online log-sum-exp that tolerates -inf terms and never produces NaN from them.
struct OnlineLogSum {
    double max_x = kNegInf;
    double acc = 0.0;  // sum of exp(x_i - max_x)
    void add(double x) {
        if (x == kNegInf) return;
        if (max_x == kNegInf) {
            max_x = x;
            acc = 1.0;
        } else if (x <= max_x) {
            acc += std::exp(x - max_x);
        } else {
            acc = acc * std::exp(max_x - x) + 1.0;
            max_x = x;
        }
    }
    double value() const { return max_x == kNegInf ? kNegInf : max_x + std::log(acc); }
};

// ln(1 - e^x) for x < 0, stable at both ends.
inline double log1mexp(double x) {
    if (x >= 0.0) throw DomainError("log1mexp: argument must be negative");
    if (x > -0.6931471805599453) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

// ln(e^a - e^b) for a > b.
inline double logdiffexp(double a, double b) {
    if (b == kNegInf) return a;
    if (b >= a) throw DomainError("logdiffexp: needs a > b");
    return a + log1mexp(b - a);
}

inline std::vector<double> log_grid(double r0, double r1, int k) {
    if (!(r0 > 0.0) || !(r1 >= r0) || k < 1) throw DomainError("log_grid: bad parameters");
    std::vector<double> g(k);
    if (k == 1) {
        g[0] = r0;
        return g;
    }
    double l0 = std::log(r0), l1 = std::log(r1);
    for (int i = 0; i < k; ++i) g[i] = std::exp(l0 + (l1 - l0) * i / (k - 1));
    g.front() = r0;
    g.back() = r1;
    return g;
}

inline int thread_count() {
    if (const char* e = std::getenv("GEF_THREADS")) {
        int v = std::atoi(e);
        if (v >= 1) return v;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h > 0 ? int(h) : 1;
}

// Runs fn(t) for t in [0, trials). Each trial must seed its own RNG
// substream, so results are identical no matter how trials land on threads.
template <class Fn>
inline void parallel_trials(int64_t trials, Fn&& fn) {
    const int tc = int(std::min<int64_t>(thread_count(), std::max<int64_t>(trials, 1)));
    if (tc <= 1) {
        for (int64_t t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<int64_t> next{0};
    const int64_t chunk = std::max<int64_t>(1, trials / (8 * tc));
    auto worker = [&] {
        for (;;) {
            const int64_t lo = next.fetch_add(chunk);
            if (lo >= trials) return;
            const int64_t hi = std::min(trials, lo + chunk);
            for (int64_t t = lo; t < hi; ++t) fn(t);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(size_t(tc));
    for (int i = 0; i < tc; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace gef
