/**
 * Shared basics: dense-algebra aliases, the error model, deterministic
 * random streams, and a small index-parallel map used by the batch layers.
 */

#ifndef LIPINV_CORE_HPP
#define LIPINV_CORE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lipinv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/** Failure kinds surfaced by the toolkit. */
enum class ErrorKind {
    PointOutsideDomain,
    ParseError,
    ValidationError,
    SamplingFailed,
    SingularElement,
    SingularChart,
    PathLeavesDomain,
    Disconnected,
    HorizonExceeded,
    EmptyProfile,
    CheckUnavailable,
    DimensionMismatch,
    InvalidArgument,
};

inline const char* error_kind_name(ErrorKind k)
{
    switch (k) {
        case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::SamplingFailed: return "SamplingFailed";
        case ErrorKind::SingularElement: return "SingularElement";
        case ErrorKind::SingularChart: return "SingularChart";
        case ErrorKind::PathLeavesDomain: return "PathLeavesDomain";
        case ErrorKind::Disconnected: return "Disconnected";
        case ErrorKind::HorizonExceeded: return "HorizonExceeded";
        case ErrorKind::EmptyProfile: return "EmptyProfile";
        case ErrorKind::CheckUnavailable: return "CheckUnavailable";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind)
    {
    }

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message)
{
    if (!condition) fail(kind, message);
}

// ---------------------------------------------------------------------------
// Deterministic random streams.
//
// Every sampling routine takes an explicit 64-bit seed and derives per-item
// substreams with a counter mix, so batch items can be evaluated in any order
// (or in parallel) and still produce identical results.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/** xoshiro-style generator with explicit, platform-independent output. */
class Rng {
public:
    explicit Rng(std::uint64_t seed)
    {
        state_ = splitmix64(seed);
        if (state_ == 0) state_ = 0x9e3779b97f4a7c15ULL;
    }

    /** Substream for item `index` of the stream labelled `stream`. */
    static Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
    {
        return Rng(splitmix64(seed ^ splitmix64(stream + 0x51ed2701)) ^ splitmix64(index + 0xa11ce));
    }

    std::uint64_t next_u64()
    {
        // splitmix64 sequence; passes the statistical needs of desk-scale sampling
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /** Uniform in [0, 1). */
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

    /** Standard normal via Box-Muller (cached second value). */
    double gaussian()
    {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    Vec gaussian_vec(int n)
    {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = gaussian();
        return v;
    }

    /** Uniform direction on the Euclidean unit sphere. */
    Vec unit_vec(int n)
    {
        Vec v = gaussian_vec(n);
        double nv = v.norm();
        while (nv < 1e-300) {
            v = gaussian_vec(n);
            nv = v.norm();
        }
        return v / nv;
    }

    /** Uniform point in the Euclidean ball B(center, radius). */
    Vec ball_point(const Vec& center, double radius)
    {
        const int n = static_cast<int>(center.size());
        const double u = std::pow(uniform01(), 1.0 / static_cast<double>(n));
        return center + radius * u * unit_vec(n);
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// ---------------------------------------------------------------------------
// Batch evaluation. Work items are indexed; results land in index order, so
// the reduction is deterministic regardless of the worker count.
// ---------------------------------------------------------------------------

inline int& worker_count()
{
    static int count = 0;  // 0 = hardware concurrency
    return count;
}

inline void set_worker_count(int n) { worker_count() = n; }

inline void parallel_for(int n, const std::function<void(int)>& body)
{
    if (n <= 0) return;
    int workers = worker_count();
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    workers = std::min(workers, n);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n || failed.load()) break;
                try {
                    body(i);
                } catch (...) {
                    failed.store(true);
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) fail(ErrorKind::SamplingFailed, "worker task threw during batch evaluation");
}

// ---------------------------------------------------------------------------
// Small helpers.
// ---------------------------------------------------------------------------

inline bool nearly_equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }

/** Shortest decimal that round-trips a double (17 significant digits). */
inline std::string format_17g(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    if (n == 1) {
        out.push_back(a);
        return out;
    }
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

inline Vec make_vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

inline Vec make_vec(const std::vector<double>& xs)
{
    Vec v(static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<int>(i)] = xs[i];
    return v;
}

inline Mat make_mat(int rows, int cols, std::initializer_list<double> xs)
{
    Mat m(rows, cols);
    int i = 0;
    for (double x : xs) {
        m(i / cols, i % cols) = x;
        ++i;
    }
    return m;
}

}  // namespace lipinv

#endif  // LIPINV_CORE_HPP
