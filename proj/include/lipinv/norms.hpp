/**
 * Norms attached to points and the induced matrix quantities: the operator
 * norm sup_{|v|=1} |Bv| and the co-norm inf_{|v|=1} |Bv|. Weighted-L2 pairs
 * reduce to singular values of W_out B W_in^{-1}; weighted-L1 and -Linf unit
 * balls are polytopes, so suprema are exact vertex maxima. Everything else
 * runs a seeded multi-restart projected search plus, in dimension <= 2, a
 * dense angular scan that is effectively exact.
 */

#ifndef LIPINV_NORMS_HPP
#define LIPINV_NORMS_HPP

#include "core.hpp"

namespace lipinv {

struct NormAtPoint {
    enum class Kind { Euclidean, DiagL2, DiagL1, DiagLinf, Custom };

    Kind kind = Kind::Euclidean;
    int dim = 0;
    double scale = 1.0;                      // Euclidean: |v| scaled
    Vec weights;                             // Diag*: per-coordinate positive weights
    std::function<double(const Vec&)> fn;    // Custom
    std::string label = "euclidean";

    static NormAtPoint euclidean(int dim, double scale = 1.0)
    {
        require(scale > 0.0, ErrorKind::InvalidArgument, "norm scale must be positive");
        NormAtPoint n;
        n.kind = Kind::Euclidean;
        n.dim = dim;
        n.scale = scale;
        n.label = scale == 1.0 ? "euclidean" : "euclidean*" + std::to_string(scale);
        return n;
    }

    static NormAtPoint diag_l2(const Vec& weights)
    {
        NormAtPoint n;
        n.kind = Kind::DiagL2;
        n.dim = static_cast<int>(weights.size());
        n.weights = weights;
        n.label = "diag-l2";
        for (int i = 0; i < weights.size(); ++i)
            require(weights[i] > 0.0, ErrorKind::InvalidArgument, "diagonal norm weights must be positive");
        return n;
    }

    static NormAtPoint diag_l1(const Vec& weights)
    {
        NormAtPoint n = diag_l2(weights);
        n.kind = Kind::DiagL1;
        n.label = "diag-l1";
        return n;
    }

    static NormAtPoint diag_linf(const Vec& weights)
    {
        NormAtPoint n = diag_l2(weights);
        n.kind = Kind::DiagLinf;
        n.label = "diag-linf";
        return n;
    }

    static NormAtPoint custom(int dim, std::function<double(const Vec&)> fn, std::string label = "custom")
    {
        NormAtPoint n;
        n.kind = Kind::Custom;
        n.dim = dim;
        n.fn = std::move(fn);
        n.label = std::move(label);
        return n;
    }

    double operator()(const Vec& v) const
    {
        require(static_cast<int>(v.size()) == dim, ErrorKind::DimensionMismatch, "norm argument dimension mismatch");
        switch (kind) {
            case Kind::Euclidean: return scale * v.norm();
            case Kind::DiagL2: return (weights.array() * v.array()).matrix().norm();
            case Kind::DiagL1: return (weights.array() * v.array()).abs().sum();
            case Kind::DiagLinf: return (weights.array() * v.array()).abs().maxCoeff();
            case Kind::Custom: return fn(v);
        }
        return 0.0;
    }

    /** True when |v| = |W v|_2 for a diagonal W, which is then returned. */
    bool l2_matrix(Mat& W) const
    {
        if (kind == Kind::Euclidean) {
            W = scale * Mat::Identity(dim, dim);
            return true;
        }
        if (kind == Kind::DiagL2) {
            W = weights.asDiagonal();
            return true;
        }
        return false;
    }

    /** Vertices of the unit ball when it is a polytope (DiagL1 / DiagLinf). */
    std::vector<Vec> unit_ball_vertices() const
    {
        std::vector<Vec> verts;
        if (kind == Kind::DiagL1) {
            for (int i = 0; i < dim; ++i) {
                Vec v = Vec::Zero(dim);
                v[i] = 1.0 / weights[i];
                verts.push_back(v);
                v[i] = -1.0 / weights[i];
                verts.push_back(v);
            }
        } else if (kind == Kind::DiagLinf) {
            require(dim <= 16, ErrorKind::InvalidArgument, "Linf vertex enumeration limited to dimension 16");
            const int count = 1 << dim;
            for (int mask = 0; mask < count; ++mask) {
                Vec v(dim);
                for (int i = 0; i < dim; ++i) v[i] = ((mask >> i) & 1 ? 1.0 : -1.0) / weights[i];
                verts.push_back(v);
            }
        }
        return verts;
    }
};

namespace detail {

inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 80)
{
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? f1 : f2;
}

/** Ratio |B u'|_out / with u' = u normalized in the input norm. */
inline double direction_value(const Mat& B, const NormAtPoint& nin, const NormAtPoint& nout, const Vec& u)
{
    const double nu = nin(u);
    if (nu < 1e-300) return 0.0;
    return nout(B * (u / nu));
}

/** Dense angular scan in dimension 2; exact to refinement accuracy. */
inline std::pair<double, double> scan_extrema_2d(const Mat& B, const NormAtPoint& nin, const NormAtPoint& nout)
{
    const int N = 4096;
    double best_min = kInfinity, best_max = -kInfinity;
    double arg_min = 0.0, arg_max = 0.0;
    for (int i = 0; i < N; ++i) {
        const double th = 3.14159265358979323846 * static_cast<double>(i) / static_cast<double>(N);
        Vec u(2);
        u << std::cos(th), std::sin(th);
        const double v = direction_value(B, nin, nout, u);
        if (v < best_min) {
            best_min = v;
            arg_min = th;
        }
        if (v > best_max) {
            best_max = v;
            arg_max = th;
        }
    }
    const double h = 3.14159265358979323846 / static_cast<double>(N);
    auto value_at = [&](double th) {
        Vec u(2);
        u << std::cos(th), std::sin(th);
        return direction_value(B, nin, nout, u);
    };
    best_min = golden_min(value_at, arg_min - h, arg_min + h);
    best_max = -golden_min([&](double th) { return -value_at(th); }, arg_max - h, arg_max + h);
    return {best_min, best_max};
}

/** Multi-restart projected coordinate search on the direction sphere. */
inline double search_extremum(const Mat& B, const NormAtPoint& nin, const NormAtPoint& nout, bool maximize,
                              int restarts = 32, std::uint64_t seed = 0x5ca1ab1e)
{
    const int n = static_cast<int>(B.cols());
    double best = maximize ? -kInfinity : kInfinity;
    for (int r = 0; r < restarts; ++r) {
        Rng rng = Rng::substream(seed, 77, static_cast<std::uint64_t>(r));
        Vec u = r < n ? Vec(Vec::Unit(n, r)) : rng.unit_vec(n);
        double fu = direction_value(B, nin, nout, u);
        double step = 0.5;
        while (step > 1e-12) {
            bool improved = false;
            for (int i = 0; i < n; ++i) {
                for (double s : {step, -step}) {
                    Vec cand = u;
                    cand[i] += s;
                    const double nc = cand.norm();
                    if (nc < 1e-300) continue;
                    cand /= nc;
                    const double fc = direction_value(B, nin, nout, cand);
                    if (maximize ? fc > fu : fc < fu) {
                        u = cand;
                        fu = fc;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (maximize ? fu > best : fu < best) best = fu;
    }
    return best;
}

}  // namespace detail

/** Operator norm of B as a map (R^m, nin) -> (R^k, nout). */
inline double operator_norm(const Mat& B, const NormAtPoint& nin, const NormAtPoint& nout)
{
    require(static_cast<int>(B.cols()) == nin.dim, ErrorKind::DimensionMismatch, "operator norm: input dimension mismatch");
    require(static_cast<int>(B.rows()) == nout.dim, ErrorKind::DimensionMismatch, "operator norm: output dimension mismatch");
    Mat Win, Wout;
    if (nin.l2_matrix(Win) && nout.l2_matrix(Wout)) {
        Mat core = Wout * B * Win.inverse();
        Eigen::JacobiSVD<Mat> svd(core);
        return svd.singularValues()[0];
    }
    // Polytopal input ball: convex objective attains its sup at a vertex.
    const auto verts = nin.unit_ball_vertices();
    if (!verts.empty()) {
        double best = 0.0;
        for (const auto& v : verts) best = std::max(best, nout(B * v));
        return best;
    }
    if (B.cols() == 1) {
        Vec u(1);
        u << 1.0;
        return detail::direction_value(B, nin, nout, u);
    }
    if (B.cols() == 2) return detail::scan_extrema_2d(B, nin, nout).second;
    return detail::search_extremum(B, nin, nout, /*maximize=*/true);
}

/**
 * Co-norm inf_{|v|_in = 1} |B v|_out. Not a concave function of B, so hull
 * minima may sit at interior elements; callers who need hull co-norms must
 * scan hull samples themselves.
 */
inline double conorm(const Mat& B, const NormAtPoint& nin, const NormAtPoint& nout)
{
    require(static_cast<int>(B.cols()) == nin.dim, ErrorKind::DimensionMismatch, "co-norm: input dimension mismatch");
    require(static_cast<int>(B.rows()) == nout.dim, ErrorKind::DimensionMismatch, "co-norm: output dimension mismatch");
    Mat Win, Wout;
    if (nin.l2_matrix(Win) && nout.l2_matrix(Wout)) {
        Mat core = Wout * B * Win.inverse();
        Eigen::JacobiSVD<Mat> svd(core);
        return svd.singularValues()[svd.singularValues().size() - 1];
    }
    if (B.cols() == 1) {
        Vec u(1);
        u << 1.0;
        return detail::direction_value(B, nin, nout, u);
    }
    if (B.cols() == 2) return detail::scan_extrema_2d(B, nin, nout).first;
    return detail::search_extremum(B, nin, nout, /*maximize=*/false);
}

}  // namespace lipinv

#endif  // LIPINV_NORMS_HPP
