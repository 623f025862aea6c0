/**
 * The two map representations the toolkit reasons about: explicit continuous
 * piecewise-affine maps (affine pieces on H-representation cells) and
 * black-box locally Lipschitz maps with optional analytic Jacobians.
 */

#ifndef LIPINV_MAPS_HPP
#define LIPINV_MAPS_HPP

#include <variant>

#include "polyhedron.hpp"

namespace lipinv {

/** One affine piece x |-> A x + b valid on its cell. */
struct AffinePiece {
    Mat A;
    Vec b;
    Polyhedron cell;
};

/**
 * Continuous piecewise-affine map. Pieces must cover the domain and agree on
 * shared facets; `validate` spot-checks both with seeded samples.
 */
class PwaMap {
public:
    PwaMap() = default;

    PwaMap(std::vector<AffinePiece> pieces, Domain domain) : pieces_(std::move(pieces)), domain_(std::move(domain))
    {
        require(!pieces_.empty(), ErrorKind::ValidationError, "piecewise-affine map needs at least one piece");
        dim_in_ = static_cast<int>(pieces_.front().A.cols());
        dim_out_ = static_cast<int>(pieces_.front().A.rows());
        for (const auto& p : pieces_) {
            require(static_cast<int>(p.A.cols()) == dim_in_ && static_cast<int>(p.A.rows()) == dim_out_,
                    ErrorKind::DimensionMismatch, "piece matrices disagree in shape");
            require(static_cast<int>(p.b.size()) == dim_out_, ErrorKind::DimensionMismatch, "piece offset has wrong size");
            require(p.cell.dim == dim_in_, ErrorKind::DimensionMismatch, "piece cell has wrong dimension");
        }
        require(domain_.dim == dim_in_, ErrorKind::DimensionMismatch, "domain dimension mismatch");
    }

    int dim_in() const { return dim_in_; }
    int dim_out() const { return dim_out_; }
    const std::vector<AffinePiece>& pieces() const { return pieces_; }
    const Domain& domain() const { return domain_; }

    /** Pieces whose cells contain x within `tol` of their facets. */
    std::vector<int> active_pieces(const Vec& x, double tol = 1e-10) const
    {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(pieces_.size()); ++i)
            if (pieces_[static_cast<std::size_t>(i)].cell.contains(x, tol)) idx.push_back(i);
        return idx;
    }

    Vec eval(const Vec& x) const
    {
        require(domain_.contains(x), ErrorKind::PointOutsideDomain, "evaluation point is outside the map domain");
        const auto idx = active_pieces(x);
        require(!idx.empty(), ErrorKind::PointOutsideDomain, "no piece covers the evaluation point");
        const auto& p = pieces_[static_cast<std::size_t>(idx.front())];
        return p.A * x + p.b;
    }

    /**
     * Spot-check that active pieces agree where they overlap and that the
     * domain is covered, using `samples` seeded points.
     */
    void validate(int samples = 256, std::uint64_t seed = 11u) const
    {
        const auto check_agreement = [this](const Vec& x, bool must_cover) {
            auto idx = active_pieces(x, 1e-7);
            if (idx.empty()) {
                require(!must_cover, ErrorKind::ValidationError, "cells fail to cover a domain sample");
                return;
            }
            const auto& first = pieces_[static_cast<std::size_t>(idx.front())];
            const Vec y0 = first.A * x + first.b;
            for (std::size_t j = 1; j < idx.size(); ++j) {
                const auto& p = pieces_[static_cast<std::size_t>(idx[j])];
                const Vec yj = p.A * x + p.b;
                require((yj - y0).norm() <= 1e-6 * (1.0 + y0.norm()), ErrorKind::ValidationError,
                        "active pieces disagree on a shared point");
            }
        };

        Rng rng(seed);
        auto [lo, hi] = domain_.grid_box(Vec::Zero(dim_in_), 4.0);
        for (int s = 0; s < samples; ++s) {
            Vec x(dim_in_);
            for (int i = 0; i < dim_in_; ++i) x[i] = rng.uniform(lo[i], hi[i]);
            if (!domain_.contains(x)) continue;
            check_agreement(x, true);
            // Interior samples almost never touch a cell interface, so also
            // probe the projection of x onto every facet plane: where two
            // cells actually meet, those projections land on the seam.
            for (const auto& piece : pieces_) {
                for (const auto& row : piece.cell.rows) {
                    const double na2 = row.a.squaredNorm();
                    if (na2 <= 1e-300) continue;
                    const Vec xi = x - ((row.a.dot(x) - row.c) / na2) * row.a;
                    if (!domain_.contains(xi)) continue;
                    check_agreement(xi, false);
                }
            }
        }
    }

    /** Upper Lipschitz bound: the largest piece spectral norm. */
    double lipschitz_bound() const
    {
        double s = 0.0;
        for (const auto& p : pieces_) {
            Eigen::JacobiSVD<Mat> svd(p.A);
            s = std::max(s, svd.singularValues()[0]);
        }
        return s;
    }

private:
    std::vector<AffinePiece> pieces_;
    Domain domain_;
    int dim_in_ = 0;
    int dim_out_ = 0;
};

/**
 * Black-box locally Lipschitz map. `jac`, when present, returns the
 * derivative at points where the map is differentiable (almost every point);
 * otherwise central differences stand in. `smooth` marks maps that are C^1
 * on their whole domain, which lets single-point Jacobians represent the
 * generalized derivative exactly.
 */
struct LipschitzMap {
    int dim_in = 0;
    int dim_out = 0;
    Domain domain;
    std::function<Vec(const Vec&)> eval_fn;
    std::function<Mat(const Vec&)> jac_fn;  // may be empty
    bool smooth = false;
    double lipschitz_hint = 0.0;  // 0 = unknown

    Vec eval(const Vec& x) const
    {
        require(domain.contains(x), ErrorKind::PointOutsideDomain, "evaluation point is outside the map domain");
        return eval_fn(x);
    }

    /** Derivative via the oracle, else central differences (a.e. valid). */
    Mat jacobian(const Vec& x) const
    {
        if (jac_fn) return jac_fn(x);
        const double h = 1e-6 * std::max(1.0, x.norm());
        Mat J(dim_out, dim_in);
        for (int j = 0; j < dim_in; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            J.col(j) = (eval_fn(xp) - eval_fn(xm)) / (2.0 * h);
        }
        return J;
    }
};

using AnyMap = std::variant<PwaMap, LipschitzMap>;

inline int map_dim_in(const AnyMap& m)
{
    return std::holds_alternative<PwaMap>(m) ? std::get<PwaMap>(m).dim_in() : std::get<LipschitzMap>(m).dim_in;
}

inline int map_dim_out(const AnyMap& m)
{
    return std::holds_alternative<PwaMap>(m) ? std::get<PwaMap>(m).dim_out() : std::get<LipschitzMap>(m).dim_out;
}

inline const Domain& map_domain(const AnyMap& m)
{
    return std::holds_alternative<PwaMap>(m) ? std::get<PwaMap>(m).domain() : std::get<LipschitzMap>(m).domain;
}

inline Vec map_eval(const AnyMap& m, const Vec& x)
{
    return std::holds_alternative<PwaMap>(m) ? std::get<PwaMap>(m).eval(x) : std::get<LipschitzMap>(m).eval(x);
}

inline bool map_is_pwa(const AnyMap& m) { return std::holds_alternative<PwaMap>(m); }

inline bool map_is_smooth(const AnyMap& m)
{
    return std::holds_alternative<LipschitzMap>(m) && std::get<LipschitzMap>(m).smooth;
}

/**
 * A single almost-everywhere derivative near x. For piecewise-affine maps
 * this is the matrix of a piece active at x (preferring, when `dir` is
 * given, a piece whose cell extends from x in that direction); for
 * black-box maps it is the Jacobian oracle or a finite difference.
 */
inline Mat map_jacobian_near(const AnyMap& m, const Vec& x, const Vec* dir = nullptr)
{
    if (std::holds_alternative<PwaMap>(m)) {
        const auto& pwa = std::get<PwaMap>(m);
        const auto idx = pwa.active_pieces(x, 1e-10);
        require(!idx.empty(), ErrorKind::PointOutsideDomain, "no piece is active at the probe point");
        if (idx.size() > 1 && dir != nullptr && dir->norm() > 1e-300) {
            const Vec probe = x + 1e-9 * (*dir / dir->norm());
            for (int i : idx)
                if (pwa.pieces()[static_cast<std::size_t>(i)].cell.contains(probe, 0.0))
                    return pwa.pieces()[static_cast<std::size_t>(i)].A;
        }
        return pwa.pieces()[static_cast<std::size_t>(idx.front())].A;
    }
    return std::get<LipschitzMap>(m).jacobian(x);
}

/**
 * The shifted map f_t(x) = f(x) - t x. For piecewise-affine maps the pieces
 * shift exactly (A_i - t I on the same cells); black-box maps wrap closures.
 */
inline AnyMap shift_map(const AnyMap& m, double t)
{
    const int n = map_dim_in(m);
    require(n == map_dim_out(m), ErrorKind::DimensionMismatch, "shifted maps need equal input and output dimension");
    if (std::holds_alternative<PwaMap>(m)) {
        const auto& pwa = std::get<PwaMap>(m);
        std::vector<AffinePiece> shifted;
        shifted.reserve(pwa.pieces().size());
        for (const auto& p : pwa.pieces()) shifted.push_back({p.A - t * Mat::Identity(n, n), p.b, p.cell});
        return PwaMap(std::move(shifted), pwa.domain());
    }
    const auto base = std::get<LipschitzMap>(m);
    LipschitzMap out;
    out.dim_in = base.dim_in;
    out.dim_out = base.dim_out;
    out.domain = base.domain;
    out.smooth = base.smooth;
    out.lipschitz_hint = base.lipschitz_hint > 0.0 ? base.lipschitz_hint + std::abs(t) : 0.0;
    out.eval_fn = [base, t](const Vec& x) { return Vec(base.eval_fn(x) - t * x); };
    if (base.jac_fn) {
        const int dim = base.dim_in;
        out.jac_fn = [base, t, dim](const Vec& x) { return Mat(base.jac_fn(x) - t * Mat::Identity(dim, dim)); };
    }
    return out;
}

}  // namespace lipinv

#endif  // LIPINV_MAPS_HPP
