#include "diforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace diforge {

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimMismatch("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

Vec sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimMismatch("sub: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimMismatch("add: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec scaled(const Vec& v, double s) {
    Vec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] * s;
    return r;
}

Vec random_unit_vector(int dim, Stream& rng) {
    Vec u(static_cast<std::size_t>(dim));
    while (true) {
        for (auto& c : u) c = rng.next_gaussian();
        double nn = norm(u);
        if (nn > 1e-12) {
            for (auto& c : u) c /= nn;
            return u;
        }
    }
}

void Subspace::validate() const {
    if (ambient_dim <= 0) throw UsageError("subspace: ambient_dim must be positive");
    if (static_cast<int>(base_point.size()) != ambient_dim) {
        throw DimMismatch("subspace: base_point dimension != ambient_dim");
    }
    if (static_cast<int>(basis.size()) > ambient_dim) {
        throw UsageError("subspace: more basis vectors than ambient dimensions");
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (static_cast<int>(basis[i].size()) != ambient_dim) {
            throw DimMismatch("subspace: basis vector dimension != ambient_dim");
        }
        if (std::fabs(norm(basis[i]) - 1.0) > kTolOrth) {
            throw UsageError("subspace: basis vector " + std::to_string(i) + " not unit");
        }
        for (std::size_t j = i + 1; j < basis.size(); ++j) {
            if (std::fabs(dot(basis[i], basis[j])) > kTolOrth) {
                throw UsageError("subspace: basis vectors " + std::to_string(i) + "," +
                                 std::to_string(j) + " not orthogonal");
            }
        }
    }
}

std::pair<double, double> project_onto(const Vec& z, const Vec& v) {
    if (z.size() != v.size()) throw DimMismatch("project_onto: dimension mismatch");
    double nv = norm(v);
    if (nv == 0.0) throw ZeroDirection("project_onto: zero direction");
    double coeff = dot(z, v) / nv;
    return {coeff, std::fabs(coeff)};
}

double min_separation_angle(double r, double d) {
    if (!(r > 0.0) || !(d > 0.0)) {
        throw UsageError("min_separation_angle: r and d must be positive");
    }
    if (d > 2.0 * r) {
        throw Infeasible("min_separation_angle: d > 2r, no two sphere points reach it");
    }
    double s = std::sqrt(d / (2.0 * r));
    return 2.0 * std::asin(std::min(1.0, s));
}

SeparationCheck verify_angle_dense(const Vec& center, const std::vector<Vec>& points,
                                   double d) {
    SeparationCheck out;
    if (points.size() < 2) {
        out.ok = true;
        out.min_sep = std::numeric_limits<double>::infinity();
        return out;
    }
    std::vector<Vec> rel(points.size());
    std::vector<double> radii(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        rel[i] = sub(points[i], center);
        radii[i] = norm(rel[i]);
    }
    double r0 = radii[0];
    if (r0 <= 0.0) throw RadiusMismatch("verify_angle_dense: point coincides with center");
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (std::fabs(radii[i] - r0) > kTolRadiusRel * std::max(1.0, r0)) {
            throw RadiusMismatch("verify_angle_dense: point " + std::to_string(i) +
                                 " not at the common radius");
        }
    }
    out.min_sep = std::numeric_limits<double>::infinity();
    int arg_j = -1, arg_k = -1;
    for (std::size_t k = 0; k < rel.size(); ++k) {
        for (std::size_t j = 0; j < rel.size(); ++j) {
            if (j == k) continue;
            // |Pi_{u_k} u_j - u_k| = |<u_j, u_k>/|u_k| - |u_k||.
            double sep = std::fabs(dot(rel[j], rel[k]) / radii[k] - radii[k]);
            if (sep < out.min_sep) {
                out.min_sep = sep;
                arg_j = static_cast<int>(j);
                arg_k = static_cast<int>(k);
            }
        }
    }
    out.ok = out.min_sep >= d * (1.0 - kSepSlackRel);
    if (!out.ok) out.violating_pair = std::make_pair(arg_j, arg_k);
    return out;
}

namespace {

// Working-coordinate view of the sphere the arrangement lives on.
// Subspace mode: vectors are coefficient m-tuples over an orthonormal basis.
// Complement mode: vectors are ambient n-tuples orthogonal to `forbidden`.
struct SphereCtx {
    int work_dim = 0;
    int effective_dim = 0;
    const std::vector<Vec>* forbidden = nullptr;

    Vec sample_unit(Stream& rng) const {
        if (!forbidden || forbidden->empty()) {
            return random_unit_vector(work_dim, rng);
        }
        Vec u(static_cast<std::size_t>(work_dim));
        while (true) {
            for (auto& c : u) c = rng.next_gaussian();
            strip_forbidden(u);
            double nn = norm(u);
            if (nn > 1e-9) {
                for (auto& c : u) c /= nn;
                return u;
            }
        }
    }

    void strip_forbidden(Vec& v) const {
        if (!forbidden) return;
        for (const Vec& f : *forbidden) {
            double c = dot(v, f);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * f[i];
        }
    }

    // Orthonormal 2-basis of the working sphere's span; only called when
    // effective_dim == 2.
    std::pair<Vec, Vec> circle_basis(const std::vector<Vec>& hints) const {
        if (!forbidden || forbidden->empty()) {
            Vec b0(static_cast<std::size_t>(work_dim), 0.0);
            Vec b1(static_cast<std::size_t>(work_dim), 0.0);
            b0[0] = 1.0;
            b1[1] = 1.0;
            return {b0, b1};
        }
        std::vector<Vec> found;
        auto try_candidate = [&](Vec cand) {
            strip_forbidden(cand);
            for (const Vec& q : found) {
                double c = dot(cand, q);
                for (std::size_t i = 0; i < cand.size(); ++i) cand[i] -= c * q[i];
            }
            double nn = norm(cand);
            if (nn > 1e-6) {
                for (auto& c : cand) c /= nn;
                found.push_back(std::move(cand));
            }
        };
        // Existing points are already in the span; prefer them as seeds.
        for (const Vec& h : hints) {
            if (static_cast<int>(found.size()) == 2) break;
            try_candidate(h);
        }
        for (int i = 0; i < work_dim && static_cast<int>(found.size()) < 2; ++i) {
            Vec e(static_cast<std::size_t>(work_dim), 0.0);
            e[static_cast<std::size_t>(i)] = 1.0;
            try_candidate(std::move(e));
        }
        return {found[0], found[1]};
    }
};

double pair_cos_ceiling(double r, double d) {
    // sep(u, w) = r(1 - <u, w>) >= d(1 - slack)  <=>  <u, w> <= ceiling.
    return 1.0 - d * (1.0 - kSepSlackRel) / r;
}

bool separated_from_all(const Vec& u, const std::vector<Vec>& kept, double cos_ceiling) {
    for (const Vec& q : kept) {
        if (dot(u, q) > cos_ceiling) return false;
    }
    return true;
}

double min_pair_sep(const std::vector<Vec>& unit_points, double r) {
    double worst = -1.0; // max cosine
    for (std::size_t i = 0; i < unit_points.size(); ++i) {
        for (std::size_t j = i + 1; j < unit_points.size(); ++j) {
            worst = std::max(worst, dot(unit_points[i], unit_points[j]));
        }
    }
    return r * (1.0 - worst);
}

// Deterministic Coulomb spreading on the sphere: minimizes sum 1/|u_i - u_j|
// by projected gradient descent with backtracking. Used only after greedy
// placement stalls; near-optimal spreadings are what tight specs require.
void coulomb_spread(std::vector<Vec>& pts, const SphereCtx& ctx) {
    const std::size_t N = pts.size();
    const std::size_t dim = pts[0].size();
    auto energy = [&](const std::vector<Vec>& p) {
        double e = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = i + 1; j < N; ++j) {
                double dsq = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    double df = p[i][c] - p[j][c];
                    dsq += df * df;
                }
                e += 1.0 / std::sqrt(std::max(dsq, 1e-28));
            }
        }
        return e;
    };

    double step = 0.05;
    double e_cur = energy(pts);
    std::vector<Vec> grad(N, Vec(dim, 0.0));
    std::vector<Vec> trial(N, Vec(dim, 0.0));
    for (int iter = 0; iter < 60000; ++iter) {
        for (auto& g : grad) std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = i + 1; j < N; ++j) {
                double dsq = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    double df = pts[i][c] - pts[j][c];
                    dsq += df * df;
                }
                dsq = std::max(dsq, 1e-28);
                double w = 1.0 / (dsq * std::sqrt(dsq));
                for (std::size_t c = 0; c < dim; ++c) {
                    double df = (pts[i][c] - pts[j][c]) * w;
                    grad[i][c] -= df;
                    grad[j][c] += df;
                }
            }
        }
        // Tangential component only; radial motion is undone by renormalizing.
        double gnorm_sq = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double c = dot(grad[i], pts[i]);
            for (std::size_t k = 0; k < dim; ++k) grad[i][k] -= c * pts[i][k];
            gnorm_sq += dot(grad[i], grad[i]);
        }
        if (gnorm_sq < 1e-26 * e_cur * e_cur) break;

        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < N; ++i) {
                for (std::size_t k = 0; k < dim; ++k) {
                    trial[i][k] = pts[i][k] - step * grad[i][k];
                }
                ctx.strip_forbidden(trial[i]);
                double nn = norm(trial[i]);
                for (std::size_t k = 0; k < dim; ++k) trial[i][k] /= nn;
            }
            double e_new = energy(trial);
            if (e_new < e_cur) {
                pts.swap(trial);
                e_cur = e_new;
                step = std::min(step * 1.25, 0.25);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
}

std::vector<Vec> angle_dense_core(const SphereCtx& ctx, const ArrangementSpec& spec,
                                  std::uint64_t seed) {
    if (spec.count < 1) throw UsageError("arrangement: count must be >= 1");
    if (!(spec.radius > 0.0) || !(spec.min_proj_dist > 0.0)) {
        throw UsageError("arrangement: radius and min_proj_dist must be positive");
    }
    if (spec.min_proj_dist > 2.0 * spec.radius * (1.0 + kSepSlackRel)) {
        throw Infeasible("arrangement: min_proj_dist exceeds the sphere diameter");
    }
    if (ctx.effective_dim < 2) {
        throw DimensionUnderflow("arrangement: sphere needs dimension >= 2");
    }

    const double cos_ceiling = pair_cos_ceiling(spec.radius, spec.min_proj_dist);
    Stream rng = stream_for(seed, 0);
    std::vector<Vec> kept;
    kept.reserve(static_cast<std::size_t>(spec.count));

    bool stalled = false;
    while (static_cast<int>(kept.size()) < spec.count) {
        long attempts = 0;
        bool placed = false;
        while (attempts < spec.max_attempts) {
            ++attempts;
            Vec u = ctx.sample_unit(rng);
            if (separated_from_all(u, kept, cos_ceiling)) {
                kept.push_back(std::move(u));
                placed = true;
                break;
            }
        }
        if (!placed) {
            stalled = true;
            break;
        }
    }

    if (stalled) {
        // Greedy cannot finish; spread a full configuration deterministically
        // and accept it only if it genuinely meets the separation.
        while (static_cast<int>(kept.size()) < spec.count) {
            kept.push_back(ctx.sample_unit(rng));
        }
        if (ctx.effective_dim == 2) {
            auto [b0, b1] = ctx.circle_basis(kept);
            double phase = std::atan2(dot(kept[0], b1), dot(kept[0], b0));
            for (int k = 0; k < spec.count; ++k) {
                double ang = phase + 2.0 * M_PI * k / spec.count;
                double ca = std::cos(ang), sa = std::sin(ang);
                for (std::size_t c = 0; c < kept[0].size(); ++c) {
                    kept[static_cast<std::size_t>(k)][c] = ca * b0[c] + sa * b1[c];
                }
            }
        } else {
            coulomb_spread(kept, ctx);
        }
        if (min_pair_sep(kept, spec.radius) <
            spec.min_proj_dist * (1.0 - kSepSlackRel)) {
            throw PlacementExhausted(
                "arrangement: could not place " + std::to_string(spec.count) +
                " points at separation " + std::to_string(spec.min_proj_dist) +
                " on a radius-" + std::to_string(spec.radius) + " sphere of dimension " +
                std::to_string(ctx.effective_dim));
        }
    }
    return kept;
}

} // namespace

std::vector<Vec> generate_angle_dense(const Subspace& sub, const ArrangementSpec& spec,
                                      std::uint64_t seed) {
    sub.validate();
    int m = static_cast<int>(sub.basis.size());
    if (m < 2) throw DimensionUnderflow("generate_angle_dense: need |basis| >= 2");

    SphereCtx ctx;
    ctx.work_dim = m;
    ctx.effective_dim = m;
    auto units = angle_dense_core(ctx, spec, seed);

    std::vector<Vec> out;
    out.reserve(units.size());
    for (const Vec& u : units) {
        Vec p = sub.base_point;
        for (int j = 0; j < m; ++j) {
            double c = spec.radius * u[static_cast<std::size_t>(j)];
            const Vec& bj = sub.basis[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < p.size(); ++i) p[i] += c * bj[i];
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Vec> generate_angle_dense_complement(const Vec& base_point,
                                                 const std::vector<Vec>& forbidden,
                                                 const ArrangementSpec& spec,
                                                 std::uint64_t seed) {
    int n = static_cast<int>(base_point.size());
    for (const Vec& f : forbidden) {
        if (static_cast<int>(f.size()) != n) {
            throw DimMismatch("generate_angle_dense_complement: forbidden dimension");
        }
    }
    SphereCtx ctx;
    ctx.work_dim = n;
    ctx.effective_dim = n - static_cast<int>(forbidden.size());
    ctx.forbidden = &forbidden;
    auto units = angle_dense_core(ctx, spec, seed);

    std::vector<Vec> out;
    out.reserve(units.size());
    for (const Vec& u : units) {
        Vec p = base_point;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += spec.radius * u[i];
        out.push_back(std::move(p));
    }
    return out;
}

Vec Rotation::apply(const Vec& x) const {
    if (static_cast<int>(x.size()) != n) throw DimMismatch("rotation apply: dimension");
    Vec y(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = a.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

Vec Rotation::apply_transpose(const Vec& x) const {
    if (static_cast<int>(x.size()) != n) throw DimMismatch("rotation apply: dimension");
    Vec y(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double xi = x[static_cast<std::size_t>(i)];
        const double* row = a.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) y[static_cast<std::size_t>(j)] += row[j] * xi;
    }
    return y;
}

namespace {

int det_sign(std::vector<double> m, int n) {
    int sign = 1;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::fabs(m[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::fabs(m[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0;
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(m[static_cast<std::size_t>(piv) * n + j],
                          m[static_cast<std::size_t>(col) * n + j]);
            }
            sign = -sign;
        }
        double p = m[static_cast<std::size_t>(col) * n + col];
        if (p < 0.0) sign = -sign;
        for (int r = col + 1; r < n; ++r) {
            double f = m[static_cast<std::size_t>(r) * n + col] / p;
            for (int j = col; j < n; ++j) {
                m[static_cast<std::size_t>(r) * n + j] -=
                    f * m[static_cast<std::size_t>(col) * n + j];
            }
        }
    }
    return sign;
}

} // namespace

Rotation haar_rotation(int n, std::uint64_t seed) {
    if (n < 1) throw UsageError("haar_rotation: n must be >= 1");
    Rotation q;
    q.n = n;
    q.a.assign(static_cast<std::size_t>(n) * n, 0.0);
    Stream rng = stream_for(seed, 0);

    for (int r = 0; r < n; ++r) {
        double* row = q.a.data() + static_cast<std::size_t>(r) * n;
        while (true) {
            for (int j = 0; j < n; ++j) row[j] = rng.next_gaussian();
            // Modified Gram-Schmidt against the finished rows; the diagonal
            // of the triangular factor is the final norm, kept positive.
            for (int prev = 0; prev < r; ++prev) {
                const double* p = q.a.data() + static_cast<std::size_t>(prev) * n;
                double c = 0.0;
                for (int j = 0; j < n; ++j) c += row[j] * p[j];
                for (int j = 0; j < n; ++j) row[j] -= c * p[j];
            }
            double nn = 0.0;
            for (int j = 0; j < n; ++j) nn += row[j] * row[j];
            nn = std::sqrt(nn);
            if (nn > 1e-8) {
                for (int j = 0; j < n; ++j) row[j] /= nn;
                break;
            }
        }
    }
    if (det_sign(q.a, n) < 0) {
        double* last = q.a.data() + static_cast<std::size_t>(n - 1) * n;
        for (int j = 0; j < n; ++j) last[j] = -last[j];
    }
    return q;
}

} // namespace diforge
