#pragma once

#include "diforge/errors.hpp"
#include "diforge/rng.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace diforge {

using Vec = std::vector<double>;

// Shared numeric tolerances. Basis orthonormality and path orthogonality are
// absolute on unit vectors; radii and separations are relative.
inline constexpr double kTolOrth = 1e-10;
inline constexpr double kTolRadiusRel = 1e-9;

// Relative slack applied to minimum-separation acceptance. Boundary-tight
// arrangements (4 points on a circle with d = r) are only reachable up to
// rounding, so exact >= d would reject valid output of our own generator.
inline constexpr double kSepSlackRel = 1e-9;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
Vec sub(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec scaled(const Vec& v, double s);

/// Uniform point on the unit sphere of R^dim.
Vec random_unit_vector(int dim, Stream& rng);

/// Affine subspace base_point + span(basis) with an orthonormal basis.
struct Subspace {
    int ambient_dim = 0;
    std::vector<Vec> basis;
    Vec base_point;

    /// Throws UsageError when the basis is not orthonormal within kTolOrth,
    /// dimensions disagree, or |basis| > ambient_dim.
    void validate() const;
};

struct ArrangementSpec {
    double radius = 1.0;        // r
    double min_proj_dist = 1.0; // d
    int count = 1;              // N
    long max_attempts = 1'000'000; // rejection budget per point
};

/// coefficient = <z, v/|v|>, proj_norm = |coefficient|.
std::pair<double, double> project_onto(const Vec& z, const Vec& v);

/// Smallest angle theta with r(1 - cos theta) = d, i.e. 2 asin(sqrt(d/2r)).
double min_separation_angle(double r, double d);

struct SeparationCheck {
    bool ok = false;
    double min_sep = 0.0;
    std::optional<std::pair<int, int>> violating_pair;
};

/// Minimum over ordered distinct pairs of |Pi_{u_k} u_j - u_k| with vectors
/// taken relative to center; ok iff min_sep >= d (kSepSlackRel slack).
SeparationCheck verify_angle_dense(const Vec& center, const std::vector<Vec>& points,
                                   double d);

/// count points of the form base_point + r u, u a unit vector in span(basis),
/// every ordered pair separated by at least d in the projective metric.
/// Greedy rejection sampling; on a stall the current set is refined by a
/// deterministic spreading pass before giving up.
std::vector<Vec> generate_angle_dense(const Subspace& sub, const ArrangementSpec& spec,
                                      std::uint64_t seed);

/// Same arrangement, sphere living in the orthogonal complement of
/// `forbidden` (mutually orthonormal unit vectors) inside the full space.
/// Avoids materializing a complement basis; candidates are drawn ambient and
/// projected. Effective sphere dimension is dim - |forbidden|.
std::vector<Vec> generate_angle_dense_complement(const Vec& base_point,
                                                 const std::vector<Vec>& forbidden,
                                                 const ArrangementSpec& spec,
                                                 std::uint64_t seed);

/// Orthogonal matrix with rows forming the orthonormal frame; apply() is y = Qx.
struct Rotation {
    int n = 0;
    std::vector<double> a; // row-major n*n

    Vec apply(const Vec& x) const;
    Vec apply_transpose(const Vec& x) const;
};

/// Haar-uniform rotation: modified Gram-Schmidt on an iid normal matrix
/// (triangular factor diagonal kept positive), last row negated when the
/// determinant lands on -1. Bit-deterministic per (n, seed).
Rotation haar_rotation(int n, std::uint64_t seed);

} // namespace diforge
