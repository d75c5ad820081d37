#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace fbms::sym {

// An element of O(3) with an optional human-readable tag.
struct Isometry {
    Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();
    std::string label;

    Isometry() = default;
    explicit Isometry(const Eigen::Matrix3d& m, std::string tag = {})
        : matrix(m), label(std::move(tag)) {}

    bool is_orthogonal(double tol = 1e-12) const {
        return (matrix * matrix.transpose() - Eigen::Matrix3d::Identity()).norm() <= 10 * tol &&
               std::abs(std::abs(matrix.determinant()) - 1.0) <= 10 * tol;
    }
    double det() const { return matrix.determinant(); }
    Isometry inverse() const { return Isometry(matrix.transpose()); }
    Isometry operator*(const Isometry& o) const { return Isometry(matrix * o.matrix); }
    Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return matrix * p; }
    double distance(const Isometry& o) const { return (matrix - o.matrix).norm(); }
};

inline Isometry rotation_z(double angle, std::string tag = {}) {
    Eigen::Matrix3d m;
    const double c = std::cos(angle), s = std::sin(angle);
    m << c, -s, 0, s, c, 0, 0, 0, 1;
    return Isometry(m, std::move(tag));
}

// Rotation through pi about the x-axis {y=z=0}.
inline Isometry rotation_x_pi() {
    Eigen::Matrix3d m;
    m << 1, 0, 0, 0, -1, 0, 0, 0, -1;
    return Isometry(m, "rot_x_pi");
}

// Reflection through the vertical plane whose horizontal trace makes angle a with the x-axis.
inline Isometry reflection_vertical_plane(double a) {
    Eigen::Matrix3d m;
    const double c = std::cos(2 * a), s = std::sin(2 * a);
    m << c, s, 0, s, -c, 0, 0, 0, 1;
    return Isometry(m, "refl_vert");
}

inline Isometry reflection_z() {
    Eigen::Matrix3d m;
    m << 1, 0, 0, 0, 1, 0, 0, 0, -1;
    return Isometry(m, "refl_z");
}

enum class GroupKind { cyclic, pyramidal, prismatic, antiprismatic, custom };

struct SymmetryGroup {
    std::vector<Isometry> elements;
    std::vector<Isometry> generators;
    GroupKind kind = GroupKind::custom;
    int order_param = 0;  // the m of the standard families

    int order() const { return static_cast<int>(elements.size()); }

    int find(const Isometry& g, double tol = 1e-9) const {
        for (int i = 0; i < order(); ++i)
            if (elements[i].distance(g) < tol) return i;
        return -1;
    }
    bool contains(const Isometry& g, double tol = 1e-9) const { return find(g, tol) >= 0; }
};

// Closure of a generating set, deduplicated by Frobenius distance.
inline SymmetryGroup generate_group(const std::vector<Isometry>& generators, int cap = 1024,
                                    double tol = 1e-9) {
    for (const auto& g : generators)
        if (!g.is_orthogonal())
            throw std::invalid_argument("generate_group: generator is not orthogonal");

    SymmetryGroup grp;
    grp.generators = generators;
    grp.elements.push_back(Isometry(Eigen::Matrix3d::Identity(), "id"));
    std::size_t frontier = 0;
    while (frontier < grp.elements.size()) {
        const Isometry cur = grp.elements[frontier++];
        for (const auto& g : generators) {
            const Isometry next = g * cur;
            if (!grp.contains(next, tol)) {
                grp.elements.push_back(next);
                if (static_cast<int>(grp.elements.size()) > cap)
                    throw std::runtime_error("generate_group: closure exceeds cap (non-finite group?)");
            }
        }
    }
    return grp;
}

// The four standard families: cyclic (order m), pyramidal (2m),
// prismatic (4m), antiprismatic (4m).
inline SymmetryGroup standard_group(GroupKind kind, int m) {
    if (m < 1) throw std::invalid_argument("standard_group: m must be >= 1");
    std::vector<Isometry> gens;
    gens.push_back(rotation_z(2.0 * M_PI / m, "rot_z_2pi/m"));
    if (kind != GroupKind::cyclic)
        gens.push_back(reflection_vertical_plane(M_PI / (2.0 * m)));
    if (kind == GroupKind::prismatic) gens.push_back(reflection_z());
    if (kind == GroupKind::antiprismatic) gens.push_back(rotation_x_pi());
    if (kind == GroupKind::custom)
        throw std::invalid_argument("standard_group: custom is not a standard family");

    SymmetryGroup grp = generate_group(gens, 8 * m + 16);
    grp.kind = kind;
    grp.order_param = m;

    int expected = m;
    if (kind == GroupKind::pyramidal) expected = 2 * m;
    if (kind == GroupKind::prismatic || kind == GroupKind::antiprismatic) expected = 4 * m;
    if (grp.order() != expected)
        throw std::runtime_error("standard_group: closure has order " +
                                 std::to_string(grp.order()) + ", expected " +
                                 std::to_string(expected));
    return grp;
}

// Sign of the action of g on the chosen unit normal: +1 if the pushed-forward
// normal at the image point agrees with the surface normal there.
inline int normal_sign(const Isometry& g, const Eigen::Vector3d& point,
                       const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& normal_at,
                       double tol = 1e-6) {
    const Eigen::Vector3d pushed = g * normal_at(point);
    const double s = pushed.dot(normal_at(g * point));
    if (std::abs(s) < tol)
        throw std::runtime_error("normal_sign: ambiguous inner product " + std::to_string(s));
    return s > 0.0 ? 1 : -1;
}

// Multiplicative homomorphism G -> {-1,+1}; stored per element index.
struct NormalCharacter {
    std::vector<int> value;  // parallel to group.elements

    int operator()(int element_index) const { return value.at(element_index); }

    bool is_homomorphism(const SymmetryGroup& grp, double tol = 1e-9) const {
        for (int i = 0; i < grp.order(); ++i)
            for (int j = 0; j < grp.order(); ++j) {
                const int k = grp.find(grp.elements[i] * grp.elements[j], tol);
                if (k < 0 || value[k] != value[i] * value[j]) return false;
            }
        return true;
    }
};

inline NormalCharacter trivial_character(const SymmetryGroup& grp) {
    NormalCharacter chi;
    chi.value.assign(grp.order(), 1);
    return chi;
}

// Character computed empirically from a sample point and normal field.
inline NormalCharacter normal_character(
    const SymmetryGroup& grp, const Eigen::Vector3d& point,
    const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& normal_at) {
    NormalCharacter chi;
    chi.value.reserve(grp.order());
    for (const auto& g : grp.elements) chi.value.push_back(normal_sign(g, point, normal_at));
    return chi;
}

namespace detail {
struct PointKey {
    std::int64_t x, y, z;
    bool operator==(const PointKey&) const = default;
};
struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const {
        std::size_t h = std::hash<std::int64_t>()(k.x);
        h = h * 1000003u ^ std::hash<std::int64_t>()(k.y);
        h = h * 1000003u ^ std::hash<std::int64_t>()(k.z);
        return h;
    }
};
inline PointKey quantize(const Eigen::Vector3d& p, double cell) {
    return PointKey{static_cast<std::int64_t>(std::llround(p.x() / cell)),
                    static_cast<std::int64_t>(std::llround(p.y() / cell)),
                    static_cast<std::int64_t>(std::llround(p.z() / cell))};
}
}  // namespace detail

// Index lookup for a point set that is (supposed to be) closed under a group action.
class OrbitIndex {
  public:
    explicit OrbitIndex(const std::vector<Eigen::Vector3d>& points, double tol = 1e-9)
        : points_(points), tol_(tol) {
        for (std::size_t i = 0; i < points.size(); ++i)
            map_[detail::quantize(points[i], tol_)].push_back(static_cast<int>(i));
    }

    // Index of the point matching p within tolerance, or -1.
    int find(const Eigen::Vector3d& p) const {
        const auto base = detail::quantize(p, tol_);
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    auto it = map_.find(detail::PointKey{base.x + dx, base.y + dy, base.z + dz});
                    if (it == map_.end()) continue;
                    for (int idx : it->second)
                        if ((points_[idx] - p).norm() <= 3 * tol_) return idx;
                }
        return -1;
    }

  private:
    const std::vector<Eigen::Vector3d>& points_;
    double tol_;
    std::unordered_map<detail::PointKey, std::vector<int>, detail::PointKeyHash> map_;
};

// Orthogonal projection onto (G,chi)-invariant samples:
// (Pv)(p) = (1/|G|) sum_g chi(g) v(g^{-1} p). Idempotent and linear.
inline std::vector<double> project_equivariant(const std::vector<Eigen::Vector3d>& points,
                                               const std::vector<double>& values,
                                               const SymmetryGroup& grp,
                                               const NormalCharacter& chi, double tol = 1e-9) {
    if (points.size() != values.size())
        throw std::invalid_argument("project_equivariant: points/values size mismatch");
    OrbitIndex index(points, tol);
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        double acc = 0.0;
        for (int gi = 0; gi < grp.order(); ++gi) {
            const Eigen::Vector3d q = grp.elements[gi].inverse() * points[i];
            const int j = index.find(q);
            if (j < 0)
                throw std::runtime_error("project_equivariant: orbit point missing from sample set");
            acc += chi(gi) * values[j];
        }
        out[i] = acc / grp.order();
    }
    return out;
}

}  // namespace fbms::sym
