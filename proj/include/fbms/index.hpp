#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbms/topology.hpp"

namespace fbms::index {

enum class RegionKind { Catenoid, Disc, Intermediate };

// One class of congruent regions in the Montiel-Ros partition with the
// per-region spectral bounds cited from the model analysis.
struct RegionClass {
    RegionKind kind = RegionKind::Catenoid;
    int count = 0;        // absolute number of regions
    int orbit_count = 0;  // number of orbits under the full symmetry group
    int dir_lower = 0;    // per-region Dirichlet index lower bound
    int neum_upper = 0;   // per-region Neumann index+nullity upper bound
    int equiv_upper = 0;          // per-orbit equivariant upper bound
    int equiv_upper_middle = -1;  // special middle orbit, -1 if none
    int equiv_lower = 0;          // per-orbit equivariant lower bound
};

// Region bookkeeping: (N-1)m catenoid regions, N disc regions, N intermediate
// regions; orbit counts (n,n,n) for even N and (n,n+1,n+1) for odd N.
inline std::vector<RegionClass> partition_catalog(int N, int m) {
    if (N < 2) throw std::invalid_argument("partition_catalog: N must be >= 2");
    if (m < 3) throw std::invalid_argument("partition_catalog: m must be >= 3");
    const int n = N / 2;
    const bool even = (N % 2 == 0);

    RegionClass cat;
    cat.kind = RegionKind::Catenoid;
    cat.count = (N - 1) * m;
    cat.orbit_count = n;
    cat.dir_lower = 1;
    cat.neum_upper = 3;
    cat.equiv_upper = 2;
    cat.equiv_upper_middle = even ? 1 : -1;  // the ribbon crossing {z=0}
    cat.equiv_lower = 1;

    RegionClass disc;
    disc.kind = RegionKind::Disc;
    disc.count = N;
    disc.orbit_count = even ? n : n + 1;
    disc.neum_upper = 1;
    disc.equiv_upper = 1;
    disc.equiv_upper_middle = even ? -1 : 0;  // middle disc vanishes for odd N

    RegionClass inter;
    inter.kind = RegionKind::Intermediate;
    inter.count = N;
    inter.orbit_count = even ? n : n + 1;
    inter.neum_upper = 2 * m;
    inter.equiv_upper = 1;
    inter.equiv_upper_middle = even ? -1 : 0;

    return {cat, disc, inter};
}

// Absolute index lower bound: one negative direction per catenoid region.
inline int montiel_ros_lower(const std::vector<RegionClass>& catalog) {
    for (const auto& rc : catalog)
        if (rc.kind == RegionKind::Catenoid) return rc.count * rc.dir_lower;
    throw std::invalid_argument("montiel_ros_lower: no catenoid class in catalog");
}

inline int montiel_ros_lower_equivariant(const std::vector<RegionClass>& catalog) {
    for (const auto& rc : catalog)
        if (rc.kind == RegionKind::Catenoid) return rc.orbit_count * rc.equiv_lower;
    throw std::invalid_argument("montiel_ros_lower_equivariant: no catenoid class");
}

// Absolute index+nullity upper bound: region-by-region Neumann counts.
inline int montiel_ros_upper(const std::vector<RegionClass>& catalog) {
    int total = 0;
    for (const auto& rc : catalog) total += rc.count * rc.neum_upper;
    return total;
}

// Equivariant upper bound from orbit bookkeeping, with the parity-dependent
// middle orbits counted separately.
inline int montiel_ros_upper_equivariant(const std::vector<RegionClass>& catalog) {
    int total = 0;
    for (const auto& rc : catalog) {
        if (rc.equiv_upper_middle >= 0 && rc.orbit_count > 0)
            total += (rc.orbit_count - 1) * rc.equiv_upper + rc.equiv_upper_middle;
        else
            total += rc.orbit_count * rc.equiv_upper;
    }
    return total;
}

struct IndexBudget {
    int N = 0, m = 0;
    int lower = 0;                 // absolute index lower bound
    int upper_ind_plus_nul = 0;    // absolute index+nullity upper bound
    int equiv_lower = 0;
    int equiv_upper = 0;
    int mr_lower = 0;              // Montiel-Ros part of the lower bound
    int sym_lower = 0;             // symmetry-based floor (2m or 2m-1)
    std::string provenance;
};

inline IndexBudget theorem_bounds(int N, int m) {
    const auto catalog = partition_catalog(N, m);
    IndexBudget b;
    b.N = N;
    b.m = m;
    b.mr_lower = montiel_ros_lower(catalog);
    b.sym_lower = (N % 2 == 0) ? 2 * m : 2 * m - 1;
    b.lower = std::max(b.mr_lower, b.sym_lower);
    b.upper_ind_plus_nul = montiel_ros_upper(catalog);
    b.equiv_lower = montiel_ros_lower_equivariant(catalog);
    b.equiv_upper = montiel_ros_upper_equivariant(catalog);
    b.provenance = "catenoid " + std::to_string((N - 1) * m) + "x1 dir / x3 neum; discs " +
                   std::to_string(N) + "x1; intermediates " + std::to_string(N) + "x2m";
    if (b.lower > b.upper_ind_plus_nul || b.equiv_lower > b.equiv_upper)
        throw std::runtime_error("theorem_bounds: inconsistent budget");
    return b;
}

struct TopologicalBounds {
    int genus = 0, boundary = 0, euler = 0;
    long long lower_topological = 0;   // 2 gamma + beta + N - 2 = N - chi
    long long upper_topological = 0;   // the parity-dependent display
    bool identities_hold = false;
};

// The same bounds re-expressed through (genus, boundary): the lower bound is
// N - chi and the upper bound becomes 10g+7b+6(N-1)-4 (even N) resp.
// 10g+b+6(N-1)+2m (odd N).
inline TopologicalBounds topological_translation(int N, int m) {
    const topo::TopologicalType t = topo::stacking_topology(N, m);
    const IndexBudget b = theorem_bounds(N, m);
    TopologicalBounds out;
    out.genus = t.genus;
    out.boundary = t.boundary_components;
    out.euler = t.euler_char;
    out.lower_topological = 2LL * t.genus + t.boundary_components + N - 2;
    if (N % 2 == 0)
        out.upper_topological = 10LL * t.genus + 7LL * t.boundary_components + 6 * (N - 1) - 4;
    else
        out.upper_topological = 10LL * t.genus + t.boundary_components + 6 * (N - 1) + 2 * m;
    const bool lower_ok = out.lower_topological == N - t.euler_char &&
                          out.lower_topological == b.mr_lower;
    const bool upper_ok = out.upper_topological == b.upper_ind_plus_nul;
    out.identities_hold = lower_ok && upper_ok;
    return out;
}

// Least admissible sweepout dimension for an N-layer min-max construction.
inline int minmax_parameter_floor(int N) {
    if (N < 2) throw std::invalid_argument("minmax_parameter_floor: N must be >= 2");
    return N / 2;
}

}  // namespace fbms::index
