#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbms::topo {

struct TopologicalType {
    int genus = 0;
    int boundary_components = 1;
    int euler_char = 1;

    bool consistent() const { return euler_char == 2 - 2 * genus - boundary_components; }
};

// Genus and boundary-component count of the N-layer stacking joined by m
// ribbons between each adjacent pair of discs.
inline TopologicalType stacking_topology(int N, int m) {
    if (N < 1) throw std::invalid_argument("stacking_topology: N must be >= 1");
    if (m < 3) throw std::invalid_argument("stacking_topology: m must be >= 3");
    TopologicalType t;
    if (N == 1) {
        t.genus = 0;
        t.boundary_components = 1;
    } else if (N % 2 == 0) {
        t.genus = (m - 1) * (N - 2) / 2;
        t.boundary_components = m;
    } else {
        t.genus = (m - 1) * (N - 1) / 2;
        t.boundary_components = 1;
    }
    t.euler_char = 2 - 2 * t.genus - t.boundary_components;
    return t;
}

// Abstract CW complex of a compact surface with boundary.
// Faces are stored as edge-index cycles; geometry is irrelevant here.
struct CombSurface {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;       // endpoint vertex ids
    std::vector<std::vector<int>> faces;          // edge ids per face

    std::vector<int> edge_face_count() const {
        std::vector<int> cnt(edges.size(), 0);
        for (const auto& f : faces)
            for (int e : f) cnt.at(e)++;
        return cnt;
    }

    // Every edge bounds at most 2 faces; boundary edges bound exactly 1.
    void validate() const {
        for (int c : edge_face_count())
            if (c < 1 || c > 2) throw std::runtime_error("CombSurface: edge bounds " +
                                                         std::to_string(c) + " faces");
    }

    int euler_characteristic() const {
        return num_vertices - static_cast<int>(edges.size()) + static_cast<int>(faces.size());
    }

    // Connected components of the boundary graph (edges incident to one face).
    int boundary_components() const {
        const auto cnt = edge_face_count();
        std::map<int, std::vector<int>> adj;  // vertex -> incident boundary edges
        int n_bedges = 0;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (cnt[e] != 1) continue;
            ++n_bedges;
            adj[edges[e].first].push_back(static_cast<int>(e));
            adj[edges[e].second].push_back(static_cast<int>(e));
        }
        for (const auto& [v, es] : adj)
            if (es.size() != 2)
                throw std::runtime_error("CombSurface: boundary vertex of valence " +
                                         std::to_string(es.size()));
        std::vector<char> seen(edges.size(), 0);
        int components = 0;
        for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
            if (cnt[e0] != 1 || seen[e0]) continue;
            ++components;
            // walk the cycle
            int e = static_cast<int>(e0);
            int v = edges[e0].first;
            while (!seen[e]) {
                seen[e] = 1;
                const int w = (edges[e].first == v) ? edges[e].second : edges[e].first;
                const auto& es = adj.at(w);
                e = (es[0] == e) ? es[1] : es[0];
                v = w;
            }
        }
        (void)n_bedges;
        return components;
    }
};

inline int euler_characteristic(const CombSurface& s) { return s.euler_characteristic(); }

// Combinatorial model of the stacking: one polygonal cell per disc layer,
// one quad cell per ribbon, attached in the alternating meridian pattern.
// Catenoid level j (between discs j and j+1) occupies the m meridians at
// angle (j-1)*pi/m + pi/(2m) mod 2pi/m; in units of pi/(2m) these are
// 2(j-1)+1+4k, so consecutive levels interleave.
inline CombSurface build_combinatorial_stacking(int N, int m) {
    if (N < 1) throw std::invalid_argument("build_combinatorial_stacking: N must be >= 1");
    if (m < 3) throw std::invalid_argument("build_combinatorial_stacking: m must be >= 3");

    CombSurface s;
    if (N == 1) {  // single disc: one vertex, one loop edge, one face
        s.num_vertices = 1;
        s.edges.push_back({0, 0});
        s.faces.push_back({0});
        return s;
    }

    // slot = (disc i, angular unit u); vertices are slot endpoints (u, side 0/1)
    struct Slot {
        int unit;        // angle in units of pi/(2m), mod 4m
        int level;       // catenoid level j
        int v0, v1;      // endpoint vertex ids, CCW
        int attach_edge;
    };
    std::vector<std::vector<Slot>> slots(N + 1);  // per disc, sorted by unit
    auto add_edge = [&s](int a, int b) {
        s.edges.push_back({a, b});
        return static_cast<int>(s.edges.size()) - 1;
    };

    for (int i = 1; i <= N; ++i) {
        std::vector<int> levels;
        if (i > 1) levels.push_back(i - 1);
        if (i < N) levels.push_back(i);
        for (int j : levels)
            for (int k = 0; k < m; ++k) {
                Slot sl;
                sl.unit = (2 * (j - 1) + 1 + 4 * k) % (4 * m);
                sl.level = j;
                sl.v0 = s.num_vertices++;
                sl.v1 = s.num_vertices++;
                sl.attach_edge = add_edge(sl.v0, sl.v1);
                slots[i].push_back(sl);
            }
        std::sort(slots[i].begin(), slots[i].end(),
                  [](const Slot& a, const Slot& b) { return a.unit < b.unit; });

        // disc face: attach edges alternating with free rim edges
        std::vector<int> cycle;
        const int K = static_cast<int>(slots[i].size());
        for (int a = 0; a < K; ++a) {
            const Slot& cur = slots[i][a];
            const Slot& nxt = slots[i][(a + 1) % K];
            cycle.push_back(cur.attach_edge);
            cycle.push_back(add_edge(cur.v1, nxt.v0));  // free rim edge
        }
        s.faces.push_back(cycle);
    }

    // ribbons: quad faces joining equal-unit slots on adjacent discs
    for (int j = 1; j <= N - 1; ++j) {
        for (const Slot& lower : slots[j]) {
            if (lower.level != j) continue;
            const auto& upper_slots = slots[j + 1];
            auto it = std::find_if(upper_slots.begin(), upper_slots.end(), [&](const Slot& u) {
                return u.level == j && u.unit == lower.unit;
            });
            if (it == upper_slots.end())
                throw std::runtime_error("build_combinatorial_stacking: unmatched ribbon slot");
            const int side_a = add_edge(lower.v0, it->v0);
            const int side_b = add_edge(lower.v1, it->v1);
            s.faces.push_back({lower.attach_edge, side_b, it->attach_edge, side_a});
        }
    }
    s.validate();
    return s;
}

// Total umbilic order budget 8*genus + 4*boundary - 8 (inapplicable to the disc).
inline int umbilic_budget(int genus, int boundary) {
    if (genus == 0 && boundary == 1)
        throw std::invalid_argument("umbilic_budget: inapplicable to the disc");
    return 8 * genus + 4 * boundary - 8;
}

struct SymmetryCertificate {
    bool extra_symmetry_excluded = false;
    int umbilic_budget = 0;
    int axis_preserved_demand = 0;        // required budget if an extra symmetry fixes the axis
    int axis_not_preserved_demand = 0;    // required budget otherwise (even N)
    bool axis_preserved_violated = false;
    bool axis_not_preserved_violated = false;
    bool odd_containment_argument = false;  // odd N: axis-free case rests on 0 in Sigma
    int axis_fixed_umbilic_order = 0;       // order forced at axis points, 2m-2
    std::string details;
};

// Extra symmetries force umbilic-order demands that exceed the actual budget:
// an axis-preserving one needs 4(m-1)N, an axis-moving one (even N) needs
// 2(m-2)(m+1)N, while the stacking only carries 4(m-1)N - 4m.
inline SymmetryCertificate max_symmetry_certificate(int N, int m) {
    if (m < 3) throw std::invalid_argument("max_symmetry_certificate: indeterminate for m < 3");
    const TopologicalType t = stacking_topology(N, m);
    SymmetryCertificate c;
    c.umbilic_budget = umbilic_budget(t.genus, t.boundary_components);
    c.axis_preserved_demand = 4 * (m - 1) * N;
    c.axis_not_preserved_demand = 2 * (m - 2) * (m + 1) * N;
    c.axis_fixed_umbilic_order = 2 * m - 2;
    c.axis_preserved_violated = c.umbilic_budget < c.axis_preserved_demand;
    if (N % 2 == 0) {
        c.axis_not_preserved_violated = c.umbilic_budget < c.axis_not_preserved_demand;
    } else {
        c.odd_containment_argument = true;
        c.axis_not_preserved_violated = true;
    }
    c.extra_symmetry_excluded = c.axis_preserved_violated && c.axis_not_preserved_violated;
    c.details = "budget " + std::to_string(c.umbilic_budget) + " vs axis-preserved demand " +
                std::to_string(c.axis_preserved_demand) + " and axis-free demand " +
                (N % 2 ? std::string("(containment argument)")
                       : std::to_string(c.axis_not_preserved_demand));
    return c;
}

struct PolymorphEntry {
    int N = 0;
    int m = 0;
    long long genus = 0;
    long long group_order = 0;
};

inline std::vector<int> first_odd_primes(int k) {
    std::vector<int> primes;
    for (int p = 3; static_cast<int>(primes.size()) < k; p += 2) {
        bool prime = true;
        for (int d = 3; d * d <= p; d += 2)
            if (p % d == 0) {
                prime = false;
                break;
            }
        if (prime) primes.push_back(p);
    }
    return primes;
}

// k pairwise non-congruent stackings sharing one topological type:
// N_i = 1 + 2 p_i and m_i = 1 + q prod_{j != i} p_j with the smallest q
// satisfying q prod_{i<k} p_i > max_i m0(N_i); all share genus q prod p_i,
// have connected boundary, and have pairwise distinct group orders 4 m_i.
inline std::vector<PolymorphEntry> polymorphism_family(
    int k, const std::function<int(int)>& m0) {
    if (k < 1) throw std::invalid_argument("polymorphism_family: k must be >= 1");
    const std::vector<int> p = first_odd_primes(k);

    long long prod_all = 1;
    for (int pi : p) prod_all *= pi;
    long long prod_head = 1;  // product of the first k-1 primes
    for (int i = 0; i + 1 < k; ++i) prod_head *= p[i];

    long long max_m0 = 0;
    for (int pi : p) max_m0 = std::max<long long>(max_m0, m0(1 + 2 * pi));
    long long q = max_m0 / prod_head + 1;  // smallest q with q*prod_head > max_m0
    if (q < 1) q = 1;

    std::vector<PolymorphEntry> family;
    for (int i = 0; i < k; ++i) {
        PolymorphEntry e;
        e.N = 1 + 2 * p[i];
        e.m = static_cast<int>(1 + q * (prod_all / p[i]));
        e.genus = q * prod_all;
        e.group_order = 4LL * e.m;
        family.push_back(e);
    }
    return family;
}

}  // namespace fbms::topo
