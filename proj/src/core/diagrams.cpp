#include "core/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "core/exterior.hpp"
#include "core/propagators.hpp"

namespace knotmc {

int Diagram::onknot_vertices() const {
    int n = 0;
    for (int len : snake_lengths) n += len + 1;
    for (int len : polygon_lengths) n += len;
    return n;
}

GradingReport grading(const Diagram& d) {
    GradingReport g;
    for (int n : d.snake_lengths) {
        g.snakes[n]++;
        g.hbar_twice += n + 1;
        g.xi_degree += 1;
        g.a_degree += n;
        g.b_degree += 1;
    }
    for (int n : d.polygon_lengths) {
        g.polygons[n]++;
        g.hbar_twice += n;
        g.a_degree += n;
    }
    g.vertices = d.ambient;
    g.hbar_twice += d.ambient;
    g.a_degree += 2 * d.ambient;
    g.b_degree += d.ambient;
    return g;
}

// ---------------------------------------------------------------------------
// vertex layout and isomorphism machinery

namespace {

enum VertexKind : int {
    kAOnly = 0,   // snake middle or polygon vertex (one a)
    kAXi = 1,     // snake tail (a and the Xi leg)
    kBOnly = 2,   // snake head
    kBXi = 3,     // short snake (B and Xi on one vertex)
    kAmbient = 4  // trivalent interaction vertex (2 a, 1 B)
};

std::vector<int> vertex_kinds(const Diagram& d) {
    std::vector<int> kinds;
    for (int len : d.snake_lengths) {
        if (len == 0) {
            kinds.push_back(kBXi);
        } else {
            kinds.push_back(kAXi);
            for (int i = 1; i < len; ++i) kinds.push_back(kAOnly);
            kinds.push_back(kBOnly);
        }
    }
    for (int len : d.polygon_lengths)
        for (int i = 0; i < len; ++i) kinds.push_back(kAOnly);
    for (int i = 0; i < d.ambient; ++i) kinds.push_back(kAmbient);
    return kinds;
}

using EdgeList = std::vector<std::pair<int, int>>;

EdgeList apply_perm(const EdgeList& edges, const std::vector<int>& perm) {
    EdgeList out(edges.size());
    for (size_t i = 0; i < edges.size(); ++i)
        out[i] = {perm[static_cast<size_t>(edges[i].first)], perm[static_cast<size_t>(edges[i].second)]};
    std::sort(out.begin(), out.end());
    return out;
}

// Enumerates all vertex permutations preserving the kind classes and calls
// fn with each; the class sizes stay small enough (<= 4) through order 4
// that plain brute force is exact and cheap.
template <typename Fn>
void for_each_kind_perm(const std::vector<int>& kinds, Fn&& fn) {
    const int n = static_cast<int>(kinds.size());
    std::vector<std::vector<int>> classes(5);
    for (int v = 0; v < n; ++v) classes[static_cast<size_t>(kinds[static_cast<size_t>(v)])].push_back(v);
    std::vector<std::vector<int>> arrangements(5);
    for (int c = 0; c < 5; ++c) arrangements[static_cast<size_t>(c)] = classes[static_cast<size_t>(c)];

    std::vector<int> perm(static_cast<size_t>(n));
    auto emit = [&]() {
        for (int c = 0; c < 5; ++c)
            for (size_t i = 0; i < classes[static_cast<size_t>(c)].size(); ++i)
                perm[static_cast<size_t>(classes[static_cast<size_t>(c)][i])] =
                    arrangements[static_cast<size_t>(c)][i];
        fn(perm);
    };

    // odometer over per-class permutations
    std::function<void(int)> rec = [&](int c) {
        if (c == 5) {
            emit();
            return;
        }
        auto& arr = arrangements[static_cast<size_t>(c)];
        std::sort(arr.begin(), arr.end());
        do {
            rec(c + 1);
        } while (std::next_permutation(arr.begin(), arr.end()));
    };
    rec(0);
}

std::string canonical_key(const Diagram& d) {
    std::vector<int> kinds = vertex_kinds(d);
    EdgeList best_eta, best_theta;
    bool first = true;
    for_each_kind_perm(kinds, [&](const std::vector<int>& perm) {
        EdgeList e = apply_perm(d.eta, perm);
        EdgeList t = apply_perm(d.theta, perm);
        if (first || std::tie(e, t) < std::tie(best_eta, best_theta)) {
            best_eta = std::move(e);
            best_theta = std::move(t);
            first = false;
        }
    });
    std::ostringstream os;
    os << "s";
    for (int n : d.snake_lengths) os << n << ",";
    os << "p";
    for (int n : d.polygon_lengths) os << n << ",";
    os << "v" << d.ambient << "|e";
    for (auto& e : best_eta) os << e.first << "-" << e.second << ",";
    os << "|t";
    for (auto& e : best_theta) os << e.first << "-" << e.second << ",";
    return os.str();
}

}  // namespace

long long symmetry_factor(const Diagram& d) {
    std::vector<int> kinds = vertex_kinds(d);
    EdgeList eta0 = d.eta;
    EdgeList theta0 = d.theta;
    std::sort(eta0.begin(), eta0.end());
    std::sort(theta0.begin(), theta0.end());
    long long count = 0;
    for_each_kind_perm(kinds, [&](const std::vector<int>& perm) {
        if (apply_perm(d.eta, perm) == eta0 && apply_perm(d.theta, perm) == theta0) ++count;
    });
    return count;
}

// ---------------------------------------------------------------------------
// Lie-algebra coefficient of a contraction, evaluated exactly on small
// non-unimodular witness algebras. A diagram whose coefficient vanishes
// identically (tr ad[x,y] = 0, [Xi,Xi] = 0, ...) contributes nothing and is
// dropped from the catalogue.

namespace {

struct WitnessAlgebra {
    int dim;
    std::vector<long long> f;  // coefficient of e_b in [e_c, e_d]: f[b + dim*(c + dim*d)]

    long long fc(int b, int c, int d) const { return f[static_cast<size_t>(b) + static_cast<size_t>(dim) * (static_cast<size_t>(c) + static_cast<size_t>(dim) * static_cast<size_t>(d))]; }

    // out = [e_c, v]
    void bracket(int c, const std::vector<long long>& v, std::vector<long long>& out) const {
        out.assign(static_cast<size_t>(dim), 0);
        for (int d = 0; d < dim; ++d) {
            if (v[static_cast<size_t>(d)] == 0) continue;
            for (int b = 0; b < dim; ++b) out[static_cast<size_t>(b)] += fc(b, c, d) * v[static_cast<size_t>(d)];
        }
    }
};

// solvable, non-unimodular: [e0, e_i] = sum_j A[j][i] e_{1+j}, rest abelian
WitnessAlgebra almost_abelian() {
    WitnessAlgebra w;
    w.dim = 4;
    w.f.assign(static_cast<size_t>(w.dim) * w.dim * w.dim, 0);
    const long long A[3][3] = {{1, 1, 0}, {0, 1, 1}, {0, 0, 2}};
    auto set = [&](int b, int c, int d, long long v) {
        w.f[static_cast<size_t>(b) + 4u * (static_cast<size_t>(c) + 4u * static_cast<size_t>(d))] = v;
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            set(1 + j, 0, 1 + i, A[j][i]);
            set(1 + j, 1 + i, 0, -A[j][i]);
        }
    return w;
}

// upper triangular 3x3 matrices, dim 6 (also non-unimodular)
WitnessAlgebra upper_triangular3() {
    WitnessAlgebra w;
    w.dim = 6;
    w.f.assign(static_cast<size_t>(w.dim) * w.dim * w.dim, 0);
    // basis: (r,c) pairs with r <= c
    std::vector<std::pair<int, int>> basis = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    auto index_of = [&](int r, int c) -> int {
        for (size_t k = 0; k < basis.size(); ++k)
            if (basis[k].first == r && basis[k].second == c) return static_cast<int>(k);
        return -1;
    };
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            auto [r1, c1] = basis[static_cast<size_t>(a)];
            auto [r2, c2] = basis[static_cast<size_t>(b)];
            // [E_{r1 c1}, E_{r2 c2}] = delta_{c1 r2} E_{r1 c2} - delta_{c2 r1} E_{r2 c1}
            if (c1 == r2) {
                int k = index_of(r1, c2);
                if (k >= 0) w.f[static_cast<size_t>(k) + 6u * (static_cast<size_t>(a) + 6u * static_cast<size_t>(b))] += 1;
            }
            if (c2 == r1) {
                int k = index_of(r2, c1);
                if (k >= 0) w.f[static_cast<size_t>(k) + 6u * (static_cast<size_t>(a) + 6u * static_cast<size_t>(b))] -= 1;
            }
        }
    return w;
}

struct ComponentTensor {
    std::vector<int> slot_edges;   // edge index per tensor slot
    std::vector<long long> data;   // flat, stride dim per slot
};

// Wick contraction of all component tensors with delta on each theta edge.
// Exact integer arithmetic; returns the full sum.
__int128 contract(const std::vector<ComponentTensor>& comps, int n_edges, int dim) {
    std::vector<int> assign(static_cast<size_t>(n_edges), 0);
    // components complete when their highest-numbered edge is assigned
    std::vector<std::vector<int>> complete_at(static_cast<size_t>(n_edges));
    for (size_t ci = 0; ci < comps.size(); ++ci) {
        int last = 0;
        for (int e : comps[ci].slot_edges) last = std::max(last, e);
        complete_at[static_cast<size_t>(last)].push_back(static_cast<int>(ci));
    }
    __int128 total = 0;
    std::function<void(int, __int128)> rec = [&](int e, __int128 prod) {
        if (e == n_edges) {
            total += prod;
            return;
        }
        for (int val = 0; val < dim; ++val) {
            assign[static_cast<size_t>(e)] = val;
            __int128 p = prod;
            bool dead = false;
            for (int ci : complete_at[static_cast<size_t>(e)]) {
                const auto& c = comps[static_cast<size_t>(ci)];
                size_t idx = 0;
                for (size_t s = c.slot_edges.size(); s-- > 0;)
                    idx = idx * static_cast<size_t>(dim) + static_cast<size_t>(assign[static_cast<size_t>(c.slot_edges[s])]);
                long long v = c.data[idx];
                if (v == 0) {
                    dead = true;
                    break;
                }
                p *= v;
            }
            if (!dead) rec(e + 1, p);
        }
    };
    rec(0, 1);
    return total;
}

// Evaluate the diagram's Lie coefficient on one witness algebra with zero
// mode Xi. The snake sigma_n contributes <B_head | ad(a_n)..ad(a_1) Xi>
// (tail innermost), tau_n contributes tr(ad(a_1)..ad(a_n)) in cycle order,
// the interaction vertex contributes the structure constant, and every
// theta edge identifies one a index with one B index.
__int128 lie_coefficient(const Diagram& d, const WitnessAlgebra& w, const std::vector<long long>& xi) {
    const int D = w.dim;
    // per-vertex theta slots
    int nv = d.onknot_vertices() + d.ambient;
    std::vector<int> b_edge(static_cast<size_t>(nv), -1);
    std::vector<std::vector<int>> a_edges(static_cast<size_t>(nv));
    for (size_t e = 0; e < d.theta.size(); ++e) {
        a_edges[static_cast<size_t>(d.theta[e].first)].push_back(static_cast<int>(e));
        b_edge[static_cast<size_t>(d.theta[e].second)] = static_cast<int>(e);
    }

    std::vector<ComponentTensor> comps;
    int v0 = 0;
    for (int len : d.snake_lengths) {
        ComponentTensor c;
        if (len == 0) {
            c.slot_edges = {b_edge[static_cast<size_t>(v0)]};
            c.data.assign(static_cast<size_t>(D), 0);
            for (int b = 0; b < D; ++b) c.data[static_cast<size_t>(b)] = xi[static_cast<size_t>(b)];
            v0 += 1;
        } else {
            c.slot_edges.push_back(b_edge[static_cast<size_t>(v0 + len)]);  // head B
            for (int k = 0; k < len; ++k) c.slot_edges.push_back(a_edges[static_cast<size_t>(v0 + k)][0]);
            size_t total = 1;
            for (int s = 0; s <= len; ++s) total *= static_cast<size_t>(D);
            c.data.assign(total, 0);
            // iterate chain indices
            std::vector<int> cs(static_cast<size_t>(len), 0);
            std::vector<long long> v, tmp;
            for (;;) {
                v = xi;
                for (int k = 0; k < len; ++k) {
                    w.bracket(cs[static_cast<size_t>(k)], v, tmp);
                    v.swap(tmp);
                }
                size_t base = 0;
                for (size_t s = cs.size(); s-- > 0;) base = base * static_cast<size_t>(D) + static_cast<size_t>(cs[s]);
                for (int b = 0; b < D; ++b) c.data[static_cast<size_t>(b) + static_cast<size_t>(D) * base] = v[static_cast<size_t>(b)];
                int k = 0;
                while (k < len && ++cs[static_cast<size_t>(k)] == D) cs[static_cast<size_t>(k++)] = 0;
                if (k == len) break;
            }
            v0 += len + 1;
        }
        comps.push_back(std::move(c));
    }
    for (int len : d.polygon_lengths) {
        ComponentTensor c;
        for (int k = 0; k < len; ++k) c.slot_edges.push_back(a_edges[static_cast<size_t>(v0 + k)][0]);
        size_t total = 1;
        for (int s = 0; s < len; ++s) total *= static_cast<size_t>(D);
        c.data.assign(total, 0);
        std::vector<int> cs(static_cast<size_t>(len), 0);
        std::vector<long long> mat(static_cast<size_t>(D) * D), nxt(static_cast<size_t>(D) * D);
        for (;;) {
            // product of ad matrices in cycle order; (ad_c)_{b,a} = f^b_{c,a}
            for (int b = 0; b < D; ++b)
                for (int a = 0; a < D; ++a) mat[static_cast<size_t>(b) + static_cast<size_t>(D) * static_cast<size_t>(a)] = w.fc(b, cs[0], a);
            for (int k = 1; k < len; ++k) {
                for (int b = 0; b < D; ++b)
                    for (int a = 0; a < D; ++a) {
                        long long sum = 0;
                        for (int mdx = 0; mdx < D; ++mdx)
                            sum += w.fc(b, cs[static_cast<size_t>(k)], mdx) * mat[static_cast<size_t>(mdx) + static_cast<size_t>(D) * static_cast<size_t>(a)];
                        nxt[static_cast<size_t>(b) + static_cast<size_t>(D) * static_cast<size_t>(a)] = sum;
                    }
                mat.swap(nxt);
            }
            long long tr = 0;
            for (int b = 0; b < D; ++b) tr += mat[static_cast<size_t>(b) + static_cast<size_t>(D) * static_cast<size_t>(b)];
            size_t idx = 0;
            for (size_t s = cs.size(); s-- > 0;) idx = idx * static_cast<size_t>(D) + static_cast<size_t>(cs[s]);
            c.data[idx] = tr;
            int k = 0;
            while (k < len && ++cs[static_cast<size_t>(k)] == D) cs[static_cast<size_t>(k++)] = 0;
            if (k == len) break;
        }
        // note: matrix product applies ad_{c1} first; the trace is cyclic so
        // the convention only affects the overall sign, not vanishing
        v0 += len;
        comps.push_back(std::move(c));
    }
    for (int a = 0; a < d.ambient; ++a) {
        int v = v0 + a;
        ComponentTensor c;
        c.slot_edges = {b_edge[static_cast<size_t>(v)], a_edges[static_cast<size_t>(v)][0], a_edges[static_cast<size_t>(v)][1]};
        c.data.assign(static_cast<size_t>(D) * D * D, 0);
        for (int b = 0; b < D; ++b)
            for (int c1 = 0; c1 < D; ++c1)
                for (int c2 = 0; c2 < D; ++c2)
                    c.data[static_cast<size_t>(b) + static_cast<size_t>(D) * (static_cast<size_t>(c1) + static_cast<size_t>(D) * static_cast<size_t>(c2))] = w.fc(b, c1, c2);
        comps.push_back(std::move(c));
    }
    return contract(comps, static_cast<int>(d.theta.size()), D);
}

bool lie_coefficient_vanishes(const Diagram& d) {
    static const WitnessAlgebra w1 = almost_abelian();
    static const WitnessAlgebra w2 = upper_triangular3();
    static const std::vector<std::vector<long long>> xis4 = {
        {1, 1, 1, 1}, {2, -1, 3, 1}, {1, 2, -3, 2}};
    static const std::vector<std::vector<long long>> xis6 = {
        {1, 1, 1, 1, 1, 1}, {2, -1, 3, 1, -2, 1}, {1, 2, -3, -1, 2, 2}};
    for (const auto& xi : xis4)
        if (lie_coefficient(d, w1, xi) != 0) return false;
    for (const auto& xi : xis6)
        if (lie_coefficient(d, w2, xi) != 0) return false;
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// enumeration

namespace {

struct SlotLayout {
    // a-slots in a fixed global order; each entry is the vertex carrying it
    std::vector<int> a_vertex;
    // B-slots; vertex per slot, plus which slots belong to short snakes
    std::vector<int> b_vertex;
    std::vector<int> b_is_short;  // 1 if the B belongs to a sigma_0 (for first-use symmetry breaking)
};

SlotLayout layout_slots(const Diagram& d) {
    SlotLayout L;
    int v0 = 0;
    for (int len : d.snake_lengths) {
        if (len == 0) {
            L.b_vertex.push_back(v0);
            L.b_is_short.push_back(1);
            v0 += 1;
        } else {
            for (int k = 0; k < len; ++k) L.a_vertex.push_back(v0 + k);
            L.b_vertex.push_back(v0 + len);
            L.b_is_short.push_back(0);
            v0 += len + 1;
        }
    }
    for (int len : d.polygon_lengths) {
        for (int k = 0; k < len; ++k) L.a_vertex.push_back(v0 + k);
        v0 += len;
    }
    for (int a = 0; a < d.ambient; ++a) {
        int v = v0 + a;
        L.a_vertex.push_back(v);
        L.a_vertex.push_back(v);
        L.b_vertex.push_back(v);
        L.b_is_short.push_back(0);
    }
    return L;
}

void build_eta(Diagram& d) {
    d.eta.clear();
    int v0 = 0;
    for (int len : d.snake_lengths) {
        for (int k = 0; k < len; ++k) d.eta.push_back({v0 + k, v0 + k + 1});
        v0 += len + 1;
    }
    for (int len : d.polygon_lengths) {
        for (int k = 0; k < len; ++k) d.eta.push_back({v0 + k, v0 + (k + 1) % len});
        v0 += len;
    }
}

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(static_cast<size_t>(n)) {
        for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
    }
    int find(int x) { return p[static_cast<size_t>(x)] == x ? x : p[static_cast<size_t>(x)] = find(p[static_cast<size_t>(x)]); }
    void unite(int a, int b) { p[static_cast<size_t>(find(a))] = find(b); }
};

bool connected(const Diagram& d) {
    int nv = d.onknot_vertices() + d.ambient;
    if (nv == 0) return false;
    UnionFind uf(nv);
    for (auto& e : d.eta) uf.unite(e.first, e.second);
    for (auto& e : d.theta) uf.unite(e.first, e.second);
    int root = uf.find(0);
    for (int v = 1; v < nv; ++v)
        if (uf.find(v) != root) return false;
    return true;
}

bool has_parallel_edges(const Diagram& d) {
    auto dup = [](EdgeList edges) {
        for (auto& e : edges)
            if (e.first > e.second) std::swap(e.first, e.second);
        std::sort(edges.begin(), edges.end());
        return std::adjacent_find(edges.begin(), edges.end()) != edges.end();
    };
    return dup(d.theta) || dup(d.eta);
}

void enumerate_pairings(const Diagram& base, const SlotLayout& L, std::vector<Diagram>& out) {
    const int na = static_cast<int>(L.a_vertex.size());
    const int nb = static_cast<int>(L.b_vertex.size());
    if (na != nb) return;  // Wick balance impossible
    std::vector<int> target(static_cast<size_t>(na), -1);
    std::vector<char> used(static_cast<size_t>(nb), 0);

    std::function<void(int)> rec = [&](int slot) {
        if (slot == na) {
            Diagram d = base;
            d.theta.clear();
            for (int s = 0; s < na; ++s)
                d.theta.push_back({L.a_vertex[static_cast<size_t>(s)], L.b_vertex[static_cast<size_t>(target[static_cast<size_t>(s)])]});
            if (has_parallel_edges(d)) return;
            if (!connected(d)) return;
            out.push_back(std::move(d));
            return;
        }
        bool second_of_vertex = slot > 0 && L.a_vertex[static_cast<size_t>(slot)] == L.a_vertex[static_cast<size_t>(slot - 1)];
        for (int b = 0; b < nb; ++b) {
            if (used[static_cast<size_t>(b)]) continue;
            if (L.b_vertex[static_cast<size_t>(b)] == L.a_vertex[static_cast<size_t>(slot)]) continue;  // tadpole
            if (second_of_vertex && b < target[static_cast<size_t>(slot - 1)]) continue;  // vertex slots unordered
            if (L.b_is_short[static_cast<size_t>(b)]) {
                // identical sigma_0 components: allow only the first unused one
                bool skip = false;
                for (int b2 = 0; b2 < b; ++b2)
                    if (L.b_is_short[static_cast<size_t>(b2)] && !used[static_cast<size_t>(b2)]) {
                        skip = true;
                        break;
                    }
                if (skip) continue;
            }
            used[static_cast<size_t>(b)] = 1;
            target[static_cast<size_t>(slot)] = b;
            rec(slot + 1);
            used[static_cast<size_t>(b)] = 0;
        }
    };
    rec(0);
}

// printed catalogue: structural diagrams and the exact printed edge lists
struct PrintedDiagram {
    Diagram structural;  // with eta/theta filled
    const char* label;
};

Diagram make_structural(std::vector<int> snakes, std::vector<int> polys, int ambient,
                        EdgeList theta_struct, std::vector<std::pair<int, int>> compile_theta,
                        std::vector<std::pair<int, int>> compile_eta, const std::string& label) {
    Diagram d;
    d.snake_lengths = std::move(snakes);
    d.polygon_lengths = std::move(polys);
    d.ambient = ambient;
    build_eta(d);
    d.theta = std::move(theta_struct);
    d.compile_theta = std::move(compile_theta);
    d.compile_eta = std::move(compile_eta);
    d.label = label;
    d.symmetry = symmetry_factor(d);
    return d;
}

std::vector<PrintedDiagram> printed_catalogue(int order) {
    std::vector<PrintedDiagram> out;
    if (order == 1) {
        out.push_back({make_structural({1}, {}, 0, {{0, 1}}, {{1, 2}}, {{1, 2}}, "theta1[1]"), "theta1[1]"});
    } else if (order == 2) {
        out.push_back({make_structural({2, 0}, {}, 0, {{0, 2}, {1, 3}}, {{1, 3}, {2, 4}}, {{1, 2}, {2, 3}},
                                       "theta2[1]"),
                       "theta2[1]"});
        out.push_back({make_structural({1, 1}, {}, 0, {{0, 3}, {2, 1}}, {{1, 3}, {2, 4}}, {{1, 2}, {3, 4}},
                                       "theta2[2]"),
                       "theta2[2]"});
        out.push_back({make_structural({1, 0}, {}, 1, {{0, 3}, {3, 1}, {3, 2}}, {{1, 4}, {2, 4}, {3, 4}},
                                       {{1, 2}}, "theta2[3]"),
                       "theta2[3]"});
    } else if (order == 3) {
        out.push_back({make_structural({1, 1, 1}, {}, 0, {{0, 3}, {2, 5}, {4, 1}},
                                       {{1, 4}, {2, 6}, {3, 5}}, {{1, 2}, {3, 4}, {5, 6}}, "theta3[1]"),
                       "theta3[1]"});
        out.push_back({make_structural({2, 1, 0}, {}, 0, {{0, 4}, {1, 5}, {3, 2}},
                                       {{1, 4}, {2, 6}, {3, 5}}, {{1, 2}, {2, 3}, {4, 5}}, "theta3[2]"),
                       "theta3[2]"});
        out.push_back({make_structural({3, 0, 0}, {}, 0, {{0, 3}, {1, 4}, {2, 5}},
                                       {{1, 4}, {2, 6}, {3, 5}}, {{1, 2}, {2, 3}, {3, 4}}, "theta3[3]"),
                       "theta3[3]"});
        out.push_back({make_structural({0, 0, 0}, {3}, 0, {{3, 0}, {4, 1}, {5, 2}},
                                       {{1, 4}, {2, 5}, {3, 6}}, {{1, 2}, {2, 3}, {3, 1}}, "theta3[4]"),
                       "theta3[4]"});
        out.push_back({make_structural({1, 1, 0}, {}, 1, {{0, 5}, {2, 1}, {5, 3}, {5, 4}},
                                       {{1, 6}, {3, 6}, {5, 6}, {2, 4}}, {{1, 2}, {3, 4}}, "theta3[5]"),
                       "theta3[5]"});
        out.push_back({make_structural({2, 0, 0}, {}, 1, {{0, 5}, {1, 3}, {5, 2}, {5, 4}},
                                       {{1, 6}, {3, 6}, {5, 6}, {2, 4}}, {{1, 2}, {2, 3}}, "theta3[6]"),
                       "theta3[6]"});
        out.push_back({make_structural({1, 0, 0}, {}, 2, {{0, 4}, {4, 5}, {4, 2}, {5, 1}, {5, 3}},
                                       {{1, 6}, {3, 6}, {5, 6}, {2, 5}, {4, 5}}, {{1, 2}}, "theta3[7]"),
                       "theta3[7]"});
        out.push_back({make_structural({0, 0, 0}, {}, 3, {{3, 0}, {4, 1}, {5, 2}, {3, 4}, {4, 5}, {5, 3}},
                                       {{1, 4}, {2, 5}, {3, 6}, {4, 5}, {4, 6}, {5, 6}}, {}, "theta3[8]"),
                       "theta3[8]"});
    }
    return out;
}

std::vector<Diagram> enumerate_order(int order) {
    if (order < 1 || order > 4) throw std::invalid_argument("enumerate_connected: supported orders are 1..4");

    std::vector<Diagram> survivors;
    // snake length multisets: exactly `order` snakes (one Xi leg each)
    std::vector<int> snakes(static_cast<size_t>(order), 0);
    std::function<void(int, int, int)> choose_snakes = [&](int pos, int maxlen, int remaining) {
        if (pos == order) {
            // polygon multisets with lengths >= 3 (the 1-gon is a tadpole,
            // the 2-gon's two eta edges coincide and the form vanishes);
            // the leftover of the balance identity is the interaction
            // vertex count: v = order - sum snakes - sum polys
            std::vector<int> polys;
            std::function<void(int, int)> choose_polys = [&](int maxp, int left) {
                Diagram base;
                base.snake_lengths = snakes;
                base.polygon_lengths = polys;
                base.ambient = left;
                build_eta(base);
                SlotLayout L = layout_slots(base);
                enumerate_pairings(base, L, survivors);
                for (int len = std::min(maxp, left); len >= 3; --len) {
                    polys.push_back(len);
                    choose_polys(len, left - len);
                    polys.pop_back();
                }
            };
            choose_polys(remaining, remaining);
            return;
        }
        for (int len = std::min(maxlen, remaining); len >= 0; --len) {
            snakes[static_cast<size_t>(pos)] = len;
            choose_snakes(pos + 1, len, remaining - len);
        }
    };
    choose_snakes(0, order, order);

    // drop contractions whose Lie coefficient vanishes identically
    std::vector<Diagram> alive;
    std::vector<std::string> keys;
    for (auto& d : survivors) {
        std::string key = canonical_key(d);
        bool seen = false;
        for (const auto& k : keys)
            if (k == key) {
                seen = true;
                break;
            }
        if (seen) continue;
        if (lie_coefficient_vanishes(d)) continue;
        keys.push_back(std::move(key));
        alive.push_back(std::move(d));
    }

    // attach symmetry factors, labels, compile lists
    auto catalogue = printed_catalogue(order);
    for (auto& d : alive) {
        d.symmetry = symmetry_factor(d);
        std::string key = canonical_key(d);
        bool matched = false;
        for (auto& p : catalogue) {
            if (canonical_key(p.structural) == key) {
                d.label = p.label;
                d.compile_theta = p.structural.compile_theta;
                d.compile_eta = p.structural.compile_eta;
                matched = true;
                break;
            }
        }
        if (!matched) {
            if (order <= 3) throw std::logic_error("enumerate_connected: diagram not in the printed catalogue");
            std::ostringstream os;
            os << "ord" << order << "#" << (&d - alive.data() + 1);
            d.label = os.str();
            d.compile_theta.clear();
            for (auto& e : d.theta) {
                auto ed = e;
                if (ed.first > ed.second) std::swap(ed.first, ed.second);
                d.compile_theta.push_back({ed.first + 1, ed.second + 1});
            }
            std::sort(d.compile_theta.begin(), d.compile_theta.end());
            d.compile_eta.clear();
            for (auto& e : d.eta) d.compile_eta.push_back({e.first + 1, e.second + 1});
        }
    }
    if (order <= 3) {
        // stable printed ordering
        std::sort(alive.begin(), alive.end(),
                  [](const Diagram& a, const Diagram& b) { return a.label < b.label; });
        if (alive.size() != catalogue.size())
            throw std::logic_error("enumerate_connected: catalogue count mismatch");
    } else {
        std::sort(alive.begin(), alive.end(), [](const Diagram& a, const Diagram& b) {
            return canonical_key(a) < canonical_key(b);
        });
        for (size_t i = 0; i < alive.size(); ++i) {
            std::ostringstream os;
            os << "ord4#" << (i + 1);
            alive[i].label = os.str();
        }
    }
    return alive;
}

}  // namespace

const std::vector<Diagram>& enumerate_connected(int order, Parity) {
    static std::mutex mu;
    static std::map<int, std::vector<Diagram>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, enumerate_order(order)).first;
    return it->second;
}

// ---------------------------------------------------------------------------
// compilation

namespace {

int frame_dim(int s, int t, int m) { return s * (m - 2) + t * m; }

}  // namespace

std::function<double(const ConfigurationPoint&)> compile_integrand(const Diagram& d, int m,
                                                                   const LongKnot* knot) {
    const int cs = d.onknot_vertices();
    const int ct = d.ambient;
    const int want = frame_dim(cs, ct, m);
    const int have = static_cast<int>(d.compile_theta.size()) * (m - 1) +
                     static_cast<int>(d.compile_eta.size()) * (m - 3);
    if (want != have) throw std::invalid_argument("compile_integrand: edge degrees do not match the configuration dimension");
    auto thetas = d.compile_theta;
    auto etas = d.compile_eta;
    double inv_sym = 1.0 / static_cast<double>(d.symmetry);
    return [cs, ct, thetas, etas, inv_sym, knot](const ConfigurationPoint& cfg) -> double {
        if (cfg.s != cs || cfg.t != ct) throw std::invalid_argument("compiled integrand: configuration shape mismatch");
        EvalContext ctx(cfg, knot);
        std::vector<AltForm> factors;
        factors.reserve(thetas.size() + etas.size());
        for (auto& e : thetas) factors.push_back(theta_at(ctx, e.first, e.second));
        for (auto& e : etas) factors.push_back(eta_at(ctx, e.first, e.second));
        return inv_sym * wedge_top(factors);
    };
}

std::function<double(const ConfigurationPoint&)> compile_term(const TermSpec& term, int m,
                                                              const LongKnot* knot) {
    const int want = frame_dim(term.s, term.t, m);
    int have = 0;
    for (const auto& f : term.factors) have += f.is_theta ? (m - 1) : (m - 3);
    if (want != have) throw std::invalid_argument("compile_term: edge degrees do not match the configuration dimension");
    auto factors = term.factors;
    double coeff = term.coefficient;
    int s = term.s, t = term.t;
    return [s, t, factors, coeff, knot](const ConfigurationPoint& cfg) -> double {
        if (cfg.s != s || cfg.t != t) throw std::invalid_argument("term integrand: configuration shape mismatch");
        EvalContext ctx(cfg, knot);
        std::vector<AltForm> fs;
        fs.reserve(factors.size());
        for (const auto& f : factors) {
            AltForm acc;
            bool first = true;
            for (const auto& p : f.parts) {
                AltForm part = f.is_theta ? theta_at(ctx, p.i, p.j) : eta_at(ctx, p.i, p.j);
                part *= p.sign;
                if (first) {
                    acc = std::move(part);
                    first = false;
                } else {
                    acc += part;
                }
            }
            fs.push_back(std::move(acc));
        }
        return coeff * wedge_top(fs);
    };
}

TermValue eval_term_with_envelope(const TermSpec& term, int m, const LongKnot* knot,
                                  const ConfigurationPoint& cfg) {
    EvalContext ctx(cfg, knot);
    std::vector<AltForm> fs;
    fs.reserve(term.factors.size());
    for (const auto& f : term.factors) {
        AltForm acc;
        bool first = true;
        for (const auto& p : f.parts) {
            AltForm part = f.is_theta ? theta_at(ctx, p.i, p.j) : eta_at(ctx, p.i, p.j);
            part *= p.sign;
            if (first) {
                acc = std::move(part);
                first = false;
            } else {
                acc += part;
            }
        }
        fs.push_back(std::move(acc));
    }
    TermValue out;
    out.value = term.coefficient * wedge_top(fs);
    out.envelope = std::fabs(term.coefficient) * wedge_top_abs(fs);
    return out;
}

// ---------------------------------------------------------------------------
// printed term tables

namespace {

WedgeFactorSpec eta_sum(std::vector<std::pair<int, int>> edges, std::vector<double> signs) {
    WedgeFactorSpec f;
    f.is_theta = false;
    for (size_t i = 0; i < edges.size(); ++i)
        f.parts.push_back({edges[i].first, edges[i].second, signs[i]});
    return f;
}

std::vector<TermSpec> build_theta1() {
    TermSpec t;
    t.label = "theta1[1]";
    t.s = 2;
    t.t = 0;
    t.factors = {WedgeFactorSpec::theta(1, 2), WedgeFactorSpec::eta(1, 2)};
    t.coefficient = 1.0;
    return {t};
}

std::vector<TermSpec> build_theta2_printed() {
    std::vector<TermSpec> v(3);
    v[0].label = "theta2[1]";
    v[0].s = 4;
    v[0].t = 0;
    v[0].factors = {WedgeFactorSpec::theta(1, 3), WedgeFactorSpec::theta(2, 4), WedgeFactorSpec::eta(1, 2),
                    WedgeFactorSpec::eta(2, 3)};
    v[0].coefficient = 1.0;
    v[1].label = "theta2[2]";
    v[1].s = 4;
    v[1].t = 0;
    v[1].factors = {WedgeFactorSpec::theta(1, 3), WedgeFactorSpec::theta(2, 4), WedgeFactorSpec::eta(1, 2),
                    WedgeFactorSpec::eta(3, 4)};
    v[1].coefficient = 0.5;
    v[2].label = "theta2[3]";
    v[2].s = 3;
    v[2].t = 1;
    v[2].factors = {WedgeFactorSpec::theta(1, 4), WedgeFactorSpec::theta(2, 4), WedgeFactorSpec::theta(3, 4),
                    WedgeFactorSpec::eta(1, 2)};
    v[2].coefficient = -1.0;
    return v;
}

std::vector<TermSpec> build_theta2_compact() {
    std::vector<TermSpec> v(2);
    auto cyc4 = eta_sum({{1, 2}, {2, 3}, {3, 4}, {4, 1}}, {1, 1, 1, 1});
    v[0].label = "theta2c[1]";
    v[0].s = 4;
    v[0].t = 0;
    v[0].factors = {WedgeFactorSpec::theta(1, 3), WedgeFactorSpec::theta(2, 4), cyc4, cyc4};
    v[0].coefficient = 1.0 / 8.0;
    auto cyc3 = eta_sum({{1, 2}, {2, 3}, {3, 1}}, {1, 1, 1});
    v[1].label = "theta2c[2]";
    v[1].s = 3;
    v[1].t = 1;
    v[1].factors = {WedgeFactorSpec::theta(1, 4), WedgeFactorSpec::theta(2, 4), WedgeFactorSpec::theta(3, 4),
                    cyc3};
    v[1].coefficient = -1.0 / 3.0;
    return v;
}

std::vector<TermSpec> build_theta3_printed() {
    std::vector<TermSpec> v(8);
    auto th = WedgeFactorSpec::theta;
    auto et = WedgeFactorSpec::eta;
    v[0] = {"theta3[1]", 6, 0, {th(1, 4), th(2, 6), th(3, 5), et(1, 2), et(3, 4), et(5, 6)}, 1.0 / 3.0};
    v[1] = {"theta3[2]", 6, 0, {th(1, 4), th(2, 6), th(3, 5), et(1, 2), et(2, 3), et(4, 5)}, 1.0};
    v[2] = {"theta3[3]", 6, 0, {th(1, 4), th(2, 6), th(3, 5), et(1, 2), et(2, 3), et(3, 4)}, -1.0};
    v[3] = {"theta3[4]", 6, 0, {th(1, 4), th(2, 5), th(3, 6), et(1, 2), et(2, 3), et(3, 1)}, 1.0 / 3.0};
    v[4] = {"theta3[5]", 5, 1, {th(1, 6), th(3, 6), th(5, 6), th(2, 4), et(1, 2), et(3, 4)}, 1.0};
    v[5] = {"theta3[6]", 5, 1, {th(1, 6), th(3, 6), th(5, 6), th(2, 4), et(1, 2), et(2, 3)}, -1.0};
    v[6] = {"theta3[7]", 4, 2, {th(1, 6), th(3, 6), th(5, 6), th(2, 5), th(4, 5), et(1, 2)}, -1.0};
    v[7] = {"theta3[8]", 3, 3, {th(1, 4), th(2, 5), th(3, 6), th(4, 5), th(4, 6), th(5, 6)}, 1.0 / 3.0};
    return v;
}

std::vector<TermSpec> build_theta3_even() {
    std::vector<TermSpec> v(4);
    auto th = WedgeFactorSpec::theta;
    // eta_{ijkl} = eta_ij - eta_jk + eta_kl - eta_li
    auto alt = [](int i, int j, int k, int l) {
        return eta_sum({{i, j}, {j, k}, {k, l}, {l, i}}, {1, -1, 1, -1});
    };
    v[0] = {"theta3e[1]",
            6,
            0,
            {th(1, 4), th(2, 5), th(3, 6), alt(1, 2, 4, 5), alt(1, 3, 4, 6), alt(2, 3, 5, 6)},
            -1.0 / 24.0};
    v[1] = {"theta3e[2]", 5, 1, {th(1, 6), th(3, 6), th(5, 6), th(2, 4), alt(1, 2, 3, 4), alt(2, 3, 4, 5)},
            -1.0 / 6.0};
    v[2] = {"theta3e[3]", 4, 2, {th(1, 6), th(3, 6), th(5, 6), th(2, 5), th(4, 5), alt(1, 2, 3, 4)},
            -1.0 / 4.0};
    v[3] = {"theta3e[4]", 3, 3, {th(1, 4), th(2, 5), th(3, 6), th(4, 5), th(4, 6), th(5, 6)}, 1.0 / 3.0};
    return v;
}

}  // namespace

const std::vector<TermSpec>& theta1_terms() {
    static const std::vector<TermSpec> v = build_theta1();
    return v;
}

const std::vector<TermSpec>& theta2_terms(Theta2Form form) {
    static const std::vector<TermSpec> printed = build_theta2_printed();
    static const std::vector<TermSpec> compact = build_theta2_compact();
    return form == Theta2Form::Printed ? printed : compact;
}

const std::vector<TermSpec>& theta3_terms(Theta3Form form) {
    static const std::vector<TermSpec> printed = build_theta3_printed();
    static const std::vector<TermSpec> even = build_theta3_even();
    return form == Theta3Form::Printed ? printed : even;
}

std::vector<DegreeAudit> degree_audit(const std::vector<TermSpec>& terms, int m) {
    std::vector<DegreeAudit> out;
    for (const auto& t : terms) {
        DegreeAudit a;
        a.label = t.label;
        a.s = t.s;
        a.t = t.t;
        a.edge_degree_sum = 0;
        for (const auto& f : t.factors) a.edge_degree_sum += f.is_theta ? (m - 1) : (m - 3);
        a.config_dim = t.s * (m - 2) + t.t * m;
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace knotmc
