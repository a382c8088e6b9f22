#include "slr/partition.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace slr {

index_t PartitionLabels::interface_size() const {
    index_t s = 0;
    for (auto f : interface) s += f;
    return s;
}

std::string validate_labels(const SymSparseMatrix& A, const PartitionLabels& labels) {
    if (labels.n() != A.n || static_cast<index_t>(labels.interface.size()) != A.n) {
        return "label arrays do not match matrix order";
    }
    for (index_t v = 0; v < A.n; ++v) {
        if (labels.subdomain[v] < 0 || labels.subdomain[v] >= labels.p) {
            return "subdomain id out of range at vertex " + std::to_string(v);
        }
    }
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            if (i == j) continue;
            if (labels.subdomain[i] != labels.subdomain[j] &&
                !(labels.interface[i] && labels.interface[j])) {
                return "interior vertices of different subdomains are coupled: " +
                       std::to_string(i) + "," + std::to_string(j);
            }
        }
    }
    return {};
}

namespace {

// Undirected adjacency with vertex and edge weights (for coarsening levels).
struct Graph {
    std::vector<index_t> xadj;
    std::vector<index_t> adj;
    std::vector<index_t> ewgt;
    std::vector<index_t> vwgt;
    index_t n() const { return static_cast<index_t>(xadj.size()) - 1; }
    index_t total_weight() const { return std::accumulate(vwgt.begin(), vwgt.end(), index_t{0}); }
};

Graph graph_from_matrix(const SymSparseMatrix& A) {
    Graph g;
    const index_t n = A.n;
    std::vector<index_t> deg(n, 0);
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            if (j == i) continue;
            ++deg[i];
            ++deg[j];
        }
    }
    g.xadj.assign(n + 1, 0);
    for (index_t i = 0; i < n; ++i) g.xadj[i + 1] = g.xadj[i] + deg[i];
    g.adj.resize(g.xadj[n]);
    g.ewgt.assign(g.xadj[n], 1);
    g.vwgt.assign(n, 1);
    std::vector<index_t> pos(g.xadj.begin(), g.xadj.end() - 1);
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            if (j == i) continue;
            g.adj[pos[i]++] = j;
            g.adj[pos[j]++] = i;
        }
    }
    return g;
}

// Heavy-edge matching; vertices visited in index order, ties to lowest index.
Graph coarsen(const Graph& g, std::vector<index_t>& cmap) {
    const index_t n = g.n();
    std::vector<index_t> match(n, -1);
    index_t nc = 0;
    cmap.assign(n, -1);
    for (index_t v = 0; v < n; ++v) {
        if (match[v] >= 0) continue;
        index_t best = -1, bw = -1;
        for (index_t k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
            const index_t u = g.adj[k];
            if (u == v || match[u] >= 0) continue;
            if (g.ewgt[k] > bw || (g.ewgt[k] == bw && u < best)) {
                bw = g.ewgt[k];
                best = u;
            }
        }
        match[v] = (best >= 0) ? best : v;
        if (best >= 0) match[best] = v;
        cmap[v] = nc;
        if (best >= 0) cmap[best] = nc;
        ++nc;
    }
    Graph c;
    c.vwgt.assign(nc, 0);
    for (index_t v = 0; v < n; ++v) c.vwgt[cmap[v]] += g.vwgt[v];
    // members of each coarse vertex (one or two fine vertices)
    std::vector<index_t> first(nc, -1), second(nc, -1);
    for (index_t v = 0; v < n; ++v) {
        (first[cmap[v]] < 0 ? first[cmap[v]] : second[cmap[v]]) = v;
    }
    c.xadj.assign(nc + 1, 0);
    std::vector<index_t> mark(nc, -1), nbr, wbuf(nc, 0);
    for (index_t cu = 0; cu < nc; ++cu) {
        nbr.clear();
        for (index_t v : {first[cu], second[cu]}) {
            if (v < 0) continue;
            for (index_t k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
                const index_t cv = cmap[g.adj[k]];
                if (cv == cu) continue;
                if (mark[cv] != cu) {
                    mark[cv] = cu;
                    wbuf[cv] = 0;
                    nbr.push_back(cv);
                }
                wbuf[cv] += g.ewgt[k];
            }
        }
        std::sort(nbr.begin(), nbr.end());
        for (index_t cv : nbr) {
            c.adj.push_back(cv);
            c.ewgt.push_back(wbuf[cv]);
        }
        c.xadj[cu + 1] = static_cast<index_t>(c.adj.size());
    }
    return c;
}

// Greedy BFS-grown initial bisection toward a target left weight.
void initial_bisection(const Graph& g, index_t target_left, std::vector<std::uint8_t>& side) {
    const index_t n = g.n();
    side.assign(n, 1);
    std::vector<std::uint8_t> seen(n, 0);
    index_t wl = 0;
    index_t scan_start = 0;
    while (wl < target_left) {
        index_t seed = -1;
        for (index_t v = scan_start; v < n; ++v) {
            if (!seen[v]) {
                seed = v;
                scan_start = v + 1;
                break;
            }
        }
        if (seed < 0) break;
        std::vector<index_t> queue{seed};
        seen[seed] = 1;
        for (std::size_t qi = 0; qi < queue.size() && wl < target_left; ++qi) {
            const index_t v = queue[qi];
            side[v] = 0;
            wl += g.vwgt[v];
            for (index_t k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
                const index_t u = g.adj[k];
                if (!seen[u]) {
                    seen[u] = 1;
                    queue.push_back(u);
                }
            }
        }
    }
}

// Greedy boundary refinement passes. Moves the best-gain boundary vertices
// while keeping the left weight within [lo, hi]; ties to lowest vertex index.
void refine_bisection(const Graph& g, std::vector<std::uint8_t>& side, index_t target_left) {
    const index_t n = g.n();
    const index_t total = g.total_weight();
    index_t maxv = 1;
    for (auto w : g.vwgt) maxv = std::max(maxv, w);
    const index_t slack = std::max<index_t>(maxv, total / 64);
    const index_t lo = std::max<index_t>(0, target_left - slack);
    const index_t hi = std::min<index_t>(total, target_left + slack);
    index_t wl = 0;
    for (index_t v = 0; v < n; ++v) {
        if (side[v] == 0) wl += g.vwgt[v];
    }

    auto gain_of = [&](index_t v) {
        index_t internal = 0, external = 0;
        for (index_t k = g.xadj[v]; k < g.xadj[v + 1]; ++k) {
            (side[g.adj[k]] == side[v] ? internal : external) += g.ewgt[k];
        }
        return external - internal;
    };

    for (int pass = 0; pass < 10; ++pass) {
        std::vector<std::pair<index_t, index_t>> moves;  // (-gain, vertex)
        for (index_t v = 0; v < n; ++v) {
            bool boundary = false;
            for (index_t k = g.xadj[v]; k < g.xadj[v + 1] && !boundary; ++k) {
                boundary = side[g.adj[k]] != side[v];
            }
            if (boundary) moves.push_back({-gain_of(v), v});
        }
        std::sort(moves.begin(), moves.end());
        bool changed = false;
        for (auto [ng, v] : moves) {
            const index_t gain = gain_of(v);  // may have changed since collection
            if (gain < 0) continue;
            const index_t wv = g.vwgt[v];
            const index_t new_wl = side[v] == 0 ? wl - wv : wl + wv;
            if (new_wl < lo || new_wl > hi) continue;
            if (gain == 0 && std::abs(new_wl - target_left) >= std::abs(wl - target_left)) continue;
            side[v] ^= 1;
            wl = new_wl;
            changed = true;
        }
        if (!changed) break;
    }

    // keep both sides nonempty when possible
    auto count_side = [&](int s) {
        index_t c = 0;
        for (index_t v = 0; v < n; ++v) c += side[v] == s;
        return c;
    };
    if (n >= 2) {
        if (count_side(0) == 0) side[0] = 0;
        if (count_side(1) == 0) {
            for (index_t v = n - 1; v >= 0; --v) {
                if (side[v] == 0 && count_side(0) > 1) {
                    side[v] = 1;
                    break;
                }
            }
        }
    }
}

// Bisect with multilevel coarsening; returns side flags for g's vertices.
std::vector<std::uint8_t> multilevel_bisect(const Graph& g, index_t target_left) {
    if (g.n() <= 96) {
        std::vector<std::uint8_t> side;
        initial_bisection(g, target_left, side);
        refine_bisection(g, side, target_left);
        return side;
    }
    std::vector<index_t> cmap;
    Graph coarse = coarsen(g, cmap);
    std::vector<std::uint8_t> side;
    if (coarse.n() >= g.n() - g.n() / 16) {
        // matching stalled; fall back to a flat bisection
        initial_bisection(g, target_left, side);
        refine_bisection(g, side, target_left);
        return side;
    }
    std::vector<std::uint8_t> cside = multilevel_bisect(coarse, target_left);
    side.resize(g.n());
    for (index_t v = 0; v < g.n(); ++v) side[v] = cside[cmap[v]];
    refine_bisection(g, side, target_left);
    return side;
}

Graph subgraph(const Graph& g, const std::vector<index_t>& verts, std::vector<index_t>& local_of) {
    Graph s;
    const index_t m = static_cast<index_t>(verts.size());
    for (index_t i = 0; i < m; ++i) local_of[verts[i]] = i;
    s.xadj.assign(m + 1, 0);
    s.vwgt.resize(m);
    for (index_t i = 0; i < m; ++i) {
        s.vwgt[i] = g.vwgt[verts[i]];
        for (index_t k = g.xadj[verts[i]]; k < g.xadj[verts[i] + 1]; ++k) {
            if (local_of[g.adj[k]] >= 0) ++s.xadj[i + 1];
        }
    }
    for (index_t i = 0; i < m; ++i) s.xadj[i + 1] += s.xadj[i];
    s.adj.resize(s.xadj[m]);
    s.ewgt.resize(s.xadj[m]);
    std::vector<index_t> pos(s.xadj.begin(), s.xadj.end() - 1);
    for (index_t i = 0; i < m; ++i) {
        for (index_t k = g.xadj[verts[i]]; k < g.xadj[verts[i] + 1]; ++k) {
            const index_t lj = local_of[g.adj[k]];
            if (lj < 0) continue;
            s.adj[pos[i]] = lj;
            s.ewgt[pos[i]] = g.ewgt[k];
            ++pos[i];
        }
    }
    return s;
}

void recursive_split(const Graph& g, const std::vector<index_t>& verts, index_t base, index_t parts,
                     std::vector<index_t>& label, std::vector<index_t>& scratch) {
    if (parts == 1) {
        for (index_t v : verts) label[v] = base;
        return;
    }
    const index_t p1 = parts / 2;
    std::vector<index_t>& local_of = scratch;
    Graph s = subgraph(g, verts, local_of);
    index_t target = s.total_weight() * p1 / parts;
    target = std::max<index_t>(target, 1);
    std::vector<std::uint8_t> side = multilevel_bisect(s, target);
    for (index_t v : verts) local_of[v] = -1;
    std::vector<index_t> left, right;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        (side[i] == 0 ? left : right).push_back(verts[i]);
    }
    recursive_split(g, left, base, p1, label, scratch);
    recursive_split(g, right, base + p1, parts - p1, label, scratch);
}

}  // namespace

PartitionLabels partition_graph(const SymSparseMatrix& A, index_t p) {
    if (p < 1) throw std::invalid_argument("partition_graph: p must be >= 1");
    if (p > A.n) throw std::invalid_argument("partition_graph: p exceeds matrix order");
    PartitionLabels labels;
    labels.p = p;
    labels.subdomain.assign(A.n, 0);
    labels.interface.assign(A.n, 0);
    if (p == 1) return labels;

    Graph g = graph_from_matrix(A);
    std::vector<index_t> verts(A.n);
    std::iota(verts.begin(), verts.end(), 0);
    std::vector<index_t> scratch(A.n, -1);
    recursive_split(g, verts, 0, p, labels.subdomain, scratch);

    // guarantee nonempty parts by reassigning from the largest part
    std::vector<index_t> count(p, 0);
    for (index_t v = 0; v < A.n; ++v) ++count[labels.subdomain[v]];
    for (index_t q = 0; q < p; ++q) {
        while (count[q] == 0) {
            const index_t big = std::max_element(count.begin(), count.end()) - count.begin();
            for (index_t v = 0; v < A.n; ++v) {
                if (labels.subdomain[v] == big) {
                    labels.subdomain[v] = q;
                    --count[big];
                    ++count[q];
                    break;
                }
            }
        }
    }

    // interface from the edge cut: a vertex touching another part is interface
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            if (j != i && labels.subdomain[i] != labels.subdomain[j]) {
                labels.interface[i] = 1;
                labels.interface[j] = 1;
            }
        }
    }
    return labels;
}

namespace {

struct Box {
    std::array<index_t, 3> lo;
    std::array<index_t, 3> hi;
};

void geometric_rec(const std::array<index_t, 3>& dims, int ndim, Box box, index_t base, index_t parts,
                   PartitionLabels& out) {
    auto for_each_vertex = [&](const Box& b, auto&& fn) {
        for (index_t z = b.lo[2]; z < b.hi[2]; ++z) {
            for (index_t y = b.lo[1]; y < b.hi[1]; ++y) {
                for (index_t x = b.lo[0]; x < b.hi[0]; ++x) {
                    fn((z * dims[1] + y) * dims[0] + x);
                }
            }
        }
    };
    if (parts == 1) {
        for_each_vertex(box, [&](index_t v) { out.subdomain[v] = base; });
        return;
    }
    // longest axis, ties to the last axis (y in 2-D, z in 3-D)
    int axis = 0;
    for (int a = 1; a < ndim; ++a) {
        if (box.hi[a] - box.lo[a] >= box.hi[axis] - box.lo[axis]) axis = a;
    }
    const index_t len = box.hi[axis] - box.lo[axis];
    if (len < 1) {
        for_each_vertex(box, [&](index_t v) { out.subdomain[v] = base; });
        return;
    }
    const index_t mid = box.lo[axis] + (len - 1) / 2;
    Box sep = box;
    sep.lo[axis] = mid;
    sep.hi[axis] = mid + 1;
    for_each_vertex(sep, [&](index_t v) {
        out.subdomain[v] = base;
        out.interface[v] = 1;
    });
    Box lower = box, upper = box;
    lower.hi[axis] = mid;
    upper.lo[axis] = mid + 1;
    geometric_rec(dims, ndim, lower, base, parts / 2, out);
    geometric_rec(dims, ndim, upper, base + parts / 2, parts / 2, out);
}

PartitionLabels geometric_impl(std::array<index_t, 3> dims, int ndim, index_t p) {
    if (p < 1 || (p & (p - 1)) != 0) {
        throw std::invalid_argument("geometric_bisection_grid: p must be a power of two");
    }
    PartitionLabels labels;
    labels.p = p;
    const index_t n = dims[0] * dims[1] * dims[2];
    labels.subdomain.assign(n, 0);
    labels.interface.assign(n, 0);
    Box all{{0, 0, 0}, {dims[0], dims[1], dims[2]}};
    geometric_rec(dims, ndim, all, 0, p, labels);
    return labels;
}

}  // namespace

PartitionLabels geometric_bisection_grid(index_t nx, index_t ny, index_t p) {
    return geometric_impl({nx, ny, 1}, 2, p);
}

PartitionLabels geometric_bisection_grid(index_t nx, index_t ny, index_t nz, index_t p) {
    return geometric_impl({nx, ny, nz}, 3, p);
}

void write_labels(const PartitionLabels& labels, std::ostream& out) {
    for (index_t v = 0; v < labels.n(); ++v) {
        out << v << ' ' << labels.subdomain[v] << ' ' << int(labels.interface[v]) << '\n';
    }
}

}  // namespace slr
