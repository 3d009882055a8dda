// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <vector>

#include "sdf/engine.hpp"

namespace sdf {

/// Swapped Boolean Hypercube SBH(k,m): 2^(k+2m) nodes addressed by bit
/// strings split into fields (c,d,p) with c the high k bits, d the middle m
/// bits and p the low m bits. Links: pi_i flips bit i of p; gamma_i flips
/// bit i of c and swaps d with p; Z swaps d with p and is absent when d = p.
class SbhGraph {
public:
    enum class LinkType { Pi, Gamma, Z };
    struct Link {
        int from, to;
        LinkType type;
        int bit;  // field-local bit index; 0 for Z
    };

    SbhGraph(int k, int m) : k_(k), m_(m) {
        if (k < 0 || m < 0 || (k == 0 && m == 0)) throw error("SBH needs k >= 1 or m >= 1");
        if (k + 2 * m > 20) throw error("SBH size cap exceeded");
    }

    int k() const { return k_; }
    int m() const { return m_; }
    int dims() const { return k_ + 2 * m_; }
    int node_count() const { return 1 << dims(); }

    int c(int node) const { return node >> (2 * m_); }
    int d(int node) const { return (node >> m_) & ((1 << m_) - 1); }
    int p(int node) const { return node & ((1 << m_) - 1); }
    int pack(int c, int d, int p) const { return (c << (2 * m_)) | (d << m_) | p; }

    Link pi(int node, int bit) const {
        return Link{node, pack(c(node), d(node), p(node) ^ (1 << bit)), LinkType::Pi, bit};
    }
    Link gamma(int node, int bit) const {
        return Link{node, pack(c(node) ^ (1 << bit), p(node), d(node)), LinkType::Gamma, bit};
    }
    bool has_z(int node) const { return d(node) != p(node); }
    Link z(int node) const {
        if (!has_z(node)) throw error("no Z link when d = p");
        return Link{node, pack(c(node), p(node), d(node)), LinkType::Z, 0};
    }

    std::vector<Link> links_of(int node) const {
        std::vector<Link> out;
        for (int i = 0; i < m_; ++i) out.push_back(pi(node, i));
        for (int i = 0; i < k_; ++i) out.push_back(gamma(node, i));
        if (has_z(node)) out.push_back(z(node));
        return out;
    }

    int degree(int node) const { return k_ + m_ + (has_z(node) ? 1 : 0); }

    /// Overlay on D3(2^k, 2^m) built with boolean groups: pi_i is the local
    /// port 2^i, gamma_i the global port 2^i, Z the global port 0.
    Channel to_channel(const Topology& t, const Link& l) const {
        RouterCoord from{c(l.from), d(l.from), p(l.from)};
        switch (l.type) {
            case LinkType::Pi: return t.local_channel(from, 1 << l.bit);
            case LinkType::Gamma: return t.global_channel(from, 1 << l.bit);
            case LinkType::Z: return t.global_channel(from, 0);
        }
        throw error("bad link");
    }

private:
    int k_, m_;
};

inline SbhGraph build_sbh(int k, int m) { return SbhGraph(k, m); }

/// Walk realizing one hypercube dimension exchange. Dimension j indexes the
/// packed address: p bits first, then d bits, then c bits. Path lengths are
/// 1/3/2 for the p/d/c fields, with shorter special forms where Z is absent.
inline std::vector<SbhGraph::Link> dim_exchange_path(const SbhGraph& g, int node, int dim) {
    if (dim < 0 || dim >= g.dims()) throw error("dimension out of range");
    std::vector<SbhGraph::Link> path;
    auto step = [&](SbhGraph::Link l) {
        path.push_back(l);
        return l.to;
    };
    if (dim < g.m()) {
        step(g.pi(node, dim));
        return path;
    }
    if (dim < 2 * g.m()) {
        const int bit = dim - g.m();
        if (!g.has_z(node)) {
            // (c,d,d): pi then Z reaches (c, d^bit, d).
            int mid = step(g.pi(node, bit));
            step(g.z(mid));
            return path;
        }
        if (g.p(node) == (g.d(node) ^ (1 << bit))) {
            // Target is a diagonal node: Z then pi.
            int mid = step(g.z(node));
            step(g.pi(mid, bit));
            return path;
        }
        int a = step(g.z(node));
        int b = step(g.pi(a, bit));
        step(g.z(b));
        return path;
    }
    const int bit = dim - 2 * g.m();
    if (!g.has_z(node)) {
        step(g.gamma(node, bit));
        return path;
    }
    int mid = step(g.gamma(node, bit));
    step(g.z(mid));
    return path;
}

struct DilationStats {
    int max = 0;
    double uniform_mean = 0.0;    // per-field arithmetic over dimensions
    double empirical_mean = 0.0;  // over all (node, dim) pairs, d=p aware
};

inline DilationStats dilation_stats(int k, int m) {
    SbhGraph g(k, m);
    DilationStats st;
    st.uniform_mean = static_cast<double>(2 * k + 4 * m) / (k + 2 * m);
    long total = 0;
    for (int node = 0; node < g.node_count(); ++node)
        for (int dim = 0; dim < g.dims(); ++dim) {
            int len = static_cast<int>(dim_exchange_path(g, node, dim).size());
            st.max = std::max(st.max, len);
            total += len;
        }
    st.empirical_mean =
        static_cast<double>(total) / (static_cast<double>(g.node_count()) * g.dims());
    return st;
}

/// Breadth-first diameter; desk scale only.
inline int diameter_check(int k, int m) {
    SbhGraph g(k, m);
    if (g.node_count() > (1 << 14)) throw error("diameter size cap exceeded");
    int diameter = 0;
    std::vector<int> dist(g.node_count());
    for (int src = 0; src < g.node_count(); ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[src] = 0;
        std::deque<int> q{src};
        while (!q.empty()) {
            int cur = q.front();
            q.pop_front();
            for (const auto& l : g.links_of(cur))
                if (dist[l.to] < 0) {
                    dist[l.to] = dist[cur] + 1;
                    q.push_back(l.to);
                }
        }
        for (int x : dist) {
            if (x < 0) throw error("SBH not connected");
            diameter = std::max(diameter, x);
        }
    }
    return diameter;
}

/// Per-dimension combine: receives own value, the partner value across
/// dimension `dim`, and the node id (whose bit `dim` tells the two sides
/// apart, e.g. for compare-exchange direction).
template <typename Value>
using DimOp = std::function<Value(const Value& self, const Value& partner, int dim, int node)>;

template <typename Value>
struct ProgramResult {
    std::vector<Value> state;
    long wall_slots = 0;   // emulation slots, one per occupied hop level
    long cube_steps = 0;   // steps a direct hypercube would take
    long conflicts = 0;
};

/// Run a sequence of dimension exchanges on SBH(k,m): every node swaps
/// values with its dimension partner along dim_exchange_path, all nodes in
/// lock step, then applies the combine. Both directions of every exchange
/// run simultaneously; each step occupies the maximal path length in slots.
template <typename Value>
ProgramResult<Value> run_dimension_program_sbh(const SbhGraph& g, const std::vector<int>& dims,
                                               const DimOp<Value>& op, std::vector<Value> state) {
    if (static_cast<int>(state.size()) != g.node_count()) throw error("state size mismatch");
    ProgramResult<Value> res;
    // Overlay for link-conflict accounting; needs both groups nontrivial.
    std::optional<Topology> overlay;
    if (g.k() >= 1 && g.m() >= 1)
        overlay.emplace(build_topology(Group::boolean(g.k()), Group::boolean(g.m())));
    for (int dim : dims) {
        std::vector<PacketMove> moves;
        long packet = 0;
        int step_slots = 0;
        for (int node = 0; node < g.node_count(); ++node) {
            auto path = dim_exchange_path(g, node, dim);
            if (overlay)
                for (size_t h = 0; h < path.size(); ++h)
                    moves.push_back(PacketMove{packet, g.to_channel(*overlay, path[h]),
                                               static_cast<int>(h)});
            ++packet;
            step_slots = std::max(step_slots, static_cast<int>(path.size()));
        }
        if (overlay) {
            SimReport rep = simulate_moves(*overlay, moves);
            res.conflicts += static_cast<long>(rep.conflicts.size());
        }
        res.wall_slots += step_slots;
        res.cube_steps += 1;
        std::vector<Value> next(state.size());
        for (int node = 0; node < g.node_count(); ++node) {
            int partner = node ^ (1 << dim);
            next[node] = op(state[node], state[partner], dim, node);
        }
        state = std::move(next);
    }
    res.state = std::move(state);
    return res;
}

/// Same program on the direct (k+2m)-cube; one hop per step.
template <typename Value>
ProgramResult<Value> run_dimension_program_cube(int dims_total, const std::vector<int>& dims,
                                                const DimOp<Value>& op,
                                                std::vector<Value> state) {
    if (static_cast<int>(state.size()) != (1 << dims_total)) throw error("state size mismatch");
    ProgramResult<Value> res;
    for (int dim : dims) {
        std::vector<Value> next(state.size());
        for (int node = 0; node < static_cast<int>(state.size()); ++node) {
            int partner = node ^ (1 << dim);
            next[node] = op(state[node], state[partner], dim, node);
        }
        state = std::move(next);
        res.wall_slots += 1;
        res.cube_steps += 1;
    }
    res.state = std::move(state);
    return res;
}

/// Ascend-descend: dimensions 0..D-1 ascending then descending.
inline std::vector<int> ascend_descend_dims(int D) {
    std::vector<int> dims;
    for (int j = 0; j < D; ++j) dims.push_back(j);
    for (int j = D - 1; j >= 0; --j) dims.push_back(j);
    return dims;
}

template <typename Value>
ProgramResult<Value> ascend_descend(const SbhGraph& g, const DimOp<Value>& op,
                                    std::vector<Value> state) {
    return run_dimension_program_sbh<Value>(g, ascend_descend_dims(g.dims()), op,
                                            std::move(state));
}

/// Bitonic sorting network expressed as a dimension program.
struct BitonicStep {
    int dim;
    int block;  // direction bit: ascending when (node & block) == 0
};

inline std::vector<BitonicStep> bitonic_steps(int dims_total) {
    std::vector<BitonicStep> steps;
    for (int kk = 2; kk <= (1 << dims_total); kk <<= 1)
        for (int jj = kk >> 1; jj > 0; jj >>= 1) {
            int dim = 0;
            while ((1 << dim) != jj) ++dim;
            steps.push_back(BitonicStep{dim, kk});
        }
    return steps;
}

template <typename Key>
ProgramResult<Key> bitonic_sort_sbh(const SbhGraph& g, std::vector<Key> keys) {
    ProgramResult<Key> res;
    res.state = std::move(keys);
    for (const BitonicStep& st : bitonic_steps(g.dims())) {
        DimOp<Key> op = [st](const Key& self, const Key& partner, int dim, int node) {
            const int pnode = node ^ (1 << dim);
            const bool ascending = (node & st.block) == 0;
            const bool keep_small = (node < pnode) == ascending;
            return keep_small ? std::min(self, partner) : std::max(self, partner);
        };
        auto step = run_dimension_program_sbh<Key>(g, {st.dim}, op, std::move(res.state));
        res.state = std::move(step.state);
        res.wall_slots += step.wall_slots;
        res.cube_steps += step.cube_steps;
        res.conflicts += step.conflicts;
    }
    return res;
}

struct A2ACostCompare {
    double doubly_parallel_slots = 0;
    double johnsson_ho_slots = 0;
    bool doubly_parallel_wins = false;
};

/// Analytic all-to-all comparison on D3(2^k,2^m) vs SBH(k,m): the
/// doubly-parallel algorithm costs max(2^m, 2^(k+m+1)) t_w; the direct-link
/// exchange on the embedded hypercube costs 2^(k+2m)/3 t_w. Both values are
/// reported verbatim; at the smallest sizes the second is smaller.
inline A2ACostCompare a2a_cost_compare(int k, int m) {
    A2ACostCompare out;
    out.doubly_parallel_slots =
        std::max(std::pow(2.0, m), std::pow(2.0, k + m + 1));
    out.johnsson_ho_slots = std::pow(2.0, k + 2 * m) / 3.0;
    out.doubly_parallel_wins = out.doubly_parallel_slots < out.johnsson_ho_slots;
    return out;
}

/// Synchronized-header templates for the uniform dilation-four hypercube
/// emulation on D3(2^k,2^m): c-dims [4;gamma,0,0], d-dims [4;0,0,delta],
/// p-dims [4;0,pi,0]. Every expansion takes exactly four header steps.
struct Dilation4Templates {
    SyncHeader c_dim, d_dim, p_dim;
};

inline Dilation4Templates uniform_dilation4_paths(int gamma, int pi, int delta) {
    Dilation4Templates t;
    t.c_dim = SyncHeader{4, HField::of(gamma), HField::of(0), HField::of(0), false};
    t.d_dim = SyncHeader{4, HField::of(0), HField::of(0), HField::of(delta), false};
    t.p_dim = SyncHeader{4, HField::of(0), HField::of(pi), HField::of(0), false};
    return t;
}

struct Dilation4Schedule {
    std::vector<PacketMove> moves;
    int steps_per_path = 4;
    int total_slots = 0;
};

/// All routers launch all three header classes concurrently. A lock-step
/// launch cannot be conflict free (the d and p classes both open with the
/// global-0 swap from every router), so the canonical concurrent schedule
/// staggers the classes by one slot each: d at 0, p at 1, c at 2. All three
/// are then in flight together with zero conflicts.
inline Dilation4Schedule uniform_dilation4_schedule(const Topology& t, int gamma, int pi,
                                                    int delta) {
    Dilation4Templates tpl = uniform_dilation4_paths(gamma, pi, delta);
    Dilation4Schedule out;
    long packet = 0;
    struct ClassSpec {
        SyncHeader h;
        int offset;
    };
    const ClassSpec classes[3] = {{tpl.d_dim, 0}, {tpl.p_dim, 1}, {tpl.c_dim, 2}};
    for (const ClassSpec& cs : classes) {
        for (int id = 0; id < t.router_count(); ++id) {
            auto steps = trace_sync_header(t, t.coord(id), cs.h);
            if (static_cast<int>(steps.size()) != 4) throw error("dilation-4 path not 4 steps");
            for (size_t hop = 0; hop < steps.size(); ++hop) {
                if (steps[hop].channel)
                    out.moves.push_back(
                        PacketMove{packet, *steps[hop].channel,
                                   cs.offset + static_cast<int>(hop)});
                out.total_slots =
                    std::max(out.total_slots, cs.offset + static_cast<int>(hop) + 1);
            }
            ++packet;
        }
    }
    return out;
}

}  // namespace sdf
