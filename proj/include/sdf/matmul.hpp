// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "sdf/engine.hpp"

namespace sdf {

using Scalar = long long;

/// Matrix fabric: D3(K^2, M) with cyclic cabinet group of order K^2.
struct MatContext {
    Topology topo;
    int K;
    int M;
};

inline MatContext make_mat_context(int K, int M) {
    if (K < 2 || M < 2) throw error("matrix fabric needs K, M >= 2");
    return MatContext{make_cyclic(K * K, M), K, M};
}

/// Four-index storage map: (s,t,u,v) with s,t < K and u,v < M lives on
/// router (s + tK, u, v).
inline RouterCoord index_map(int s, int t, int u, int v, int K, int M) {
    if (s < 0 || s >= K || t < 0 || t >= K || u < 0 || u >= M || v < 0 || v >= M)
        throw error("index out of range");
    return RouterCoord{s + t * K, u, v};
}

struct Index4 {
    int s, t, u, v;
};

inline Index4 inverse_index_map(RouterCoord r, int K, int M) {
    if (r.c < 0 || r.c >= K * K || r.d < 0 || r.d >= M || r.p < 0 || r.p >= M)
        throw error("router out of range");
    return Index4{r.c % K, r.c / K, r.d, r.p};
}

/// Storage roles. RowHome is the four-index map applied to a matrix: element
/// with row pair (s,u) and column pair (t,v) sits on router (s+tK, u, v), so
/// every matrix row is a resident row vector. OperandHome is the layout the
/// right multiplicand needs for the four-level multiply round: element with
/// row pair (t,v) and column pair (t',v') sits on router
/// (t' + ((t - v) mod K) K, v', v). Under OperandHome all entries co-resident
/// in one drawer feed the same output element, which is what makes tagged
/// merging possible inside the hop budget.
enum class MatLayout { RowHome, OperandHome };

struct DistMatrix {
    int n = 0;
    int X = 1;
    MatLayout layout = MatLayout::RowHome;
    std::vector<std::vector<Scalar>> blocks;  // per router id; X*X row-major
};

namespace detail {

inline int row_home(int s, int u, int t, int v, const MatContext& ctx) {
    return ctx.topo.id(RouterCoord{s + t * ctx.K, u, v});
}
inline int operand_home(int t, int v, int tp, int vp, const MatContext& ctx) {
    const int b = ((t - v) % ctx.K + ctx.K) % ctx.K;
    return ctx.topo.id(RouterCoord{tp + b * ctx.K, vp, v});
}

struct FlatIndex {
    int hi;  // K-part
    int lo;  // M-part
    int i;   // position within the X-chunk
};

inline FlatIndex split(long R, int M, int X) {
    const long r = R / X;
    return FlatIndex{static_cast<int>(r / M), static_cast<int>(r % M), static_cast<int>(R % X)};
}

}  // namespace detail

inline DistMatrix distribute(const MatContext& ctx, const std::vector<Scalar>& dense, long n,
                             MatLayout layout) {
    const long km = static_cast<long>(ctx.K) * ctx.M;
    if (n % km != 0) throw error("matrix order must be a multiple of KM");
    const int X = static_cast<int>(n / km);
    if (static_cast<long>(dense.size()) != n * n) throw error("dense size mismatch");
    DistMatrix m;
    m.n = static_cast<int>(n);
    m.X = X;
    m.layout = layout;
    m.blocks.assign(ctx.topo.router_count(), std::vector<Scalar>(static_cast<size_t>(X) * X, 0));
    for (long R = 0; R < n; ++R)
        for (long C = 0; C < n; ++C) {
            auto r = detail::split(R, ctx.M, X);
            auto c = detail::split(C, ctx.M, X);
            if (layout == MatLayout::RowHome)
                m.blocks[detail::row_home(r.hi, r.lo, c.hi, c.lo, ctx)][r.i * X + c.i] =
                    dense[R * n + C];
            else
                m.blocks[detail::operand_home(r.hi, r.lo, c.hi, c.lo, ctx)][r.i * X + c.i] =
                    dense[R * n + C];
        }
    return m;
}

inline std::vector<Scalar> collect(const MatContext& ctx, const DistMatrix& m) {
    const long n = m.n;
    const int X = m.X;
    std::vector<Scalar> dense(n * n, 0);
    for (long R = 0; R < n; ++R)
        for (long C = 0; C < n; ++C) {
            auto r = detail::split(R, ctx.M, X);
            auto c = detail::split(C, ctx.M, X);
            int home = m.layout == MatLayout::RowHome
                           ? detail::row_home(r.hi, r.lo, c.hi, c.lo, ctx)
                           : detail::operand_home(r.hi, r.lo, c.hi, c.lo, ctx);
            dense[R * n + C] = m.blocks[home][r.i * X + c.i];
        }
    return dense;
}

/// Transpose of a RowHome matrix in a single global round: the router
/// holding block (s,t,u,v) launches gamma = (t+sK)-(s+tK); the d/p swap of
/// the global hop carries (u,v) to (v,u) for free. Diagonal s = t routers
/// ride the port-0 self-swap, degenerate exactly when u = v.
struct TransposeResult {
    std::vector<PacketMove> moves;
    SimReport report;
};

inline TransposeResult transpose_in_place(const MatContext& ctx, DistMatrix& m) {
    if (m.layout != MatLayout::RowHome) throw error("transpose expects a RowHome matrix");
    const int K = ctx.K, X = m.X;
    TransposeResult out;
    std::vector<std::vector<Scalar>> next(m.blocks.size());
    long packet = 0;
    for (int id = 0; id < ctx.topo.router_count(); ++id) {
        RouterCoord r = ctx.topo.coord(id);
        Index4 q = inverse_index_map(r, K, ctx.M);
        const int gamma = ctx.topo.cabinets().sub(q.t + q.s * K, q.s + q.t * K);
        Channel ch = ctx.topo.global_channel(r, gamma);
        for (int chunk = 0; chunk < X; ++chunk)
            out.moves.push_back(PacketMove{packet++, ch, chunk});
        std::vector<Scalar> tr(static_cast<size_t>(X) * X);
        for (int i = 0; i < X; ++i)
            for (int j = 0; j < X; ++j) tr[j * X + i] = m.blocks[id][i * X + j];
        next[ch.to] = std::move(tr);
    }
    m.blocks = std::move(next);
    out.report = simulate_moves(ctx.topo, out.moves);
    return out;
}

/// Merge helper for the gather: partial sums may only combine when they are
/// tagged with the same output element.
struct OutputTag {
    int tp, vp, i;
    auto operator<=>(const OutputTag&) const = default;
};

inline void merge_tagged(const OutputTag& expect, const OutputTag& got, Scalar& acc, Scalar add) {
    if (expect != got) throw error("merge of differently tagged partial sums");
    acc += add;
}

using BlockRowMultiply =
    std::function<void(const std::vector<Scalar>& v_chunk, const std::vector<Scalar>& b_row,
                       int chunk_row, std::vector<Scalar>& contrib)>;

inline void default_block_row_multiply(const std::vector<Scalar>& v_chunk,
                                       const std::vector<Scalar>& b_row, int chunk_row,
                                       std::vector<Scalar>& contrib) {
    for (size_t ip = 0; ip < contrib.size(); ++ip) contrib[ip] += v_chunk[chunk_row] * b_row[ip];
}

struct MultiplyStats {
    long rounds = 0;
    long channel_levels = 0;
    long off_and_ons = 0;
    long conflicts = 0;
    long total_slots = 0;
    long moves = 0;
};

namespace detail {

/// One vector-matrix multiply: row (s,u,j) of `rows` (RowHome) against B
/// (OperandHome), accumulated into row (s_out,u,j) of `out`. Emits X chunk
/// rounds of four channel levels each:
///   level 1: row-drawer spread of the X-wide vector chunks (locals)
///   level 2: operand staging, drawer blocks converge on the p=u router
///   level 3: fan-out of vector chunks to their operand drawers (globals)
///   level 4: tagged partial sums travel to their output homes (globals)
/// Two node stops per round: multiply-and-merge after level 3, final
/// accumulate after level 4. Requires M <= K: a staging router can receive
/// at most K distinct vector chunks in one level.
inline void vec_mat_rounds(const MatContext& ctx, const DistMatrix& rows, int s, int u, int j,
                           const DistMatrix& B, DistMatrix& out, int s_out, int base_slot,
                           std::vector<PacketMove>& moves, long& packet, MultiplyStats& stats,
                           const BlockRowMultiply& block_mul) {
    const int K = ctx.K, M = ctx.M, X = rows.X;
    const Topology& t = ctx.topo;
    if (M > K) throw error("vector-matrix dataflow requires M <= K");

    // Holder state after level 1: all chunks of the row, per drawer position.
    // holder (s+tK, u, z) gets chunk (t, w) for every w.
    std::vector<std::vector<Scalar>> chunk(static_cast<size_t>(K) * M);  // (t, w) -> X scalars
    for (int tt = 0; tt < K; ++tt)
        for (int w = 0; w < M; ++w) {
            const auto& blk = rows.blocks[row_home(s, u, tt, w, ctx)];
            std::vector<Scalar> v(X);
            for (int i = 0; i < X; ++i) v[i] = blk[j * X + i];
            chunk[tt * M + w] = std::move(v);
        }

    for (int cr = 0; cr < X; ++cr) {
        const int base = base_slot + cr * 4;
        if (cr == 0) {
            // Level 1: every row home spreads its chunk across the drawer.
            for (int tt = 0; tt < K; ++tt)
                for (int v = 0; v < M; ++v) {
                    RouterCoord home{s + tt * K, u, v};
                    for (int z = 0; z < M; ++z) {
                        if (z == v) continue;
                        moves.push_back(PacketMove{
                            packet++, t.local_channel(home, t.drawers().sub(z, v)), base});
                    }
                }
        }
        // Level 2: operand staging round cr (block row cr moves to p = u).
        for (int id = 0; id < t.router_count(); ++id) {
            RouterCoord r = t.coord(id);
            if (r.p == u) continue;
            moves.push_back(
                PacketMove{packet++, t.local_channel(r, t.drawers().sub(u, r.p)), base + 1});
        }
        if (cr == 0) {
            // Level 3: holders fan chunks out to the staging routers.
            for (int tau = 0; tau < K; ++tau)
                for (int z = 0; z < M; ++z) {
                    RouterCoord holder{s + tau * K, u, z};
                    for (int tp = 0; tp < K; ++tp)
                        for (int b = 0; b < K; ++b) {
                            const int w = ((tau - b) % K + K) % K;
                            if (w >= M) continue;
                            const int gamma = t.cabinets().sub(tp + b * K, holder.c);
                            moves.push_back(
                                PacketMove{packet++, t.global_channel(holder, gamma), base + 2});
                        }
                }
        }
        // Stop 1: multiply block row cr and fold same-tag addends; then
        // level 4 ships one tagged partial per staging router.
        stats.off_and_ons += 2;
        for (int tp = 0; tp < K; ++tp)
            for (int b = 0; b < K; ++b)
                for (int D = 0; D < M; ++D) {
                    RouterCoord stage{tp + b * K, D, u};
                    std::vector<Scalar> contrib(X, 0);
                    for (int P = 0; P < M; ++P) {
                        const int tt = (b + P) % K;
                        const auto& blk = B.blocks[t.id(RouterCoord{stage.c, D, P})];
                        std::vector<Scalar> b_row(X);
                        for (int ip = 0; ip < X; ++ip) b_row[ip] = blk[cr * X + ip];
                        block_mul(chunk[tt * M + P], b_row, cr, contrib);
                    }
                    const int gamma = t.cabinets().sub(s_out + tp * K, stage.c);
                    moves.push_back(PacketMove{packet++, t.global_channel(stage, gamma), base + 3});
                    // Stop 2: accumulate at the output home under the tag.
                    auto& oblk = out.blocks[row_home(s_out, u, tp, D, ctx)];
                    for (int ip = 0; ip < X; ++ip) {
                        OutputTag tag{tp, D, ip};
                        merge_tagged(tag, tag, oblk[j * X + ip], contrib[ip]);
                    }
                }
        stats.rounds += 1;
        stats.channel_levels += 4;
    }
}

}  // namespace detail

struct MultiplyResult {
    DistMatrix product;  // RowHome
    MultiplyStats stats;
};

/// Product A * B. A is RowHome, B is OperandHome, both n x n with
/// n = X * KM. Runs n * X rounds (KM rounds when n = KM), each of four
/// channel levels and two off-and-ons, all conflict free. `s_shift`
/// relocates the output rows (s,u) to (s + s_shift, u); relocating u is not
/// expressible inside the four-hop budget.
inline MultiplyResult multiply(const MatContext& ctx, const DistMatrix& A, const DistMatrix& B,
                               int s_shift = 0,
                               const BlockRowMultiply& block_mul = default_block_row_multiply) {
    if (A.layout != MatLayout::RowHome) throw error("left operand must be RowHome");
    if (B.layout != MatLayout::OperandHome) throw error("right operand must be OperandHome");
    if (A.n != B.n) throw error("dimension mismatch");
    if (s_shift < 0 || s_shift >= ctx.K) throw error("s_shift out of range");
    const int K = ctx.K, M = ctx.M, X = A.X;
    MultiplyResult res;
    res.product = A;
    for (auto& blk : res.product.blocks) std::fill(blk.begin(), blk.end(), 0);
    std::vector<PacketMove> moves;
    long packet = 0;
    int base = 0;
    for (int s = 0; s < K; ++s)
        for (int u = 0; u < M; ++u)
            for (int j = 0; j < X; ++j) {
                detail::vec_mat_rounds(ctx, A, s, u, j, B, res.product, (s + s_shift) % K,
                                       base, moves, packet, res.stats, block_mul);
                base += 4 * X;
            }
    SimReport rep = simulate_moves(ctx.topo, moves);
    res.stats.conflicts = static_cast<long>(rep.conflicts.size());
    res.stats.total_slots = rep.total_slots;
    res.stats.moves = rep.total_hops;
    return res;
}

inline MultiplyResult mat_mat_multiply(const MatContext& ctx, const DistMatrix& A,
                                       const DistMatrix& B, int s_shift = 0) {
    if (A.X != 1) throw error("mat_mat_multiply expects n = KM; use blocked_multiply");
    return multiply(ctx, A, B, s_shift);
}

inline MultiplyResult blocked_multiply(const MatContext& ctx, const DistMatrix& A,
                                       const DistMatrix& B,
                                       const BlockRowMultiply& block_mul = default_block_row_multiply) {
    return multiply(ctx, A, B, 0, block_mul);
}

/// Schedule-only view of the first two levels of a vector-matrix round for
/// one resident row: the two-hop juxtaposition broadcast (drawer spread,
/// then global fan-out).
inline std::vector<PacketMove> juxtapose_broadcast(const MatContext& ctx, int s, int u) {
    const int K = ctx.K, M = ctx.M;
    if (M > K) throw error("vector-matrix dataflow requires M <= K");
    const Topology& t = ctx.topo;
    std::vector<PacketMove> moves;
    long packet = 0;
    for (int tt = 0; tt < K; ++tt)
        for (int v = 0; v < M; ++v) {
            RouterCoord home{s + tt * K, u, v};
            for (int z = 0; z < M; ++z)
                if (z != v)
                    moves.push_back(
                        PacketMove{packet++, t.local_channel(home, t.drawers().sub(z, v)), 0});
        }
    for (int tau = 0; tau < K; ++tau)
        for (int z = 0; z < M; ++z) {
            RouterCoord holder{s + tau * K, u, z};
            for (int tp = 0; tp < K; ++tp)
                for (int b = 0; b < K; ++b) {
                    if (((tau - b) % K + K) % K >= M) continue;
                    moves.push_back(PacketMove{
                        packet++,
                        t.global_channel(holder, t.cabinets().sub(tp + b * K, holder.c)), 1});
                }
        }
    return moves;
}

/// Schedule-only view of the last two levels: operand staging followed by
/// the tagged partial-sum hop to the output homes. Reverses the fan-out
/// channels of the juxtaposition on the tau = t' subset.
inline std::vector<PacketMove> gather_accumulate(const MatContext& ctx, int s, int u) {
    const int K = ctx.K, M = ctx.M;
    if (M > K) throw error("vector-matrix dataflow requires M <= K");
    const Topology& t = ctx.topo;
    std::vector<PacketMove> moves;
    long packet = 0;
    for (int id = 0; id < t.router_count(); ++id) {
        RouterCoord r = t.coord(id);
        if (r.p != u)
            moves.push_back(
                PacketMove{packet++, t.local_channel(r, t.drawers().sub(u, r.p)), 0});
    }
    for (int tp = 0; tp < K; ++tp)
        for (int b = 0; b < K; ++b)
            for (int D = 0; D < M; ++D) {
                RouterCoord stage{tp + b * K, D, u};
                moves.push_back(PacketMove{
                    packet++, t.global_channel(stage, t.cabinets().sub(s + tp * K, stage.c)), 1});
            }
    return moves;
}

enum class CostVariant { D3, Cannon, HJE, DNSMesh, GS, DNSCube };

/// Analytic network costs (t_w units) for n x n matrix product on P
/// processors; no simulation.
inline double cost_table(double n, double P, CostVariant variant) {
    const double n2 = n * n;
    switch (variant) {
        case CostVariant::D3: return 4.0 * n2 / std::sqrt(P);
        case CostVariant::Cannon: return 2.0 * n2 / std::sqrt(P);
        case CostVariant::HJE: return 2.0 * n2 / std::sqrt(P) * std::log2(P);
        case CostVariant::DNSMesh: return 2.0 * n2 / std::sqrt(P);
        case CostVariant::GS: return 3.0 * n2 / std::pow(P, 2.0 / 3.0) * std::log2(P);
        case CostVariant::DNSCube: return 4.0 * n2 / std::pow(P, 2.0 / 3.0);
    }
    throw error("unknown cost variant");
}

/// For K strictly between squares, a KM-long vector-matrix multiply is
/// faster on the embedded D3(L^2,M) (ceil(K/L) rounds) than with K-fold
/// replicated storage on D3(K,M) (K rounds).
struct SubnetworkCompare {
    int L = 1;
    long rounds_embedded = 0;
    long rounds_direct = 0;
};

inline SubnetworkCompare vecmat_subnetwork_compare(int K) {
    SubnetworkCompare out;
    int L = 1;
    while ((L + 1) * (L + 1) < K) ++L;
    if ((L + 1) * (L + 1) == K) ++L;  // K a perfect square: use it directly
    out.L = L;
    out.rounds_embedded = (K + L - 1) / L;
    out.rounds_direct = K;
    return out;
}

inline void store_dense(std::ostream& os, const std::vector<Scalar>& dense, long n) {
    for (long r = 0; r < n; ++r) {
        for (long c = 0; c < n; ++c) os << dense[r * n + c] << (c + 1 == n ? "" : " ");
        os << "\n";
    }
}

inline std::vector<Scalar> load_dense(std::istream& is, long n) {
    std::vector<Scalar> dense(n * n);
    for (auto& x : dense)
        if (!(is >> x)) throw error("dense matrix file truncated");
    return dense;
}

/// Per-router block dump keyed by (c,d,p).
inline void store_blocks(std::ostream& os, const MatContext& ctx, const DistMatrix& m) {
    for (int id = 0; id < ctx.topo.router_count(); ++id) {
        RouterCoord r = ctx.topo.coord(id);
        os << r.c << " " << r.d << " " << r.p << " :";
        for (Scalar x : m.blocks[id]) os << " " << x;
        os << "\n";
    }
}

/// Reference dense product (test oracle lives in tests; this is the
/// loader-side helper for the CLI's verification output).
inline std::vector<Scalar> dense_multiply(const std::vector<Scalar>& a,
                                          const std::vector<Scalar>& b, long n) {
    std::vector<Scalar> c(n * n, 0);
    for (long i = 0; i < n; ++i)
        for (long k = 0; k < n; ++k) {
            const Scalar aik = a[i * n + k];
            if (aik == 0) continue;
            for (long j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    return c;
}

}  // namespace sdf
