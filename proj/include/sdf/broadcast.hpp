// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <sstream>
#include <vector>

#include "sdf/engine.hpp"

namespace sdf {

/// A rooted broadcast tree, stored as one channel set per level. Every
/// non-root router has in-degree exactly one across the union of levels.
struct SpanningTreeSpec {
    RouterCoord root;
    int depth = 0;
    std::vector<std::vector<Channel>> levels;

    std::vector<Channel> all_channels() const {
        std::vector<Channel> out;
        for (const auto& lvl : levels) out.insert(out.end(), lvl.begin(), lvl.end());
        return out;
    }
};

struct TreeCheck {
    bool spans = false;
    bool in_degree_one = false;
    long channel_count = 0;
};

inline TreeCheck verify_tree(const Topology& t, const SpanningTreeSpec& tree) {
    std::vector<int> indeg(t.router_count(), 0);
    long count = 0;
    for (const auto& lvl : tree.levels)
        for (const Channel& ch : lvl) {
            ++indeg[ch.to];
            ++count;
        }
    TreeCheck res;
    res.channel_count = count;
    res.in_degree_one = true;
    res.spans = true;
    for (int i = 0; i < t.router_count(); ++i) {
        const bool is_root = i == t.id(tree.root);
        if (is_root && indeg[i] != 0) res.in_degree_one = false;
        if (!is_root && indeg[i] != 1) {
            res.in_degree_one = indeg[i] <= 1 && res.in_degree_one;
            if (indeg[i] == 0) res.spans = false;
        }
    }
    return res;
}

/// Depth-three tree at (c,d,p): local broadcast across the root drawer,
/// global broadcast from every drawer member, then local broadcast at every
/// landing point. Port-0 self-swaps and re-covers of the root drawer are
/// skipped so the result is a tree.
inline SpanningTreeSpec depth3_tree(const Topology& t, RouterCoord root) {
    SpanningTreeSpec tree;
    tree.root = root;
    tree.depth = 3;
    tree.levels.assign(3, {});
    for (int z = 0; z < t.M(); ++z)
        if (z != root.p)
            tree.levels[0].push_back(t.local_channel(root, t.drawers().sub(z, root.p)));
    for (int z = 0; z < t.M(); ++z) {
        RouterCoord sender{root.c, root.d, z};
        for (int gamma = 0; gamma < t.K(); ++gamma) {
            Channel ch = t.global_channel(sender, gamma);
            if (!ch.degenerate()) tree.levels[1].push_back(ch);
        }
    }
    for (int y = 0; y < t.K(); ++y)
        for (int z = 0; z < t.M(); ++z) {
            RouterCoord sender{y, z, root.d};
            if (y == root.c && z == root.d) continue;  // root drawer is level-0 covered
            for (int w = 0; w < t.M(); ++w)
                if (w != root.d)
                    tree.levels[2].push_back(t.local_channel(sender, t.drawers().sub(w, root.d)));
        }
    return tree;
}

/// The M depth-four trees of a drawer, one per root (c,d,p). Shape: global
/// broadcast to (*,p,d), local broadcast to (*,p,*), global port 0 to
/// (*,*,p), local broadcast to (*,*,*), with degenerate hops skipped and
/// already-covered drawers not re-entered.
inline SpanningTreeSpec depth4_tree(const Topology& t, RouterCoord root) {
    SpanningTreeSpec tree;
    tree.root = root;
    tree.depth = 4;
    tree.levels.assign(4, {});
    const int p = root.p;
    // Level 1: root globals. The port-0 hop is degenerate for the diagonal
    // root; the root then acts as its own landing point in level 2.
    for (int gamma = 0; gamma < t.K(); ++gamma) {
        Channel ch = t.global_channel(root, gamma);
        if (!ch.degenerate()) tree.levels[0].push_back(ch);
    }
    // Level 2: landing points (y, p, d) spread across their drawers. For the
    // diagonal root the y = c sender is the root itself, whose degenerate
    // level-1 self-swap kept the copy in place.
    for (int y = 0; y < t.K(); ++y) {
        RouterCoord sender{y, p, root.d};
        for (int w = 0; w < t.M(); ++w)
            if (w != root.d)
                tree.levels[1].push_back(t.local_channel(sender, t.drawers().sub(w, root.d)));
    }
    // Level 3: every (y, p, w) forwards over global port 0; self-swaps and
    // the root's own cover are skipped.
    for (int y = 0; y < t.K(); ++y)
        for (int w = 0; w < t.M(); ++w) {
            RouterCoord sender{y, p, w};
            Channel ch = t.global_channel(sender, 0);
            if (ch.degenerate()) continue;
            if (ch.to == t.id(root)) continue;
            tree.levels[2].push_back(ch);
        }
    // Level 4: landing points (y, w, p), w != p, spread across their
    // drawers; the drawers (y, p, *) are already covered at level 2. In the
    // root drawer the sender is the root itself.
    for (int y = 0; y < t.K(); ++y)
        for (int w = 0; w < t.M(); ++w) {
            if (w == p) continue;
            RouterCoord sender{y, w, p};
            for (int z = 0; z < t.M(); ++z) {
                if (z == p) continue;
                tree.levels[3].push_back(t.local_channel(sender, t.drawers().sub(z, p)));
            }
        }
    return tree;
}

inline std::vector<SpanningTreeSpec> depth4_trees(const Topology& t, int c, int d) {
    std::vector<SpanningTreeSpec> trees;
    for (int p = 0; p < t.M(); ++p) trees.push_back(depth4_tree(t, RouterCoord{c, d, p}));
    return trees;
}

/// Directed channels shared by two trees.
inline std::vector<Channel> shared_channels(const Topology& t, const SpanningTreeSpec& a,
                                            const SpanningTreeSpec& b) {
    std::set<long> keys;
    for (const Channel& ch : a.all_channels()) keys.insert(t.channel_key(ch));
    std::vector<Channel> out;
    for (const Channel& ch : b.all_channels())
        if (keys.count(t.channel_key(ch))) out.push_back(ch);
    return out;
}

struct BroadcastRun {
    std::vector<PacketMove> moves;
    SimReport report;
    int hop_levels = 0;
    long messages = 0;
    bool full_delivery = false;
    long ts_events_duplicating = 0;  // node handling charges when routers duplicate
    long ts_events_forwarding = 0;   // charges when headers ride in packets
};

namespace detail {

inline void emit_tree(const Topology& t, const SpanningTreeSpec& tree, long packet, int base,
                      std::vector<PacketMove>& moves) {
    for (size_t lvl = 0; lvl < tree.levels.size(); ++lvl)
        for (const Channel& ch : tree.levels[lvl])
            moves.push_back(PacketMove{packet, ch, base + static_cast<int>(lvl)});
}

inline std::vector<char> tree_coverage(const Topology& t, const SpanningTreeSpec& tree) {
    std::vector<char> covered(t.router_count(), 0);
    covered[t.id(tree.root)] = 1;
    for (const auto& lvl : tree.levels)
        for (const Channel& ch : lvl) covered[ch.to] = 1;
    return covered;
}

}  // namespace detail

/// Delegated multi-broadcast: one local delegation slot moves M messages
/// from the source across its drawer, then the M depth-four trees run
/// concurrently. Five hop levels, zero conflicts. Accounting: with
/// duplicating routers the time is t_s + 5 t_w; otherwise every hop charges
/// a node handling step, 5 t_s.
inline BroadcastRun delegated_broadcast(const Topology& t, RouterCoord source,
                                        int message_count) {
    if (message_count != t.M()) throw error("delegated broadcast carries exactly M messages");
    BroadcastRun run;
    run.messages = message_count;
    auto trees = depth4_trees(t, source.c, source.d);
    bool all = true;
    for (int p = 0; p < t.M(); ++p) {
        if (p != source.p)
            run.moves.push_back(
                PacketMove{p, t.local_channel(source, t.drawers().sub(p, source.p)), 0});
        detail::emit_tree(t, trees[p], p, 1, run.moves);
        auto covered = detail::tree_coverage(t, trees[p]);
        for (char c : covered) all = all && c;
    }
    run.report = simulate_moves(t, run.moves);
    run.hop_levels = 5;
    run.full_delivery = all;
    run.ts_events_duplicating = 1;  // the delegation handling
    run.ts_events_forwarding = 5;
    return run;
}

/// Stride-1 pipeline of the depth-three tree: X messages, total X+2 slots.
/// Conflict free exactly when the root has p != d, which keeps the root's
/// level-1 locals disjoint from every level-3 sender.
inline BroadcastRun pipeline_depth3(const Topology& t, RouterCoord root, int X) {
    if (root.p == root.d) throw error("depth-3 pipeline requires a root with p != d");
    SpanningTreeSpec tree = depth3_tree(t, root);
    BroadcastRun run;
    run.messages = X;
    for (int msg = 0; msg < X; ++msg) detail::emit_tree(t, tree, msg, msg, run.moves);
    run.report = simulate_moves(t, run.moves);
    run.hop_levels = run.report.total_slots;
    auto covered = detail::tree_coverage(t, tree);
    run.full_delivery = true;
    for (char c : covered) run.full_delivery = run.full_delivery && c;
    return run;
}

/// Paired pipelining of the M depth-four trees: X messages (a multiple of
/// 2M), round-robin over the trees, each tree chaining its share at stride
/// 3 (two broadcasts per six-slot block). The first local hop of each
/// message is the delegation step. With diagnostic_stride1 the naive
/// stride-1 chaining is emitted instead, which reproduces the third-level
/// conflict.
inline BroadcastRun pipeline_depth4_pairs(const Topology& t, int c, int d, int X,
                                          bool diagnostic_stride1 = false,
                                          int source_p = 0) {
    if (!diagnostic_stride1 && X % (2 * t.M()) != 0)
        throw error("X must be a multiple of 2M");
    auto trees = depth4_trees(t, c, d);
    RouterCoord source{c, d, source_p};
    BroadcastRun run;
    run.messages = X;
    bool all = true;
    for (int msg = 0; msg < X; ++msg) {
        const int tree_idx = msg % t.M();
        const int per_tree_idx = msg / t.M();
        const int base = diagnostic_stride1 ? msg : 3 * per_tree_idx;
        if (tree_idx != source.p)
            run.moves.push_back(PacketMove{
                msg, t.local_channel(source, t.drawers().sub(tree_idx, source.p)), base});
        detail::emit_tree(t, trees[tree_idx], msg, base + 1, run.moves);
        auto covered = detail::tree_coverage(t, trees[tree_idx]);
        for (char cc : covered) all = all && cc;
    }
    run.report = simulate_moves(t, run.moves);
    run.hop_levels = run.report.total_slots;
    run.full_delivery = all;
    return run;
}

inline std::string tree_csv(const Topology& t, const SpanningTreeSpec& tree) {
    std::ostringstream os;
    os << "level,from_c,from_d,from_p,to_c,to_d,to_p,class,port\n";
    for (size_t lvl = 0; lvl < tree.levels.size(); ++lvl)
        for (const Channel& ch : tree.levels[lvl]) {
            RouterCoord f = t.coord(ch.from), to = t.coord(ch.to);
            os << (lvl + 1) << "," << f.c << "," << f.d << "," << f.p << "," << to.c << ","
               << to.d << "," << to.p << ","
               << (ch.kind == LinkKind::Local ? "local" : "global") << "," << ch.port << "\n";
        }
    return os.str();
}

}  // namespace sdf
