// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sdf/topology.hpp"

namespace sdf {

enum class HopOrder { LGL, GLG };

/// Controls what a zero gamma component means when expanding a source
/// vector. Point-to-point routing treats all zero components as "skip this
/// hop" (so (0,0,0) is the identity). Collective schedules that need the
/// vector->destination map to be a bijection traverse global port 0 as the
/// explicit d/p swap channel instead.
enum class GlobalZero { Skip, Swap };

struct SourceVector {
    int gamma = 0;
    int pi = 0;
    int delta = 0;
    HopOrder order = HopOrder::LGL;
    auto operator<=>(const SourceVector&) const = default;
};

/// Up to three hops, kept at fixed hop indices so that schedules can align
/// slots even when zero components shrink the path.
struct Path {
    std::array<std::optional<Channel>, 3> hops;
    int destination = -1;

    int channel_count() const {
        int n = 0;
        for (const auto& h : hops)
            if (h) ++n;
        return n;
    }
    std::vector<Channel> channels() const {
        std::vector<Channel> out;
        for (const auto& h : hops)
            if (h) out.push_back(*h);
        return out;
    }
};

/// Expand a source vector starting at r. LGL order: local delta, global
/// gamma, local pi. GLG order: global gamma, local delta, global 0 (the
/// swap-back), which shifts the drawer coordinate; pi must be zero.
inline Path expand_vector(const Topology& t, RouterCoord r, const SourceVector& v,
                          GlobalZero zmode = GlobalZero::Skip) {
    Path path;
    RouterCoord cur = r;
    auto take = [&](int idx, Channel ch) {
        path.hops[idx] = ch;
        cur = t.coord(ch.to);
    };
    if (v.order == HopOrder::LGL) {
        if (v.delta != 0) take(0, t.local_channel(cur, v.delta));
        if (v.gamma != 0 || zmode == GlobalZero::Swap) take(1, t.global_channel(cur, v.gamma));
        if (v.pi != 0) take(2, t.local_channel(cur, v.pi));
    } else {
        if (v.pi != 0) throw error("GLG vectors carry no pi component");
        take(0, t.global_channel(cur, v.gamma));
        if (v.delta != 0) take(1, t.local_channel(cur, v.delta));
        take(2, t.global_channel(cur, 0));
    }
    path.destination = t.id(cur);
    return path;
}

/// Synchronized packet header [b; gamma, pi, delta]. Odd b consumes the
/// local field, even b the global field, with the fixed rewrite rules.
/// Wildcard fields mean "broadcast over every port of that class" and are
/// only honored when the broadcast bit is set.
struct HField {
    int raw = 0;
    static constexpr int kWild = -1;
    static HField wild() { return HField{kWild}; }
    static HField of(int v) { return HField{v}; }
    bool is_wild() const { return raw == kWild; }
    int value() const {
        if (is_wild()) throw error("wildcard header field has no value");
        return raw;
    }
    auto operator<=>(const HField&) const = default;
};

struct SyncHeader {
    int b = 0;
    HField gamma{};
    HField pi{};
    HField delta{};
    bool broadcast_bit = false;
    auto operator<=>(const SyncHeader&) const = default;

    std::string bracket() const {
        auto f = [](HField h) { return h.is_wild() ? std::string("*") : std::to_string(h.raw); };
        std::ostringstream os;
        os << "[" << b << ";" << f(gamma) << "," << f(pi) << "," << f(delta) << "]";
        return os.str();
    }
};

struct HeaderStep {
    std::optional<Channel> channel;  // empty for a skipped or degenerate hop
    SyncHeader header;
    RouterCoord position;
    bool arrived = false;
};

/// One point-to-point header step. Requires concrete fields; wildcard
/// expansion goes through expand_broadcast_header.
inline HeaderStep step_sync_header(const Topology& t, RouterCoord r, const SyncHeader& h) {
    if (h.b == 0) return HeaderStep{std::nullopt, h, r, true};
    HeaderStep out;
    SyncHeader next = h;
    next.b = h.b - 1;
    RouterCoord cur = r;
    if (h.b % 2 == 1) {
        if (h.delta.is_wild()) throw error("wildcard local field in point-to-point step");
        int delta = h.delta.value();
        if (delta != 0) {
            Channel ch = t.local_channel(cur, delta);
            out.channel = ch;
            cur = t.coord(ch.to);
        }
        next.delta = h.pi;
        next.pi = HField::of(0);
    } else {
        if (h.gamma.is_wild()) throw error("wildcard global field in point-to-point step");
        Channel ch = t.global_channel(cur, h.gamma.value());
        if (!ch.degenerate()) out.channel = ch;
        cur = t.coord(ch.to);
        next.gamma = HField::of(0);
    }
    out.header = next;
    out.position = cur;
    out.arrived = next.b == 0;
    return out;
}

/// Trace of a concrete header from r down to b = 0.
inline std::vector<HeaderStep> trace_sync_header(const Topology& t, RouterCoord r, SyncHeader h) {
    std::vector<HeaderStep> steps;
    RouterCoord cur = r;
    while (h.b > 0) {
        HeaderStep s = step_sync_header(t, cur, h);
        cur = s.position;
        h = s.header;
        steps.push_back(std::move(s));
    }
    return steps;
}

struct HeaderCopy {
    RouterCoord at;
    SyncHeader header;
    long id;      // copy id, root = 0
    long parent;  // -1 for root
};

struct TimedChannel {
    Channel channel;
    int slot;
    long packet;
};

/// Wildcard-driven broadcast expansion. Slot k carries all hops of header
/// step k. Every router a copy visits counts as delivered (local broadcasts
/// include the sender's own node). first_cover holds the channel that first
/// delivered each router; duplicate deliveries are counted, not treated as
/// errors, since the header program cannot know what earlier levels covered.
struct HeaderExpansion {
    std::vector<TimedChannel> moves;
    std::vector<int> first_cover_parent;  // per router id: channel index into moves, -1 root/none
    std::vector<char> covered;
    int levels = 0;
    long duplicate_deliveries = 0;

    bool covers_all() const {
        for (char c : covered)
            if (!c) return false;
        return true;
    }
};

inline HeaderExpansion expand_broadcast_header(const Topology& t, RouterCoord root,
                                               SyncHeader h) {
    if (!h.broadcast_bit) throw error("broadcast expansion requires the broadcast bit");
    HeaderExpansion out;
    out.first_cover_parent.assign(t.router_count(), -1);
    out.covered.assign(t.router_count(), 0);
    out.covered[t.id(root)] = 1;
    std::vector<HeaderCopy> active{HeaderCopy{root, h, 0, -1}};
    long next_id = 1;
    int slot = 0;
    auto deliver = [&](int router, int move_idx) {
        if (out.covered[router]) {
            ++out.duplicate_deliveries;
        } else {
            out.covered[router] = 1;
            out.first_cover_parent[router] = move_idx;
        }
    };
    while (!active.empty()) {
        std::vector<HeaderCopy> next_active;
        bool any_live = false;
        for (const HeaderCopy& copy : active) {
            if (copy.header.b == 0) continue;
            any_live = true;
            SyncHeader base = copy.header;
            const bool odd = base.b % 2 == 1;
            SyncHeader rewritten = base;
            rewritten.b = base.b - 1;
            if (odd) {
                rewritten.delta = base.pi;
                rewritten.pi = HField::of(0);
            } else {
                rewritten.gamma = HField::of(0);
            }
            auto emit = [&](std::optional<Channel> ch) {
                RouterCoord pos = copy.at;
                if (ch) {
                    out.moves.push_back(TimedChannel{*ch, slot, copy.id});
                    pos = t.coord(ch->to);
                    deliver(ch->to, static_cast<int>(out.moves.size()) - 1);
                }
                next_active.push_back(HeaderCopy{pos, rewritten, next_id++, copy.id});
            };
            if (odd) {
                const HField& f = base.delta;
                if (f.is_wild()) {
                    emit(std::nullopt);  // self copy: the local broadcast includes own node
                    for (int delta = 1; delta < t.M(); ++delta)
                        emit(t.local_channel(copy.at, delta));
                } else if (f.value() == 0) {
                    emit(std::nullopt);
                } else {
                    emit(t.local_channel(copy.at, f.value()));
                }
            } else {
                const HField& f = base.gamma;
                if (f.is_wild()) {
                    for (int gamma = 0; gamma < t.K(); ++gamma) {
                        Channel ch = t.global_channel(copy.at, gamma);
                        if (ch.degenerate())
                            emit(std::nullopt);  // self-swap keeps the copy in place
                        else
                            emit(ch);
                    }
                } else {
                    Channel ch = t.global_channel(copy.at, f.value());
                    if (ch.degenerate())
                        emit(std::nullopt);
                    else
                        emit(ch);
                }
            }
        }
        if (any_live) ++out.levels;
        active = std::move(next_active);
        ++slot;
    }
    return out;
}

}  // namespace sdf
