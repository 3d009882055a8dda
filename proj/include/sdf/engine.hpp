// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "sdf/routing.hpp"

namespace sdf {

struct PacketMove {
    long packet = 0;
    Channel channel;
    int slot = 0;
};

struct Launch {
    RouterCoord source;
    SourceVector vec;
};

struct Round {
    std::vector<Launch> launches;
};

enum class PipelinePattern { S1 = 1, S2 = 2, S3 = 3 };

struct TimedRound {
    Round round;
    int base = 0;
};

struct TimedSchedule {
    std::vector<TimedRound> rounds;
    int delays_inserted = 0;
    GlobalZero zero_mode = GlobalZero::Skip;

    struct Expansion {
        std::vector<PacketMove> moves;
        std::vector<std::pair<long, int>> deliveries;  // packet -> destination router
        int total_slots = 0;
    };

    Expansion expand(const Topology& t) const {
        Expansion out;
        long packet = 0;
        for (const TimedRound& tr : rounds) {
            for (const Launch& l : tr.round.launches) {
                Path p = expand_vector(t, l.source, l.vec, zero_mode);
                for (int hop = 0; hop < 3; ++hop)
                    if (p.hops[hop])
                        out.moves.push_back(PacketMove{packet, *p.hops[hop], tr.base + hop});
                out.deliveries.emplace_back(packet, p.destination);
                out.total_slots = std::max(out.total_slots, tr.base + 3);
                ++packet;
            }
        }
        return out;
    }
};

struct Conflict {
    Channel channel;
    int slot;
    std::vector<long> packets;
};

struct SimReport {
    int total_slots = 0;
    long total_hops = 0;
    std::vector<Conflict> conflicts;
    int delays_inserted = 0;
    std::vector<std::pair<long, int>> deliveries;
    long degenerate_moves = 0;

    bool conflict_free() const { return conflicts.empty(); }
};

/// Conflict scan over a fixed move list. Two distinct packets on the same
/// directed channel in the same slot conflict; opposite directions of a link
/// never do, and degenerate self-swaps occupy no wire. Deterministic and
/// order-independent: moves are canonically sorted before scanning.
inline SimReport simulate_moves(const Topology& t, std::vector<PacketMove> moves) {
    SimReport rep;
    rep.total_hops = static_cast<long>(moves.size());
    for (const PacketMove& m : moves) rep.total_slots = std::max(rep.total_slots, m.slot + 1);

    // Contiguity: every move of a packet must start at a router the packet
    // has already reached. Point-to-point packets chain head to tail;
    // broadcast packets grow a tree, one level per slot.
    std::stable_sort(moves.begin(), moves.end(), [](const PacketMove& a, const PacketMove& b) {
        if (a.packet != b.packet) return a.packet < b.packet;
        return a.slot < b.slot;
    });
    for (size_t i = 0; i < moves.size();) {
        size_t j = i;
        while (j < moves.size() && moves[j].packet == moves[i].packet) ++j;
        std::set<int> reached{moves[i].channel.from};
        size_t a = i;
        while (a < j) {
            size_t b = a;
            while (b < j && moves[b].slot == moves[a].slot) ++b;
            for (size_t x = a; x < b; ++x)
                if (!reached.count(moves[x].channel.from)) throw error("discontiguous packet path");
            for (size_t x = a; x < b; ++x) reached.insert(moves[x].channel.to);
            a = b;
        }
        i = j;
    }

    std::map<std::pair<long, int>, std::pair<Channel, std::vector<long>>> use;
    for (const PacketMove& m : moves) {
        if (m.channel.degenerate()) {
            ++rep.degenerate_moves;
            continue;
        }
        auto& slot = use[{t.channel_key(m.channel), m.slot}];
        slot.first = m.channel;
        slot.second.push_back(m.packet);
    }
    for (auto& [key, entry] : use) {
        auto& packets = entry.second;
        std::sort(packets.begin(), packets.end());
        packets.erase(std::unique(packets.begin(), packets.end()), packets.end());
        if (packets.size() > 1) rep.conflicts.push_back(Conflict{entry.first, key.second, packets});
    }
    return rep;
}

inline SimReport simulate(const Topology& t, const TimedSchedule& s) {
    auto ex = s.expand(t);
    SimReport rep = simulate_moves(t, ex.moves);
    rep.total_slots = std::max(rep.total_slots, ex.total_slots);
    rep.delays_inserted = s.delays_inserted;
    rep.deliveries = std::move(ex.deliveries);
    return rep;
}

/// Property 1: every router launching the same vector produces a permutation
/// of the routers with zero link conflicts.
struct Property1Result {
    bool permutation = false;
    int conflicts = 0;
};

inline Round full_round(const Topology& t, const std::vector<SourceVector>& vecs) {
    Round r;
    r.launches.reserve(static_cast<size_t>(t.router_count()) * vecs.size());
    for (int i = 0; i < t.router_count(); ++i)
        for (const SourceVector& v : vecs) r.launches.push_back(Launch{t.coord(i), v});
    return r;
}

inline Property1Result verify_property1(const Topology& t, const SourceVector& v,
                                        GlobalZero zmode = GlobalZero::Skip) {
    TimedSchedule s;
    s.zero_mode = zmode;
    s.rounds.push_back(TimedRound{full_round(t, {v}), 0});
    SimReport rep = simulate(t, s);
    std::vector<char> seen(t.router_count(), 0);
    bool perm = true;
    for (auto& [packet, dest] : rep.deliveries) {
        if (seen[dest]) perm = false;
        seen[dest] = 1;
    }
    for (char c : seen) perm = perm && c;
    return Property1Result{perm, static_cast<int>(rep.conflicts.size())};
}

/// Property 3: all routers launching two componentwise-distinct vectors
/// simultaneously stay conflict-free. Returns the observed conflict count.
inline int verify_property3(const Topology& t, const SourceVector& v, const SourceVector& w,
                            GlobalZero zmode = GlobalZero::Skip) {
    TimedSchedule s;
    s.zero_mode = zmode;
    s.rounds.push_back(TimedRound{full_round(t, {v, w}), 0});
    return static_cast<int>(simulate(t, s).conflicts.size());
}

/// Incremental conflict table used by the greedy delay-inserting pipeline.
class SlotMap {
public:
    explicit SlotMap(const Topology& t) : t_(&t) {}

    bool collides(const std::vector<PacketMove>& moves, int base) const {
        for (const PacketMove& m : moves) {
            if (m.channel.degenerate()) continue;
            if (used_.count({t_->channel_key(m.channel), m.slot + base})) return true;
        }
        return false;
    }
    void place(const std::vector<PacketMove>& moves, int base) {
        for (const PacketMove& m : moves)
            if (!m.channel.degenerate()) used_.insert({t_->channel_key(m.channel), m.slot + base});
    }

private:
    const Topology* t_;
    std::set<std::pair<long, int>> used_;
};

using DelayPolicy = std::function<bool(int round_index)>;

/// Assign base slots with the given stride. S2/S3 place rounds verbatim.
/// S1 requires a delay policy; when `lookahead` is set (the policy used by
/// the all-to-all generator), rounds are also shifted whenever their hops
/// would collide with anything already placed, one slot per shift.
inline TimedSchedule pipeline(const Topology& t, const std::vector<Round>& rounds,
                              PipelinePattern pattern, bool lookahead_delays = false,
                              GlobalZero zmode = GlobalZero::Skip) {
    if (pattern == PipelinePattern::S1 && !lookahead_delays)
        throw error("Schedule 1 requires a delay policy");
    const int stride = static_cast<int>(pattern);
    TimedSchedule out;
    out.zero_mode = zmode;
    SlotMap slots(t);
    int base = 0;
    bool first = true;
    for (const Round& r : rounds) {
        if (!first) base += stride;
        first = false;
        std::vector<PacketMove> moves;
        long packet = 0;
        for (const Launch& l : r.launches) {
            Path p = expand_vector(t, l.source, l.vec, zmode);
            for (int hop = 0; hop < 3; ++hop)
                if (p.hops[hop]) moves.push_back(PacketMove{packet, *p.hops[hop], hop});
            ++packet;
        }
        if (lookahead_delays) {
            while (slots.collides(moves, base)) {
                ++base;
                ++out.delays_inserted;
            }
        }
        slots.place(moves, base);
        out.rounds.push_back(TimedRound{r, base});
    }
    return out;
}

}  // namespace sdf
