// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <map>
#include <set>

#include "sdf/topology.hpp"

using namespace sdf;

TEST_CASE("router counts") {
    REQUIRE(make_cyclic(2, 2).router_count() == 8);
    REQUIRE(make_cyclic(3, 5).router_count() == 75);
    Topology b = build_topology(Group::boolean(2), Group::boolean(2));
    REQUIRE(b.router_count() == 64);
}

TEST_CASE("degrees") {
    Topology t22 = make_cyclic(2, 2);
    for (int i = 0; i < t22.router_count(); ++i) {
        auto n = t22.neighbors(t22.coord(i));
        int locals = 0, globals = 0;
        for (const Channel& ch : n) (ch.kind == LinkKind::Local ? locals : globals)++;
        REQUIRE(locals == 1);
        REQUIRE(globals == 2);
    }
    Topology t35 = make_cyclic(3, 5);
    auto n = t35.neighbors(RouterCoord{1, 2, 3});
    int locals = 0, globals = 0;
    for (const Channel& ch : n) (ch.kind == LinkKind::Local ? locals : globals)++;
    REQUIRE(locals == 4);
    REQUIRE(globals == 3);
}

TEST_CASE("neighbors of the origin in D3(2,2)") {
    Topology t = make_cyclic(2, 2);
    auto n = t.neighbors(RouterCoord{0, 0, 0});
    REQUIRE(n.size() == 3);
    REQUIRE(n[0] == t.local_channel({0, 0, 0}, 1));
    REQUIRE(t.coord(n[0].to) == RouterCoord{0, 0, 1});
    // global 0 from (0,0,0) is the degenerate self-swap
    REQUIRE(n[1].kind == LinkKind::Global);
    REQUIRE(n[1].port == 0);
    REQUIRE(n[1].degenerate());
    REQUIRE(t.coord(n[2].to) == RouterCoord{1, 0, 0});
}

// Exhaustive channel enumeration oracle: apply the connectivity rules
// elementwise and check symmetry (every reversed channel exists).
TEST_CASE("channel symmetry and double-swap, exhaustive over small sizes") {
    for (int K = 2; K <= 4; ++K)
        for (int M = 2; M <= 4; ++M) {
            Topology t = make_cyclic(K, M);
            std::set<std::pair<int, int>> directed;
            for (const Channel& ch : t.all_channels()) directed.insert({ch.from, ch.to});
            for (const Channel& ch : t.all_channels())
                REQUIRE(directed.count({ch.to, ch.from}) == 1);
            // bidirectionality via reversed ports
            for (int i = 0; i < t.router_count(); ++i) {
                RouterCoord r = t.coord(i);
                for (const Channel& ch : t.neighbors(r)) {
                    RouterCoord mid = t.coord(ch.to);
                    Channel back = ch.kind == LinkKind::Local
                                       ? t.local_channel(mid, t.drawers().neg(ch.port))
                                       : t.global_channel(mid, t.cabinets().neg(ch.port));
                    REQUIRE(back.to == i);
                }
            }
        }
    Topology b = build_topology(Group::boolean(2), Group::boolean(2));
    std::set<std::pair<int, int>> directed;
    for (const Channel& ch : b.all_channels()) directed.insert({ch.from, ch.to});
    for (const Channel& ch : b.all_channels()) REQUIRE(directed.count({ch.to, ch.from}) == 1);
}

TEST_CASE("rejects tiny groups and unknown routers") {
    REQUIRE_THROWS_AS(make_cyclic(1, 4), error);
    Topology t = make_cyclic(2, 2);
    REQUIRE_THROWS_AS(t.neighbors(RouterCoord{2, 0, 0}), error);
    REQUIRE_THROWS_AS(t.local_channel(RouterCoord{0, 0, 0}, 0), error);
}

TEST_CASE("embedding D3(2,2) into D3(4,4)") {
    Topology big = make_cyclic(4, 4);
    Embedding e = embed_subnetwork(big, {0, 2}, {0, 2});
    REQUIRE(e.small.router_count() == 8);
    // every small channel maps to a distinct channel of the big network
    std::set<std::pair<int, int>> seen;
    for (const Channel& ch : e.small.all_channels()) {
        Channel m = e.map(ch);
        if (!m.degenerate()) REQUIRE(seen.insert({m.from, m.to}).second);
    }
}

TEST_CASE("identity embedding") {
    Topology t = make_cyclic(3, 3);
    Embedding e = embed_subnetwork(t, {0, 1, 2}, {0, 1, 2});
    for (int i = 0; i < t.router_count(); ++i) REQUIRE(t.id(e.map(t.coord(i))) == i);
}

TEST_CASE("non-closed subset rejected") {
    Topology t = make_cyclic(4, 4);
    REQUIRE_THROWS_AS(embed_subnetwork(t, {0, 2}, {0, 1}), error);
}

TEST_CASE("summary mentions counts") {
    Topology t = make_cyclic(3, 4);
    std::string s = t.summary();
    REQUIRE(s.find("routers 48") != std::string::npos);
}
