// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "sdf/engine.hpp"

namespace sdf {

/// Coset partition of Z_n by the subgroup generated by s, plus the dual
/// partition formed by the columns of the coset display. Coset [t] and dual
/// cell j intersect in exactly one element, t + j*s.
struct CosetTable {
    int n = 0;
    int s = 0;
    std::vector<std::vector<int>> cosets;      // s rows of n/s elements
    std::vector<std::vector<int>> dual_cells;  // n/s cells of s elements
};

inline CosetTable coset_partition(int n, int s) {
    if (s < 1 || n < 1 || n % s != 0) throw error("stride must divide the group order");
    CosetTable t;
    t.n = n;
    t.s = s;
    t.cosets.assign(s, {});
    t.dual_cells.assign(n / s, {});
    for (int c = 0; c < s; ++c)
        for (int j = 0; j < n / s; ++j) t.cosets[c].push_back(c + j * s);
    for (int j = 0; j < n / s; ++j)
        for (int c = 0; c < s; ++c) t.dual_cells[j].push_back(j * s + c);
    return t;
}

/// An s-column table of coset labels over the gamma/pi/delta rows. The pi
/// row is cyclically left-shifted mu places and the delta row nu places.
/// Any two vectors drawn from different columns differ in all three
/// components; the s*s shifted arrays are pairwise vector-disjoint.
struct DisagreeableArray {
    int K = 0, M = 0, s = 0;
    int mu = 0, nu = 0;
    int k() const { return K / s; }
    int m() const { return M / s; }

    int gamma_coset(int col) const { return col % s; }
    int pi_coset(int col) const { return (col + mu) % s; }
    int delta_coset(int col) const { return (col + nu) % s; }
};

inline DisagreeableArray build_da(int K, int M, int s, int mu, int nu) {
    if (s < 1 || K % s != 0 || M % s != 0) throw error("s must divide both K and M");
    if (mu < 0 || mu >= s || nu < 0 || nu >= s) throw error("shift out of range");
    return DisagreeableArray{K, M, s, mu, nu};
}

/// Selector lambda = a + b*m + c*m^2 picks entry c of each gamma coset,
/// a of each pi coset and b of each delta coset.
struct RoundSelector {
    int a = 0, b = 0, c = 0;
    static RoundSelector from_lambda(long lambda, int k, int m) {
        if (lambda < 0 || lambda >= static_cast<long>(k) * m * m)
            throw error("selector out of range");
        return RoundSelector{static_cast<int>(lambda % m), static_cast<int>((lambda / m) % m),
                             static_cast<int>(lambda / (static_cast<long>(m) * m))};
    }
};

inline std::vector<SourceVector> round_vectors(const DisagreeableArray& da,
                                               const RoundSelector& sel) {
    if (sel.a < 0 || sel.a >= da.m() || sel.b < 0 || sel.b >= da.m() || sel.c < 0 ||
        sel.c >= da.k())
        throw error("selector out of range");
    std::vector<SourceVector> out;
    out.reserve(da.s);
    for (int col = 0; col < da.s; ++col) {
        SourceVector v;
        v.gamma = da.gamma_coset(col) + sel.c * da.s;
        v.pi = da.pi_coset(col) + sel.a * da.s;
        v.delta = da.delta_coset(col) + sel.b * da.s;
        out.push_back(v);
    }
    return out;
}

struct RoundSpec {
    int mu, nu, a, b, c;
};

/// Round order: shifts phi = mu + nu*s outermost, then the selector with a
/// innermost -- except that within each (b,c) block the a = b selector runs
/// last. The natural ascending order makes consecutive rounds share a
/// pi/delta dual cell (a_i = b_{i+1}) which collides under a stride-2
/// pipeline; rotating a = b to the back removes every such adjacency while
/// keeping the per-array delay structure of the stride-1 schedule intact.
inline std::vector<RoundSpec> da_round_sequence(int K, int M, int s) {
    if (s < 1 || K % s != 0 || M % s != 0) throw error("s must divide both K and M");
    const int k = K / s, m = M / s;
    std::vector<RoundSpec> seq;
    seq.reserve(static_cast<size_t>(s) * s * k * m * m);
    for (int phi = 0; phi < s * s; ++phi) {
        const int mu = phi % s, nu = phi / s;
        for (int c = 0; c < k; ++c)
            for (int b = 0; b < m; ++b) {
                for (int a = 0; a < m; ++a)
                    if (a != b) seq.push_back(RoundSpec{mu, nu, a, b, c});
                seq.push_back(RoundSpec{mu, nu, b, b, c});
            }
    }
    return seq;
}

struct A2AResult {
    TimedSchedule schedule;
    std::vector<Round> rounds;
    int round_count = 0;
};

/// The doubly-parallel all-to-all on D3(ks, ms): KM^2/s rounds of s
/// simultaneous vectors per router, every vector of C x P x P used exactly
/// once. Global port 0 is traversed explicitly so that the per-source
/// destination map is a bijection. Stride-1 and stride-2 pipelines insert
/// look-ahead delays where placed hops would collide (stride 2 needs them
/// only when m = 1).
inline A2AResult doubly_parallel_schedule(const Topology& t, int s, PipelinePattern pattern) {
    const int K = t.K(), M = t.M();
    if (s < 1 || K % s != 0 || M % s != 0) throw error("s must divide both K and M");
    if (pattern == PipelinePattern::S1 && 2 * s > M)
        throw error("Schedule 1 requires s <= M/2");
    A2AResult res;
    for (const RoundSpec& rs : da_round_sequence(K, M, s)) {
        DisagreeableArray da = build_da(K, M, s, rs.mu, rs.nu);
        auto vecs = round_vectors(da, RoundSelector{rs.a, rs.b, rs.c});
        res.rounds.push_back(full_round(t, vecs));
    }
    res.round_count = static_cast<int>(res.rounds.size());
    const bool lookahead = pattern != PipelinePattern::S3;
    res.schedule = pipeline(t, res.rounds, pattern, lookahead, GlobalZero::Swap);
    return res;
}

/// All-to-all among n = X*KM^2 nodes: X^2 repetitions of the base schedule,
/// appended after one another.
inline A2AResult blocked_a2a(const Topology& t, int s, long n, PipelinePattern pattern) {
    const long base_nodes = static_cast<long>(t.router_count());
    if (n < base_nodes || n % base_nodes != 0) throw error("n must be a multiple of KM^2");
    const long X = n / base_nodes;
    A2AResult single = doubly_parallel_schedule(t, s, pattern);
    A2AResult res;
    for (long rep = 0; rep < X * X; ++rep)
        res.rounds.insert(res.rounds.end(), single.rounds.begin(), single.rounds.end());
    res.round_count = static_cast<int>(res.rounds.size());
    const bool lookahead = pattern != PipelinePattern::S3;
    res.schedule = pipeline(t, res.rounds, pattern, lookahead, GlobalZero::Swap);
    return res;
}

/// Ordered-pair delivery counts for a simulated schedule.
inline std::vector<long> delivery_matrix(const Topology& t, const TimedSchedule& s) {
    std::vector<long> counts(static_cast<size_t>(t.router_count()) * t.router_count(), 0);
    long packet = 0;
    for (const TimedRound& tr : s.rounds)
        for (const Launch& l : tr.round.launches) {
            Path p = expand_vector(t, l.source, l.vec, s.zero_mode);
            counts[static_cast<size_t>(t.id(l.source)) * t.router_count() + p.destination]++;
            ++packet;
        }
    return counts;
}

/// Sub-network plan for running the doubly-parallel algorithm when K and M
/// are coprime. Candidates are the full network with s dividing gcd(K,M)
/// and proper sub-networks J < K, L < M with a common factor s; both
/// restricted to s <= (drawer order)/2 so every pipeline pattern stays
/// usable. Minimizes (JL^2/s) * (KM^2/JL^2)^2, the fractional-load round
/// estimate.
struct EmulationPlan {
    int J = 0, L = 0, s = 1;
    double rounds_estimate = 0.0;  // fractional-load estimate
    long rounds_integer = 0;       // executable count with integer ceilings
    bool profitable = false;
};

inline EmulationPlan plan_emulation(int K, int M) {
    const double full = static_cast<double>(K) * M * M;
    EmulationPlan best;
    best.J = K;
    best.L = M;
    best.s = 1;
    best.rounds_estimate = full;
    best.rounds_integer = static_cast<long>(full);
    auto consider = [&](int J, int L, int s) {
        if (s < 2 || J % s != 0 || L % s != 0) return;
        if (2 * s > L) return;
        const double sub = static_cast<double>(J) * L * L;
        const double load = full / sub;
        const double estimate = (sub / s) * load * load;
        const long X = static_cast<long>(std::ceil(load));
        const long integer_rounds = static_cast<long>(sub / s) * X * X;
        if (estimate < best.rounds_estimate - 1e-9) {
            best = EmulationPlan{J, L, s, estimate, integer_rounds, true};
        }
    };
    for (int s = 2; s <= std::min(K, M); ++s)
        if (K % s == 0 && M % s == 0) consider(K, M, s);
    for (int J = 2; J < K; ++J)
        for (int L = 2; L < M; ++L)
            for (int s = 2; s <= std::min(J, L); ++s) consider(J, L, s);
    if (!best.profitable || best.rounds_estimate >= full) {
        best = EmulationPlan{K, M, 1, full, static_cast<long>(full), false};
    }
    return best;
}

inline std::string schedule_csv(const A2AResult& res) {
    std::ostringstream os;
    os << "round,column,gamma,pi,delta\n";
    for (size_t r = 0; r < res.schedule.rounds.size(); ++r) {
        const Round& round = res.schedule.rounds[r].round;
        // One launch set per router; report the distinct vectors (column order).
        std::vector<SourceVector> vecs;
        for (const Launch& l : round.launches) {
            if (std::find(vecs.begin(), vecs.end(), l.vec) == vecs.end()) vecs.push_back(l.vec);
        }
        for (size_t col = 0; col < vecs.size(); ++col)
            os << r << "," << col << "," << vecs[col].gamma << "," << vecs[col].pi << ","
               << vecs[col].delta << "\n";
    }
    return os.str();
}

}  // namespace sdf
