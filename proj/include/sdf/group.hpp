// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sdf {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite Abelian coordinate group. Elements are canonical ints in [0, order).
/// Cyclic groups add mod n; boolean groups (Z2^w) add by XOR.
class Group {
public:
    enum class Kind { Cyclic, Boolean };

    Group() = default;
    static Group cyclic(int order) {
        if (order < 1) throw error("cyclic group order must be >= 1");
        Group g;
        g.kind_ = Kind::Cyclic;
        g.order_ = order;
        return g;
    }
    static Group boolean(int bits) {
        if (bits < 0 || bits > 20) throw error("boolean group bits out of range");
        Group g;
        g.kind_ = Kind::Boolean;
        g.order_ = 1 << bits;
        g.bits_ = bits;
        return g;
    }

    Kind kind() const { return kind_; }
    int order() const { return order_; }
    int bits() const { return bits_; }

    int zero() const { return 0; }
    int add(int a, int b) const {
        check(a);
        check(b);
        return kind_ == Kind::Cyclic ? (a + b) % order_ : (a ^ b);
    }
    int neg(int a) const {
        check(a);
        return kind_ == Kind::Cyclic ? (order_ - a) % order_ : a;
    }
    int sub(int a, int b) const { return add(a, neg(b)); }

    std::vector<int> enumerate() const {
        std::vector<int> v(order_);
        for (int i = 0; i < order_; ++i) v[i] = i;
        return v;
    }

    /// True when the subset is a coset of a subgroup, i.e. closed under
    /// pairwise differences. Such subsets admit a position-independent
    /// port relabeling, which sub-network embedding requires.
    bool difference_closed(const std::vector<int>& subset) const {
        if (subset.empty()) return false;
        std::vector<char> in(order_, 0);
        for (int x : subset) {
            check(x);
            in[x] = 1;
        }
        const int s0 = subset[0];
        for (int a : subset)
            for (int b : subset)
                if (!in[add(sub(a, b), s0)]) return false;
        return true;
    }

    bool operator==(const Group&) const = default;

    std::string describe() const {
        return (kind_ == Kind::Cyclic ? "cyclic(" : "boolean(") + std::to_string(order_) + ")";
    }

private:
    void check(int a) const {
        if (a < 0 || a >= order_) throw error("group element out of range");
    }

    Kind kind_ = Kind::Cyclic;
    int order_ = 1;
    int bits_ = 0;
};

}  // namespace sdf
