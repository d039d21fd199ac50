#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "irg/errors.hpp"
#include "irg/sampler.hpp"

namespace irg {

// Disjoint sets with union by size and path compression.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)),
                                size_(static_cast<std::size_t>(n), 1),
                                components_(n) {
        if (n < 1) throw input_error("union-find needs at least one element");
        for (int i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
    }

    int find(int x) {
        int root = x;
        while (parent_[static_cast<std::size_t>(root)] != root)
            root = parent_[static_cast<std::size_t>(root)];
        while (parent_[static_cast<std::size_t>(x)] != root) {
            int next = parent_[static_cast<std::size_t>(x)];
            parent_[static_cast<std::size_t>(x)] = root;
            x = next;
        }
        return root;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)])
            std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
        --components_;
        return true;
    }

    int component_count() const { return components_; }
    int size_of(int x) { return size_[static_cast<std::size_t>(find(x))]; }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    int components_;
};

struct ComponentSummary {
    int n = 0;
    std::vector<int> component_sizes;  // descending
    bool is_connected = false;
    int isolated_total = 0;                    // N
    std::optional<int> isolated_in_region;     // N_B, when a region was given
    std::map<int, int> size_spectrum;          // k -> N_k
};

inline ComponentSummary connected_components(const SampledGraph& g) {
    if (g.n < 1) throw input_error("component analysis needs n >= 1");
    UnionFind uf(g.n);
    for (auto [i, j] : g.edges) {
        if (i < 0 || j <= i || j >= g.n)
            throw input_error("edge endpoint out of range");
        uf.unite(i, j);
    }
    ComponentSummary s;
    s.n = g.n;
    std::vector<int> root_size(static_cast<std::size_t>(g.n), 0);
    for (int v = 0; v < g.n; ++v) ++root_size[static_cast<std::size_t>(uf.find(v))];
    for (int v = 0; v < g.n; ++v) {
        int sz = root_size[static_cast<std::size_t>(v)];
        if (sz > 0) s.component_sizes.push_back(sz);
    }
    std::sort(s.component_sizes.rbegin(), s.component_sizes.rend());
    s.is_connected = s.component_sizes.size() == 1;
    for (int sz : s.component_sizes) ++s.size_spectrum[sz];
    auto it = s.size_spectrum.find(1);
    s.isolated_total = it == s.size_spectrum.end() ? 0 : it->second;
    return s;
}

// Number of degree-0 vertices whose position satisfies the region predicate.
inline int isolated_in_region(const SampledGraph& g,
                              const std::function<bool(const Point&)>& region) {
    const std::vector<int> deg = degree_sequence(g);
    int count = 0;
    for (int v = 0; v < g.n; ++v)
        if (deg[static_cast<std::size_t>(v)] == 0 &&
            region(g.positions[static_cast<std::size_t>(v)]))
            ++count;
    return count;
}

inline int min_component_size(const ComponentSummary& s) {
    if (s.component_sizes.empty()) throw input_error("empty component summary");
    return s.component_sizes.back();
}

}  // namespace irg
