#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace latgraph {

// Labeled simple undirected graph on vertices 0..n-1, adjacency kept as
// per-vertex bit rows so triangle counting is row-intersection popcount.
// Graphs are immutable once built; build through Graph::Builder.
class Graph {
public:
    class Builder;

    int n() const { return n_; }

    bool edge(int i, int j) const {
        if (i == j) return false;
        return (rows_[std::size_t(i) * words_ + std::size_t(j) / 64] >> (j % 64)) & 1u;
    }

    std::int64_t edge_count() const { return edges_; }

    int degree(int i) const {
        const std::uint64_t* r = row(i);
        std::int64_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(r[w]);
        return int(c);
    }

    // Number of vertex triples with all three edges present.
    std::int64_t triangle_count() const {
        if (n_ < 3) return 0;
        std::int64_t three_t = 0;
        for (int i = 0; i < n_; ++i) {
            const std::uint64_t* ri = row(i);
            for (int j = i + 1; j < n_; ++j) {
                if (!edge(i, j)) continue;
                const std::uint64_t* rj = row(j);
                for (std::size_t w = 0; w < words_; ++w)
                    three_t += std::popcount(ri[w] & rj[w]);
            }
        }
        // each triangle contributes its third vertex once per adjacent pair
        return three_t / 3;
    }

    // Number of two-edge paths: sum over vertices of C(deg,2).
    std::int64_t cherry_count() const {
        std::int64_t w = 0;
        for (int i = 0; i < n_; ++i) {
            std::int64_t dg = degree(i);
            w += dg * (dg - 1) / 2;
        }
        return w;
    }

    bool operator==(const Graph& o) const { return n_ == o.n_ && rows_ == o.rows_; }

    // Sorted list of edges (i<j), 0-based.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(std::size_t(edges_));
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (edge(i, j)) out.emplace_back(i, j);
        return out;
    }

    class Builder {
    public:
        explicit Builder(int n) : g_() {
            if (n < 0) throw std::invalid_argument("Graph: negative vertex count");
            g_.n_ = n;
            g_.words_ = std::size_t(n + 63) / 64;
            g_.rows_.assign(std::size_t(n) * g_.words_, 0);
        }
        void set(int i, int j) {
            if (i == j) throw std::invalid_argument("Graph: self-loop");
            if (i < 0 || j < 0 || i >= g_.n_ || j >= g_.n_)
                throw std::out_of_range("Graph: vertex index");
            std::uint64_t& wi = g_.rows_[std::size_t(i) * g_.words_ + std::size_t(j) / 64];
            if (!((wi >> (j % 64)) & 1u)) {
                wi |= std::uint64_t(1) << (j % 64);
                g_.rows_[std::size_t(j) * g_.words_ + std::size_t(i) / 64] |= std::uint64_t(1) << (i % 64);
                ++g_.edges_;
            }
        }
        bool get(int i, int j) const { return g_.edge(i, j); }
        Graph build() && { return std::move(g_); }

    private:
        Graph g_;
    };

    static Graph empty(int n) { return Builder(n).build(); }

    static Graph complete(int n) {
        Builder b(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) b.set(i, j);
        return std::move(b).build();
    }

    template <class Pairs>
    static Graph from_edges(int n, const Pairs& pairs) {
        Builder b(n);
        for (const auto& [i, j] : pairs) b.set(i, j);
        return std::move(b).build();
    }

private:
    Graph() = default;
    const std::uint64_t* row(int i) const { return rows_.data() + std::size_t(i) * words_; }

    int n_ = 0;
    std::size_t words_ = 0;
    std::int64_t edges_ = 0;
    std::vector<std::uint64_t> rows_;
};

inline std::int64_t edge_count(const Graph& g) { return g.edge_count(); }
inline std::int64_t triangle_count(const Graph& g) { return g.triangle_count(); }

// Signed triangle statistic T_s(G) = sum_{i<j<k} (e_ij-p)(e_ik-p)(e_jk-p).
// Expanding the product gives T - p*W + p^2 (n-2) m - p^3 C(n,3) where T is
// the triangle count, W the cherry count and m the edge count; this makes the
// statistic O(n^3/w) instead of a triple loop.
inline double signed_triangle_stat(const Graph& g, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("signed_triangle_stat: p outside [0,1]");
    const double n = g.n();
    if (g.n() < 3) return 0.0;
    const double t = double(g.triangle_count());
    const double w = double(g.cherry_count());
    const double m = double(g.edge_count());
    const double triples = n * (n - 1.0) * (n - 2.0) / 6.0;
    return t - p * w + p * p * (n - 2.0) * m - p * p * p * triples;
}

} // namespace latgraph
