#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdergm {

// Dense binary adjacency matrix with bit-packed rows. No self-loops;
// undirected matrices stay symmetric because set() writes both triangles.
class Adjacency {
  public:
    Adjacency(int n, bool directed)
        : n_(n), directed_(directed), words_per_row_((n + 63) / 64),
          bits_(static_cast<std::size_t>(n) * words_per_row_, 0ull) {
        if (n < 2) throw std::invalid_argument("Adjacency: need at least 2 nodes");
    }

    int n() const { return n_; }
    bool directed() const { return directed_; }

    bool at(int i, int j) const {
        return (word(i, j >> 6) >> (j & 63)) & 1ull;
    }

    void set(int i, int j, bool value) {
        if (i == j) {
            if (value) throw std::invalid_argument("Adjacency: self-loops are not allowed");
            return;
        }
        set_bit(i, j, value);
        if (!directed_) set_bit(j, i, value);
    }

    // Count of nodes adjacent to both i and j (row intersection).
    // For directed matrices this intersects out-neighbourhoods.
    int common_neighbors(int i, int j) const {
        const std::uint64_t* ri = row_ptr(i);
        const std::uint64_t* rj = row_ptr(j);
        int c = 0;
        for (int w = 0; w < words_per_row_; ++w)
            c += __builtin_popcountll(ri[w] & rj[w]);
        return c;
    }

    int row_degree(int i) const {
        const std::uint64_t* r = row_ptr(i);
        int c = 0;
        for (int w = 0; w < words_per_row_; ++w) c += __builtin_popcountll(r[w]);
        return c;
    }

    bool operator==(const Adjacency& other) const {
        return n_ == other.n_ && directed_ == other.directed_ && bits_ == other.bits_;
    }
    bool operator!=(const Adjacency& other) const { return !(*this == other); }

    // Y or Y^T; turns a directed matrix into its undirected support.
    Adjacency symmetrized() const {
        Adjacency out(n_, false);
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (at(i, j) || at(j, i)) out.set(i, j, true);
        return out;
    }

    // Submatrix over the nodes flagged active, in registry order.
    Adjacency induced(const std::vector<bool>& active) const {
        if (static_cast<int>(active.size()) != n_)
            throw std::invalid_argument("Adjacency::induced: mask length mismatch");
        std::vector<int> keep;
        for (int i = 0; i < n_; ++i)
            if (active[i]) keep.push_back(i);
        if (keep.size() < 2)
            throw std::invalid_argument("Adjacency::induced: fewer than 2 active nodes");
        Adjacency out(static_cast<int>(keep.size()), directed_);
        for (std::size_t a = 0; a < keep.size(); ++a)
            for (std::size_t b = 0; b < keep.size(); ++b)
                if (a != b && at(keep[a], keep[b]))
                    out.set_bit(static_cast<int>(a), static_cast<int>(b), true);
        return out;
    }

  private:
    std::uint64_t word(int i, int w) const {
        return bits_[static_cast<std::size_t>(i) * words_per_row_ + w];
    }
    const std::uint64_t* row_ptr(int i) const {
        return bits_.data() + static_cast<std::size_t>(i) * words_per_row_;
    }
    void set_bit(int i, int j, bool value) {
        std::uint64_t& w = bits_[static_cast<std::size_t>(i) * words_per_row_ + (j >> 6)];
        const std::uint64_t mask = 1ull << (j & 63);
        if (value)
            w |= mask;
        else
            w &= ~mask;
    }

    int n_;
    bool directed_;
    int words_per_row_;
    std::vector<std::uint64_t> bits_;
};

// Ordered sequence of snapshots over a shared node registry. The active
// mask marks which registered nodes take part in each snapshot.
struct TemporalNetwork {
    std::vector<Adjacency> snapshots;
    std::vector<std::string> node_names;       // registry, index = node id
    std::vector<std::vector<bool>> active;     // one mask per snapshot
    std::vector<long long> times;              // original time labels, sorted

    int n_nodes() const { return static_cast<int>(node_names.size()); }
    int n_snapshots() const { return static_cast<int>(snapshots.size()); }

    bool directed() const {
        return snapshots.empty() ? true : snapshots.front().directed();
    }

    bool all_active() const {
        for (const auto& mask : active)
            for (bool a : mask)
                if (!a) return false;
        return true;
    }

    void validate() const {
        if (snapshots.size() != active.size())
            throw std::invalid_argument("TemporalNetwork: mask count != snapshot count");
        for (const auto& y : snapshots) {
            if (y.n() != n_nodes())
                throw std::invalid_argument("TemporalNetwork: snapshot size != registry size");
            if (y.directed() != directed())
                throw std::invalid_argument("TemporalNetwork: snapshots disagree on directedness");
        }
        for (const auto& mask : active)
            if (static_cast<int>(mask.size()) != n_nodes())
                throw std::invalid_argument("TemporalNetwork: mask length != registry size");
    }
};

}  // namespace sdergm
