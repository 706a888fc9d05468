#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "dynagree/errors.hpp"

namespace dynagree {

/// Process identifier, 0-based. File formats and DOT output use 1-based
/// labels; the conversion happens at the I/O boundary only.
using Process = int;

/// Set of processes over a fixed universe [0, n), backed by 64-bit words.
/// Intersection tests and unions are word-parallel, which keeps the pairwise
/// common-in-neighbor checks cheap even when run over millions of graphs.
class ProcessSet {
public:
    ProcessSet() = default;

    explicit ProcessSet(int universe)
        : n_(universe), words_((static_cast<std::size_t>(universe) + 63) / 64, 0) {
        if (universe < 0) throw DomainError("ProcessSet: negative universe");
    }

    int universe() const { return n_; }

    bool contains(Process p) const {
        check(p);
        return (words_[static_cast<std::size_t>(p) >> 6] >> (p & 63)) & 1u;
    }

    void insert(Process p) {
        check(p);
        words_[static_cast<std::size_t>(p) >> 6] |= std::uint64_t{1} << (p & 63);
    }

    void erase(Process p) {
        check(p);
        words_[static_cast<std::size_t>(p) >> 6] &= ~(std::uint64_t{1} << (p & 63));
    }

    int size() const {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }

    bool empty() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    bool intersects(const ProcessSet& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & other.words_[i]) return true;
        return false;
    }

    bool is_subset_of(const ProcessSet& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return false;
        return true;
    }

    ProcessSet& operator|=(const ProcessSet& other) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    ProcessSet& operator&=(const ProcessSet& other) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
        return *this;
    }

    friend bool operator==(const ProcessSet&, const ProcessSet&) = default;

    /// Visits members in ascending order.
    template <class F>
    void for_each(F&& fn) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                int b = std::countr_zero(w);
                fn(static_cast<Process>(i * 64 + static_cast<std::size_t>(b)));
                w &= w - 1;
            }
        }
    }

    std::vector<Process> to_vector() const {
        std::vector<Process> out;
        out.reserve(static_cast<std::size_t>(size()));
        for_each([&](Process p) { out.push_back(p); });
        return out;
    }

private:
    void check(Process p) const {
        if (p < 0 || p >= n_) throw DomainError("process id out of range");
    }

    int n_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace dynagree
