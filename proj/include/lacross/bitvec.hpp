#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lacross {

/// Fixed-length bit vector packed into 64-bit words.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVec from_bits(const std::vector<uint8_t>& bits) {
        BitVec v(bits.size());
        for (std::size_t i = 0; i < bits.size(); i++) {
            if (bits[i]) {
                v.set(i);
            }
        }
        return v;
    }

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i) { w_[i >> 6] |= uint64_t{1} << (i & 63); }
    void clear(std::size_t i) { w_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    void flip(std::size_t i) { w_[i >> 6] ^= uint64_t{1} << (i & 63); }
    void assign(std::size_t i, bool v) {
        if (v) {
            set(i);
        } else {
            clear(i);
        }
    }

    void xor_in(const BitVec& other) {
        if (other.n_ != n_) {
            throw std::invalid_argument("BitVec size mismatch in xor_in");
        }
        for (std::size_t k = 0; k < w_.size(); k++) {
            w_[k] ^= other.w_[k];
        }
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (uint64_t w : w_) {
            c += static_cast<std::size_t>(std::popcount(w));
        }
        return c;
    }

    bool any() const {
        for (uint64_t w : w_) {
            if (w) {
                return true;
            }
        }
        return false;
    }

    /// Parity of AND with another vector (GF(2) dot product).
    bool dot(const BitVec& other) const {
        if (other.n_ != n_) {
            throw std::invalid_argument("BitVec size mismatch in dot");
        }
        uint64_t acc = 0;
        for (std::size_t k = 0; k < w_.size(); k++) {
            acc ^= w_[k] & other.w_[k];
        }
        return std::popcount(acc) & 1;
    }

    std::vector<uint32_t> ones() const {
        std::vector<uint32_t> out;
        for (std::size_t i = 0; i < n_; i++) {
            if (get(i)) {
                out.push_back(static_cast<uint32_t>(i));
            }
        }
        return out;
    }

    bool operator==(const BitVec& other) const { return n_ == other.n_ && w_ == other.w_; }

    const std::vector<uint64_t>& words() const { return w_; }

  private:
    std::size_t n_ = 0;
    std::vector<uint64_t> w_;
};

}  // namespace lacross
