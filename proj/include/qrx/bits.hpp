#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qrx {

/// Packed bit string, most-significant-bit-first within each byte.
/// Bit 0 of the stream is the MSB of byte 0.
class PackedBits {
public:
    PackedBits() = default;
    explicit PackedBits(std::size_t nbits) : nbits_(nbits), bytes_((nbits + 7) / 8, 0) {}

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(std::size_t i) const {
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
    }
    void set(std::size_t i, bool v) {
        const std::uint8_t mask = std::uint8_t(1u << (7 - (i & 7)));
        if (v) bytes_[i >> 3] |= mask;
        else   bytes_[i >> 3] &= std::uint8_t(~mask);
    }
    void push_back(bool v) {
        if (nbits_ % 8 == 0) bytes_.push_back(0);
        ++nbits_;
        set(nbits_ - 1, v);
    }
    void append(const PackedBits& other) {
        for (std::size_t i = 0; i < other.size(); ++i) push_back(other.get(i));
    }

    /// 64 bits starting at bit i, MSB-first; zero-padded past the end.
    std::uint64_t word64(std::size_t i) const;

    std::size_t popcount() const;

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t>& bytes() { return bytes_; }

    /// Reinterpret a byte buffer as a bit string of nbits <= 8*bytes.size().
    static PackedBits from_bytes(std::vector<std::uint8_t> bytes, std::size_t nbits);

    bool operator==(const PackedBits& o) const {
        return nbits_ == o.nbits_ && bytes_ == o.bytes_;
    }

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint8_t> bytes_;
};

/// Whole-file packed-bit I/O (bit length = 8 * file size for reads).
PackedBits read_bits_file(const std::string& path);
void write_bits_file(const std::string& path, const PackedBits& bits);

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& data);

}  // namespace qrx
