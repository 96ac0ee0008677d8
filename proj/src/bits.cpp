#include "qrx/bits.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qrx {

std::uint64_t PackedBits::word64(std::size_t i) const {
    std::uint64_t w = 0;
    std::size_t byte = i >> 3;
    const unsigned shift = unsigned(i & 7);
    // gather 9 bytes, big-endian, then align
    for (std::size_t k = 0; k < 8; ++k) {
        std::uint64_t b = (byte + k < bytes_.size()) ? bytes_[byte + k] : 0;
        w = (w << 8) | b;
    }
    if (shift != 0) {
        std::uint64_t tail = (byte + 8 < bytes_.size()) ? bytes_[byte + 8] : 0;
        w = (w << shift) | (tail >> (8 - shift));
    }
    // mask out bits past the logical end
    if (i + 64 > nbits_) {
        const std::size_t valid = nbits_ > i ? nbits_ - i : 0;
        w &= valid == 0 ? 0 : (~std::uint64_t(0) << (64 - valid));
    }
    return w;
}

std::size_t PackedBits::popcount() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 8 <= bytes_.size(); i += 8) {
        std::uint64_t w;
        std::memcpy(&w, bytes_.data() + i, 8);
        n += std::size_t(std::popcount(w));
    }
    for (std::size_t i = bytes_.size() & ~std::size_t(7); i < bytes_.size(); ++i)
        n += std::size_t(std::popcount(unsigned(bytes_[i])));
    // trailing pad bits are kept zero by set()/push_back(), nothing to subtract
    return n;
}

PackedBits PackedBits::from_bytes(std::vector<std::uint8_t> bytes, std::size_t nbits) {
    if (nbits > bytes.size() * 8) throw std::invalid_argument("from_bytes: nbits exceeds buffer");
    PackedBits out;
    out.nbits_ = nbits;
    out.bytes_ = std::move(bytes);
    out.bytes_.resize((nbits + 7) / 8);
    if (nbits % 8 != 0 && !out.bytes_.empty())
        out.bytes_.back() &= std::uint8_t(0xFFu << (8 - nbits % 8));
    return out;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

PackedBits read_bits_file(const std::string& path) {
    auto data = read_binary_file(path);
    const std::size_t nbits = data.size() * 8;
    return PackedBits::from_bytes(std::move(data), nbits);
}

void write_bits_file(const std::string& path, const PackedBits& bits) {
    write_binary_file(path, bits.bytes());
}

}  // namespace qrx
