#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace qrx {

/// Source of trusted random bits. Consumption is metered so callers can
/// account for every input bit.
class BitSource {
public:
    virtual ~BitSource() = default;
    virtual bool next_bit() = 0;
    std::uint64_t bits_consumed() const { return consumed_; }

protected:
    std::uint64_t consumed_ = 0;
};

/// Deterministic bits from a seeded mersenne-twister stream (test/simulation use).
class SeededBitSource final : public BitSource {
public:
    explicit SeededBitSource(std::uint64_t seed) : eng_(seed) {}
    bool next_bit() override {
        if (left_ == 0) { buf_ = eng_(); left_ = 64; }
        bool b = (buf_ >> 63) & 1u;
        buf_ <<= 1;
        --left_;
        ++consumed_;
        return b;
    }

private:
    std::mt19937_64 eng_;
    std::uint64_t buf_ = 0;
    int left_ = 0;
};

/// Bits read from a raw seed file, MSB-first. Throws on exhaustion.
class FileBitSource final : public BitSource {
public:
    explicit FileBitSource(const std::string& path);
    explicit FileBitSource(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}
    bool next_bit() override;

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t pos_ = 0;
};

/// Standard-normal draws from an owned 64-bit engine (Marsaglia polar form,
/// implemented here so transcripts do not depend on libstdc++'s unspecified
/// normal_distribution algorithm).
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}
    double next();
    double uniform01() {  // in [0,1)
        return double(eng_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qrx
