#include "qrx/random_stream.hpp"

#include <cmath>
#include <stdexcept>

#include "qrx/bits.hpp"

namespace qrx {

FileBitSource::FileBitSource(const std::string& path) : bytes_(read_binary_file(path)) {}

bool FileBitSource::next_bit() {
    const std::uint64_t byte = pos_ >> 3;
    if (byte >= bytes_.size())
        throw std::runtime_error("random bit source exhausted after " +
                                 std::to_string(pos_) + " bits");
    bool b = (bytes_[byte] >> (7 - (pos_ & 7))) & 1u;
    ++pos_;
    ++consumed_;
    return b;
}

double NormalSampler::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

}  // namespace qrx
