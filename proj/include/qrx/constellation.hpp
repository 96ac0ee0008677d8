#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace qrx {

using cdouble = std::complex<double>;

/// Set of coherent-state amplitudes the source can prepare, keyed by input
/// symbol. Amplitudes are dimensionless field amplitudes in shot-noise units
/// (quadrature convention q = a e^{-i theta} + a' e^{i theta}: a coherent
/// state |alpha> has quadrature mean 2 Re(alpha e^{-i theta}) and variance 1).
class Constellation {
public:
    Constellation(std::vector<std::uint32_t> labels, std::vector<cdouble> amplitudes);

    /// QPSK: alpha_x = alpha * exp(i x pi/2) for x in {0,1,2,3}.
    static Constellation qpsk(double alpha);

    /// QAM-16 on the 4x4 grid, scale = amplitude of the outermost corner
    /// point; inner levels at 1/3 scale. Labels 0..15 raster order
    /// (row-major, decreasing imaginary part, increasing real part).
    static Constellation qam16(double corner_amplitude);

    std::size_t size() const { return amplitudes_.size(); }
    const std::vector<std::uint32_t>& labels() const { return labels_; }
    const std::vector<cdouble>& amplitudes() const { return amplitudes_; }

    /// Index of a symbol label; throws std::out_of_range for unknown labels.
    std::size_t index_of(std::uint32_t label) const;
    cdouble amplitude(std::uint32_t label) const { return amplitudes_[index_of(label)]; }

private:
    std::vector<std::uint32_t> labels_;
    std::vector<cdouble> amplitudes_;
};

/// Matrix of pairwise coherent-state inner products G[i][j] = <alpha_i|alpha_j>.
struct GramMatrix {
    Eigen::MatrixXcd entries;

    /// Hermitian, unit diagonal, PSD (min eigenvalue >= -1e-10); throws otherwise.
    void validate() const;
    double min_eigenvalue() const;
};

/// <alpha|beta> = exp(-(|alpha|^2+|beta|^2)/2 + conj(alpha) beta).
cdouble coherent_overlap(cdouble alpha, cdouble beta);

/// Overlap between the states of two symbols of a constellation.
cdouble overlap(std::uint32_t x, std::uint32_t x2, const Constellation& c);

GramMatrix gram_matrix(const Constellation& c);

/// Effective single-mode amplitude of a coherent state occupying two temporal
/// modes: magnitude sqrt(|ae|^2+|al|^2), phase taken from the anti-symmetric
/// mode combination (ae - al)/|ae - al| (the convention in which the
/// anti-phase pair (a, -a) maps onto sqrt(2) a).
cdouble two_mode_combine(cdouble alpha_early, cdouble alpha_late);

/// Normalized mode coefficients (ce, cl) with ce*ae' + cl*al' defining the
/// combined mode; zero pair for the vacuum.
std::pair<cdouble, cdouble> two_mode_coefficients(cdouble alpha_early, cdouble alpha_late);

/// Quadrature of the anti-symmetric two-mode combination: (qe - ql)/sqrt(2).
double two_mode_quadrature(double q_early, double q_late);

}  // namespace qrx
