#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fogrid {

// Order of a differintegral: positive differentiates, negative integrates,
// zero is the identity. Restricted to [-2, 2].
class FracOrder {
public:
    constexpr FracOrder() = default;
    explicit FracOrder(double alpha);

    double value() const noexcept { return alpha_; }
    bool is_integer() const noexcept;
    bool is_identity() const noexcept { return alpha_ == 0.0; }

    friend bool operator==(FracOrder a, FracOrder b) noexcept { return a.alpha_ == b.alpha_; }

private:
    double alpha_ = 0.0;
};

inline constexpr std::size_t kDefaultMemory = 20000;

// Grünwald-Letnikov weights w_0..w_n, sign (-1)^j folded in:
// w_0 = 1, w_j = w_{j-1} * (1 - (alpha + 1) / j).
std::vector<double> gl_coefficients(double alpha, std::size_t n);

// Sample-by-sample GL differintegrator over a fixed step h.
//
// Fractional orders evaluate the short-memory sum
//     y_k = h^-alpha * sum_{j < min(k+1, mem_len)} w_j x_{k-j}
// against a mirrored ring buffer, so the window is always one contiguous
// span and the sum is a single dispatched dot product.
//
// Integer orders take exact shortcuts: 1 and 2 only touch the leading
// nonzero weights, -1 and -2 are running (double) sums over the whole
// record. The integer-integral weights never decay, so truncating them would
// turn an integrator into a moving-window sum.
class GLDifferintegrator {
public:
    GLDifferintegrator(FracOrder order, double h, std::size_t mem_len = kDefaultMemory);

    // Pushes x and returns the differintegral at the current sample.
    double step(double x);

    double last() const noexcept { return last_; }
    FracOrder order() const noexcept { return order_; }
    double h() const noexcept { return h_; }
    std::size_t memory() const noexcept { return mem_len_; }
    std::size_t history_size() const noexcept { return count_; }
    std::size_t samples_seen() const noexcept { return seen_; }
    std::span<const double> coefficients() const noexcept { return coeffs_; }

    void reset();

private:
    enum class Mode { Identity, Window, RunningSum, DoubleSum };

    FracOrder order_;
    double h_;
    std::size_t mem_len_;
    Mode mode_;
    double scale_;             // h^-alpha
    std::size_t active_len_;   // number of weights actually summed
    std::vector<double> coeffs_;
    std::vector<double> ring_; // 2 * mem_len, newest sample at ring_[pos_]
    std::size_t pos_ = 0;
    std::size_t count_ = 0;
    std::size_t seen_ = 0;
    double sum1_ = 0.0;
    double sum2_ = 0.0;
    double last_ = 0.0;
};

// One operator of order outer + inner. Used for D^{-2a} so the double
// integral is a single GL sum rather than two cascaded truncations.
GLDifferintegrator gl_compose(FracOrder outer, FracOrder inner, double h,
                              std::size_t mem_len = kDefaultMemory);

// Band-limited rational approximation of s^alpha:
//     H(s) = gain * prod_k (s + zeros[k]) / (s + poles[k]),  k = -N..N
// with zeros/poles spaced geometrically over [omega_b, omega_h].
// Discretized per section with the bilinear transform for stepping.
class OustaloupApprox {
public:
    FracOrder order() const noexcept { return order_; }
    double omega_b() const noexcept { return omega_b_; }
    double omega_h() const noexcept { return omega_h_; }
    int n_cells() const noexcept { return n_cells_; }
    double gain() const noexcept { return gain_; }
    const std::vector<double>& zeros() const noexcept { return zeros_; }
    const std::vector<double>& poles() const noexcept { return poles_; }

    // Continuous-time frequency response at omega (rad/s).
    std::complex<double> response(double omega) const;

    // Advances the discretized filter one sample. The first call fixes h;
    // a later call with a different h re-discretizes and clears the state.
    double step(double x, double h);

    // z-plane poles of the current discretization (empty before step()).
    std::vector<double> discrete_poles() const;

    void reset();

private:
    friend OustaloupApprox oustaloup_design(double, double, double, int);

    struct Section {
        double b0, b1, a1;
        double x_prev = 0.0;
        double y_prev = 0.0;
    };

    void discretize(double h);

    FracOrder order_;
    double omega_b_ = 0.0;
    double omega_h_ = 0.0;
    int n_cells_ = 0;
    double gain_ = 1.0;
    std::vector<double> zeros_;
    std::vector<double> poles_;
    double h_ = 0.0;
    std::vector<Section> sections_;
};

// Throws ConfigError unless 0 < omega_b < omega_h, n_cells >= 1 and
// 0 < |alpha| <= 1 (alpha = 0 is rejected rather than returning unity).
OustaloupApprox oustaloup_design(double alpha, double omega_b, double omega_h, int n_cells);

} // namespace fogrid
