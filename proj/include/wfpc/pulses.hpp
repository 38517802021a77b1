#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "wfpc/tensor_core.hpp"

namespace wfpc {

// Uniform frequency grid ω_j = start + j·step, j = 0..count-1.
struct FrequencyGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    double at(std::size_t j) const { return start + static_cast<double>(j) * step; }
};

// Shaped weak field in the spectral domain: ε̃(ω_j) = λ·A_j·e^{iφ_j}.
//
// `delay` is a fixed time offset of the whole family; it is equivalent to an
// extra linear phase ω·delay but is kept separate so that phase masks stay
// centred on zero.
struct SpectralPulse {
    FrequencyGrid omega;
    std::vector<double> amplitude;
    std::vector<double> phase;
    double weak_scale = 1.0;
    double delay = 0.0;

    // Throws InvalidArgument when the grid or masks are malformed.
    void validate() const;
};

struct TimeField {
    std::vector<double> times;
    std::vector<Complex> values;
};

// Gaussian amplitude exp(-(ω-ω0)²/2σ²) on `bins` points spanning ω0 ± span·σ,
// with ω0 itself a grid point. Phase mask is zero.
SpectralPulse gaussian_pulse(double omega0, double sigma, std::size_t bins, double span_sigmas,
                             double weak_scale, double delay = 0.0);

// ε(t) = λ Σ_j A_j e^{iφ_j} e^{-iω_j (t - delay)} Δω.
Complex field_at(const SpectralPulse& p, double t);
TimeField to_time_domain(const SpectralPulse& p, std::span<const double> times);

enum class PhaseKind { Constant, Linear, Chirp, Random };

PhaseKind parse_phase_kind(std::string_view name);
std::string_view to_string(PhaseKind kind);

// Same-amplitude copies of `base` with phase masks
//   constant: φ = c_i, linear: φ = ω·τ_i, chirp: φ = ½ c2_i (ω - center)²,
//   random:   φ_j i.i.d. uniform on [0, 2π) per bin.
// Value kinds take one mask per entry of `values`; random uses `count` and `seed`.
std::vector<SpectralPulse> phase_family(const SpectralPulse& base, PhaseKind kind,
                                        std::span<const double> values, std::size_t count,
                                        std::uint64_t seed, double chirp_center = 0.0);

SpectralPulse scale_weak(const SpectralPulse& p, double weak_scale);

// Discrete Σ_j |λ A_j|² Δω.
double spectral_power(const SpectralPulse& p);

bool same_amplitude(const SpectralPulse& a, const SpectralPulse& b, double tol = 1e-14);

} // namespace wfpc
