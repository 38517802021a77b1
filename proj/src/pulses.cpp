#include "wfpc/pulses.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace wfpc {

void SpectralPulse::validate() const {
    if (omega.count == 0) throw InvalidArgument("pulse: empty frequency grid");
    if (!(omega.step > 0.0)) throw InvalidArgument("pulse: frequency spacing must be positive");
    if (amplitude.size() != omega.count || phase.size() != omega.count)
        throw InvalidArgument("pulse: mask length does not match frequency grid");
    for (double a : amplitude)
        if (a < 0.0 || !std::isfinite(a)) throw InvalidArgument("pulse: amplitude must be non-negative");
    if (!(weak_scale > 0.0)) throw InvalidArgument("pulse: weak_scale must be positive");
}

SpectralPulse gaussian_pulse(double omega0, double sigma, std::size_t bins, double span_sigmas,
                             double weak_scale, double delay) {
    if (bins < 2 || !(sigma > 0.0) || !(span_sigmas > 0.0))
        throw InvalidArgument("gaussian_pulse: need bins >= 2 and positive width and span");
    SpectralPulse p;
    p.omega.step = 2.0 * span_sigmas * sigma / static_cast<double>(bins);
    p.omega.start = omega0 - static_cast<double>(bins / 2) * p.omega.step;
    p.omega.count = bins;
    p.amplitude.resize(bins);
    for (std::size_t j = 0; j < bins; ++j) {
        const double x = (p.omega.at(j) - omega0) / sigma;
        p.amplitude[j] = std::exp(-0.5 * x * x);
    }
    p.phase.assign(bins, 0.0);
    p.weak_scale = weak_scale;
    p.delay = delay;
    p.validate();
    return p;
}

Complex field_at(const SpectralPulse& p, double t) {
    Complex acc{0.0, 0.0};
    const double s = t - p.delay;
    for (std::size_t j = 0; j < p.omega.count; ++j) {
        if (p.amplitude[j] == 0.0) continue;
        acc += std::polar(p.amplitude[j], p.phase[j] - p.omega.at(j) * s);
    }
    return p.weak_scale * p.omega.step * acc;
}

TimeField to_time_domain(const SpectralPulse& p, std::span<const double> times) {
    p.validate();
    if (times.empty()) throw InvalidArgument("to_time_domain: empty time grid");
    TimeField f;
    f.times.assign(times.begin(), times.end());
    f.values.reserve(times.size());
    for (double t : times) f.values.push_back(field_at(p, t));
    return f;
}

PhaseKind parse_phase_kind(std::string_view name) {
    if (name == "constant") return PhaseKind::Constant;
    if (name == "linear") return PhaseKind::Linear;
    if (name == "chirp") return PhaseKind::Chirp;
    if (name == "random") return PhaseKind::Random;
    throw InvalidArgument("unknown phase family kind '" + std::string(name) + "'");
}

std::string_view to_string(PhaseKind kind) {
    switch (kind) {
    case PhaseKind::Constant: return "constant";
    case PhaseKind::Linear: return "linear";
    case PhaseKind::Chirp: return "chirp";
    case PhaseKind::Random: return "random";
    }
    return "unknown";
}

std::vector<SpectralPulse> phase_family(const SpectralPulse& base, PhaseKind kind,
                                        std::span<const double> values, std::size_t count,
                                        std::uint64_t seed, double chirp_center) {
    base.validate();
    const std::size_t n = kind == PhaseKind::Random ? count : values.size();
    if (n < 2) throw InvalidArgument("phase_family: need at least two masks");

    std::vector<SpectralPulse> out(n, base);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
        auto& phase = out[i].phase;
        for (std::size_t j = 0; j < base.omega.count; ++j) {
            const double w = base.omega.at(j);
            switch (kind) {
            case PhaseKind::Constant: phase[j] = values[i]; break;
            case PhaseKind::Linear: phase[j] = w * values[i]; break;
            case PhaseKind::Chirp: phase[j] = 0.5 * values[i] * (w - chirp_center) * (w - chirp_center); break;
            case PhaseKind::Random: phase[j] = angle(rng); break;
            }
        }
    }
    return out;
}

SpectralPulse scale_weak(const SpectralPulse& p, double weak_scale) {
    if (!(weak_scale > 0.0)) throw InvalidArgument("scale_weak: scale must be positive");
    SpectralPulse out = p;
    out.weak_scale = weak_scale;
    return out;
}

double spectral_power(const SpectralPulse& p) {
    double acc = 0.0;
    for (double a : p.amplitude) acc += (p.weak_scale * a) * (p.weak_scale * a);
    return acc * p.omega.step;
}

bool same_amplitude(const SpectralPulse& a, const SpectralPulse& b, double tol) {
    if (a.amplitude.size() != b.amplitude.size()) return false;
    for (std::size_t j = 0; j < a.amplitude.size(); ++j)
        if (std::abs(a.weak_scale * a.amplitude[j] - b.weak_scale * b.amplitude[j]) > tol) return false;
    return true;
}

} // namespace wfpc
