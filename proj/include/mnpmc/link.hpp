#pragma once

// OOK modulation bookkeeping, threshold detection, and symbol error rate:
// the Poisson closed forms and the Monte Carlo estimate over simulated
// sequences.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mnpmc/channel_analytic.hpp"
#include "mnpmc/channel_sim.hpp"

namespace mnpmc {

struct LinkConfig {
    double symbol_duration;        ///< T, s
    double sample_offset;          ///< t0, s
    std::int64_t threshold;        ///< xi, counts
    std::int64_t n_tx;             ///< particles per pulse
    std::int64_t sequence_length;  ///< K, symbols

    void validate() const {
        if (!(symbol_duration > 0.0))
            throw std::invalid_argument("link.symbol_duration must be > 0");
        if (!(sample_offset > 0.0)) throw std::invalid_argument("link.sample_offset must be > 0");
        if (threshold < 1) throw std::invalid_argument("link.threshold must be >= 1");
        if (n_tx < 1) throw std::invalid_argument("link.n_tx must be >= 1");
        if (sequence_length < 1) throw std::invalid_argument("link.sequence_length must be >= 1");
    }
};

/// Threshold detector: 1 if the integer count reaches the threshold.
inline int detect(std::int64_t count, std::int64_t threshold) {
    if (count < 0) throw std::invalid_argument("detect requires count >= 0");
    if (threshold < 1) throw std::invalid_argument("detect requires threshold >= 1");
    return count >= threshold ? 1 : 0;
}

/// Detected bits, per-symbol error flags, and the empirical error fraction
/// of one sequence.
struct DetectionResult {
    std::vector<int> detected;
    std::vector<int> error_flags;
    double empirical_ser = 0.0;
};

inline DetectionResult detect_sequence(const std::vector<std::int64_t>& counts,
                                       const std::vector<int>& bits, std::int64_t threshold) {
    if (counts.size() != bits.size())
        throw std::invalid_argument("detect_sequence: counts and bits must have equal length");
    DetectionResult result;
    result.detected.reserve(counts.size());
    result.error_flags.reserve(counts.size());
    std::int64_t errors = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const int b = detect(counts[k], threshold);
        result.detected.push_back(b);
        const int wrong = b != bits[k] ? 1 : 0;
        result.error_flags.push_back(wrong);
        errors += wrong;
    }
    result.empirical_ser = static_cast<double>(errors) / static_cast<double>(counts.size());
    return result;
}

namespace detail {

// Impulse-response tap N(i T + t0) for lag i, looked up from a sampled
// response; the response must contain the exact lag times.
inline std::vector<double> link_taps(const ImpulseResponse& ir, const LinkConfig& link,
                                     std::size_t n_lags) {
    std::vector<double> taps(n_lags);
    for (std::size_t i = 0; i < n_lags; ++i) {
        const double target = static_cast<double>(i) * link.symbol_duration + link.sample_offset;
        bool found = false;
        for (std::size_t j = 0; j < ir.times.size(); ++j) {
            if (std::abs(ir.times[j] - target) <= 1e-9 * std::max(1.0, target)) {
                taps[i] = ir.counts[j];
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("impulse response not evaluable at lag time " +
                                        std::to_string(target));
    }
    return taps;
}

}  // namespace detail

/// Lag times i T + t0, i = 0 .. n_lags-1, at which the impulse response
/// must be sampled for sequence computations.
inline std::vector<double> link_lag_times(const LinkConfig& link, std::size_t n_lags) {
    std::vector<double> times(n_lags);
    for (std::size_t i = 0; i < n_lags; ++i) {
        times[i] = static_cast<double>(i) * link.symbol_duration + link.sample_offset;
    }
    return times;
}

/// Expected received counts under superposition:
/// n[k] = sum_{i<=k} b[i] N((k-i) T + t0).
inline std::vector<double> expected_counts(const std::vector<int>& bits,
                                           const ImpulseResponse& ir, const LinkConfig& link) {
    if (bits.empty()) throw std::invalid_argument("expected_counts requires nonempty bits");
    const auto taps = detail::link_taps(ir, link, bits.size());
    std::vector<double> out(bits.size(), 0.0);
    for (std::size_t k = 0; k < bits.size(); ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= k; ++i) {
            if (bits[i]) acc += taps[k - i];
        }
        out[k] = acc;
    }
    return out;
}

/// Poisson CDF P(N <= k) for mean lambda, by direct summation.
inline double poisson_cdf(std::int64_t k, double lambda) {
    if (k < 0) return 0.0;
    if (lambda == 0.0) return 1.0;
    double term = std::exp(-lambda);
    double acc = term;
    for (std::int64_t j = 1; j <= k; ++j) {
        term *= lambda / static_cast<double>(j);
        acc += term;
    }
    return std::min(acc, 1.0);
}

/// Per-sequence average symbol error probability under the Poisson count
/// approximation: p = P(N < xi) for b = 1 and 1 - p for b = 0.
inline double ser_poisson(const std::vector<int>& bits, const ImpulseResponse& ir,
                          const LinkConfig& link) {
    const auto means = expected_counts(bits, ir, link);
    double acc = 0.0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        const double p_below = poisson_cdf(link.threshold - 1, means[k]);
        acc += bits[k] ? p_below : 1.0 - p_below;
    }
    return acc / static_cast<double>(bits.size());
}

/// Closed-form SER without inter-symbol interference at threshold 1:
/// P_e = 1/2 e^{-N(t0)} for equiprobable bits.
inline double ser_no_isi(double n_ob_at_t0) {
    if (!(n_ob_at_t0 >= 0.0)) throw std::invalid_argument("ser_no_isi requires count >= 0");
    return 0.5 * std::exp(-n_ob_at_t0);
}

/// Empirical SER with a 95% confidence interval.
struct SerEstimate {
    double ser = 0.0;
    double ci_low = 0.0;  ///< Wilson score interval bounds
    double ci_high = 0.0;
    std::int64_t n_errors = 0;
    std::int64_t n_symbols = 0;

    /// Binomial standard error of the estimate.
    double standard_error() const {
        return std::sqrt(ser * (1.0 - ser) / static_cast<double>(n_symbols));
    }
};

/// Monte Carlo SER over random equiprobable sequences of length K. Each
/// sequence q gets its own derived seed for radii, noise, and bits, so the
/// estimate is reproducible independent of parallel scheduling.
inline SerEstimate ser_monte_carlo(const LinkConfig& link, const Scenario& scenario,
                                   const SimConfig& sim, std::int64_t n_sequences) {
    link.validate();
    scenario.validate();
    sim.validate();
    if (n_sequences < 1) throw std::invalid_argument("ser_monte_carlo requires n_sequences >= 1");

    const std::size_t n_symbols = static_cast<std::size_t>(link.sequence_length);
    std::vector<std::int64_t> errors(n_sequences, 0);

#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t q = 0; q < n_sequences; ++q) {
        auto bit_rng = substream(sim.seed, {stream_tag::sequence_bits,
                                            static_cast<std::uint64_t>(q)});
        std::vector<int> bits(n_symbols);
        for (auto& b : bits) b = static_cast<int>(bit_rng() & 1u);

        SimConfig seq_sim = sim;
        seq_sim.n_realizations = 1;
        seq_sim.seed = stream_seed(sim.seed, {stream_tag::ser_sequence,
                                              static_cast<std::uint64_t>(q)});
        const auto counts = simulate_sequence(bits, link.symbol_duration, link.sample_offset,
                                              static_cast<std::size_t>(link.n_tx), scenario,
                                              seq_sim);
        const auto detection = detect_sequence(counts, bits, link.threshold);
        std::int64_t e = 0;
        for (int flag : detection.error_flags) e += flag;
        errors[q] = e;
    }

    SerEstimate est;
    for (std::int64_t e : errors) est.n_errors += e;
    est.n_symbols = n_sequences * link.sequence_length;
    est.ser = static_cast<double>(est.n_errors) / static_cast<double>(est.n_symbols);

    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = static_cast<double>(est.n_symbols);
    const double denom = 1.0 + z * z / n;
    const double center = (est.ser + z * z / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(est.ser * (1.0 - est.ser) / n + z * z / (4.0 * n * n)) / denom;
    est.ci_low = std::max(0.0, center - half);
    est.ci_high = std::min(1.0, center + half);
    return est;
}

}  // namespace mnpmc
