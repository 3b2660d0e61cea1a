#include "rmdf/rate.hpp"

#include <numeric>

namespace rmdf {

std::int64_t tokens_through_job(std::int64_t job_index, const Rational& gamma,
                                const Rational& init) {
    if (gamma.is_zero()) throw rational_error("rate must be nonzero");
    if (job_index < 0) throw rational_error("job index must be >= 0");
    Rational r = init.frac();
    if (gamma > Rational(0))
        return (Rational(job_index) * gamma + r).floor();
    return (Rational(job_index) * gamma.abs() - r).ceil();
}

std::int64_t tokens_at_job(std::int64_t job_index, const Rational& gamma, const Rational& init) {
    if (job_index < 1) throw rational_error("job index must be >= 1");
    return tokens_through_job(job_index, gamma, init) -
           tokens_through_job(job_index - 1, gamma, init);
}

namespace {

std::optional<RateInit> invert_sequence(const TokenSequence& seq, bool production) {
    if (seq.empty()) return std::nullopt;
    std::int64_t n = static_cast<std::int64_t>(seq.size());
    std::int64_t total = std::accumulate(seq.begin(), seq.end(), std::int64_t(0));
    if (total <= 0) return std::nullopt;
    Rational rate(total, n);
    Rational signed_rate = production ? rate : -rate;
    for (std::int64_t k = 0; k < n; ++k) {
        Rational init(k, n);
        bool match = true;
        for (std::int64_t j = 1; j <= n && match; ++j)
            match = tokens_at_job(j, signed_rate, init) == seq[static_cast<std::size_t>(j - 1)];
        if (match) return RateInit{rate, init};
    }
    return std::nullopt;
}

} // namespace

std::optional<RateInit> rate_init_from_production_sequence(const TokenSequence& seq) {
    return invert_sequence(seq, true);
}

std::optional<RateInit> rate_init_from_consumption_sequence(const TokenSequence& seq) {
    return invert_sequence(seq, false);
}

} // namespace rmdf
