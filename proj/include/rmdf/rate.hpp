#ifndef RMDF_RATE_HPP
#define RMDF_RATE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rmdf/rational.hpp"

namespace rmdf {

// One period of a cyclic token-count sequence.
using TokenSequence = std::vector<std::int64_t>;

// Number of tokens moved by the n-th job (n >= 1) on a channel with rate
// gamma and initial tokens init. Production is gamma > 0 and counts
// floor(n*gamma + r) - floor((n-1)*gamma + r) with r the fractional part of
// init; consumption is passed as gamma < 0 (mirroring the topology matrix)
// and counts ceil(n*|gamma| - r) - ceil((n-1)*|gamma| - r). The result is a
// non-negative token count either way.
std::int64_t tokens_at_job(std::int64_t job_index, const Rational& gamma, const Rational& init);

// Cumulative tokens moved by jobs 1..n; same conventions as tokens_at_job.
std::int64_t tokens_through_job(std::int64_t job_index, const Rational& gamma,
                                const Rational& init);

struct RateInit {
    Rational rate;
    Rational initial_tokens;
};

// Inverse direction of the bijection between (rate, initial tokens) and
// one-period sequences: rate = (sum of entries)/n, and the initial-token
// credit is the smallest value in {0, 1/n, ..., (n-1)/n} whose generated
// sequence matches. nullopt when no credit reproduces the sequence (the
// sequence is not generable by a single rational rate).
std::optional<RateInit> rate_init_from_production_sequence(const TokenSequence& seq);
std::optional<RateInit> rate_init_from_consumption_sequence(const TokenSequence& seq);

} // namespace rmdf

#endif
