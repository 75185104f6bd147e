#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "epiq/analytic.hpp"

namespace epiq {

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integer-support sample counts.
class EmpiricalDistribution {
  public:
    explicit EmpiricalDistribution(long support_start = 0) : support_start_(support_start) {}

    void add(long value, std::uint64_t n = 1);
    void merge(const EmpiricalDistribution& other);

    long support_start() const { return support_start_; }
    std::uint64_t total() const { return total_; }
    const std::map<long, std::uint64_t>& counts() const { return counts_; }
    double mean() const;
    double frequency(long k) const;
    long max_value() const; // throws if empty

  private:
    long support_start_;
    std::map<long, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

struct GofBin {
    long from;
    long to; // inclusive; kOpenTail marks the open right tail
    double observed;
    double expected;
    // two-sample reports carry the second sample here, unused otherwise
    double observed_b = 0.0;
    double expected_b = 0.0;

    static constexpr long kOpenTail = std::numeric_limits<long>::max();
};

struct GofReport {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
    std::vector<GofBin> bins;

    nlohmann::json to_json() const;
};

// Survival function of the chi-square distribution (regularized upper
// incomplete gamma), absolute error well below 1e-10.
double chi_square_sf(double statistic, int degrees_of_freedom);

// MLE of the geometric parameter on {1,2,...}: 1 / sample mean.
double geometric_mle(const EmpiricalDistribution& emp);

// Pearson chi-square test of emp against a fully specified pmf. Values are
// binned one-per-integer with a lumped open tail; bins are merged from the
// right until every expected count is >= 5. Degrees of freedom = bins - 1
// (the pmf's parameters are treated as known, not fitted from emp).
GofReport chi_square_gof(const EmpiricalDistribution& emp, const Pmf& pmf);

// Chi-square homogeneity test of two samples over their merged support.
// Expected counts come from the pooled proportions and must reach 5 in each
// sample within every bin; degrees of freedom = bins - 1.
GofReport two_sample_chi_square(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

// (1/2) sum_k |emp(k)/total - pmf(k)| over the union support, plus half the
// pmf's unmaterialized tail mass.
double total_variation(const EmpiricalDistribution& emp, const Pmf& pmf);

} // namespace epiq
