#include "epiq/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

namespace epiq {

namespace {

constexpr double kMinExpected = 5.0;

} // namespace

void EmpiricalDistribution::add(long value, std::uint64_t n) {
    if (value < support_start_)
        throw std::invalid_argument("EmpiricalDistribution: value below support_start");
    if (n == 0) return;
    counts_[value] += n;
    total_ += n;
}

void EmpiricalDistribution::merge(const EmpiricalDistribution& other) {
    if (other.support_start_ < support_start_)
        throw std::invalid_argument("EmpiricalDistribution: merge would lower support_start");
    for (const auto& [value, n] : other.counts_) {
        counts_[value] += n;
        total_ += n;
    }
}

double EmpiricalDistribution::mean() const {
    if (total_ == 0) throw InsufficientData("EmpiricalDistribution: mean of empty sample");
    double acc = 0.0;
    for (const auto& [value, n] : counts_)
        acc += static_cast<double>(value) * static_cast<double>(n);
    return acc / static_cast<double>(total_);
}

double EmpiricalDistribution::frequency(long k) const {
    if (total_ == 0) return 0.0;
    const auto it = counts_.find(k);
    if (it == counts_.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total_);
}

long EmpiricalDistribution::max_value() const {
    if (counts_.empty()) throw InsufficientData("EmpiricalDistribution: empty sample");
    return counts_.rbegin()->first;
}

double chi_square_sf(double statistic, int degrees_of_freedom) {
    if (degrees_of_freedom < 1) throw std::invalid_argument("chi_square_sf: df must be >= 1");
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * degrees_of_freedom, 0.5 * statistic);
}

double geometric_mle(const EmpiricalDistribution& emp) {
    if (emp.support_start() != 1)
        throw std::invalid_argument("geometric_mle: defined for support {1,2,...}");
    if (emp.total() == 0) throw InsufficientData("geometric_mle: empty sample");
    return 1.0 / emp.mean();
}

namespace {

// Right-to-left pass merging any bin with expected mass below the floor into
// its left neighbour; a light leftmost bin is then folded into its right
// neighbour. Deterministic given the inputs.
template <typename BelowFloor, typename MergeInto>
void merge_light_bins(std::vector<GofBin>& bins, BelowFloor below, MergeInto fold) {
    for (std::size_t i = bins.size(); i-- > 1;) {
        if (below(bins[i])) {
            fold(bins[i - 1], bins[i]);
            bins[i - 1].to = bins[i].to;
            bins.erase(bins.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }
    if (!bins.empty() && below(bins.front()) && bins.size() >= 2) {
        fold(bins[1], bins[0]);
        bins[1].from = bins[0].from;
        bins.erase(bins.begin());
    }
}

double pearson_term(double observed, double expected) {
    const double d = observed - expected;
    return d * d / expected;
}

double count_at(const EmpiricalDistribution& emp, long k) {
    const auto it = emp.counts().find(k);
    return it == emp.counts().end() ? 0.0 : static_cast<double>(it->second);
}

} // namespace

GofReport chi_square_gof(const EmpiricalDistribution& emp, const Pmf& pmf) {
    if (emp.total() < 50) throw InsufficientData("chi_square_gof: need at least 50 samples");
    if (emp.support_start() < pmf.support_start)
        throw std::invalid_argument("chi_square_gof: sample support extends below pmf support");

    const double n = static_cast<double>(emp.total());

    // one bin per materialized value, plus the lumped open tail
    std::vector<GofBin> bins;
    bins.reserve(pmf.probs.size() + 1);
    double expected_head = 0.0;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        const long k = pmf.support_start + static_cast<long>(i);
        const double expected = n * pmf.probs[i];
        expected_head += expected;
        bins.push_back({k, k, count_at(emp, k), expected, 0.0, 0.0});
    }
    double tail_observed = 0.0;
    for (const auto& [value, count] : emp.counts())
        if (value > pmf.max_support()) tail_observed += static_cast<double>(count);
    bins.push_back({pmf.max_support() + 1, GofBin::kOpenTail, tail_observed,
                    std::max(0.0, n - expected_head), 0.0, 0.0});

    merge_light_bins(
        bins, [](const GofBin& b) { return b.expected < kMinExpected; },
        [](GofBin& into, const GofBin& from) {
            into.observed += from.observed;
            into.expected += from.expected;
        });

    if (bins.size() < 2)
        throw InsufficientData("chi_square_gof: fewer than 2 bins after merging; "
                               "raise the sample size");

    GofReport report;
    for (const auto& b : bins) report.statistic += pearson_term(b.observed, b.expected);
    report.degrees_of_freedom = static_cast<int>(bins.size()) - 1;
    report.p_value = chi_square_sf(report.statistic, report.degrees_of_freedom);
    report.bins = std::move(bins);
    return report;
}

GofReport two_sample_chi_square(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    if (a.total() < 50 || b.total() < 50)
        throw InsufficientData("two_sample_chi_square: need at least 50 samples in each");

    const long lo = std::min(a.counts().empty() ? a.support_start() : a.counts().begin()->first,
                             b.counts().empty() ? b.support_start() : b.counts().begin()->first);
    const long hi = std::max(a.max_value(), b.max_value());
    const double na = static_cast<double>(a.total());
    const double nb = static_cast<double>(b.total());

    std::vector<GofBin> bins;
    bins.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long k = lo; k <= hi; ++k) {
        const double oa = count_at(a, k);
        const double ob = count_at(b, k);
        const double pooled = (oa + ob) / (na + nb);
        bins.push_back({k, k, oa, na * pooled, ob, nb * pooled});
    }

    merge_light_bins(
        bins,
        [](const GofBin& bin) {
            return bin.expected < kMinExpected || bin.expected_b < kMinExpected;
        },
        [](GofBin& into, const GofBin& from) {
            into.observed += from.observed;
            into.expected += from.expected;
            into.observed_b += from.observed_b;
            into.expected_b += from.expected_b;
        });

    if (bins.size() < 2)
        throw InsufficientData("two_sample_chi_square: fewer than 2 bins after merging; "
                               "raise the sample sizes");

    GofReport report;
    for (const auto& bin : bins) {
        report.statistic += pearson_term(bin.observed, bin.expected);
        report.statistic += pearson_term(bin.observed_b, bin.expected_b);
    }
    report.degrees_of_freedom = static_cast<int>(bins.size()) - 1;
    report.p_value = chi_square_sf(report.statistic, report.degrees_of_freedom);
    report.bins = std::move(bins);
    return report;
}

double total_variation(const EmpiricalDistribution& emp, const Pmf& pmf) {
    if (emp.total() == 0) throw InsufficientData("total_variation: empty sample");
    double acc = 0.0;
    // materialized pmf support
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        const long k = pmf.support_start + static_cast<long>(i);
        acc += std::abs(emp.frequency(k) - pmf.probs[i]);
    }
    // sample values outside it
    for (const auto& [value, count] : emp.counts()) {
        if (value < pmf.support_start || value > pmf.max_support())
            acc += static_cast<double>(count) / static_cast<double>(emp.total());
    }
    return 0.5 * (acc + pmf.tail_mass());
}

nlohmann::json GofReport::to_json() const {
    nlohmann::json jbins = nlohmann::json::array();
    for (const auto& b : bins) {
        nlohmann::json jb{{"from", b.from}, {"observed", b.observed}, {"expected", b.expected}};
        if (b.to == GofBin::kOpenTail)
            jb["to"] = nullptr;
        else
            jb["to"] = b.to;
        if (b.observed_b != 0.0 || b.expected_b != 0.0) {
            jb["observed_b"] = b.observed_b;
            jb["expected_b"] = b.expected_b;
        }
        jbins.push_back(std::move(jb));
    }
    return {{"statistic", statistic},
            {"degrees_of_freedom", degrees_of_freedom},
            {"p_value", p_value},
            {"bins", std::move(jbins)}};
}

} // namespace epiq
