#include "epiq/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace epiq {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kIterTol = 1e-12;
constexpr int kMaxFixedPointIters = 100'000;
constexpr double kPmfTailTol = 1e-12;
constexpr std::size_t kPmfMaxTerms = 1'000'000;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Appends a geometric tail head, head*ratio, head*ratio^2, ... until the
// pmf's accumulated mass reaches 1 - kPmfTailTol.
void append_geometric_tail(Pmf& pmf, double head, double ratio, double accumulated) {
    double term = head;
    while (accumulated < 1.0 - kPmfTailTol && pmf.probs.size() < kPmfMaxTerms && term > 0.0) {
        pmf.probs.push_back(term);
        accumulated += term;
        term *= ratio;
    }
}

} // namespace

ModelParams::ModelParams(double lambda_, double delta_, LifetimeSpec lifetime_)
    : lambda(lambda_), delta(delta_), lifetime(std::move(lifetime_)) {
    require(std::isfinite(lambda) && lambda >= 0.0, "ModelParams: lambda must be >= 0");
    require(std::isfinite(delta) && delta > 0.0, "ModelParams: delta must be > 0");
}

double Pmf::tail_mass() const {
    double sum = 0.0;
    for (double q : probs) sum += q;
    return sum < 1.0 ? 1.0 - sum : 0.0;
}

AnalyticSolution solve_pi(const ModelParams& params) {
    const auto step = [&](double x) {
        return params.lifetime.mgf(params.delta + params.lambda * (1.0 - x));
    };

    // From x0 = 0 the iterates increase monotonically to the smallest root.
    double x = 0.0;
    int iterations = 0;
    while (iterations < kMaxFixedPointIters) {
        const double next = step(x);
        ++iterations;
        const bool done = std::abs(next - x) <= kIterTol;
        x = next;
        if (done) break;
    }
    double residual = std::abs(step(x) - x);
    if (residual <= kResidualTol) {
        const double p = params.delta / (params.delta + (1.0 - x) * params.lambda);
        return {x, p, iterations, residual};
    }

    // Bisection fallback on g(x) = step(x) - x, bracketed by g(0) > 0 and
    // g(1) < 0.
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ++iterations;
        if (step(mid) - mid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    x = 0.5 * (lo + hi);
    residual = std::abs(step(x) - x);
    if (residual > kResidualTol)
        throw NonConvergence("solve_pi: residual above tolerance after bisection", residual,
                             iterations);
    const double p = params.delta / (params.delta + (1.0 - x) * params.lambda);
    return {x, p, iterations, residual};
}

double detection_size_param(const ModelParams& params) {
    return solve_pi(params).p;
}

Pmf geometric_pmf(double p, long support_start) {
    require(p > 0.0 && p <= 1.0, "geometric_pmf: need 0 < p <= 1");
    require(support_start == 0 || support_start == 1, "geometric_pmf: support_start must be 0 or 1");
    Pmf pmf;
    pmf.support_start = support_start;
    append_geometric_tail(pmf, p, 1.0 - p, 0.0);
    return pmf;
}

double markov_pi(double lambda, double delta, double mu) {
    require(lambda > 0.0 && delta > 0.0 && mu > 0.0, "markov_pi: rates must be > 0");
    const double s = mu + delta + lambda;
    const double root = std::sqrt(s * s - 4.0 * lambda * mu);
    // (s - root) / (2 lambda), rewritten to avoid cancellation
    return 2.0 * mu / (s + root);
}

double markov_p(double lambda, double delta, double mu) {
    require(lambda > 0.0 && delta > 0.0 && mu > 0.0, "markov_p: rates must be > 0");
    const double s = mu + delta + lambda;
    const double root = std::sqrt(s * s - 4.0 * lambda * mu);
    return 1.0 - 2.0 * lambda / (s + root);
}

double total_infected_param(double lambda, double delta) {
    require(lambda >= 0.0 && delta > 0.0, "total_infected_param: need lambda >= 0, delta > 0");
    return delta / (lambda + delta);
}

namespace {

// Extinction probability by time tau of a linear birth-death process from a
// single ancestor. Written around expm1 so the near-critical regime stays
// accurate; the exactly critical case uses its analytic limit.
double birth_death_q0(double lambda2, double mu, double tau) {
    if (tau == 0.0) return 0.0;
    if (lambda2 == mu) return lambda2 * tau / (1.0 + lambda2 * tau);
    const double r2 = lambda2 - mu;
    if (-r2 * tau > 700.0) return 1.0; // deep subcritical, long horizon
    const double e = -std::expm1(-r2 * tau); // 1 - exp(-r2 tau)
    return e / (r2 / mu + e);
}

} // namespace

Pmf birth_death_pmf(double lambda2, double mu, double tau) {
    require(lambda2 > 0.0 && mu > 0.0, "birth_death_pmf: rates must be > 0");
    require(std::isfinite(tau) && tau >= 0.0, "birth_death_pmf: tau must be >= 0");
    const double q0 = birth_death_q0(lambda2, mu, tau);
    const double ratio = (lambda2 / mu) * q0;
    Pmf pmf;
    pmf.support_start = 0;
    pmf.probs.push_back(q0);
    append_geometric_tail(pmf, (1.0 - q0) * (1.0 - ratio), ratio, q0);
    return pmf;
}

Pmf post_detection_pmf(double p1, double lambda2, double mu, double tau) {
    require(p1 > 0.0 && p1 <= 1.0, "post_detection_pmf: need 0 < p1 <= 1");
    require(lambda2 > 0.0 && mu > 0.0, "post_detection_pmf: rates must be > 0");
    require(std::isfinite(tau) && tau >= 0.0, "post_detection_pmf: tau must be >= 0");
    const double q0 = birth_death_q0(lambda2, mu, tau);
    const double denom = 1.0 - (1.0 - p1) * q0;
    const double p_zero = q0 * p1 / denom;
    const double rho = (1.0 - (lambda2 / mu) * q0) * p1 / denom;
    Pmf pmf;
    pmf.support_start = 0;
    pmf.probs.push_back(p_zero);
    append_geometric_tail(pmf, (1.0 - p_zero) * rho, 1.0 - rho, p_zero);
    return pmf;
}

} // namespace epiq
