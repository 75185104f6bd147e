#include "epiq/lifetimes.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

namespace epiq {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

bool finite_pos(double x) {
    return std::isfinite(x) && x > 0.0;
}

// E[exp(-s L)] for L lognormal(m, sd), integrated over the underlying normal
// variable. The integrand is smooth and effectively supported on |z| < 40.
// The root solver downstream needs this stable to ~1e-12, so an estimated
// error above 1e-10 is treated as a failure rather than returned quietly.
double lognormal_mgf(double m, double sd, double s) {
    constexpr double kInvSqrt2Pi = 0.398942280401432678;
    auto f = [=](double z) {
        return std::exp(-s * std::exp(m + sd * z)) * kInvSqrt2Pi * std::exp(-0.5 * z * z);
    };
    double error = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -40.0, 40.0, 15, 1e-12,
                                                                      &error);
    if (!(error <= 1e-10))
        throw std::runtime_error("lognormal mgf: quadrature error estimate above 1e-10");
    return v;
}

} // namespace

LifetimeSpec LifetimeSpec::exponential(double rate) {
    require(finite_pos(rate), "exponential lifetime: rate must be > 0");
    return {LifetimeKind::Exponential, rate, 0.0};
}

LifetimeSpec LifetimeSpec::deterministic(double value) {
    require(finite_pos(value), "deterministic lifetime: value must be > 0");
    return {LifetimeKind::Deterministic, value, 0.0};
}

LifetimeSpec LifetimeSpec::gamma(double shape, double scale) {
    require(finite_pos(shape) && finite_pos(scale), "gamma lifetime: shape and scale must be > 0");
    return {LifetimeKind::Gamma, shape, scale};
}

LifetimeSpec LifetimeSpec::uniform(double a, double b) {
    require(std::isfinite(a) && std::isfinite(b) && 0.0 <= a && a < b,
            "uniform lifetime: need 0 <= a < b");
    return {LifetimeKind::Uniform, a, b};
}

LifetimeSpec LifetimeSpec::lognormal(double log_mean, double log_sd) {
    require(std::isfinite(log_mean) && finite_pos(log_sd),
            "lognormal lifetime: log_sd must be > 0");
    return {LifetimeKind::LogNormal, log_mean, log_sd};
}

double LifetimeSpec::mean() const {
    switch (kind_) {
    case LifetimeKind::Exponential: return 1.0 / a_;
    case LifetimeKind::Deterministic: return a_;
    case LifetimeKind::Gamma: return a_ * b_;
    case LifetimeKind::Uniform: return 0.5 * (a_ + b_);
    case LifetimeKind::LogNormal: return std::exp(a_ + 0.5 * b_ * b_);
    }
    return 0.0;
}

double LifetimeSpec::sample(RandomSource& rng) const {
    switch (kind_) {
    case LifetimeKind::Exponential: return rng.exponential(a_);
    case LifetimeKind::Deterministic: return a_;
    case LifetimeKind::Gamma: return rng.gamma(a_, b_);
    case LifetimeKind::Uniform: return rng.uniform(a_, b_);
    case LifetimeKind::LogNormal: return rng.lognormal(a_, b_);
    }
    return 0.0;
}

double LifetimeSpec::mgf(double s) const {
    if (!(s >= 0.0)) throw std::invalid_argument("mgf: s must be >= 0");
    if (s == 0.0) return 1.0;
    switch (kind_) {
    case LifetimeKind::Exponential: return a_ / (a_ + s);
    case LifetimeKind::Deterministic: return std::exp(-s * a_);
    case LifetimeKind::Gamma: return std::exp(-a_ * std::log1p(s * b_));
    case LifetimeKind::Uniform:
        // exp(-sa) (1 - exp(-s(b-a))) / (s(b-a)), written to stay accurate
        // for small s(b-a)
        return std::exp(-s * a_) * (-std::expm1(-s * (b_ - a_))) / (s * (b_ - a_));
    case LifetimeKind::LogNormal: return lognormal_mgf(a_, b_, s);
    }
    return 0.0;
}

nlohmann::json LifetimeSpec::to_json() const {
    switch (kind_) {
    case LifetimeKind::Exponential: return {{"kind", "exponential"}, {"rate", a_}};
    case LifetimeKind::Deterministic: return {{"kind", "deterministic"}, {"value", a_}};
    case LifetimeKind::Gamma: return {{"kind", "gamma"}, {"shape", a_}, {"scale", b_}};
    case LifetimeKind::Uniform: return {{"kind", "uniform"}, {"a", a_}, {"b", b_}};
    case LifetimeKind::LogNormal:
        return {{"kind", "lognormal"}, {"log_mean", a_}, {"log_sd", b_}};
    }
    return {};
}

LifetimeSpec LifetimeSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw std::invalid_argument("lifetime: expected an object with a \"kind\" tag");
    const auto need = [&](const char* field) -> double {
        if (!j.contains(field) || !j[field].is_number())
            throw std::invalid_argument(std::string("lifetime: missing numeric field \"") + field +
                                        '"');
        return j[field].get<double>();
    };
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "exponential") return exponential(need("rate"));
    if (kind == "deterministic") return deterministic(need("value"));
    if (kind == "gamma") return gamma(need("shape"), need("scale"));
    if (kind == "uniform") return uniform(need("a"), need("b"));
    if (kind == "lognormal") return lognormal(need("log_mean"), need("log_sd"));
    throw std::invalid_argument("lifetime: unknown kind \"" + kind + '"');
}

std::string LifetimeSpec::describe() const {
    return to_json().dump();
}

double mgf_empirical(const LifetimeSpec& spec, double s, std::size_t n, RandomSource& rng) {
    if (n == 0) throw std::invalid_argument("mgf_empirical: n must be >= 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(-s * spec.sample(rng));
    return acc / static_cast<double>(n);
}

} // namespace epiq
