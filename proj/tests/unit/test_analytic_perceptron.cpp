#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "risklab/analytic_perceptron.hpp"
#include "risklab/errors.hpp"
#include "risklab/random.hpp"
#include "risklab/special.hpp"

using namespace risklab;

namespace {

// Risk of a uniformly random direction: only cos(theta) = g0/|g| matters.
std::vector<double> sphere_risks(int p, double delta, std::size_t n, std::uint64_t seed) {
    auto rng = Rng::stream(seed, {});
    std::vector<double> out(n);
    for (auto& r : out) {
        double g0 = rng.normal(), norm2 = g0 * g0;
        for (int j = 1; j < p; ++j) {
            const double g = rng.normal();
            norm2 += g * g;
        }
        r = normal_cdf(-delta * g0 / std::sqrt(norm2));
    }
    return out;
}

}  // namespace

TEST_SUITE("analytic_perceptron") {
    TEST_CASE("perceptron risk") {
        CHECK(perceptron_risk(kPi / 2, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(perceptron_risk(0.0, 0.0) == 0.5);
        CHECK(perceptron_risk(0.0, 2.0) ==
              doctest::Approx(oracle::normal_cdf_series(-2.0)).epsilon(1e-13));
        CHECK(perceptron_risk(0.0, 2.0) == doctest::Approx(0.0227501).epsilon(1e-5));
        CHECK_THROWS_AS(perceptron_risk(-0.1, 1.0), DomainError);
        CHECK_THROWS_AS(perceptron_risk(4.0, 1.0), DomainError);
    }

    TEST_CASE("perceptron risk is complementary and monotone in theta") {
        double prev = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double theta = kPi * i / 100;
            const double r = perceptron_risk(theta, 1.7);
            CHECK(r + perceptron_risk(kPi - theta, 1.7) == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(r >= prev);
            prev = r;
        }
    }

    TEST_CASE("angle density") {
        CHECK(angle_density(0.3, 2) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
        for (int p : {2, 5, 50}) {
            const double total = oracle::simpson([p](double t) { return angle_density(t, p); }, 0.0,
                                                 kPi, 20000);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        }
        // p = 5: sin^3 normalised by its own quadrature
        const double norm = oracle::simpson([](double t) { return std::pow(std::sin(t), 3); }, 0.0,
                                            kPi, 20000);
        CHECK(angle_density(kPi / 4, 5) ==
              doctest::Approx(std::pow(std::sin(kPi / 4), 3) / norm).epsilon(1e-10));
        CHECK_THROWS_AS(angle_density(1.0, 1), DomainError);
    }

    TEST_CASE("risk entropy values and domain") {
        auto spec = GaussianClassSpec::make(50, 2.0);
        CHECK(risk_entropy(0.5, spec) == 0.0);
        CHECK(risk_entropy(0.5, GaussianClassSpec::make(7, 0.3)) == 0.0);
        CHECK_THROWS_AS(risk_entropy(0.01, spec), DomainError);  // below Phi(-2)
        CHECK_THROWS_AS(risk_entropy(0.99, spec), DomainError);
        CHECK_THROWS_AS(risk_entropy(0.5, GaussianClassSpec::make(5, 0.0)), DomainError);
        for (double r : {0.03, 0.1, 0.27, 0.44}) {
            CHECK(risk_entropy(r, spec) == doctest::Approx(risk_entropy(1 - r, spec)).epsilon(1e-9));
        }
    }

    TEST_CASE("risk entropy against a histogram of random sphere directions") {
        // log(density(0.25)/density(0.5)) from bin counts, p = 50, delta = 2
        const auto spec = GaussianClassSpec::make(50, 2.0);
        const auto risks = sphere_risks(50, 2.0, 2'000'000, 11);
        const double half = 0.005;
        double near_quarter = 0, near_half = 0;
        for (double r : risks) {
            if (std::abs(r - 0.25) < half) ++near_quarter;
            if (std::abs(r - 0.5) < half) ++near_half;
        }
        const double measured = std::log(near_quarter / near_half);
        const double sigma = std::sqrt(1.0 / near_quarter + 1.0 / near_half);
        const double expected = risk_entropy(0.25, spec) - risk_entropy(0.5, spec);
        CHECK(std::abs(measured - expected) < 3 * sigma + 0.01);
    }

    TEST_CASE("per-feature limit is approached at large p") {
        const auto spec = GaussianClassSpec::make(10000, 2.0);
        for (double r : {0.05, 0.2, 0.4}) {
            CHECK(risk_entropy(r, spec) / spec.p ==
                  doctest::Approx(risk_entropy_per_feature_limit(r, 2.0)).epsilon(1e-3));
        }
    }

    TEST_CASE("risk entropy derivative matches finite differences") {
        const auto spec = GaussianClassSpec::make(20, 2.0);
        for (double r : {0.05, 0.2, 0.45, 0.7}) {
            const double h = 1e-6;
            const double fd = (risk_entropy(r + h, spec) - risk_entropy(r - h, spec)) / (2 * h);
            CHECK(risk_entropy_derivative(r, spec) == doctest::Approx(fd).epsilon(1e-6));
        }
    }

    TEST_CASE("risk density normalisation and consistency") {
        const auto spec = GaussianClassSpec::make(10, 1.0);
        boost::math::quadrature::tanh_sinh<double> ts;
        const double total =
            ts.integrate([&](double r) { return risk_density(r, spec); }, normal_cdf(-1.0),
                         normal_cdf(1.0));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
        for (double r : {0.2, 0.3, 0.6}) {
            CHECK(std::log(risk_density(r, spec)) - std::log(risk_density(0.5, spec)) ==
                  doctest::Approx(risk_entropy(r, spec) - risk_entropy(0.5, spec)).epsilon(1e-10));
        }
    }

    TEST_CASE("risk density against a Monte Carlo histogram") {
        const auto spec = GaussianClassSpec::make(6, 1.0);
        const auto risks = sphere_risks(6, 1.0, 1'000'000, 5);
        const double lo = normal_cdf(-1.0), hi = normal_cdf(1.0);
        constexpr int kBins = 10;
        std::vector<double> counts(kBins, 0.0);
        for (double r : risks) {
            int b = static_cast<int>((r - lo) / (hi - lo) * kBins);
            counts[static_cast<std::size_t>(std::clamp(b, 0, kBins - 1))] += 1;
        }
        boost::math::quadrature::tanh_sinh<double> ts;
        const double n = static_cast<double>(risks.size());
        for (int b = 0; b < kBins; ++b) {
            const double a = lo + (hi - lo) * b / kBins, c = lo + (hi - lo) * (b + 1) / kBins;
            const double mass = ts.integrate([&](double r) { return risk_density(r, spec); }, a, c);
            const double sigma = std::sqrt(n * mass * (1 - mass));
            CHECK(std::abs(counts[static_cast<std::size_t>(b)] - n * mass) < 3 * sigma);
        }
    }

    TEST_CASE("log density slope near the minimum risk") {
        const auto spec = GaussianClassSpec::make(7, 1.0);
        const double rmin = spec.min_risk();
        const double x1 = 1e-6, x2 = 1e-4;
        const double slope = (std::log(risk_density(rmin + x2, spec)) -
                              std::log(risk_density(rmin + x1, spec))) /
                             (std::log(x2) - std::log(x1));
        CHECK(slope == doctest::Approx(2.0).epsilon(1e-3));
    }

    TEST_CASE("exact Boltzmann risk") {
        const auto spec = GaussianClassSpec::make(20, 2.0);
        CHECK(boltzmann_risk_exact(0.0, spec) == doctest::Approx(0.5).epsilon(1e-12));

        // Independent route: tanh-sinh on numerator and denominator.
        boost::math::quadrature::tanh_sinh<double> ts;
        const double beta = 50.0;
        auto lw = [&](double t) {
            return -beta * normal_cdf(-2.0 * std::cos(t)) + 18.0 * std::log(std::sin(t));
        };
        const double shift = lw(0.4);
        const double den = ts.integrate([&](double t) { return std::exp(lw(t) - shift); }, 0.0, kPi);
        const double num = ts.integrate(
            [&](double t) { return normal_cdf(-2.0 * std::cos(t)) * std::exp(lw(t) - shift); }, 0.0,
            kPi);
        CHECK(boltzmann_risk_exact(beta, spec) == doctest::Approx(num / den).epsilon(1e-7));

        // Low temperature: the excess over R_min is (p-1)/(2 beta) to leading order.
        const double big = 1e4;
        const double excess = boltzmann_risk_exact(big, spec) - spec.min_risk();
        CHECK(excess > 0.0);
        CHECK(excess <= 10 * (spec.p - 1) / (2 * big));
        CHECK(excess == doctest::Approx((spec.p - 1) / (2 * big)).epsilon(0.1));
    }

    TEST_CASE("exact Boltzmann risk is non-increasing in beta") {
        const auto spec = GaussianClassSpec::make(20, 2.0);
        double prev = 1.0;
        for (double beta : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 300.0, 1000.0, 3000.0}) {
            const double r = boltzmann_risk_exact(beta, spec);
            CHECK(r <= prev);
            prev = r;
        }
        CHECK_THROWS_AS(boltzmann_risk_exact(-1.0, spec), DomainError);
    }

    TEST_CASE("Hebbian closed form and asymptote") {
        const auto spec = GaussianClassSpec::make(100, 2.0);
        CHECK(hebbian_expected_risk(100, spec) ==
              doctest::Approx(oracle::normal_cdf_series(-2.0 / std::sqrt(1.25))).epsilon(1e-12));
        CHECK(hebbian_expected_risk(1e9, spec) == doctest::Approx(spec.min_risk()).epsilon(1e-6));
        CHECK(hebbian_expected_risk(10, GaussianClassSpec::make(100, 0.0)) == 0.5);
        CHECK_THROWS_AS(hebbian_expected_risk(0, spec), DomainError);

        CHECK(hebbian_expected_risk(1e6, spec) / hebbian_asymptote(1e6, spec) ==
              doctest::Approx(1.0).epsilon(1e-3));
        const double exact = hebbian_expected_risk(1000, spec);
        CHECK(std::abs(hebbian_asymptote(1000, spec) - exact) / exact < 0.01);
        // no noise directions
        GaussianClassSpec none = spec;
        none.p = 0;
        CHECK(hebbian_asymptote(10, none) == spec.min_risk());
    }

    TEST_CASE("Hebbian curve monotone in m and p") {
        for (double delta : {1.0, 2.0, 4.0}) {
            double prev_m = 1.0;
            for (double m : {1.0, 10.0, 100.0, 1000.0}) {
                const double r = hebbian_expected_risk(m, GaussianClassSpec::make(100, delta));
                CHECK(r <= prev_m);
                prev_m = r;
            }
            double prev_p = 0.0;
            for (int p : {10, 50, 100, 200}) {
                const double r = hebbian_expected_risk(100, GaussianClassSpec::make(p, delta));
                CHECK(r >= prev_p);
                prev_p = r;
            }
        }
    }

    TEST_CASE("Hebbian simulation") {
        const auto spec = GaussianClassSpec::make(100, 2.0);
        const auto sim = hebbian_simulate(500, spec, 100, 2024, 4);
        CHECK(std::abs(sim.mean_risk - hebbian_expected_risk(500, spec)) < 3 * sim.stderr_);

        const auto again = hebbian_simulate(500, spec, 100, 2024, 1);
        CHECK(again.run_risks == sim.run_risks);  // thread count does not matter
        CHECK(again.mean_risk == sim.mean_risk);

        const auto flat = hebbian_simulate(20, GaussianClassSpec::make(30, 0.0), 50, 3);
        CHECK(std::abs(flat.mean_risk - 0.5) <= 3 * flat.stderr_ + 1e-15);

        CHECK_THROWS_AS(hebbian_simulate(0, spec, 10, 1), DomainError);
        CHECK_THROWS_AS(hebbian_simulate(10, spec, 1, 1), DomainError);
    }
}
