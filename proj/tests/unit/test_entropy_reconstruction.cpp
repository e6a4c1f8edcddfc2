#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <vector>

#include "risklab/analytic_perceptron.hpp"
#include "risklab/entropy_reconstruction.hpp"
#include "risklab/errors.hpp"
#include "risklab/gibbs.hpp"
#include "risklab/special.hpp"

using namespace risklab;

namespace {

BoltzmannCurve exact_curve(const std::vector<double>& betas, const GaussianClassSpec& spec) {
    BoltzmannCurve c;
    for (double b : betas) c.points.push_back({b, boltzmann_risk_exact(b, spec), 0.0, 1.0, 0.0});
    return c;
}

// Canonical entropy log Z(beta) + beta R(beta) relative to beta = 0, from
// tanh-sinh quadrature over the angle.
double canonical_entropy_gap(double beta, const GaussianClassSpec& spec) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double p = spec.p;
    auto log_w = [&](double t) { return (p - 2) * std::log(std::sin(t)); };
    const double peak = -beta * spec.min_risk();
    auto z = [&](double b, double shift) {
        return ts.integrate(
            [&](double t) {
                const double v = log_w(t) - b * normal_cdf(-spec.delta * std::cos(t)) - shift;
                return std::exp(v);
            },
            0.0, kPi);
    };
    const double log_z = std::log(z(beta, peak)) + peak;
    const double log_z0 = std::log(z(0.0, 0.0));
    return log_z - log_z0 + beta * boltzmann_risk_exact(beta, spec);
}

std::vector<double> geometric_grid(int n, double top) {
    std::vector<double> g{0.0};
    for (int i = 0; i < n - 1; ++i) g.push_back(top * std::pow(1e-3, 1.0 - i / double(n - 2)));
    return g;
}

double max_canonical_deviation(const std::vector<double>& grid, const GaussianClassSpec& spec) {
    const auto curve = reconstruct(exact_curve(grid, spec), 0.0);
    REQUIRE(curve.points.size() == grid.size());
    double worst = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        worst = std::max(worst, std::abs(curve.points[i].s - canonical_entropy_gap(grid[i], spec)));
    }
    return worst / std::abs(curve.points.back().s);
}

}  // namespace

TEST_SUITE("entropy_reconstruction") {
    TEST_CASE("trapezium arithmetic") {
        BoltzmannCurve c;
        c.points = {{0.0, 0.9, 0.01, 1, 0}, {10.0, 0.8, 0.01, 1, 0}};
        const auto e = reconstruct(c, 0.0);
        REQUIRE(e.points.size() == 2);
        CHECK(e.points[0].r == 0.9);
        CHECK(e.points[0].s == 0.0);
        CHECK(e.points[1].s == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(e.anchor_r == 0.9);
        CHECK(!e.pooled);

        BoltzmannCurve single;
        single.points = {{0.0, 0.9, 0.01, 1, 0}};
        const auto a = reconstruct(single, 1.5);
        REQUIRE(a.points.size() == 1);
        CHECK(a.points[0].s == 1.5);
    }

    TEST_CASE("anchor shift is a gauge") {
        const auto spec = GaussianClassSpec::make(20, 2.0);
        const auto curve = exact_curve({0, 1, 5, 20, 100}, spec);
        const auto a = reconstruct(curve, 0.0), b = reconstruct(curve, 7.25);
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK(b.points[i].s - a.points[i].s == doctest::Approx(7.25).epsilon(1e-14));
            CHECK(b.points[i].r == a.points[i].r);
        }
    }

    TEST_CASE("exact for piecewise linear slopes") {
        // s'(r) = 40 - 100 r above r = 0.3, 10 - 200 (r - 0.3) below; nodes at the kink
        auto slope = [](double r) { return r >= 0.3 ? 40.0 - 100.0 * r : 10.0 - 200.0 * (r - 0.3); };
        auto s_exact = [](double r) {
            auto upper = [](double x) { return 40.0 * x - 50.0 * x * x; };
            if (r >= 0.3) return upper(r) - upper(0.4);
            const double lower = 10.0 * (r - 0.3) - 100.0 * ((r - 0.3) * (r - 0.3));
            return upper(0.3) - upper(0.4) + lower;
        };
        const std::vector<double> rs{0.4, 0.35, 0.3, 0.25, 0.2};
        BoltzmannCurve c;
        for (double r : rs) c.points.push_back({slope(r), r, 0.0, 1, 0});
        const auto e = reconstruct(c, 0.0);
        for (std::size_t i = 0; i < rs.size(); ++i)
            CHECK(e.points[i].s == doctest::Approx(s_exact(rs[i])).epsilon(1e-13));
    }

    TEST_CASE("isotonic pooling of noisy risks") {
        BoltzmannCurve c;
        c.points = {{0, 0.50, 0.01, 1, 0}, {1, 0.45, 0.01, 1, 0}, {2, 0.46, 0.01, 1, 0}, {3, 0.40, 0.01, 1, 0}};
        const auto e = reconstruct(c, 0.0);
        CHECK(e.pooled);
        REQUIRE(e.points.size() == 3);
        CHECK(e.points[1].r == doctest::Approx(0.455));
        CHECK(e.points[1].pooled);
        CHECK(!e.points[2].pooled);
        for (std::size_t i = 1; i < e.points.size(); ++i) CHECK(e.points[i].r < e.points[i - 1].r);

        BoltzmannCurve bad;
        bad.points = {{1, 0.5, 0.01, 1, 0}, {1, 0.4, 0.01, 1, 0}};
        CHECK_THROWS_AS(reconstruct(bad, 0.0), DomainError);
        CHECK_THROWS_AS(reconstruct(BoltzmannCurve{}, 0.0), DomainError);
    }

    TEST_CASE("reconstruction converges to the canonical entropy") {
        const auto spec = GaussianClassSpec::make(20, 2.0);
        const double coarse = max_canonical_deviation(geometric_grid(24, 2000), spec);
        const double fine = max_canonical_deviation(geometric_grid(48, 2000), spec);
        const double finer = max_canonical_deviation(geometric_grid(192, 2000), spec);
        CHECK(fine < coarse);
        CHECK(finer < fine);
        CHECK(finer < 0.005);
    }

    TEST_CASE("quadratic fit") {
        EntropyCurve c;
        for (double r : {0.9, 0.7, 0.5, 0.3, 0.1}) c.points.push_back({r, 1 - 2 * r + 3 * r * r, 0, false});
        const auto f = quadratic_fit(c);
        CHECK(f.c0 == doctest::Approx(1).epsilon(1e-10));
        CHECK(f.c1 == doctest::Approx(-2).epsilon(1e-10));
        CHECK(f.c2 == doctest::Approx(3).epsilon(1e-10));
        CHECK(f.residual_rms < 1e-10);
        c.points.resize(2);
        CHECK_THROWS_AS(quadratic_fit(c), DomainError);

        const auto spec = GaussianClassSpec::make(20, 2.0);
        const auto e = reconstruct(exact_curve(geometric_grid(12, 2000), spec), 0.0);
        const auto pf = quadratic_fit(e);
        CHECK(std::isfinite(pf.residual_rms));
        CHECK(pf.residual_rms >= 0);
    }

    TEST_CASE("predicted annealed risk") {
        const auto spec = GaussianClassSpec::make(20, 2.0);
        const auto e = reconstruct(exact_curve(geometric_grid(24, 2000), spec), 0.0);
        CHECK(predicted_annealed_risk(e, 0.0) == doctest::Approx(e.anchor_r).epsilon(1e-9));

        const double predicted = predicted_annealed_risk(e, 200.0);
        const double closed = gibbs_risk_saddle([&](double r) { return risk_entropy_derivative(r, spec); },
                                                annealed_mu(200.0), {spec.min_risk() + 1e-12, 0.5});
        CHECK(std::abs(predicted - closed) < 0.02);

        double prev = 1.0;
        for (double m : {10.0, 100.0, 1000.0}) {
            const double r = predicted_annealed_risk(e, m);
            CHECK(r <= prev);
            prev = r;
        }
        // beyond the measured range the prediction stops at the lowest risk
        CHECK(predicted_annealed_risk(e, 1e7) == e.points.back().r);
        CHECK(predicted_annealed_risk(e, 1e7, true) < e.points.back().r);
    }
}
