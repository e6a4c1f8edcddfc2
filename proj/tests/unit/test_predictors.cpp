#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "risklab/analytic_perceptron.hpp"
#include "risklab/datasets.hpp"
#include "risklab/errors.hpp"
#include "risklab/predictors.hpp"
#include "risklab/random.hpp"
#include "risklab/stats.hpp"

using namespace risklab;

namespace {

WeightVector unit(std::vector<double> v) {
    double n = 0;
    for (double x : v) n += x * x;
    for (double& x : v) x /= std::sqrt(n);
    return {v, WeightConstraint::unit_sphere};
}

LabelledDataset gaussian_features(std::size_t n, std::size_t p, int classes, std::uint64_t seed) {
    auto rng = Rng::stream(seed, {});
    LabelledDataset d;
    d.n = n;
    d.p = p;
    d.class_count = classes;
    d.features.resize(n * p);
    for (double& x : d.features) x = rng.normal();
    d.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.labels[i] = static_cast<int>(i % static_cast<std::size_t>(classes));
    return d;
}

}  // namespace

TEST_SUITE("predictors") {
    TEST_CASE("weight counts") {
        CHECK(weight_count(PredictorSpec::sphere_linear(100)) == 100);
        CHECK(weight_count(PredictorSpec::mlp(4, {3, 2})) == 23);
        CHECK(weight_count(PredictorSpec::mlp(3072, {768, 10})) == 2'367'754);
        CHECK(PredictorSpec::mlp(4, {3, 5}).class_count() == 5);
        CHECK(PredictorSpec::sphere_linear(3).class_count() == 2);
    }

    TEST_CASE("spec validation") {
        CHECK_THROWS_AS(PredictorSpec::sphere_linear(0), DomainError);
        CHECK_THROWS_AS(PredictorSpec::mlp(3, {}), DomainError);
        CHECK_THROWS_AS(PredictorSpec::mlp(3, {4, 1}), DomainError);
        CHECK_THROWS_AS(PredictorSpec::mlp(3, {0, 2}), DomainError);
    }

    TEST_CASE("weight checks") {
        const auto spec = PredictorSpec::sphere_linear(3);
        CHECK_NOTHROW(check_weights(spec, unit({1, 2, 3})));
        CHECK_THROWS_AS(check_weights(spec, {{1, 2, 3}, WeightConstraint::unit_sphere}), DomainError);
        CHECK_THROWS_AS(check_weights(spec, unit({1, 2})), DomainError);
        CHECK_THROWS_AS(check_weights(spec, {{1, 0, 0}, WeightConstraint::unconstrained}), DomainError);
    }

    TEST_CASE("sphere linear prediction") {
        const auto spec = PredictorSpec::sphere_linear(3);
        const std::vector<double> x{0.3, -1.2, 2.0};
        CHECK(predict(spec, unit(x), x) == 1);
        CHECK(predict(spec, unit({-0.3, 1.2, -2.0}), x) == 0);
        CHECK_THROWS_AS(predict(spec, unit(x), std::vector<double>{1.0, 2.0}), DomainError);
    }

    TEST_CASE("prediction is invariant to positive rescaling") {
        const auto spec = PredictorSpec::sphere_linear(5);
        const auto data = gaussian_features(200, 5, 2, 3);
        const auto w = random_weights(spec, 1.0, 8);
        WeightVector scaled{w.values, WeightConstraint::unconstrained};
        for (double& v : scaled.values) v *= 37.5;
        for (std::size_t i = 0; i < data.n; ++i) {
            // the unconstrained copy skips the norm check via a manual dot product
            double dot = 0;
            for (std::size_t j = 0; j < 5; ++j) dot += scaled.values[j] * data.row(i)[j];
            CHECK(predict(spec, w, data.row(i)) == (dot > 0 ? 1 : 0));
        }
    }

    TEST_CASE("mlp forward pass by hand") {
        const auto spec = PredictorSpec::mlp(3, {2, 2});
        // hidden rows (w0 w1 w2 bias), then output rows (h0 h1 bias)
        const WeightVector w{{1, -1, 0.5, 0.1, -2, 1, 1, 0, 1, 0, 0, 0, -1, 2.5},
                             WeightConstraint::unconstrained};
        REQUIRE(w.values.size() == weight_count(spec));
        // h = relu(0.6, 3) -> scores (0.6, -0.5)
        CHECK(predict(spec, w, std::vector<double>{1, 2, 3}) == 0);
        // h = relu(1.1, -2) = (1.1, 0) -> scores (1.1, 2.5)
        CHECK(predict(spec, w, std::vector<double>{1, 0, 0}) == 1);
    }

    TEST_CASE("mlp ties go to the lowest class") {
        const auto spec = PredictorSpec::mlp(4, {3, 5});
        const WeightVector zero{std::vector<double>(weight_count(spec), 0.0),
                                WeightConstraint::unconstrained};
        auto rng = Rng::stream(1, {});
        for (int k = 0; k < 20; ++k) {
            std::vector<double> x(4);
            for (double& v : x) v = rng.normal();
            CHECK(predict(spec, zero, x) == 0);
        }
    }

    TEST_CASE("empirical risk by hand") {
        LabelledDataset d;
        d.n = 5;
        d.p = 2;
        d.features = {1, 0, -1, 1, 0.5, -3, -2, 5, 0, 1};
        d.labels = {1, 1, 0, 0, 1};
        const auto spec = PredictorSpec::sphere_linear(2);
        const auto w = unit({1, 0});
        CHECK(empirical_risk(spec, w, d) == 3.0 / 5.0);
        CHECK(misclassified(spec, w, d) == 3);
        const std::vector<std::size_t> first_two{0, 1};
        CHECK(empirical_risk(spec, w, d, first_two) == 0.5);
        const std::vector<std::size_t> bad{7};
        CHECK_THROWS_AS(empirical_risk(spec, w, d, bad), DomainError);
    }

    TEST_CASE("self-labelled data has zero risk") {
        const auto spec = PredictorSpec::mlp(6, {5, 3});
        const auto w = random_weights(spec, 1.0, 12);
        auto data = gaussian_features(300, 6, 3, 4);
        for (std::size_t i = 0; i < data.n; ++i) data.labels[i] = predict(spec, w, data.row(i));
        CHECK(empirical_risk(spec, w, data) == 0.0);
    }

    TEST_CASE("constant predictor on a balanced set") {
        const auto spec = PredictorSpec::mlp(3, {4});
        const WeightVector zero{std::vector<double>(weight_count(spec), 0.0),
                                WeightConstraint::unconstrained};
        const auto data = gaussian_features(400, 3, 4, 9);
        CHECK(empirical_risk(spec, zero, data) == doctest::Approx(0.75).epsilon(1e-15));
    }

    TEST_CASE("random weights") {
        const auto sphere = PredictorSpec::sphere_linear(40);
        const auto w = random_weights(sphere, 3.0, 5);
        double norm = 0;
        for (double v : w.values) norm += v * v;
        CHECK(std::abs(std::sqrt(norm) - 1.0) <= 1e-10);
        CHECK(w.constraint == WeightConstraint::unit_sphere);
        CHECK(random_weights(sphere, 3.0, 5).values == w.values);
        CHECK(random_weights(sphere, 3.0, 6).values != w.values);
        CHECK_THROWS_AS(random_weights(sphere, 0.0, 5), DomainError);

        const auto mlp = PredictorSpec::mlp(10, {5, 2});
        const double scale = 0.7;
        std::vector<double> all;
        for (std::uint64_t s = 0; all.size() < 100'000; ++s) {
            const auto v = random_weights(mlp, scale, s);
            all.insert(all.end(), v.values.begin(), v.values.end());
        }
        const double n = static_cast<double>(all.size());
        double m = 0, m2 = 0;
        for (double v : all) {
            m += v;
            m2 += v * v;
        }
        m /= n;
        const double var = m2 / n - m * m;
        const double se = scale * scale * std::sqrt(2.0 / n);
        CHECK(std::abs(var - scale * scale) < 3 * se);
        CHECK(std::abs(m) < 3 * scale / std::sqrt(n));
    }

    TEST_CASE("random networks on balanced classes sit near chance") {
        const auto spec = PredictorSpec::mlp(5, {8, 4});
        const auto data = gaussian_features(2000, 5, 4, 21);
        std::vector<double> risks;
        for (std::uint64_t s = 0; s < 50; ++s) risks.push_back(empirical_risk(spec, random_weights(spec, 1.0, s), data));
        const auto est = mean_and_stderr(risks);
        CHECK(std::abs(est.mean - 0.75) < 3 * est.stderr_);
    }

    TEST_CASE("empirical risk of a separator converges to the exact risk") {
        const auto gspec = GaussianClassSpec::make(10, 1.5);
        const auto data = gen_gaussian_pair(gspec, 100'000, 77);
        const auto spec = PredictorSpec::sphere_linear(10);
        for (std::uint64_t s : {1u, 2u, 3u}) {
            const auto w = random_weights(spec, 1.0, s);
            const double theta = std::acos(w.values[0]);
            CHECK(std::abs(empirical_risk(spec, w, data) - perceptron_risk(theta, 1.5)) <
                  3.0 / std::sqrt(100'000.0));
        }
    }
}
