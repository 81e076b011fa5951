#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ltm/errors.hpp"
#include "ltm/thresholds.hpp"
#include "support.hpp"

using namespace ltm;

namespace {

double normal_density(double x, double mean, double tau) {
    const double z = (x - mean) / tau;
    return std::exp(-0.5 * z * z);
}

// Composite Simpson over [0, 1] with 20000 panels.
template <class F>
double integrate01(F f) {
    const int m = 20000;
    const double h = 1.0 / m;
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < m; ++i) s += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

struct Moments {
    double mass, mean, sd;
};

Moments truncated_moments(double mean, double tau) {
    const double z = integrate01([&](double x) { return normal_density(x, mean, tau); });
    const double m1 = integrate01([&](double x) { return x * normal_density(x, mean, tau); }) / z;
    const double m2 = integrate01([&](double x) { return x * x * normal_density(x, mean, tau); }) / z;
    return {z, m1, std::sqrt(m2 - m1 * m1)};
}

double sample_mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("closed-form truncated std agrees with quadrature") {
    for (double tau : {0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 3.0}) {
        CHECK(truncated_std(tau) == doctest::Approx(truncated_moments(0.5, tau).sd).epsilon(1e-9));
        // Symmetric special case: tau^2 (1 + 2 a pdf(a) / Z), a = -0.5 / tau.
        const double a = -0.5 / tau;
        const double pdf = std::exp(-0.5 * a * a) / std::sqrt(2 * M_PI);
        const double z = std::erf(-a / std::sqrt(2.0));
        CHECK(truncated_std(tau) == doctest::Approx(tau * std::sqrt(1 + 2 * a * pdf / z)).epsilon(1e-12));
    }
    // Asymmetric placement of the mean.
    for (double mean : {0.2, 0.7}) {
        const auto m = truncated_moments(mean, 0.25);
        CHECK(truncated_std(0.25, mean) == doctest::Approx(m.sd).epsilon(1e-9));
    }
}

TEST_CASE("solve_tau inverts the truncated std") {
    SUBCASE("sigma 0.2 integrates back to 0.200") {
        const double tau = solve_tau(0.2, 1e-13);
        CHECK(std::abs(truncated_moments(0.5, tau).sd - 0.2) < 1e-4);
        CHECK(std::abs(truncated_std(tau) - 0.2) < 1e-10);
    }
    SUBCASE("monotone and vanishing towards zero") {
        double prev = 0.0;
        for (double s : {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.25, 0.28}) {
            const double tau = solve_tau(s);
            CHECK(tau > prev);
            prev = tau;
        }
        CHECK(solve_tau(1e-4) < 2e-4);
    }
    SUBCASE("density approaches uniform near the upper end") {
        auto distance = [](double sigma) {
            const double tau = solve_tau(sigma);
            const double z = integrate01([&](double x) { return normal_density(x, 0.5, tau); });
            double worst = 0.0;
            for (int i = 0; i <= 1000; ++i) {
                const double x = i / 1000.0;
                worst = std::max(worst, std::abs(normal_density(x, 0.5, tau) / z - 1.0));
            }
            return worst;
        };
        // Quadrature value at 0.28: the density still sags about 14% at the edges.
        const double at_028 = distance(0.28);
        CHECK(at_028 > 0.13);
        CHECK(at_028 < 0.15);
        double prev = 1e9;
        for (double s : {0.25, 0.27, 0.28, 0.285, 0.288}) {
            const double d = distance(s);
            CHECK(d < prev);
            prev = d;
        }
        CHECK(prev < 0.02);
    }
    CHECK_THROWS_AS(solve_tau(0.0), ParameterError);
    CHECK_THROWS_AS(solve_tau(0.3), ParameterError);
}

TEST_CASE("spec kinds from sigma") {
    CHECK(ThresholdSpec::from_sigma(0.0).kind == ThresholdKind::identical);
    CHECK(ThresholdSpec::from_sigma(0.2).kind == ThresholdKind::truncated_normal);
    CHECK(ThresholdSpec::from_sigma(0.2887).kind == ThresholdKind::uniform);
    CHECK(ThresholdSpec::from_sigma(kUniformSigma).kind == ThresholdKind::uniform);
    CHECK_THROWS_AS(ThresholdSpec::from_sigma(0.3), ParameterError);
    CHECK_THROWS_AS(ThresholdSpec::from_sigma(-0.1), ParameterError);
}

TEST_CASE("sampling") {
    SUBCASE("identical") {
        CHECK(sample_thresholds(ThresholdSpec::from_sigma(0.0), 5, 1) == std::vector<double>(5, 0.5));
    }
    SUBCASE("uniform moments") {
        const auto phi = sample_thresholds(ThresholdSpec::from_sigma(0.2887), 100000, 2);
        CHECK(std::abs(sample_sd(phi) - 0.2887) < 0.005);
        CHECK(std::all_of(phi.begin(), phi.end(), [](double x) { return x >= 0.0 && x <= 1.0; }));
    }
    SUBCASE("truncated normal moments") {
        const auto phi = sample_thresholds(ThresholdSpec::from_sigma(0.2), 100000, 3);
        CHECK(std::abs(sample_mean(phi) - 0.5) < 0.003);
        CHECK(std::abs(sample_sd(phi) - 0.2) < 0.003);
    }
    SUBCASE("deterministic per seed") {
        const auto spec = ThresholdSpec::from_sigma(0.15);
        CHECK(sample_thresholds(spec, 1000, 7) == sample_thresholds(spec, 1000, 7));
        CHECK(sample_thresholds(spec, 1000, 7) != sample_thresholds(spec, 1000, 8));
    }
    SUBCASE("Kolmogorov-Smirnov against the integrated CDF") {
        for (double sigma : {0.1, 0.2, 0.27}) {
            const auto spec = ThresholdSpec::from_sigma(sigma);
            auto phi = sample_thresholds(spec, 10000, 4);
            std::sort(phi.begin(), phi.end());
            // Tabulated CDF by cumulative Simpson on a fine grid.
            const int m = 20000;
            std::vector<double> cdf(m + 1, 0.0);
            for (int i = 0; i < m; ++i) {
                const double a = static_cast<double>(i) / m, b = static_cast<double>(i + 1) / m;
                const double mid = 0.5 * (a + b);
                cdf[i + 1] = cdf[i] + (b - a) / 6.0 *
                                          (normal_density(a, 0.5, spec.tau) + 4 * normal_density(mid, 0.5, spec.tau) +
                                           normal_density(b, 0.5, spec.tau));
            }
            for (double& c : cdf) c /= cdf[m];
            auto F = [&](double x) {
                const double pos = x * m;
                const int i = std::min(m - 1, static_cast<int>(pos));
                return cdf[i] + (cdf[i + 1] - cdf[i]) * (pos - i);
            };
            double d = 0.0;
            const double n = static_cast<double>(phi.size());
            for (std::size_t i = 0; i < phi.size(); ++i) {
                const double f = F(phi[i]);
                d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
            }
            CHECK(d < 1.628 / std::sqrt(n));
        }
    }
}

TEST_CASE("resistance ceiling") {
    CHECK(resistance(0.5, 4) == 2);
    CHECK(resistance(0.5, 5) == 3);
    CHECK(resistance(0.0, 7) == 0);
    CHECK(resistance(1.0, 7) == 7);
    CHECK(resistance(0.1, 30) == 3);  // 0.1 * 30 is 3.0000000000000004 in binary
    CHECK(resistance(0.7, 10) == 7);
    CHECK(resistance(0.3, 0) == 0);
    CHECK_THROWS_AS(resistance(1.5, 3), ParameterError);
    CHECK_THROWS_AS(resistance(-0.1, 3), ParameterError);

    // Every exact fraction j/k maps back to j.
    for (std::size_t k = 1; k <= 200; ++k)
        for (std::size_t j = 0; j <= k; ++j)
            REQUIRE(resistance(static_cast<double>(j) / static_cast<double>(k), k) == static_cast<int>(j));

    Rng rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100000; ++t) {
        const double phi = u(rng);
        const std::size_t k = 1 + rng() % 60;
        const int r = resistance(phi, k);
        const double kk = static_cast<double>(k);
        REQUIRE(r / kk >= phi - 1e-9);
        REQUIRE((r - 1) / kk < phi);
        REQUIRE(r <= static_cast<int>(k));
    }

    const Graph g = testing::star(4);
    CHECK(resistances(g, std::vector<double>(5, 0.5)) == std::vector<int>{2, 1, 1, 1, 1});
    CHECK_THROWS_AS(resistances(g, std::vector<double>(4, 0.5)), ParameterError);
}

TEST_CASE("threshold files") {
    const auto file = std::filesystem::temp_directory_path() / "ltm_test_phi.txt";
    const auto phi = sample_thresholds(ThresholdSpec::from_sigma(0.2), 500, 12);
    save_thresholds(phi, file);
    CHECK(load_thresholds(file) == phi);

    std::ofstream(file) << "# comment\n1 0.25\n0 0.75\n";
    CHECK(load_thresholds(file) == std::vector<double>{0.75, 0.25});
    std::ofstream(file) << "0 0.5\n0 0.5\n";
    CHECK_THROWS_AS(load_thresholds(file), ParseError);
    std::ofstream(file) << "0 1.5\n";
    CHECK_THROWS_AS(load_thresholds(file), ParseError);
    std::ofstream(file) << "0 0.5\n2 0.5\n";
    CHECK_THROWS_AS(load_thresholds(file), ParseError);
    std::filesystem::remove(file);
}
