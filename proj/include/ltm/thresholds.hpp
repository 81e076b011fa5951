#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ltm/graph.hpp"

namespace ltm {

/// Standard deviation of the uniform distribution on [0, 1].
inline constexpr double kUniformSigma = 0.28867513459481287;  // 1/sqrt(12)
/// sigma values at or above kUniformSigma - kUniformSnap are treated as uniform.
inline constexpr double kUniformSnap = 1e-6;
/// Largest accepted sigma: the four-digit rounding 0.2887 of 1/sqrt(12), plus slack.
inline constexpr double kMaxSigma = 0.2887 + 1e-6;

enum class ThresholdKind { identical, truncated_normal, uniform };

/// Threshold distribution on [0, 1]. `sigma` is the standard deviation of the
/// truncated distribution; `tau` is the width of the underlying normal
/// (only meaningful for truncated_normal).
struct ThresholdSpec {
    double mean = 0.5;
    double sigma = 0.0;
    ThresholdKind kind = ThresholdKind::identical;
    double tau = 0.0;

    /// Picks the kind from sigma: 0 -> identical, ~1/sqrt(12) -> uniform,
    /// anything in between -> truncated normal with tau solved for sigma.
    static ThresholdSpec from_sigma(double sigma, double mean = 0.5);
};

/// Standard deviation of Normal(mean, tau) truncated to [0, 1] (closed form).
double truncated_std(double tau, double mean = 0.5);

/// Width tau of the underlying normal whose [0,1]-truncation has standard
/// deviation sigma_target. Requires 0 < sigma_target < 1/sqrt(12).
double solve_tau(double sigma_target, double tol = 1e-12, double mean = 0.5);

std::vector<double> sample_thresholds(const ThresholdSpec& spec, std::size_t n, std::uint64_t rng_seed);

/// r_i = ceil(phi_i * k_i), with products within 1e-9 of an integer snapped
/// to that integer first.
std::vector<int> resistances(const Graph& g, const std::vector<double>& phi);
int resistance(double phi, std::size_t degree);

void save_thresholds(const std::vector<double>& phi, const std::filesystem::path& path);
/// Lines "node_id phi"; every node 0..n-1 must appear exactly once.
std::vector<double> load_thresholds(const std::filesystem::path& path);

}  // namespace ltm
