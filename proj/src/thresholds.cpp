#include "ltm/thresholds.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "ltm/errors.hpp"
#include "ltm/rng.hpp"

namespace ltm {

namespace {

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double truncated_std(double tau, double mean) {
    if (!(tau > 0.0)) throw ParameterError("truncated_std: tau must be positive");
    const double alpha = (0.0 - mean) / tau;
    const double beta = (1.0 - mean) / tau;
    const double z = std_normal_cdf(beta) - std_normal_cdf(alpha);
    const double pa = std_normal_pdf(alpha);
    const double pb = std_normal_pdf(beta);
    const double shift = (pa - pb) / z;
    const double var = tau * tau * (1.0 + (alpha * pa - beta * pb) / z - shift * shift);
    return std::sqrt(std::max(var, 0.0));
}

double solve_tau(double sigma_target, double tol, double mean) {
    if (!(sigma_target > 0.0))
        throw ParameterError("solve_tau: sigma <= 0 is the identical-threshold case");
    if (sigma_target >= kUniformSigma)
        throw ParameterError("solve_tau: sigma >= 1/sqrt(12) is the uniform case");
    if (mean < 0.0 || mean > 1.0) throw ParameterError("solve_tau: mean must lie in [0, 1]");

    // Truncation only shrinks the spread, so tau >= sigma.
    double lo = sigma_target;
    double hi = 2.0 * sigma_target;
    while (truncated_std(hi, mean) < sigma_target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw ParameterError("solve_tau: sigma too close to the uniform limit");
    }
    for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, lo); ++it) {
        const double mid = 0.5 * (lo + hi);
        (truncated_std(mid, mean) < sigma_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ThresholdSpec ThresholdSpec::from_sigma(double sigma, double mean) {
    if (mean < 0.0 || mean > 1.0) throw ParameterError("threshold mean must lie in [0, 1]");
    if (!(sigma >= 0.0 && sigma <= kMaxSigma))
        throw ParameterError("threshold sigma must lie in [0, 1/sqrt(12)]");
    ThresholdSpec spec;
    spec.mean = mean;
    if (sigma == 0.0) {
        spec.sigma = 0.0;
        spec.kind = ThresholdKind::identical;
    } else if (sigma >= kUniformSigma - kUniformSnap) {
        spec.sigma = kUniformSigma;
        spec.kind = ThresholdKind::uniform;
    } else {
        spec.sigma = sigma;
        spec.kind = ThresholdKind::truncated_normal;
        spec.tau = solve_tau(sigma, 1e-13, mean);
    }
    return spec;
}

std::vector<double> sample_thresholds(const ThresholdSpec& spec, std::size_t n, std::uint64_t rng_seed) {
    std::vector<double> phi(n, spec.mean);
    Rng rng(rng_seed);
    switch (spec.kind) {
    case ThresholdKind::identical:
        break;
    case ThresholdKind::uniform: {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (double& x : phi) x = u(rng);
        break;
    }
    case ThresholdKind::truncated_normal: {
        if (!(spec.tau > 0.0)) throw ParameterError("truncated_normal spec needs tau > 0");
        std::normal_distribution<double> normal(spec.mean, spec.tau);
        for (double& x : phi) {
            do {
                x = normal(rng);
            } while (x < 0.0 || x > 1.0);
        }
        break;
    }
    }
    return phi;
}

int resistance(double phi, std::size_t degree) {
    if (!(phi >= 0.0 && phi <= 1.0)) throw ParameterError("threshold outside [0, 1]");
    double p = phi * static_cast<double>(degree);
    if (const double nearest = std::round(p); std::abs(p - nearest) < 1e-9) p = nearest;
    return static_cast<int>(std::ceil(p));
}

std::vector<int> resistances(const Graph& g, const std::vector<double>& phi) {
    if (phi.size() != g.node_count()) throw ParameterError("threshold vector size does not match node count");
    std::vector<int> r(phi.size());
    for (NodeId i = 0; i < phi.size(); ++i) r[i] = resistance(phi[i], g.degree(i));
    return r;
}

void save_thresholds(const std::vector<double>& phi, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "# node_id phi\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < phi.size(); ++i) out << i << ' ' << phi[i] << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<double> load_thresholds(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::map<std::size_t, double> values;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        std::istringstream ss(line);
        std::string id_text;
        if (!(ss >> id_text) || id_text[0] == '#') continue;
        std::size_t id = 0;
        double phi = 0.0;
        std::string rest;
        auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
        if (ec != std::errc{} || ptr != id_text.data() + id_text.size() || !(ss >> phi) || (ss >> rest))
            throw ParseError(lineno, "expected \"node_id phi\"");
        if (!(phi >= 0.0 && phi <= 1.0)) throw ParseError(lineno, "threshold outside [0, 1]");
        if (!values.emplace(id, phi).second) throw ParseError(lineno, "duplicate node id " + id_text);
    }
    std::vector<double> phi;
    phi.reserve(values.size());
    for (const auto& [id, value] : values) {
        if (id != phi.size()) throw ParseError(0, "missing threshold for node " + std::to_string(phi.size()));
        phi.push_back(value);
    }
    return phi;
}

}  // namespace ltm
