#include "magheat/errors.hpp"
#include "magheat/oracle.hpp"

#include <cmath>
#include <set>

namespace magheat {

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 4) throw DomainError("power-law fit needs at least 4 samples");
    std::set<double> seen;
    for (const auto& [t, v] : samples) {
        if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("power-law fit needs t > 0");
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("power-law fit needs positive finite values (got " + std::to_string(v) +
                              " at t = " + std::to_string(t) + ")");
        }
        if (!seen.insert(t).second) throw DomainError("power-law fit needs distinct t");
    }
    const double n = static_cast<double>(samples.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [t, v] : samples) {
        mx += std::log(t);
        my += std::log(v);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [t, v] : samples) {
        const double dx = std::log(t) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(v) - my);
    }
    PowerLawFit fit;
    fit.samples = samples;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (const auto& [t, v] : samples) {
        const double e = std::log(v) - (fit.intercept + fit.slope * std::log(t));
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / n);
    fit.slope_stderr = std::sqrt(ss / (n - 2.0) / sxx);
    return fit;
}

} // namespace magheat
