#include "mpotrace/cli/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpotrace::cli {

PeakEstimate find_peak(std::span<const double> t, std::span<const double> values, Extremum kind) {
    if(t.size() != values.size()) throw std::invalid_argument("find_peak: grid and series differ in length");
    if(t.size() < 3) throw std::invalid_argument("find_peak: need at least 3 points");
    const double sign = kind == Extremum::maximum ? 1.0 : -1.0;
    std::size_t best = 0;
    for(std::size_t k = 1; k < values.size(); ++k)
        if(sign * values[k] > sign * values[best]) best = k;
    if(best == 0 || best + 1 == values.size())
        throw BoundaryExtremum("extremum on the grid boundary at T=" + std::to_string(t[best]), t[best]);

    const double x0 = t[best - 1], x1 = t[best], x2 = t[best + 1];
    const double y0 = values[best - 1], y1 = values[best], y2 = values[best + 1];
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    // A flat triple has no curvature; stay on the grid point.
    const double vertex = den != 0.0 ? x1 - 0.5 * num / den : x1;

    PeakEstimate p;
    p.index = best;
    p.value = y1;
    p.location = vertex;
    p.uncertainty = std::max(0.25 * (x2 - x0), std::abs(vertex - x1));
    return p;
}

namespace {

// Least-squares line y = c + a x; returns (c, a).
std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for(std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {(sy - a * sx) / n, a};
}

} // namespace

TcEstimate extrapolate_tc(std::vector<std::pair<std::size_t, double>> peaks) {
    if(peaks.size() < 2) throw std::invalid_argument("extrapolate_tc: need at least 2 sizes");
    std::sort(peaks.begin(), peaks.end());
    for(std::size_t k = 1; k < peaks.size(); ++k)
        if(peaks[k].first == peaks[k - 1].first) throw std::invalid_argument("extrapolate_tc: duplicate size");
    const auto n = peaks.size();
    const double x1 = 1.0 / static_cast<double>(peaks[n - 2].first), y1 = peaks[n - 2].second;
    const double x2 = 1.0 / static_cast<double>(peaks[n - 1].first), y2 = peaks[n - 1].second;
    TcEstimate e;
    e.slope = (y2 - y1) / (x2 - x1);
    e.tc = y2 - e.slope * x2;
    if(n >= 3) {
        const double xs[] = {1.0 / static_cast<double>(peaks[n - 3].first), x1, x2};
        const double ys[] = {peaks[n - 3].second, y1, y2};
        e.uncertainty = std::abs(e.tc - fit_line(xs, ys).first);
    }
    return e;
}

std::vector<double> forward_difference(std::span<const double> t, std::span<const double> values) {
    if(t.size() != values.size()) throw std::invalid_argument("forward_difference: length mismatch");
    std::vector<double> d;
    for(std::size_t k = 0; k + 1 < t.size(); ++k) d.push_back((values[k + 1] - values[k]) / (t[k + 1] - t[k]));
    return d;
}

double exact_tc(double h) {
    if(!(h > 0.0 && h < 1.0)) throw std::domain_error("exact_tc: h must lie in (0, 1)");
    return h / (2.0 * std::atanh(h));
}

} // namespace mpotrace::cli
