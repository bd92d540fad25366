#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mpotrace::cli {

enum class Extremum { maximum, minimum };

/// The discrete extremum sits on the first or last grid point.
class BoundaryExtremum : public std::runtime_error {
public:
    BoundaryExtremum(const std::string& msg, double location) : std::runtime_error(msg), location(location) {}
    double location;
};

struct PeakEstimate {
    double location = 0.0;    // vertex of the three-point parabola
    double uncertainty = 0.0; // max(half grid step, |vertex - grid point|)
    double value = 0.0;       // series value at the discrete extremum
    std::size_t index = 0;    // grid index of the discrete extremum
};

PeakEstimate find_peak(std::span<const double> t, std::span<const double> values, Extremum kind = Extremum::maximum);

struct TcEstimate {
    double tc = 0.0;
    double slope = 0.0; // a in T_peak = T_c + a / L
    // |T_c - T_c'| with T_c' from a least-squares line through the three
    // largest sizes; absent with only two sizes.
    std::optional<double> uncertainty;
};

/// Linear extrapolation of peak positions in 1/L from the two largest sizes.
TcEstimate extrapolate_tc(std::vector<std::pair<std::size_t, double>> peaks);

/// (v[k+1] - v[k]) / (t[k+1] - t[k]); one entry fewer than the input.
std::vector<double> forward_difference(std::span<const double> t, std::span<const double> values);

/// h / (2 atanh h), defined for 0 < h < 1.
double exact_tc(double h);

} // namespace mpotrace::cli
