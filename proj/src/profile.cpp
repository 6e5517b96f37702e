#include "slitlab/profile.hpp"

#include <algorithm>
#include <cmath>

#include "slitlab/errors.hpp"

namespace slitlab {

double IntensityProfile::peak() const
{
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double IntensityProfile::trapezoid() const
{
    if (values.size() < 2)
        return 0.0;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    sum -= 0.5 * (values.front() + values.back());
    return sum * spacing();
}

void IntensityProfile::normalize()
{
    const double total = trapezoid();
    if (!(total > 0.0) || !std::isfinite(total))
        throw EmptyFieldError("profile has zero or non-finite integral");
    for (double& v : values)
        v /= total;
    normalized = true;
}

double IntensityProfile::at(double xq) const
{
    if (values.empty() || xq < x.front() || xq > x.back())
        return 0.0;
    const double s = (xq - x.front()) / spacing();
    const auto i = std::min(static_cast<std::size_t>(s), values.size() - 2);
    const double u = s - static_cast<double>(i);
    return values[i] + (values[i + 1] - values[i]) * u;
}

IntensityProfile make_profile(double x0, double dx, std::vector<double> values,
                              bool normalize_now)
{
    IntensityProfile p;
    p.x.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        p.x[i] = x0 + static_cast<double>(i) * dx;
    p.values = std::move(values);
    if (normalize_now)
        p.normalize();
    return p;
}

double relative_l2(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw PreconditionError("relative_l2: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    if (!(den > 0.0))
        throw PreconditionError("relative_l2: reference is zero");
    return std::sqrt(num / den);
}

}  // namespace slitlab
