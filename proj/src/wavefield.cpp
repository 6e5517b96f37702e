#include "slitlab/wavefield.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "slitlab/errors.hpp"

namespace slitlab::wavefield {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// fftw's planner is not re-entrant; execution on distinct buffers is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

// Aligned scratch buffer so the planner sees the same alignment every call
// and therefore picks the same codelets (bitwise-reproducible output).
class FftBuffer {
public:
    explicit FftBuffer(std::size_t n)
        : n_(n), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
    {
        if (!data_)
            throw std::bad_alloc();
        std::lock_guard lock(planner_mutex());
        const int len = static_cast<int>(n);
        forward_ = fftw_plan_dft_1d(len, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(len, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftBuffer()
    {
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(forward_);
            fftw_destroy_plan(backward_);
        }
        fftw_free(data_);
    }
    FftBuffer(const FftBuffer&) = delete;
    FftBuffer& operator=(const FftBuffer&) = delete;

    Complex* data() { return reinterpret_cast<Complex*>(data_); }
    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_complex* data_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

double spatial_frequency(std::size_t k, std::size_t n, double spacing)
{
    const double span = static_cast<double>(n) * spacing;
    const auto kk = static_cast<double>(k);
    return (k < n / 2 ? kk : kk - static_cast<double>(n)) / span;
}

// Transfer function with the common e^{ikL} factor removed.
Complex transfer(double f, double wavelength, double distance, Kernel kernel)
{
    if (kernel == Kernel::paraxial)
        return std::polar(1.0, -kPi * wavelength * distance * f * f);

    const double k0 = 1.0 / wavelength;
    const double f2 = f * f;
    if (f2 < k0 * k0) {
        // kz - k0 written without cancellation
        const double dk = -f2 / (std::sqrt(k0 * k0 - f2) + k0);
        return std::polar(1.0, 2.0 * kPi * distance * dk);
    }
    const double decay = std::exp(-2.0 * kPi * distance * std::sqrt(f2 - k0 * k0));
    const double cycles = std::fmod(distance / wavelength, 1.0);
    return std::polar(decay, -2.0 * kPi * cycles);
}

std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

const char* to_string(SourceKind kind)
{
    return kind == SourceKind::wide ? "wide" : "fine";
}

const char* to_string(Kernel kernel)
{
    return kernel == Kernel::paraxial ? "paraxial" : "exact";
}

Grid1D Grid1D::make(std::size_t n_samples, double spacing, double center)
{
    if (n_samples < 16 || !is_power_of_two(n_samples))
        throw GridError("grid needs a power-of-two sample count >= 16, got " +
                        std::to_string(n_samples));
    if (!(spacing > 0.0) || !std::isfinite(spacing * static_cast<double>(n_samples)))
        throw GridError("grid spacing must be positive with a finite span");
    if (!std::isfinite(center))
        throw GridError("grid center must be finite");
    return Grid1D{n_samples, spacing, center};
}

double ComplexField::norm2() const
{
    double sum = 0.0;
    for (const auto& a : amplitudes)
        sum += std::norm(a);
    return sum * grid.spacing;
}

void ComplexField::normalize()
{
    const double n2 = norm2();
    if (!(n2 > 0.0) || !std::isfinite(n2))
        throw EmptyFieldError("cannot normalize a field with zero norm");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : amplitudes)
        a *= scale;
}

SlitField make_slit_field(const SourceSpec& source, double slit_width, const Grid1D& grid,
                          double wavelength, const SlitOptions& options)
{
    if (!(slit_width > 0.0))
        throw DomainError("slit width must be positive");
    if (!(wavelength > 0.0))
        throw DomainError("wavelength must be positive");
    if (slit_width > grid.span() / 8.0)
        throw GridError("slit width " + format_double(slit_width) +
                        " m exceeds span/8 = " + format_double(grid.span() / 8.0) + " m");

    SlitField out;
    out.narrowest_feature = slit_width;
    const double half = 0.5 * slit_width;

    if (source.is_fine()) {
        const double b = source.fwhm;
        if (!(b > 0.0))
            throw DomainError("fine source needs a positive FWHM");
        if (!(std::abs(source.offset) < 0.5 * grid.span()))
            throw DomainError("fine source offset lies outside the grid");
        if (std::abs(source.offset) > half + 3.0 * b)
            throw EmptyFieldError("fine source at x_b = " + format_double(source.offset) +
                                  " m does not overlap the slit");
        out.narrowest_feature = std::min(slit_width, b);
        const double f = options.smallness_factor;
        if (!(b <= slit_width / f && b <= wavelength / f))
            out.warnings.push_back("fine source FWHM " + format_double(b) +
                                   " m is not " + format_double(f) +
                                   "x smaller than both slit width and wavelength");
    }

    const double limit = out.narrowest_feature / 16.0;
    if (grid.spacing > limit * (1.0 + 1e-9))
        throw GridError("grid spacing " + format_double(grid.spacing) +
                        " m is coarser than the narrowest feature / 16 = " +
                        format_double(limit) + " m");

    ComplexField& field = out.field;
    field.grid = grid;
    field.wavelength = wavelength;
    field.amplitudes.assign(grid.n_samples, Complex{0.0, 0.0});

    const double edge_tol = 1e-6 * grid.spacing;
    const double gauss_k = source.is_fine() ? 2.0 * std::numbers::ln2 / (source.fwhm * source.fwhm) : 0.0;
    double incident = 0.0;
    double transmitted = 0.0;  // trapezoid in intensity: edge samples count half
    for (std::size_t i = 0; i < grid.n_samples; ++i) {
        const double x = grid.x(i);
        double amp = 1.0;
        if (source.is_fine()) {
            const double dxb = x - source.offset;
            amp = std::exp(-gauss_k * dxb * dxb);
            incident += amp * amp;
        }
        const double r = std::abs(x);
        double t = 0.0;
        if (r < half - edge_tol)
            t = 1.0;
        else if (r <= half + edge_tol)
            t = 0.5;
        field.amplitudes[i] = Complex{amp * t, 0.0};
        if (t > 0.0)
            transmitted += amp * amp * (t < 1.0 ? 0.5 : 1.0);
    }
    if (source.is_fine())
        out.incident_energy = incident * grid.spacing;

    out.transmitted_energy = transmitted * grid.spacing;
    if (!(out.transmitted_energy > 0.0))
        throw EmptyFieldError("no amplitude transmitted through the slit");
    field.normalize();
    return out;
}

Propagated propagate(const ComplexField& field, double distance, Kernel kernel,
                     double narrowest_feature)
{
    if (!(distance >= 0.0))
        throw DomainError("propagation distance must be non-negative");
    if (!(field.wavelength > 0.0))
        throw DomainError("field wavelength must be positive");

    Propagated out;
    out.field = field;
    if (kernel == Kernel::paraxial && narrowest_feature > 0.0) {
        const double half_angle = field.wavelength / (2.0 * narrowest_feature);
        if (half_angle >= 0.2)
            out.warnings.push_back("paraxial kernel outside its validity: diffraction half-angle " +
                                   format_double(half_angle) + " rad >= 0.2 rad");
    }
    if (distance == 0.0)
        return out;

    const std::size_t n = field.amplitudes.size();
    FftBuffer buf(n);
    Complex* data = buf.data();
    std::copy(field.amplitudes.begin(), field.amplitudes.end(), data);
    buf.forward();
    for (std::size_t k = 0; k < n; ++k) {
        const double f = spatial_frequency(k, n, field.grid.spacing);
        data[k] *= transfer(f, field.wavelength, distance, kernel);
    }
    buf.backward();
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        out.field.amplitudes[i] = data[i] * scale;
    return out;
}

IntensityProfile intensity_of(const ComplexField& field)
{
    const auto& g = field.grid;
    std::vector<double> values(field.amplitudes.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = std::norm(field.amplitudes[i]);
        if (!std::isfinite(values[i]))
            throw DomainError("field contains non-finite amplitudes");
    }
    return make_profile(g.x(0), g.spacing, std::move(values), true);
}

double fraunhofer_intensity(double slit_width, double wavelength, double distance, double x)
{
    if (!(slit_width > 0.0 && wavelength > 0.0 && distance > 0.0))
        throw DomainError("fraunhofer_intensity needs positive width, wavelength and distance");
    const double u = kPi * slit_width * x / (wavelength * distance);
    if (u == 0.0)
        return 1.0;
    const double s = std::sin(u) / u;
    return s * s;
}

IntensityProfile fraunhofer_profile(double slit_width, double wavelength, double distance,
                                    const Grid1D& grid)
{
    std::vector<double> values(grid.n_samples);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = fraunhofer_intensity(slit_width, wavelength, distance, grid.x(i));
    return make_profile(grid.x(0), grid.spacing, std::move(values), true);
}

double fresnel_number(double slit_width, double wavelength, double distance)
{
    if (!(slit_width > 0.0 && wavelength > 0.0 && distance > 0.0))
        throw DomainError("fresnel_number needs positive width, wavelength and distance");
    return slit_width * slit_width / (4.0 * wavelength * distance);
}

namespace {

double narrowest(const SourceSpec& source, double slit_width)
{
    return source.is_fine() ? std::min(slit_width, source.fwhm) : slit_width;
}

double min_span(const SourceSpec& source, double slit_width, double wavelength, double distance)
{
    const double w_min = narrowest(source, slit_width);
    return std::max(8.0 * slit_width, 4.0 * 2.0 * wavelength * distance / w_min);
}

}  // namespace

void check_grid(const Grid1D& grid, const SourceSpec& source, double slit_width,
                double wavelength, double distance)
{
    const double w_min = narrowest(source, slit_width);
    const double need = min_span(source, slit_width, wavelength, distance);
    if (grid.span() < need * (1.0 - 1e-9))
        throw GridError("grid span " + format_double(grid.span()) + " m is below the required " +
                        format_double(need) + " m");
    if (grid.spacing > w_min / 16.0 * (1.0 + 1e-9))
        throw GridError("grid spacing " + format_double(grid.spacing) +
                        " m is coarser than " + format_double(w_min / 16.0) + " m");
}

Grid1D auto_grid(const SourceSpec& source, double slit_width, double wavelength,
                 double distance, std::size_t n_samples)
{
    if (!(slit_width > 0.0 && wavelength > 0.0 && distance >= 0.0))
        throw DomainError("auto_grid needs positive width and wavelength, non-negative distance");
    if (source.is_fine() && !(source.fwhm > 0.0))
        throw DomainError("fine source needs a positive FWHM");
    const double n = static_cast<double>(n_samples);
    const double w_min = narrowest(source, slit_width);
    const double dx_hi = w_min / 16.0;
    double dx_lo = min_span(source, slit_width, wavelength, distance) / n;
    // Plane waves: keep the transfer-function chirp phase step at Nyquist
    // below pi (spacing^2 >= lambda L / n), or the tails wrap into the window.
    if (!source.is_fine())
        dx_lo = std::max(dx_lo, std::sqrt(wavelength * distance / n));

    // spacing = width / (2m) puts both slit edges on samples
    const double m_max = std::floor(slit_width / (2.0 * dx_lo));
    const double m_min = std::ceil(slit_width / (2.0 * dx_hi) - 1e-9);
    if (m_max < m_min)
        throw GridError("no grid of " + std::to_string(n_samples) +
                        " samples resolves this geometry; need spacing in [" +
                        format_double(dx_lo) + ", " + format_double(dx_hi) + "] m");
    const double spacing = slit_width / (2.0 * m_max);
    return Grid1D::make(n_samples, spacing, 0.0);
}

}  // namespace slitlab::wavefield
