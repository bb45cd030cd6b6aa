#include "gkdv/random_fields.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gkdv/symbol_ops.hpp"

namespace gkdv {

namespace {

class NormalSource {
  public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

    // Box-Muller on explicit uniforms; std::normal_distribution is
    // implementation-defined and would break the documented statistics.
    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

  private:
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

SpectralField random_band_field(GridPtr grid, BandSpec band, double amplitude,
                                std::uint64_t seed) {
    if (band.band_min < 0 || band.band_max < band.band_min ||
        band.band_max >= grid->num_modes / 2)
        throw std::invalid_argument("band must satisfy 0 <= min <= max < n/2");
    NormalSource normals(seed);
    auto field = zero_field(grid);
    const int positive = band.band_max - std::max(band.band_min, 1) + 1;
    const bool has_zero = band.band_min == 0;
    const double scale =
        amplitude * std::sqrt(grid->length / (2.0 * positive + (has_zero ? 1.0 : 0.0)));
    for (int j = band.band_min; j <= band.band_max; ++j) {
        if (j == 0) {
            field.set_mode(0, cplx{scale * normals.next(), 0.0});
            continue;
        }
        const double re = normals.next();
        const double im = normals.next();
        const cplx c = scale / std::numbers::sqrt2 * cplx{re, im};
        field.set_mode(j, c);
        field.set_mode(-j, std::conj(c));
    }
    return field;
}

SpectralField random_band_field_with_norm(GridPtr grid, BandSpec band, double l2_norm,
                                          std::uint64_t seed) {
    auto field = random_band_field(std::move(grid), band, 1.0, seed);
    const double current = sobolev_norm(field, 0.0);
    if (current == 0.0) throw std::invalid_argument("empty band, cannot normalize");
    for (auto& c : field.coeff) c *= l2_norm / current;
    return field;
}

}  // namespace gkdv
