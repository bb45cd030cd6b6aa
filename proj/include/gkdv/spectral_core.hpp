#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace gkdv {

using cplx = std::complex<double>;

// Periodic grid on [0, L). Coefficients are stored in FFT order:
// index k holds mode j = k for k < n/2 and j = k - n otherwise, xi_j = 2*pi*j/L.
struct Grid {
    double length = 0.0;
    int num_modes = 0;
    std::vector<double> xi;

    [[nodiscard]] double dx() const { return length / num_modes; }
    [[nodiscard]] double dxi() const { return xi.size() > 1 ? xi[1] : 0.0; }
    [[nodiscard]] double x(int m) const { return dx() * m; }
    [[nodiscard]] int mode_of(int index) const {
        return index < num_modes / 2 ? index : index - num_modes;
    }
    [[nodiscard]] int index_of(int mode) const {
        return mode >= 0 ? mode : mode + num_modes;
    }
    [[nodiscard]] bool same_as(const Grid& other) const {
        return length == other.length && num_modes == other.num_modes;
    }
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(double length, int num_modes);

// Real-valued field stored as complex Fourier coefficients (Hermitian:
// u_hat(-xi) = conj(u_hat(xi)), Nyquist coefficient real).
struct SpectralField {
    GridPtr grid;
    std::vector<cplx> coeff;

    [[nodiscard]] int size() const { return static_cast<int>(coeff.size()); }
    [[nodiscard]] cplx at_mode(int mode) const { return coeff[grid->index_of(mode)]; }
    void set_mode(int mode, cplx value) { coeff[grid->index_of(mode)] = value; }
};

SpectralField zero_field(GridPtr grid);
SpectralField forward_transform(const std::vector<double>& samples, GridPtr grid);
std::vector<double> inverse_transform(const SpectralField& field);

// Projects onto the Hermitian subspace and forces the Nyquist and zero modes real.
void enforce_hermitian(SpectralField& field);
double hermitian_defect(const SpectralField& field);

// Free Airy flow: u_hat(xi) -> exp(i xi^3 t) u_hat(xi).
SpectralField linear_propagate(const SpectralField& field, double t);

enum class Scheme {
    etdrk4,  // exponential time differencing, 4th order (Cox-Matthews stages)
};

struct StepperConfig {
    double dt = 1e-3;
    int dealias_pad_factor = 3;  // quintic product needs >= 3x zero padding
    Scheme scheme = Scheme::etdrk4;
    bool nonlinearity_enabled = true;
    double blowup_factor = 1e6;  // L-inf growth beyond this flags divergence
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
    StepperConfig config;
    bool diverged = false;

    [[nodiscard]] const SpectralField& back() const { return states.back(); }
};

class divergence_error : public std::runtime_error {
  public:
    explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

// One ETDRK4 step of u_t + u_xxx + (u^5)_x = 0. The linear part is exact;
// phi coefficients come from 32-point means over unit circles around each
// i xi^3 dt, which stays accurate through xi^3 dt = 0. Tables depend only on
// (grid, config), so the stepper is reusable across steps and trajectories.
class Etdrk4Stepper {
  public:
    Etdrk4Stepper(GridPtr grid, StepperConfig config);

    [[nodiscard]] SpectralField step(const SpectralField& state) const;
    [[nodiscard]] const StepperConfig& config() const { return config_; }

  private:
    [[nodiscard]] std::vector<cplx> nonlinear(const std::vector<cplx>& coeff) const;

    GridPtr grid_;
    StepperConfig config_;
    std::vector<cplx> e_full_, e_half_, q_, f1_, f2_, f3_;
    std::vector<cplx> deriv_;  // -i xi, Nyquist zeroed
    int padded_modes_ = 0;
};

SpectralField step(const SpectralField& state, const StepperConfig& config);

// Advances to T = round(T/dt) steps, recording every sample_every steps plus the
// final state. NaN or L-inf growth past blowup_factor stops the run early and
// marks the trajectory diverged, keeping the last finite snapshot.
Trajectory evolve(const SpectralField& state, double T, const StepperConfig& config,
                  int sample_every = 1);

}  // namespace gkdv
