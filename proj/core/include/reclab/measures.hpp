#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "phase.hpp"
#include "rng.hpp"

namespace reclab
{
enum class MeasureKind
{
    lebesgue,
    grid_density,  //!< piecewise-constant density on a G^N cell grid
};

std::string_view to_string(MeasureKind k);

//---------------------------------------------------------------------------//
/*!
 * Borel probability measure on the torus.
 *
 * Grid densities store one density value per cell in row-major order (axis 0
 * slowest); the values integrate to one against cell volume G^-N. Copies share
 * the immutable tables.
 */
class MeasureSpec
{
  public:
    static MeasureSpec lebesgue();
    static MeasureSpec grid_density(int dimension,
                                    int resolution,
                                    std::vector<double> values);
    //! One density value per line, row-major; line count must be G^N.
    static MeasureSpec grid_density_csv(std::filesystem::path const& path,
                                        int dimension,
                                        int resolution);

    MeasureKind kind() const noexcept { return kind_; }
    bool is_lebesgue() const noexcept { return kind_ == MeasureKind::lebesgue; }

    //! Grid-density accessors (empty / zero for Lebesgue).
    int dimension() const noexcept;
    int resolution() const noexcept;
    std::span<double const> values() const noexcept;
    double max_density() const noexcept;

    //! Mass of the axis-aligned box prod [lo_i, hi_i) with 0 <= lo <= hi <= 1.
    double box_mass(std::span<double const> lo, std::span<double const> hi) const;

    //! Throws unless this measure can be evaluated on the space.
    void check_space(SpaceSpec const& space) const;

  private:
    struct Grid;

    MeasureKind kind_ = MeasureKind::lebesgue;
    std::shared_ptr<Grid const> grid_;

    friend Point sample_measure(MeasureSpec const&, SpaceSpec const&, RngStream&);
};

double ball_measure(MeasureSpec const& measure,
                    SpaceSpec const& space,
                    Point const& x,
                    double r);

//! mu{y : rho <= d(x,y) < rho + eps}
double annulus_measure(MeasureSpec const& measure,
                       SpaceSpec const& space,
                       Point const& x,
                       double rho,
                       double eps);

Point sample_measure(MeasureSpec const& measure,
                     SpaceSpec const& space,
                     RngStream& rng);

//! Log-log fit of mu(B(x,r)) against r; c1_hat makes mu(B) <= c1 r^s hold on
//! every probed (x, r).
struct BallScalingFit
{
    double s_hat = 0;
    double c1_hat = 0;
    double r_min = 0;
    double r_max = 0;
    double max_residual = 0;
    std::size_t points = 0;
};

BallScalingFit fit_ball_scaling(MeasureSpec const& measure,
                                SpaceSpec const& space,
                                int n_centers,
                                std::span<double const> r_grid,
                                RngStream& rng);

//! Log-log fit of annulus measure against eps; constant_hat makes
//! mu{rho <= d < rho + eps} <= constant eps^alpha0 hold on every probed triple.
struct AnnulusFit
{
    double alpha0_hat = 0;
    double rho0 = 0;
    double constant_hat = 0;
    double max_residual = 0;
    std::size_t points = 0;
};

AnnulusFit fit_annulus_regularity(MeasureSpec const& measure,
                                  SpaceSpec const& space,
                                  int n_centers,
                                  std::span<double const> rho_grid,
                                  std::span<double const> eps_grid,
                                  RngStream& rng);

}  // namespace reclab
