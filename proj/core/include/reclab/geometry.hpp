#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "measures.hpp"
#include "phase.hpp"
#include "rng.hpp"

namespace reclab
{
//! Relative slack used when comparing center separations against 2*epsilon;
//! it absorbs the 2^-64 rounding of evenly spaced fixed-point lattices.
inline constexpr double packing_slack = 1e-12;

//---------------------------------------------------------------------------//
/*!
 * A maximal family of pairwise disjoint open epsilon-balls (center separation
 * at least 2*epsilon).
 */
struct Packing
{
    double epsilon = 0;
    std::vector<Point> centers;
    std::size_t probes = 0;       //!< total probe points examined
    bool coarse_warning = false;  //!< epsilon >= diameter: single center

    std::size_t count() const noexcept { return centers.size(); }
};

/*!
 * Greedy packing over a deterministic probe stream.
 *
 * The stream first visits an evenly spaced lattice with floor(1/(2 eps))
 * points per axis at a random anchor, then an additive (Kronecker) sequence
 * with generalized golden-ratio increments. Insertion stops after
 * probe_budget consecutive rejections.
 */
Packing maximal_packing(SpaceSpec const& space,
                        double epsilon,
                        std::size_t probe_budget,
                        RngStream& rng);

struct PackingExponent
{
    double k_hat = 0;
    double c_hat = 0;  //!< smallest c with L <= c eps^-K on the grid
    double eps0 = 0;   //!< largest probed epsilon
    std::vector<std::pair<double, std::size_t>> counts;
};

PackingExponent packing_exponent(SpaceSpec const& space,
                                 std::span<double const> eps_grid,
                                 std::size_t probe_budget,
                                 RngStream& rng);

//---------------------------------------------------------------------------//
/*!
 * Cells A_k = B(x_k, 2 eps) minus the union of B(x_i, 2 eps) for i < k.
 *
 * Cell indices are zero-based in center order.
 */
class Partition
{
  public:
    Partition(SpaceSpec const& space, Packing packing);
    ~Partition();
    Partition(Partition&&) noexcept;
    Partition& operator=(Partition&&) noexcept;

    SpaceSpec const& space() const noexcept { return space_; }
    Packing const& packing() const noexcept { return packing_; }
    std::size_t size() const noexcept { return packing_.count(); }
    //! Ball radius 2*epsilon defining the cells.
    double cell_radius() const noexcept { return 2 * packing_.epsilon; }

    //! Smallest k with d(x, x_k) < 2 eps; empty if no center is that close.
    std::optional<std::size_t> cell_of(Point const& x) const;

    //! Cells whose center lies within the given distance of x, ascending.
    std::vector<std::size_t> centers_near(Point const& x, double radius) const;

  private:
    struct Index;

    SpaceSpec space_;
    Packing packing_;
    std::unique_ptr<Index> index_;
};

std::optional<std::size_t> cell_of(Partition const& partition, Point const& x);

//---------------------------------------------------------------------------//
/*!
 * Lipschitz cutoffs h_k(x) = min{1, dist(x, X \ A_k(delta)) / delta}.
 *
 * For chebyshev spaces every cell is a finite union of boxes and all
 * distances are exact. Other metrics evaluate A_k(delta) membership and the
 * complement distance on a symmetric probe lattice; tolerance() reports its
 * spacing.
 */
class MollifierSet
{
  public:
    MollifierSet(Partition const& partition,
                 double delta,
                 int probe_resolution = 6);
    ~MollifierSet();
    MollifierSet(MollifierSet&&) noexcept;
    MollifierSet& operator=(MollifierSet&&) noexcept;

    Partition const& partition() const noexcept { return *partition_; }
    double delta() const noexcept { return delta_; }
    bool exact() const noexcept;
    double tolerance() const noexcept;

    double operator()(std::size_t k, Point const& x) const;

    //! dist(x, A_k), exact for chebyshev spaces.
    double distance_to_cell(std::size_t k, Point const& x) const;
    //! x in A_k(delta) = { y : dist(y, A_k) < delta }
    bool in_neighbourhood(std::size_t k, Point const& x) const;
    //! Cells whose delta-neighbourhood may contain x.
    std::vector<std::size_t> candidates(Point const& x) const;

  private:
    struct Geometry;

    Partition const* partition_;
    double delta_;
    std::unique_ptr<Geometry> geometry_;
};

double mollifier_eval(MollifierSet const& mollifiers, std::size_t k, Point const& x);

//! Constants of the bound mu(A_k(delta) \ A_k) <= c rho^-K delta^alpha0.
struct ExcessBound
{
    double c = 1;
    double k = 1;
    double alpha0 = 1;
};

struct NeighbourhoodExcess
{
    double delta = 0;
    std::size_t samples = 0;
    std::vector<double> excess;     //!< per-cell frequency of A_k(delta) \ A_k
    std::vector<double> std_error;  //!< binomial standard errors
    double max_excess = 0;
    std::size_t argmax = 0;
    std::optional<double> bound;    //!< c rho^-K delta^alpha0 with rho = 2 eps
};

NeighbourhoodExcess neighbourhood_excess(MeasureSpec const& measure,
                                         MollifierSet const& mollifiers,
                                         std::size_t n_samples,
                                         RngStream& rng,
                                         std::optional<ExcessBound> bound = {});

}  // namespace reclab
