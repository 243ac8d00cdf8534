#include "reclab/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "reclab/error.hpp"
#include "reclab/fit.hpp"

namespace reclab
{
std::string_view to_string(MeasureKind k)
{
    return k == MeasureKind::lebesgue ? "lebesgue" : "grid_density";
}

struct MeasureSpec::Grid
{
    int dimension = 1;
    int resolution = 1;
    std::vector<double> values;      // density per cell
    std::vector<double> table;       // mass of [0, j/G) on the vertex grid
    std::vector<double> cumulative;  // running cell mass, for sampling
    double max_density = 0;

    std::size_t vertex_index(std::array<int, max_dimension> const& j) const
    {
        std::size_t idx = 0;
        for (int a = 0; a < dimension; ++a)
            idx = idx * static_cast<std::size_t>(resolution + 1) + j[a];
        return idx;
    }

    // Mass of [0, u): multilinear within each cell.
    double cdf(std::array<double, max_dimension> const& u) const
    {
        std::array<int, max_dimension> base{};
        std::array<double, max_dimension> frac{};
        for (int a = 0; a < dimension; ++a)
        {
            double const t = u[a] * resolution;
            int i = static_cast<int>(std::floor(t));
            i = std::clamp(i, 0, resolution - 1);
            base[a] = i;
            frac[a] = std::clamp(t - i, 0.0, 1.0);
        }
        double total = 0;
        for (unsigned corner = 0; corner < (1u << dimension); ++corner)
        {
            double w = 1;
            std::array<int, max_dimension> j{};
            for (int a = 0; a < dimension; ++a)
            {
                bool const up = (corner >> a) & 1u;
                j[a] = base[a] + (up ? 1 : 0);
                w *= up ? frac[a] : 1.0 - frac[a];
            }
            if (w != 0)
                total += w * table[vertex_index(j)];
        }
        return total;
    }
};

MeasureSpec MeasureSpec::lebesgue()
{
    return MeasureSpec{};
}

MeasureSpec MeasureSpec::grid_density(int dimension,
                                      int resolution,
                                      std::vector<double> values)
{
    require(dimension >= 1 && dimension <= max_dimension,
            "grid density dimension out of range");
    require(resolution >= 1, "grid density resolution must be positive");
    double cells = 1;
    for (int a = 0; a < dimension; ++a)
        cells *= resolution;
    require(cells <= 1 << 24, "grid density has too many cells");
    auto const n_cells = static_cast<std::size_t>(cells);
    if (values.size() != n_cells)
    {
        fail(ErrorKind::invalid_input,
             "grid density expects " + std::to_string(n_cells)
                 + " cell values, got " + std::to_string(values.size()));
    }
    double const cell_volume = 1.0 / cells;
    double total = 0;
    for (double v : values)
    {
        require(std::isfinite(v) && v >= 0,
                "grid density values must be finite and nonnegative");
        total += v * cell_volume;
    }
    if (std::abs(total - 1.0) > 1e-12)
    {
        fail(ErrorKind::invalid_input,
             "grid density must integrate to 1 (got "
                 + std::to_string(total) + ")");
    }

    auto grid = std::make_shared<Grid>();
    grid->dimension = dimension;
    grid->resolution = resolution;
    grid->values = std::move(values);
    grid->max_density = *std::max_element(grid->values.begin(),
                                          grid->values.end());

    std::size_t n_vertices = 1;
    for (int a = 0; a < dimension; ++a)
        n_vertices *= static_cast<std::size_t>(resolution + 1);
    grid->table.assign(n_vertices, 0.0);

    // Seed vertex (i+1) with the mass of cell i, then prefix-sum each axis.
    for (std::size_t c = 0; c < n_cells; ++c)
    {
        std::array<int, max_dimension> j{};
        std::size_t rem = c;
        for (int a = dimension - 1; a >= 0; --a)
        {
            j[a] = static_cast<int>(rem % resolution) + 1;
            rem /= resolution;
        }
        grid->table[grid->vertex_index(j)] = grid->values[c] * cell_volume;
    }
    std::size_t stride = 1;
    for (int a = dimension - 1; a >= 0; --a)
    {
        for (std::size_t idx = 0; idx < n_vertices; ++idx)
        {
            if ((idx / stride) % (resolution + 1) != 0)
                grid->table[idx] += grid->table[idx - stride];
        }
        stride *= static_cast<std::size_t>(resolution + 1);
    }

    grid->cumulative.resize(n_cells);
    double running = 0;
    for (std::size_t c = 0; c < n_cells; ++c)
    {
        running += grid->values[c] * cell_volume;
        grid->cumulative[c] = running;
    }

    MeasureSpec m;
    m.kind_ = MeasureKind::grid_density;
    m.grid_ = std::move(grid);
    return m;
}

MeasureSpec MeasureSpec::grid_density_csv(std::filesystem::path const& path,
                                          int dimension,
                                          int resolution)
{
    std::ifstream in(path);
    if (!in)
    {
        fail(ErrorKind::invalid_input,
             "cannot open grid density file '" + path.string() + "'");
    }
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::size_t used = 0;
        double v = 0;
        try
        {
            v = std::stod(line, &used);
        }
        catch (std::exception const&)
        {
            used = 0;
        }
        if (used == 0 || line.find_first_not_of(" \t", used) != std::string::npos)
        {
            fail(ErrorKind::invalid_input,
                 path.string() + ":" + std::to_string(lineno)
                     + ": not a number: '" + line + "'");
        }
        values.push_back(v);
    }
    return grid_density(dimension, resolution, std::move(values));
}

int MeasureSpec::dimension() const noexcept
{
    return grid_ ? grid_->dimension : 0;
}

int MeasureSpec::resolution() const noexcept
{
    return grid_ ? grid_->resolution : 0;
}

std::span<double const> MeasureSpec::values() const noexcept
{
    if (!grid_)
        return {};
    return grid_->values;
}

double MeasureSpec::max_density() const noexcept
{
    return grid_ ? grid_->max_density : 1.0;
}

double MeasureSpec::box_mass(std::span<double const> lo,
                             std::span<double const> hi) const
{
    int const n = static_cast<int>(lo.size());
    require(hi.size() == lo.size() && n >= 1 && n <= max_dimension,
            "box_mass: bad box dimension");
    if (!grid_)
    {
        double v = 1;
        for (int a = 0; a < n; ++a)
            v *= std::max(0.0, hi[a] - lo[a]);
        return v;
    }
    require(n == grid_->dimension, "box_mass: dimension mismatch");
    double total = 0;
    for (unsigned corner = 0; corner < (1u << n); ++corner)
    {
        std::array<double, max_dimension> u{};
        int lows = 0;
        for (int a = 0; a < n; ++a)
        {
            bool const up = (corner >> a) & 1u;
            u[a] = up ? hi[a] : lo[a];
            lows += up ? 0 : 1;
        }
        double const f = grid_->cdf(u);
        total += (lows % 2 == 0) ? f : -f;
    }
    return std::max(0.0, total);
}

void MeasureSpec::check_space(SpaceSpec const& space) const
{
    if (!grid_)
        return;
    if (grid_->dimension != space.dimension())
    {
        fail(ErrorKind::invalid_input,
             "grid density dimension does not match the space");
    }
    if (space.metric() == Metric::euclidean && space.dimension() > 1)
    {
        fail(ErrorKind::unsupported,
             "unsupported pairing: grid_density requires the chebyshev metric");
    }
}

//---------------------------------------------------------------------------//
namespace
{
struct Interval
{
    double lo;
    double hi;
};

// Split the wrapped interval [c - r, c + r) into pieces inside [0, 1].
int axis_pieces(double c, double r, std::array<Interval, 2>& out)
{
    if (2 * r >= 1)
    {
        out[0] = {0.0, 1.0};
        return 1;
    }
    double const lo = c - r;
    double const hi = c + r;
    if (lo < 0)
    {
        out[0] = {0.0, hi};
        out[1] = {lo + 1.0, 1.0};
        return 2;
    }
    if (hi > 1)
    {
        out[0] = {lo, 1.0};
        out[1] = {0.0, hi - 1.0};
        return 2;
    }
    out[0] = {lo, hi};
    return 1;
}
}  // namespace

double ball_measure(MeasureSpec const& measure,
                    SpaceSpec const& space,
                    Point const& x,
                    double r)
{
    require(r >= 0 && !std::isnan(r), "ball radius must be nonnegative");
    if (measure.is_lebesgue())
        return ball_volume(space, r);
    measure.check_space(space);
    require(x.dimension() == space.dimension(),
            "point dimension does not match the space");
    if (r >= space.diameter())
        return 1.0;

    int const n = space.dimension();
    std::array<std::array<Interval, 2>, max_dimension> pieces{};
    std::array<int, max_dimension> counts{};
    for (int a = 0; a < n; ++a)
        counts[a] = axis_pieces(x.real(a), r, pieces[a]);

    double total = 0;
    std::array<int, max_dimension> pick{};
    while (true)
    {
        std::array<double, max_dimension> lo{}, hi{};
        for (int a = 0; a < n; ++a)
        {
            lo[a] = pieces[a][pick[a]].lo;
            hi[a] = pieces[a][pick[a]].hi;
        }
        total += measure.box_mass(std::span<double const>(lo.data(), n),
                                  std::span<double const>(hi.data(), n));
        int a = 0;
        while (a < n && ++pick[a] == counts[a])
        {
            pick[a] = 0;
            ++a;
        }
        if (a == n)
            break;
    }
    return std::min(total, 1.0);
}

double annulus_measure(MeasureSpec const& measure,
                       SpaceSpec const& space,
                       Point const& x,
                       double rho,
                       double eps)
{
    require(rho > 0 && eps > 0, "annulus needs rho > 0 and eps > 0");
    double const outer = ball_measure(measure, space, x, rho + eps);
    double const inner = ball_measure(measure, space, x, rho);
    return std::max(0.0, outer - inner);
}

Point sample_measure(MeasureSpec const& measure,
                     SpaceSpec const& space,
                     RngStream& rng)
{
    if (measure.is_lebesgue())
        return sample_uniform(space, rng);
    measure.check_space(space);
    auto const& grid = *measure.grid_;
    double const total = grid.cumulative.back();
    std::size_t cell = grid.cumulative.size();
    while (cell >= grid.cumulative.size())
    {
        double const u = rng.next_double() * total;
        cell = static_cast<std::size_t>(
            std::upper_bound(grid.cumulative.begin(), grid.cumulative.end(), u)
            - grid.cumulative.begin());
    }
    Point p(space.dimension());
    auto const g = static_cast<std::uint64_t>(grid.resolution);
    for (int a = space.dimension() - 1; a >= 0; --a)
    {
        std::uint64_t const i = cell % g;
        cell /= g;
        // floor((i + U) * 2^64 / G) stays inside cell i
        unsigned __int128 const num
            = (static_cast<unsigned __int128>(i) << 64) + rng.next_u64();
        p.raw(a) = static_cast<std::uint64_t>(num / g);
    }
    return p;
}

//---------------------------------------------------------------------------//
BallScalingFit fit_ball_scaling(MeasureSpec const& measure,
                                SpaceSpec const& space,
                                int n_centers,
                                std::span<double const> r_grid,
                                RngStream& rng)
{
    require(n_centers >= 1, "fit_ball_scaling needs at least one center");
    require(r_grid.size() >= 2, "fit_ball_scaling needs at least two radii");
    for (std::size_t i = 0; i < r_grid.size(); ++i)
    {
        require(r_grid[i] > 0, "radius grid must be positive");
        require(i == 0 || r_grid[i] > r_grid[i - 1],
                "radius grid must be sorted ascending");
    }

    std::vector<double> xs, ys;
    for (int c = 0; c < n_centers; ++c)
    {
        Point const x = sample_measure(measure, space, rng);
        for (double r : r_grid)
        {
            double const m = ball_measure(measure, space, x, r);
            if (m > 0)
            {
                xs.push_back(std::log(r));
                ys.push_back(std::log(m));
            }
        }
    }
    if (xs.size() < 2)
        fail(ErrorKind::degenerate, "degenerate support: all probed balls are null");

    LinearFit const fit = least_squares(xs, ys);
    BallScalingFit out;
    out.s_hat = fit.slope;
    out.r_min = r_grid.front();
    out.r_max = r_grid.back();
    out.points = xs.size();
    double max_offset = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        double const offset = ys[i] - fit.slope * xs[i];
        max_offset = std::max(max_offset, offset);
        out.max_residual = std::max(out.max_residual,
                                    std::abs(offset - fit.intercept));
    }
    out.c1_hat = std::exp(max_offset);
    return out;
}

AnnulusFit fit_annulus_regularity(MeasureSpec const& measure,
                                  SpaceSpec const& space,
                                  int n_centers,
                                  std::span<double const> rho_grid,
                                  std::span<double const> eps_grid,
                                  RngStream& rng)
{
    require(n_centers >= 1, "fit_annulus_regularity needs at least one center");
    require(!rho_grid.empty() && eps_grid.size() >= 2,
            "fit_annulus_regularity needs rho values and at least two eps");
    double const rho_min = *std::min_element(rho_grid.begin(), rho_grid.end());
    double const eps_max = *std::max_element(eps_grid.begin(), eps_grid.end());
    require(eps_max < rho_min, "every eps must be smaller than every rho");
    for (double e : eps_grid)
        require(e > 0, "eps grid must be positive");

    std::vector<double> xs, ys;
    for (int c = 0; c < n_centers; ++c)
    {
        Point const x = sample_measure(measure, space, rng);
        for (double rho : rho_grid)
        {
            for (double eps : eps_grid)
            {
                double const m = annulus_measure(measure, space, x, rho, eps);
                if (m > 0)
                {
                    xs.push_back(std::log(eps));
                    ys.push_back(std::log(m));
                }
            }
        }
    }
    if (xs.size() < 2)
        fail(ErrorKind::degenerate, "degenerate support: all probed annuli are null");

    LinearFit const fit = least_squares(xs, ys);
    AnnulusFit out;
    out.alpha0_hat = fit.slope;
    out.rho0 = *std::max_element(rho_grid.begin(), rho_grid.end());
    out.points = xs.size();
    double max_offset = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        double const offset = ys[i] - fit.slope * xs[i];
        max_offset = std::max(max_offset, offset);
        out.max_residual = std::max(out.max_residual,
                                    std::abs(offset - fit.intercept));
    }
    out.constant_hat = std::exp(max_offset);
    return out;
}

}  // namespace reclab
