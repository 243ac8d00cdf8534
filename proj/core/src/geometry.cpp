#include "reclab/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "reclab/error.hpp"
#include "reclab/fit.hpp"

namespace reclab
{
namespace
{
//---------------------------------------------------------------------------//
// Uniform bucket grid over the torus for neighbour queries.
class BucketIndex
{
  public:
    BucketIndex(SpaceSpec const& space, double min_bucket)
        : space_(space)
    {
        int const n = space.dimension();
        double const limit = std::pow(double(1 << 22), 1.0 / n);
        double const per_axis = std::floor(1.0 / std::max(min_bucket, 1e-12));
        per_axis_ = static_cast<int>(std::clamp(per_axis, 1.0, limit));
        std::size_t total = 1;
        for (int a = 0; a < n; ++a)
            total *= static_cast<std::size_t>(per_axis_);
        buckets_.resize(total);
    }

    void insert(std::size_t id, Point const& p)
    {
        buckets_[bucket_of(p)].push_back(static_cast<std::uint32_t>(id));
    }

    // Ids whose bucket is within reach of the radius, unsorted, unfiltered.
    template<class F>
    void visit(Point const& x, double radius, F&& f) const
    {
        int const n = space_.dimension();
        int const reach = static_cast<int>(std::ceil(radius * per_axis_));
        std::array<int, max_dimension> home{};
        for (int a = 0; a < n; ++a)
            home[a] = axis_bucket(x.raw(a));

        // Per-axis list of distinct bucket coordinates to scan.
        std::array<std::vector<int>, max_dimension> axes;
        for (int a = 0; a < n; ++a)
        {
            if (2 * reach + 1 >= per_axis_)
            {
                for (int b = 0; b < per_axis_; ++b)
                    axes[a].push_back(b);
            }
            else
            {
                for (int d = -reach; d <= reach; ++d)
                    axes[a].push_back(((home[a] + d) % per_axis_ + per_axis_) % per_axis_);
            }
        }
        std::array<std::size_t, max_dimension> pick{};
        while (true)
        {
            std::size_t idx = 0;
            for (int a = 0; a < n; ++a)
                idx = idx * per_axis_ + axes[a][pick[a]];
            for (auto id : buckets_[idx])
                f(static_cast<std::size_t>(id));
            int a = 0;
            while (a < n && ++pick[a] == axes[a].size())
            {
                pick[a] = 0;
                ++a;
            }
            if (a == n)
                break;
        }
    }

  private:
    int axis_bucket(std::uint64_t raw) const
    {
        return static_cast<int>(
            (static_cast<unsigned __int128>(raw) * per_axis_) >> 64);
    }

    std::size_t bucket_of(Point const& p) const
    {
        std::size_t idx = 0;
        for (int a = 0; a < space_.dimension(); ++a)
            idx = idx * per_axis_ + axis_bucket(p.raw(a));
        return idx;
    }

    SpaceSpec space_;
    int per_axis_ = 1;
    std::vector<std::vector<std::uint32_t>> buckets_;
};

// Real root > 1 of x^(d+1) = x + 1.
double generalized_golden(int d)
{
    double x = 2.0;
    for (int i = 0; i < 64; ++i)
        x -= (std::pow(x, d + 1) - x - 1) / ((d + 1) * std::pow(x, d) - 1);
    return x;
}
}  // namespace

//---------------------------------------------------------------------------//
Packing maximal_packing(SpaceSpec const& space,
                        double epsilon,
                        std::size_t probe_budget,
                        RngStream& rng)
{
    require(epsilon > 0 && std::isfinite(epsilon), "packing epsilon must be positive");
    require(probe_budget >= 1, "probe budget must be at least 1");
    int const n = space.dimension();

    Packing out;
    out.epsilon = epsilon;
    Point const anchor = sample_uniform(space, rng);
    if (epsilon >= space.diameter())
    {
        out.centers.push_back(anchor);
        out.coarse_warning = true;
        out.probes = 1;
        return out;
    }

    double const separation = 2 * epsilon * (1 - packing_slack);
    BucketIndex index(space, 2 * epsilon);
    auto try_insert = [&](Point const& p) {
        ++out.probes;
        bool clear = true;
        index.visit(p, separation, [&](std::size_t id) {
            if (clear && distance_unchecked(space, p, out.centers[id]) < separation)
                clear = false;
        });
        if (clear)
        {
            index.insert(out.centers.size(), p);
            out.centers.push_back(p);
        }
        return clear;
    };

    // Phase 1: anchored lattice, spacing 1/m >= 2 eps per axis.
    auto const m = static_cast<std::uint64_t>(
        std::max(1.0, std::floor(1.0 / (2 * epsilon))));
    double total = 1;
    for (int a = 0; a < n; ++a)
        total *= static_cast<double>(m);
    require(total <= double(1 << 22), "packing epsilon too small for this dimension");
    std::array<std::uint64_t, max_dimension> idx{};
    while (true)
    {
        Point p(n);
        for (int a = 0; a < n; ++a)
        {
            auto const step = static_cast<std::uint64_t>(
                (static_cast<unsigned __int128>(idx[a]) << 64) / m);
            p.raw(a) = anchor.raw(a) + step;
        }
        try_insert(p);
        int a = 0;
        while (a < n && ++idx[a] == m)
        {
            idx[a] = 0;
            ++a;
        }
        if (a == n)
            break;
    }

    // Phase 2: additive recurrence until probe_budget consecutive rejections.
    double const phi = generalized_golden(n);
    std::array<std::uint64_t, max_dimension> incr{};
    for (int a = 0; a < n; ++a)
        incr[a] = to_fixed(std::pow(1.0 / phi, a + 1));
    Point probe = sample_uniform(space, rng);
    std::size_t rejections = 0;
    while (rejections < probe_budget)
    {
        for (int a = 0; a < n; ++a)
            probe.raw(a) += incr[a];
        if (try_insert(probe))
            rejections = 0;
        else
            ++rejections;
    }
    return out;
}

PackingExponent packing_exponent(SpaceSpec const& space,
                                 std::span<double const> eps_grid,
                                 std::size_t probe_budget,
                                 RngStream& rng)
{
    if (eps_grid.size() < 2)
        fail(ErrorKind::invalid_input, "packing exponent fit needs >= 2 scales");
    for (std::size_t i = 1; i < eps_grid.size(); ++i)
        require(eps_grid[i] < eps_grid[i - 1], "eps grid must be sorted descending");

    PackingExponent out;
    out.eps0 = eps_grid.front();
    std::vector<double> xs, ys;
    for (double eps : eps_grid)
    {
        Packing const p = maximal_packing(space, eps, probe_budget, rng);
        out.counts.emplace_back(eps, p.count());
        xs.push_back(std::log(1.0 / eps));
        ys.push_back(std::log(static_cast<double>(p.count())));
    }
    LinearFit const fit = least_squares(xs, ys);
    out.k_hat = fit.slope;
    for (auto const& [eps, count] : out.counts)
    {
        out.c_hat = std::max(out.c_hat,
                             static_cast<double>(count) * std::pow(eps, out.k_hat));
    }
    return out;
}

//---------------------------------------------------------------------------//
struct Partition::Index
{
    BucketIndex buckets;
};

Partition::Partition(SpaceSpec const& space, Packing packing)
    : space_(space), packing_(std::move(packing))
{
    require(!packing_.centers.empty(), "partition needs at least one center");
    for (auto const& c : packing_.centers)
        require(c.dimension() == space.dimension(), "center dimension mismatch");
    index_ = std::make_unique<Index>(Index{BucketIndex(space, cell_radius())});
    for (std::size_t i = 0; i < packing_.centers.size(); ++i)
        index_->buckets.insert(i, packing_.centers[i]);
}

Partition::~Partition() = default;
Partition::Partition(Partition&&) noexcept = default;
Partition& Partition::operator=(Partition&&) noexcept = default;

std::optional<std::size_t> Partition::cell_of(Point const& x) const
{
    double const r = cell_radius();
    std::optional<std::size_t> best;
    index_->buckets.visit(x, r, [&](std::size_t id) {
        if ((!best || id < *best)
            && distance_unchecked(space_, x, packing_.centers[id]) < r)
        {
            best = id;
        }
    });
    return best;
}

std::vector<std::size_t> Partition::centers_near(Point const& x, double radius) const
{
    std::vector<std::size_t> out;
    index_->buckets.visit(x, radius, [&](std::size_t id) {
        if (distance_unchecked(space_, x, packing_.centers[id]) < radius)
            out.push_back(id);
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<std::size_t> cell_of(Partition const& partition, Point const& x)
{
    return partition.cell_of(x);
}

//---------------------------------------------------------------------------//
namespace
{
constexpr double unbounded = 1e6;

// Signed wrapped offset b - a in [-1/2, 1/2), from the exact fixed-point gap.
double raw_offset(std::uint64_t a, std::uint64_t b)
{
    return static_cast<double>(static_cast<std::int64_t>(b - a)) * 0x1.0p-64;
}

struct Box
{
    std::array<double, max_dimension> lo{};
    std::array<double, max_dimension> hi{};
    // Open faces are excluded; a zero-width box survives only when closed.
    std::array<bool, max_dimension> lo_open{};
    std::array<bool, max_dimension> hi_open{};
};

bool overlaps_open(Box const& a, Box const& b, int n)
{
    for (int i = 0; i < n; ++i)
    {
        if (!(a.lo[i] < b.hi[i] && b.lo[i] < a.hi[i]))
            return false;
    }
    return true;
}

// Box a minus open box b, appended to out.
void subtract(Box a, Box const& b, int n, std::vector<Box>& out)
{
    if (!overlaps_open(a, b, n))
    {
        out.push_back(a);
        return;
    }
    for (int i = 0; i < n; ++i)
    {
        if (a.lo[i] < b.lo[i] || (a.lo[i] == b.lo[i] && !a.lo_open[i]))
        {
            Box piece = a;
            piece.hi[i] = b.lo[i];
            piece.hi_open[i] = false;
            out.push_back(piece);
            a.lo[i] = b.lo[i];
            a.lo_open[i] = true;
        }
        if (b.hi[i] < a.hi[i] || (b.hi[i] == a.hi[i] && !a.hi_open[i]))
        {
            Box piece = a;
            piece.lo[i] = b.hi[i];
            piece.lo_open[i] = false;
            out.push_back(piece);
            a.hi[i] = b.hi[i];
            a.hi_open[i] = true;
        }
    }
}

void subtract_all(std::vector<Box>& boxes, Box const& b, int n)
{
    std::vector<Box> next;
    next.reserve(boxes.size() + 2 * n);
    for (auto const& a : boxes)
        subtract(a, b, n, next);
    boxes.swap(next);
}

// Visit every periodic image (shifts in {-1,0,1}^n) of a box; axes spanning
// the whole circle are already unbounded and not shifted.
template<class F>
void for_each_image(Box const& b, int n, F&& f)
{
    std::array<int, max_dimension> shift{};
    std::fill(shift.begin(), shift.begin() + n, -1);
    while (true)
    {
        Box img = b;
        bool skip = false;
        for (int i = 0; i < n; ++i)
        {
            if (b.hi[i] - b.lo[i] >= unbounded)
            {
                if (shift[i] != 0)
                    skip = true;
                continue;
            }
            img.lo[i] += shift[i];
            img.hi[i] += shift[i];
        }
        if (!skip)
            f(img);
        int i = 0;
        while (i < n && ++shift[i] == 2)
        {
            shift[i] = -1;
            ++i;
        }
        if (i == n)
            break;
    }
}

double circle_gap(double u, double lo, double hi)
{
    if (hi - lo >= 1)
        return 0;
    double best = std::numeric_limits<double>::infinity();
    for (int s = -1; s <= 1; ++s)
    {
        double const t = u + s;
        double const g = t < lo ? lo - t : (t > hi ? t - hi : 0.0);
        best = std::min(best, g);
    }
    return best;
}
}  // namespace

struct MollifierSet::Geometry
{
    bool exact = false;
    // chebyshev: boxes of each cell in the frame centred on its center
    std::vector<std::vector<Box>> cells;
    // other metrics: symmetric probe offsets with |o| < delta
    std::vector<std::array<double, max_dimension>> probes;
    std::vector<double> probe_norms;
    double spacing = 0;
};

MollifierSet::MollifierSet(Partition const& partition,
                           double delta,
                           int probe_resolution)
    : partition_(&partition), delta_(delta), geometry_(std::make_unique<Geometry>())
{
    require(delta > 0 && delta < partition.cell_radius(),
            "mollifier delta must lie in (0, 2 eps)");
    require(delta < 0.5, "mollifier delta must be below 1/2");
    require(probe_resolution >= 1, "probe resolution must be positive");

    SpaceSpec const& space = partition.space();
    int const n = space.dimension();
    auto const& centers = partition.packing().centers;
    double const w = partition.cell_radius();

    if (space.metric() == Metric::chebyshev || n == 1)
    {
        geometry_->exact = true;
        geometry_->cells.resize(centers.size());
        for (std::size_t k = 0; k < centers.size(); ++k)
        {
            Box cube;
            for (int a = 0; a < n; ++a)
            {
                cube.lo[a] = w >= 0.5 ? -0.5 : -w;
                cube.hi[a] = w >= 0.5 ? 0.5 : w;
                cube.lo_open[a] = cube.hi_open[a] = w < 0.5;
            }
            std::vector<Box> boxes{cube};
            for (std::size_t i = 0; i < k && !boxes.empty(); ++i)
            {
                Box other;
                for (int a = 0; a < n; ++a)
                {
                    double const o = raw_offset(centers[k].raw(a), centers[i].raw(a));
                    other.lo[a] = w >= 0.5 ? -unbounded : o - w;
                    other.hi[a] = w >= 0.5 ? unbounded : o + w;
                }
                for_each_image(other, n, [&](Box const& img) {
                    if (overlaps_open(cube, img, n))
                        subtract_all(boxes, img, n);
                });
            }
            geometry_->cells[k] = std::move(boxes);
        }
        return;
    }

    double const s = delta / probe_resolution;
    geometry_->spacing = s;
    int const r = probe_resolution;
    std::array<int, max_dimension> idx{};
    std::fill(idx.begin(), idx.begin() + n, -r);
    while (true)
    {
        std::array<double, max_dimension> o{};
        double norm2 = 0;
        for (int a = 0; a < n; ++a)
        {
            o[a] = idx[a] * s;
            norm2 += o[a] * o[a];
        }
        if (std::sqrt(norm2) < delta)
        {
            geometry_->probes.push_back(o);
            geometry_->probe_norms.push_back(std::sqrt(norm2));
        }
        int a = 0;
        while (a < n && ++idx[a] == r + 1)
        {
            idx[a] = -r;
            ++a;
        }
        if (a == n)
            break;
    }
}

MollifierSet::~MollifierSet() = default;
MollifierSet::MollifierSet(MollifierSet&&) noexcept = default;
MollifierSet& MollifierSet::operator=(MollifierSet&&) noexcept = default;

bool MollifierSet::exact() const noexcept
{
    return geometry_->exact;
}

double MollifierSet::tolerance() const noexcept
{
    if (geometry_->exact)
        return 0;
    return geometry_->spacing * std::sqrt(double(partition_->space().dimension()));
}

std::vector<std::size_t> MollifierSet::candidates(Point const& x) const
{
    return partition_->centers_near(x, partition_->cell_radius() + delta_);
}

namespace
{
Point offset_point(Point const& x, std::array<double, max_dimension> const& o)
{
    Point p = x;
    for (int a = 0; a < x.dimension(); ++a)
        p.raw(a) += to_fixed(o[a]);
    return p;
}
}  // namespace

double MollifierSet::distance_to_cell(std::size_t k, Point const& x) const
{
    require(k < partition_->size(), "cell index out of range");
    if (partition_->cell_of(x) == k)
        return 0;
    int const n = x.dimension();
    Point const& c = partition_->packing().centers[k];
    if (geometry_->exact)
    {
        std::array<double, max_dimension> u{};
        for (int a = 0; a < n; ++a)
            u[a] = raw_offset(c.raw(a), x.raw(a));
        double best = std::numeric_limits<double>::infinity();
        for (auto const& b : geometry_->cells[k])
        {
            double d = 0;
            for (int a = 0; a < n; ++a)
                d = std::max(d, circle_gap(u[a], b.lo[a], b.hi[a]));
            best = std::min(best, d);
        }
        return best;
    }
    // Probe estimate; infinity when no probe within delta hits the cell.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < geometry_->probes.size(); ++i)
    {
        if (geometry_->probe_norms[i] < best
            && partition_->cell_of(offset_point(x, geometry_->probes[i])) == k)
        {
            best = geometry_->probe_norms[i];
        }
    }
    return best;
}

bool MollifierSet::in_neighbourhood(std::size_t k, Point const& x) const
{
    return distance_to_cell(k, x) < delta_;
}

double MollifierSet::operator()(std::size_t k, Point const& x) const
{
    require(k < partition_->size(), "cell index out of range");
    if (partition_->cell_of(x) == k)
        return 1.0;
    if (!in_neighbourhood(k, x))
        return 0.0;

    int const n = x.dimension();
    double dist = delta_;
    if (geometry_->exact)
    {
        Point const& c = partition_->packing().centers[k];
        Box window;
        for (int a = 0; a < n; ++a)
        {
            window.lo[a] = -delta_;
            window.hi[a] = delta_;
        }
        std::vector<Box> uncovered{window};
        for (auto const& b : geometry_->cells[k])
        {
            Box grown;
            for (int a = 0; a < n; ++a)
            {
                double const shift = raw_offset(x.raw(a), c.raw(a));
                if (b.hi[a] - b.lo[a] + 2 * delta_ >= 1)
                {
                    grown.lo[a] = -unbounded;
                    grown.hi[a] = unbounded;
                }
                else
                {
                    grown.lo[a] = b.lo[a] + shift - delta_;
                    grown.hi[a] = b.hi[a] + shift + delta_;
                }
            }
            for_each_image(grown, n, [&](Box const& img) {
                if (overlaps_open(window, img, n))
                    subtract_all(uncovered, img, n);
            });
            if (uncovered.empty())
                break;
        }
        for (auto const& u : uncovered)
        {
            double d = 0;
            for (int a = 0; a < n; ++a)
            {
                double const g = u.lo[a] > 0 ? u.lo[a] : (u.hi[a] < 0 ? -u.hi[a] : 0.0);
                d = std::max(d, g);
            }
            dist = std::min(dist, d);
        }
    }
    else
    {
        for (std::size_t i = 0; i < geometry_->probes.size(); ++i)
        {
            double const norm = geometry_->probe_norms[i];
            if (norm >= dist)
                continue;
            Point const y = offset_point(x, geometry_->probes[i]);
            if (!in_neighbourhood(k, y))
                dist = norm;
        }
    }
    return std::min(1.0, dist / delta_);
}

double mollifier_eval(MollifierSet const& mollifiers, std::size_t k, Point const& x)
{
    return mollifiers(k, x);
}

//---------------------------------------------------------------------------//
NeighbourhoodExcess neighbourhood_excess(MeasureSpec const& measure,
                                         MollifierSet const& mollifiers,
                                         std::size_t n_samples,
                                         RngStream& rng,
                                         std::optional<ExcessBound> bound)
{
    if (n_samples < 1000)
        fail(ErrorKind::invalid_input, "neighbourhood_excess needs at least 1000 samples");
    Partition const& partition = mollifiers.partition();
    SpaceSpec const& space = partition.space();
    measure.check_space(space);

    std::vector<std::size_t> hits(partition.size(), 0);
    for (std::size_t s = 0; s < n_samples; ++s)
    {
        Point const x = sample_measure(measure, space, rng);
        auto const home = partition.cell_of(x);
        for (std::size_t k : mollifiers.candidates(x))
        {
            if (home == k)
                continue;
            if (mollifiers.in_neighbourhood(k, x))
                ++hits[k];
        }
    }

    NeighbourhoodExcess out;
    out.delta = mollifiers.delta();
    out.samples = n_samples;
    auto const total = static_cast<double>(n_samples);
    for (std::size_t k = 0; k < hits.size(); ++k)
    {
        double const p = static_cast<double>(hits[k]) / total;
        out.excess.push_back(p);
        out.std_error.push_back(std::sqrt(p * (1 - p) / total));
        if (p > out.max_excess)
        {
            out.max_excess = p;
            out.argmax = k;
        }
    }
    if (bound)
    {
        double const rho = partition.cell_radius();
        out.bound = bound->c * std::pow(rho, -bound->k)
                    * std::pow(out.delta, bound->alpha0);
    }
    return out;
}

}  // namespace reclab
