#include "reclab/systems.hpp"

#include <cmath>
#include <string>

#include "reclab/error.hpp"

namespace reclab
{
std::string_view to_string(SystemKind k)
{
    switch (k)
    {
        case SystemKind::toral_automorphism:
            return "toral_automorphism";
        case SystemKind::shift_map:
            return "shift_map";
        case SystemKind::rotation:
            return "rotation";
        case SystemKind::identity:
            return "identity";
    }
    return "?";
}

std::string_view to_string(Arithmetic a)
{
    switch (a)
    {
        case Arithmetic::exact_grid:
            return "exact_grid";
        case Arithmetic::bit_stream:
            return "bit_stream";
        case Arithmetic::floating:
            return "float";
    }
    return "?";
}

SystemKind system_kind_from_string(std::string_view name)
{
    for (auto k : {SystemKind::toral_automorphism,
                   SystemKind::shift_map,
                   SystemKind::rotation,
                   SystemKind::identity})
    {
        if (to_string(k) == name)
            return k;
    }
    fail(ErrorKind::invalid_input,
         "unknown system kind '" + std::string(name) + "'");
}

Arithmetic arithmetic_from_string(std::string_view name)
{
    for (auto a :
         {Arithmetic::exact_grid, Arithmetic::bit_stream, Arithmetic::floating})
    {
        if (to_string(a) == name)
            return a;
    }
    fail(ErrorKind::invalid_input,
         "unknown arithmetic mode '" + std::string(name) + "'");
}

namespace
{
// Exact integer determinant by fraction-free (Bareiss) elimination.
long double determinant(int n, std::vector<std::int64_t> const& m)
{
    std::vector<long double> a(m.begin(), m.end());
    long double sign = 1, prev = 1;
    for (int k = 0; k < n - 1; ++k)
    {
        if (a[k * n + k] == 0)
        {
            int swap = -1;
            for (int i = k + 1; i < n; ++i)
            {
                if (a[i * n + k] != 0)
                {
                    swap = i;
                    break;
                }
            }
            if (swap < 0)
                return 0;
            for (int j = 0; j < n; ++j)
                std::swap(a[k * n + j], a[swap * n + j]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
        {
            for (int j = k + 1; j < n; ++j)
            {
                a[i * n + j] = (a[i * n + j] * a[k * n + k]
                                - a[i * n + k] * a[k * n + j])
                               / prev;
            }
        }
        prev = a[k * n + k];
    }
    return sign * a[n * n - 1];
}
}  // namespace

SystemSpec SystemSpec::toral_automorphism(int dimension,
                                          std::vector<std::int64_t> matrix,
                                          Arithmetic arithmetic)
{
    require(dimension >= 1 && dimension <= max_dimension,
            "toral automorphism dimension out of range");
    require(matrix.size() == static_cast<std::size_t>(dimension * dimension),
            "toral automorphism matrix must have N*N entries");
    require(arithmetic != Arithmetic::bit_stream,
            "bit_stream arithmetic is only available for shift maps");
    long double const det = determinant(dimension, matrix);
    require(det == 1 || det == -1,
            "toral automorphism matrix must have determinant +-1");

    SystemSpec s;
    s.kind_ = SystemKind::toral_automorphism;
    s.arithmetic_ = arithmetic;
    s.dimension_ = dimension;
    s.matrix_ = std::move(matrix);
    return s;
}

SystemSpec SystemSpec::cat_map(Arithmetic arithmetic)
{
    return toral_automorphism(2, {2, 1, 1, 1}, arithmetic);
}

SystemSpec SystemSpec::shift_map(int base, Arithmetic arithmetic)
{
    require(base >= 2 && base <= 255, "shift map base must be in [2, 255]");
    require(arithmetic != Arithmetic::exact_grid,
            "exact_grid arithmetic is only available for toral automorphisms");
    SystemSpec s;
    s.kind_ = SystemKind::shift_map;
    s.arithmetic_ = arithmetic;
    s.base_ = base;
    return s;
}

SystemSpec SystemSpec::rotation(double angle)
{
    require(std::isfinite(angle), "rotation angle must be finite");
    SystemSpec s;
    s.kind_ = SystemKind::rotation;
    s.angle_ = angle;
    s.angle_fixed_ = to_fixed(angle);
    return s;
}

SystemSpec SystemSpec::identity(int dimension)
{
    require(dimension >= 1 && dimension <= max_dimension,
            "identity dimension out of range");
    SystemSpec s;
    s.kind_ = SystemKind::identity;
    s.dimension_ = dimension;
    return s;
}

void SystemSpec::check_space(SpaceSpec const& space) const
{
    if (space.dimension() != dimension_)
    {
        fail(ErrorKind::invalid_input,
             std::string(to_string(kind_)) + " requires a "
                 + std::to_string(dimension_)
                 + "-dimensional space, got dimension "
                 + std::to_string(space.dimension()));
    }
}

int digit_window(int base)
{
    return static_cast<int>(std::ceil(64.0 / std::log2(base))) + 1;
}

//---------------------------------------------------------------------------//
OrbitState::OrbitState(SystemSpec const& system,
                       Point const& start,
                       RngStream stream,
                       DigitTail tail)
    : current_(start), stream_(stream), tail_(tail)
{
    require(start.dimension() == system.dimension(),
            "orbit start point dimension does not match the system");
    if (system.arithmetic() == Arithmetic::floating)
    {
        for (int i = 0; i < start.dimension(); ++i)
            real_[i] = start.real(i);
    }
    if (system.kind() != SystemKind::shift_map
        || system.arithmetic() != Arithmetic::bit_stream)
    {
        return;
    }
    int const base = system.base();
    if (base == 2)
    {
        period_word_ = start.raw(0);
        return;
    }
    // Leading base-m digits of the start point.
    int const width = digit_window(base);
    digits_.resize(width);
    std::uint64_t frac = start.raw(0);
    for (int i = 0; i < width; ++i)
    {
        unsigned __int128 t = static_cast<unsigned __int128>(frac) * base;
        digits_[i] = static_cast<std::uint8_t>(t >> 64);
        frac = static_cast<std::uint64_t>(t);
    }
    period_digits_ = digits_;
    refresh_from_digits(base);
}

std::size_t OrbitState::buffered_digits() const noexcept
{
    if (!digits_.empty())
        return digits_.size();
    return 64 + static_cast<std::size_t>(pending_count_);
}

int OrbitState::next_bit()
{
    if (tail_ == DigitTail::periodic)
    {
        int const bit = static_cast<int>((period_word_ >> (63 - period_pos_)) & 1u);
        period_pos_ = (period_pos_ + 1) & 63;
        return bit;
    }
    if (pending_count_ == 0)
    {
        pending_ = stream_.next_u64();
        pending_count_ = 64;
    }
    int const bit = static_cast<int>(pending_ >> 63);
    pending_ <<= 1;
    --pending_count_;
    return bit;
}

int OrbitState::next_digit(int base)
{
    if (tail_ == DigitTail::periodic)
    {
        int const d = period_digits_[period_pos_];
        period_pos_ = (period_pos_ + 1) % static_cast<int>(period_digits_.size());
        return d;
    }
    return static_cast<int>(stream_.bounded(static_cast<std::uint64_t>(base)));
}

void OrbitState::refresh_from_digits(int base)
{
    // Horner from the least significant stored digit.
    unsigned __int128 v = 0;
    std::size_t const width = digits_.size();
    for (std::size_t i = width; i-- > 0;)
    {
        std::uint8_t const d = digits_[(head_ + i) % width];
        v = ((static_cast<unsigned __int128>(d) << 64) + v) / base;
    }
    current_.raw(0) = static_cast<std::uint64_t>(v);
}

void step(SystemSpec const& system, OrbitState& state)
{
    ++state.steps_;
    switch (system.kind())
    {
        case SystemKind::identity:
            return;
        case SystemKind::rotation:
            state.current_.raw(0) += system.angle_fixed();
            return;
        case SystemKind::shift_map: {
            int const base = system.base();
            if (system.arithmetic() == Arithmetic::floating)
            {
                double v = state.real_[0] * base;
                v -= std::floor(v);
                state.real_[0] = v;
                state.current_.raw(0) = to_fixed(v);
                return;
            }
            if (base == 2)
            {
                std::uint64_t& w = state.current_.raw(0);
                w = (w << 1) | static_cast<std::uint64_t>(state.next_bit());
                return;
            }
            state.digits_[state.head_]
                = static_cast<std::uint8_t>(state.next_digit(base));
            state.head_ = (state.head_ + 1) % state.digits_.size();
            state.refresh_from_digits(base);
            return;
        }
        case SystemKind::toral_automorphism: {
            int const n = system.dimension();
            auto const& m = system.matrix();
            if (system.arithmetic() == Arithmetic::floating)
            {
                std::array<double, max_dimension> next{};
                for (int i = 0; i < n; ++i)
                {
                    double acc = 0;
                    for (int j = 0; j < n; ++j)
                        acc += static_cast<double>(m[i * n + j]) * state.real_[j];
                    next[i] = acc - std::floor(acc);
                }
                for (int i = 0; i < n; ++i)
                {
                    state.real_[i] = next[i];
                    state.current_.raw(i) = to_fixed(next[i]);
                }
                return;
            }
            // Arithmetic mod 2^64 on the raw fractions is an exact
            // bijection of the grid when det = +-1.
            std::array<std::uint64_t, max_dimension> next{};
            for (int i = 0; i < n; ++i)
            {
                std::uint64_t acc = 0;
                for (int j = 0; j < n; ++j)
                {
                    acc += static_cast<std::uint64_t>(m[i * n + j])
                           * state.current_.raw(j);
                }
                next[i] = acc;
            }
            for (int i = 0; i < n; ++i)
                state.current_.raw(i) = next[i];
            return;
        }
    }
}

std::vector<double> orbit_distances(SystemSpec const& system,
                                    SpaceSpec const& space,
                                    Point const& x,
                                    std::size_t n_max,
                                    RngStream stream,
                                    DigitTail tail)
{
    require(n_max >= 1, "orbit_distances needs n_max >= 1");
    system.check_space(space);
    OrbitState state(system, x, stream, tail);
    std::vector<double> out;
    out.reserve(n_max);
    for (std::size_t k = 0; k < n_max; ++k)
    {
        step(system, state);
        out.push_back(distance_unchecked(space, state.current(), x));
    }
    return out;
}

}  // namespace reclab
