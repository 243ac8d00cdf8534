#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "phase.hpp"
#include "rng.hpp"

namespace reclab
{
enum class SystemKind
{
    toral_automorphism,
    shift_map,
    rotation,
    identity,
};

enum class Arithmetic
{
    exact_grid,  //!< integer matrix action on 64-bit fixed-point coordinates
    bit_stream,  //!< lazily drawn digit expansion (shift maps)
    floating,    //!< double precision iteration
};

std::string_view to_string(SystemKind k);
std::string_view to_string(Arithmetic a);
SystemKind system_kind_from_string(std::string_view name);
Arithmetic arithmetic_from_string(std::string_view name);

//---------------------------------------------------------------------------//
/*!
 * A measure-preserving map of the torus together with the arithmetic used to
 * iterate it.
 *
 * Rotation and identity are non-mixing negative controls. Rotation always
 * translates by the angle rounded to the 64-bit grid, so its orbit distances
 * do not depend on the starting point.
 */
class SystemSpec
{
  public:
    static SystemSpec toral_automorphism(int dimension,
                                         std::vector<std::int64_t> matrix,
                                         Arithmetic arithmetic
                                         = Arithmetic::exact_grid);
    //! Arnold's cat map [[2,1],[1,1]].
    static SystemSpec cat_map(Arithmetic arithmetic = Arithmetic::exact_grid);
    static SystemSpec shift_map(int base = 2,
                                Arithmetic arithmetic = Arithmetic::bit_stream);
    static SystemSpec rotation(double angle);
    static SystemSpec identity(int dimension = 1);

    SystemKind kind() const noexcept { return kind_; }
    Arithmetic arithmetic() const noexcept { return arithmetic_; }
    int dimension() const noexcept { return dimension_; }
    std::vector<std::int64_t> const& matrix() const noexcept { return matrix_; }
    int base() const noexcept { return base_; }
    double angle() const noexcept { return angle_; }
    std::uint64_t angle_fixed() const noexcept { return angle_fixed_; }

    //! False for the negative controls (rotation, identity).
    bool is_mixing() const noexcept
    {
        return kind_ == SystemKind::toral_automorphism
               || kind_ == SystemKind::shift_map;
    }

    //! Throws if the space does not match this system's dimension.
    void check_space(SpaceSpec const& space) const;

  private:
    SystemSpec() = default;

    SystemKind kind_ = SystemKind::identity;
    Arithmetic arithmetic_ = Arithmetic::floating;
    int dimension_ = 1;
    std::vector<std::int64_t> matrix_;
    int base_ = 2;
    double angle_ = 0;
    std::uint64_t angle_fixed_ = 0;
};

//! How a digit-stream orbit continues past the digits stored in its start
//! point.
enum class DigitTail
{
    random,    //!< fresh iid digits from the orbit's stream (a.e. point)
    periodic,  //!< repeat the stored digit block (exact rationals)
};

//---------------------------------------------------------------------------//
/*!
 * Mutable single-owner state of one orbit T^n x.
 */
class OrbitState
{
  public:
    OrbitState(SystemSpec const& system,
               Point const& start,
               RngStream stream,
               DigitTail tail = DigitTail::random);

    Point const& current() const noexcept { return current_; }
    std::uint64_t steps() const noexcept { return steps_; }

    //! Unconsumed digits held for a digit-stream orbit (window included).
    std::size_t buffered_digits() const noexcept;

  private:
    friend void step(SystemSpec const& system, OrbitState& state);

    int next_bit();
    int next_digit(int base);
    void refresh_from_digits(int base);

    Point current_;
    std::uint64_t steps_ = 0;
    RngStream stream_;
    DigitTail tail_;

    // floating mode
    std::array<double, max_dimension> real_{};

    // base-2 stream: pending bits beyond the 64-bit window
    std::uint64_t pending_ = 0;
    int pending_count_ = 0;
    std::uint64_t period_word_ = 0;
    int period_pos_ = 0;

    // base-m stream: ring of leading digits
    std::vector<std::uint8_t> digits_;
    std::size_t head_ = 0;
    std::vector<std::uint8_t> period_digits_;
};

//! Apply T once.
void step(SystemSpec const& system, OrbitState& state);

//! d(T^k x, x) for k = 1..n_max.
std::vector<double> orbit_distances(SystemSpec const& system,
                                    SpaceSpec const& space,
                                    Point const& x,
                                    std::size_t n_max,
                                    RngStream stream,
                                    DigitTail tail = DigitTail::random);

//! Number of base-m digits that pin down a 64-bit fraction.
int digit_window(int base);

}  // namespace reclab
