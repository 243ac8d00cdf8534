#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace reclab
{
//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * The output block is a pure function of (key, counter), so any number of
 * independent streams can be derived from a master seed without shared
 * state.
 */
class Philox4x32
{
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round)
        {
            if (round > 0)
            {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            std::uint64_t const p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            std::uint64_t const p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            auto const hi0 = static_cast<std::uint32_t>(p0 >> 32);
            auto const lo0 = static_cast<std::uint32_t>(p0);
            auto const hi1 = static_cast<std::uint32_t>(p1 >> 32);
            auto const lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

//---------------------------------------------------------------------------//
/*!
 * A seeded random stream identified by (master seed, stream index).
 *
 * Satisfies UniformRandomBitGenerator. Copying a stream copies its position.
 */
class RngStream
{
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)}
        , stream_id_(stream_id)
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept
    {
        if (cached_ == 0)
        {
            Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                    static_cast<std::uint32_t>(block_ >> 32),
                                    static_cast<std::uint32_t>(stream_id_),
                                    static_cast<std::uint32_t>(stream_id_ >> 32)};
            auto out = Philox4x32::generate(ctr, key_);
            ++block_;
            buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
            buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
            cached_ = 2;
        }
        return buffer_[2 - cached_--];
    }

    //! Uniform double in [0, 1) with 53 random bits.
    double next_double() noexcept
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    //! Uniform integer in [0, n), n > 0, without modulo bias.
    std::uint64_t bounded(std::uint64_t n) noexcept
    {
        // Lemire's multiply-shift rejection method
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n)
        {
            std::uint64_t const threshold = (0 - n) % n;
            while (low < threshold)
            {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    std::uint64_t stream_id() const noexcept { return stream_id_; }

  private:
    Philox4x32::Key key_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cached_ = 0;
};

//! Stream-index namespaces so that different experiment roles never share
//! random numbers for the same seed index.
enum class StreamRole : std::uint64_t
{
    seed_points = 0,
    fit_centers = 1,
    packing = 2,
    neighbourhood = 3,
    misc = 4,
};

inline RngStream
make_stream(std::uint64_t master_seed, StreamRole role, std::uint64_t index)
{
    return RngStream(master_seed,
                     (static_cast<std::uint64_t>(role) << 56) | index);
}

}  // namespace reclab
