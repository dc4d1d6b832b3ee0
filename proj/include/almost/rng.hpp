#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace almost
{

/// splitmix64 finalizer, used to derive independent seeds from one base seed.
constexpr uint64_t mix_seed( uint64_t x )
{
  x += 0x9e3779b97f4a7c15ull;
  x = ( x ^ ( x >> 30 ) ) * 0xbf58476d1ce4e5b9ull;
  x = ( x ^ ( x >> 27 ) ) * 0x94d049bb133111ebull;
  return x ^ ( x >> 31 );
}

constexpr uint64_t derive_seed( uint64_t base, uint64_t stream ) { return mix_seed( base ^ mix_seed( stream + 1 ) ); }

/*! \brief Seeded generator with platform-independent sampling helpers.
 *
 * The standard distributions are implementation-defined, so integer and real
 * draws are derived from the raw 64-bit engine output directly.
 */
class Rng
{
public:
  explicit Rng( uint64_t seed ) : engine_( seed ) {}

  uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n).
  uint64_t uniform( uint64_t n )
  {
    const uint64_t limit = ~uint64_t{ 0 } - ( ~uint64_t{ 0 } % n );
    uint64_t x;
    do
      x = engine_();
    while ( x >= limit );
    return x % n;
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform_real() { return static_cast<double>( engine_() >> 11 ) * 0x1.0p-53; }

  bool coin() { return ( engine_() >> 63 ) != 0; }

  /// Standard normal via Box-Muller.
  double normal()
  {
    if ( has_spare_ )
    {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do
      u1 = uniform_real();
    while ( u1 <= 0.0 );
    const double u2 = uniform_real();
    const double r = std::sqrt( -2.0 * std::log( u1 ) );
    spare_ = r * std::sin( 2.0 * 3.14159265358979323846 * u2 );
    has_spare_ = true;
    return r * std::cos( 2.0 * 3.14159265358979323846 * u2 );
  }

  template<typename It>
  void shuffle( It first, It last )
  {
    for ( auto n = last - first; n > 1; --n )
      std::swap( first[n - 1], first[uniform( static_cast<uint64_t>( n ) )] );
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace almost
