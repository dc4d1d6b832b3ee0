#include "almost/truth_table.hpp"

#include <algorithm>
#include <cassert>

namespace almost
{

namespace
{

constexpr uint64_t var_masks[6] = { 0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
                                    0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull };

} // namespace

TruthTable TruthTable::nth_var( uint32_t num_vars, uint32_t var )
{
  assert( var < num_vars );
  TruthTable t( num_vars );
  for ( uint32_t w = 0; w < t.words_.size(); ++w )
    t.words_[w] = var < 6 ? var_masks[var] : ( ( ( w >> ( var - 6 ) ) & 1u ) ? ~uint64_t{ 0 } : 0 );
  return t;
}

TruthTable TruthTable::constant( uint32_t num_vars, bool value )
{
  TruthTable t( num_vars );
  if ( value )
    std::fill( t.words_.begin(), t.words_.end(), ~uint64_t{ 0 } );
  return t;
}

bool TruthTable::is_const0() const
{
  return std::all_of( words_.begin(), words_.end(), []( uint64_t w ) { return w == 0; } );
}

bool TruthTable::is_const1() const
{
  return std::all_of( words_.begin(), words_.end(), []( uint64_t w ) { return w == ~uint64_t{ 0 }; } );
}

TruthTable TruthTable::operator~() const
{
  TruthTable t = *this;
  for ( auto& w : t.words_ )
    w = ~w;
  return t;
}

TruthTable TruthTable::operator&( const TruthTable& o ) const
{
  TruthTable t = *this;
  for ( std::size_t i = 0; i < t.words_.size(); ++i )
    t.words_[i] &= o.words_[i];
  return t;
}

TruthTable TruthTable::operator|( const TruthTable& o ) const
{
  TruthTable t = *this;
  for ( std::size_t i = 0; i < t.words_.size(); ++i )
    t.words_[i] |= o.words_[i];
  return t;
}

TruthTable TruthTable::operator^( const TruthTable& o ) const
{
  TruthTable t = *this;
  for ( std::size_t i = 0; i < t.words_.size(); ++i )
    t.words_[i] ^= o.words_[i];
  return t;
}

TruthTable TruthTable::cofactor0( uint32_t var ) const
{
  TruthTable t = *this;
  if ( var < 6 )
  {
    const uint32_t shift = 1u << var;
    for ( auto& w : t.words_ )
      w = ( w & ~var_masks[var] ) | ( ( w & ~var_masks[var] ) << shift );
  }
  else
  {
    const uint32_t step = 1u << ( var - 6 );
    for ( uint32_t w = 0; w < t.words_.size(); w += 2 * step )
      for ( uint32_t k = 0; k < step; ++k )
        t.words_[w + step + k] = t.words_[w + k];
  }
  return t;
}

TruthTable TruthTable::cofactor1( uint32_t var ) const
{
  TruthTable t = *this;
  if ( var < 6 )
  {
    const uint32_t shift = 1u << var;
    for ( auto& w : t.words_ )
      w = ( w & var_masks[var] ) | ( ( w & var_masks[var] ) >> shift );
  }
  else
  {
    const uint32_t step = 1u << ( var - 6 );
    for ( uint32_t w = 0; w < t.words_.size(); w += 2 * step )
      for ( uint32_t k = 0; k < step; ++k )
        t.words_[w + k] = t.words_[w + step + k];
  }
  return t;
}

namespace
{

/// Returns the cover's function; appends cubes. Invariant: lower <= result <= upper.
TruthTable isop_rec( const TruthTable& lower, const TruthTable& upper, uint32_t num_vars, std::vector<Cube>& cubes )
{
  if ( lower.is_const0() )
    return TruthTable::constant( lower.num_vars(), false );
  if ( upper.is_const1() )
  {
    cubes.push_back( {} );
    return TruthTable::constant( lower.num_vars(), true );
  }

  // topmost variable either bound depends on
  int var = static_cast<int>( num_vars ) - 1;
  for ( ; var >= 0; --var )
    if ( lower.depends_on( var ) || upper.depends_on( var ) )
      break;
  assert( var >= 0 );
  const auto v = static_cast<uint32_t>( var );

  const auto l0 = lower.cofactor0( v ), l1 = lower.cofactor1( v );
  const auto u0 = upper.cofactor0( v ), u1 = upper.cofactor1( v );

  const auto start0 = cubes.size();
  const auto r0 = isop_rec( l0 & ~u1, u0, v, cubes );
  for ( auto k = start0; k < cubes.size(); ++k )
    cubes[k].neg |= 1u << v;

  const auto start1 = cubes.size();
  const auto r1 = isop_rec( l1 & ~u0, u1, v, cubes );
  for ( auto k = start1; k < cubes.size(); ++k )
    cubes[k].pos |= 1u << v;

  const auto rest = ( l0 & ~r0 ) | ( l1 & ~r1 );
  const auto rs = isop_rec( rest, u0 & u1, v, cubes );

  const auto x = TruthTable::nth_var( lower.num_vars(), v );
  return ( r0 & ~x ) | ( r1 & x ) | rs;
}

} // namespace

std::vector<Cube> isop( const TruthTable& f )
{
  std::vector<Cube> cubes;
  const auto r = isop_rec( f, f, f.num_vars(), cubes );
  assert( r == f );
  (void)r;
  return cubes;
}

TruthTable cover_table( const std::vector<Cube>& cubes, uint32_t num_vars )
{
  auto acc = TruthTable::constant( num_vars, false );
  for ( const auto& c : cubes )
  {
    auto t = TruthTable::constant( num_vars, true );
    for ( uint32_t v = 0; v < num_vars; ++v )
    {
      if ( c.pos & ( 1u << v ) )
        t = t & TruthTable::nth_var( num_vars, v );
      if ( c.neg & ( 1u << v ) )
        t = t & ~TruthTable::nth_var( num_vars, v );
    }
    acc = acc | t;
  }
  return acc;
}

} // namespace almost
