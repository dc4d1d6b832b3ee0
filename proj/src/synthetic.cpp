#include "almost/synthetic.hpp"

#include "almost/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace almost
{

Aig generate_random_aig( const SyntheticSpec& spec )
{
  if ( spec.num_inputs < 2 || spec.num_outputs == 0 )
    throw std::invalid_argument( "generate_random_aig: need >= 2 inputs and >= 1 output" );

  Rng rng( spec.seed );
  AigBuilder b;
  std::vector<Literal> signals;
  for ( uint32_t i = 0; i < spec.num_inputs; ++i )
    signals.push_back( b.add_input( "pi" + std::to_string( i ) ) );
  std::vector<uint32_t> uses( signals.size(), 0 );

  auto pick = [&] {
    // half of the picks come from a recent window, the rest uniformly
    const auto n = signals.size();
    const uint64_t window = std::min<uint64_t>( n, 24 );
    if ( rng.coin() )
      return n - 1 - rng.uniform( window );
    return rng.uniform( n );
  };

  uint32_t attempts = 0;
  while ( b.num_ands() < spec.num_ands && attempts < spec.num_ands * 20 )
  {
    ++attempts;
    const auto i = pick();
    auto j = pick();
    if ( i == j )
      continue;
    const auto x = signals[i], y = signals[j];
    Literal z;
    switch ( rng.uniform( 8 ) )
    {
    case 0:
    case 1: z = b.and_( x, y ); break;
    case 2:
    case 3: z = b.or_( x, y ); break;
    case 4: z = !b.and_( x, y ); break;
    case 5: z = !b.or_( x, y ); break;
    case 6: z = b.and_( x, !y ); break;
    default: z = rng.uniform( 2 ) ? b.xor_( x, y ) : !b.xor_( x, y ); break;
    }
    if ( z.is_constant() || z.node() <= spec.num_inputs )
      continue;
    ++uses[i];
    ++uses[j];
    signals.push_back( z );
    uses.push_back( 0 );
  }

  std::vector<Literal> outs;
  for ( auto k = signals.size(); k-- > spec.num_inputs; )
    if ( uses[k] == 0 )
      outs.push_back( signals[k] );
  while ( outs.size() < spec.num_outputs )
    outs.push_back( signals[spec.num_inputs + rng.uniform( signals.size() - spec.num_inputs )] );
  for ( std::size_t o = 0; o < outs.size(); ++o )
    b.add_output( outs[o], "po" + std::to_string( o ) );
  return cleanup( std::move( b ).build() );
}

} // namespace almost
