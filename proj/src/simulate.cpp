#include "almost/simulate.hpp"

#include "almost/errors.hpp"
#include "almost/rng.hpp"

namespace almost
{

SimBatch random_batch( uint32_t num_rows, uint32_t num_words, uint64_t seed )
{
  Rng rng( seed );
  SimBatch b{ num_words, std::vector<std::vector<uint64_t>>( num_rows, std::vector<uint64_t>( num_words ) ) };
  for ( auto& row : b.rows )
    for ( auto& w : row )
      w = rng.next();
  return b;
}

SimBatch exhaustive_batch( uint32_t num_inputs )
{
  if ( num_inputs > 20 )
    throw DataError( "exhaustive_batch: too many inputs" );
  const uint64_t columns = uint64_t{ 1 } << num_inputs;
  const auto words = static_cast<uint32_t>( ( columns + 63 ) / 64 );
  SimBatch b{ words, std::vector<std::vector<uint64_t>>( num_inputs, std::vector<uint64_t>( words, 0 ) ) };
  for ( uint32_t i = 0; i < num_inputs; ++i )
  {
    if ( i < 6 )
    {
      static constexpr uint64_t masks[6] = { 0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
                                             0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull };
      for ( auto& w : b.rows[i] )
        w = masks[i];
    }
    else
    {
      for ( uint32_t w = 0; w < words; ++w )
        b.rows[i][w] = ( ( w >> ( i - 6 ) ) & 1u ) ? ~uint64_t{ 0 } : 0;
    }
  }
  // clear bits beyond 2^n so unused columns stay zero
  if ( columns < 64 )
  {
    const uint64_t valid = ( uint64_t{ 1 } << columns ) - 1;
    for ( auto& row : b.rows )
      row[0] &= valid;
  }
  return b;
}

std::vector<uint64_t> simulate_nodes( const Aig& g, const SimBatch& inputs )
{
  if ( inputs.rows.size() != g.num_inputs() )
    throw DataError( "simulate: expected " + std::to_string( g.num_inputs() ) + " input rows, got " +
                     std::to_string( inputs.rows.size() ) );
  const uint32_t W = inputs.num_words;
  std::vector<uint64_t> v( std::size_t( g.size() ) * W, 0 );
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
  {
    if ( inputs.rows[i].size() != W )
      throw DataError( "simulate: ragged input rows" );
    std::copy( inputs.rows[i].begin(), inputs.rows[i].end(), v.begin() + std::size_t( g.input_node( i ) ) * W );
  }
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    const auto f0 = g.fanin0( n ), f1 = g.fanin1( n );
    const uint64_t c0 = f0.complemented() ? ~uint64_t{ 0 } : 0;
    const uint64_t c1 = f1.complemented() ? ~uint64_t{ 0 } : 0;
    const uint64_t* a = &v[std::size_t( f0.node() ) * W];
    const uint64_t* b = &v[std::size_t( f1.node() ) * W];
    uint64_t* r = &v[std::size_t( n ) * W];
    for ( uint32_t w = 0; w < W; ++w )
      r[w] = ( a[w] ^ c0 ) & ( b[w] ^ c1 );
  }
  return v;
}

SimBatch simulate( const Aig& g, const SimBatch& inputs )
{
  const auto v = simulate_nodes( g, inputs );
  const uint32_t W = inputs.num_words;
  SimBatch out{ W, {} };
  out.rows.reserve( g.num_outputs() );
  for ( auto o : g.outputs() )
  {
    std::vector<uint64_t> row( v.begin() + std::size_t( o.node() ) * W, v.begin() + std::size_t( o.node() + 1 ) * W );
    if ( o.complemented() )
      for ( auto& w : row )
        w = ~w;
    out.rows.push_back( std::move( row ) );
  }
  return out;
}

} // namespace almost
