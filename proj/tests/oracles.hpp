// Test-only reference implementations, independent of the library paths they check.
#pragma once

#include "almost/aig.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace almost::test
{

/// Recursive single-vector evaluation of one literal (memo-free, for small graphs).
inline bool eval_recursive( const Aig& g, Literal lit, const std::vector<bool>& in )
{
  const auto n = lit.node();
  bool v;
  if ( n == 0 )
    v = false;
  else if ( g.is_input( n ) )
    v = in[g.input_index( n )];
  else
  {
    // memo via explicit stack would be faster; small graphs only
    std::function<bool( uint32_t )> node_value = [&]( uint32_t m ) -> bool {
      if ( m == 0 )
        return false;
      if ( g.is_input( m ) )
        return in[g.input_index( m )];
      const auto f0 = g.fanin0( m ), f1 = g.fanin1( m );
      return ( node_value( f0.node() ) != f0.complemented() ) && ( node_value( f1.node() ) != f1.complemented() );
    };
    v = node_value( n );
  }
  return v != lit.complemented();
}

/// Single-vector evaluation with memoization, in node order.
inline std::vector<bool> eval_scalar( const Aig& g, const std::vector<bool>& in )
{
  std::vector<int> memo( g.size(), -1 );
  memo[0] = 0;
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    memo[g.input_node( i )] = in[i];
  std::function<bool( uint32_t )> value = [&]( uint32_t m ) -> bool {
    if ( memo[m] >= 0 )
      return memo[m];
    const auto f0 = g.fanin0( m ), f1 = g.fanin1( m );
    const bool r = ( value( f0.node() ) != f0.complemented() ) && ( value( f1.node() ) != f1.complemented() );
    memo[m] = r;
    return r;
  };
  std::vector<bool> out;
  for ( auto o : g.outputs() )
    out.push_back( value( o.node() ) != o.complemented() );
  return out;
}

inline std::vector<bool> bits_of( uint64_t x, uint32_t n )
{
  std::vector<bool> v( n );
  for ( uint32_t i = 0; i < n; ++i )
    v[i] = ( x >> i ) & 1u;
  return v;
}

/// Truth table (bit k = output under assignment k) of one output, n <= 16 inputs.
inline std::vector<bool> output_table( const Aig& g, uint32_t output )
{
  std::vector<bool> t;
  for ( uint64_t k = 0; k < ( uint64_t{ 1 } << g.num_inputs() ); ++k )
    t.push_back( eval_scalar( g, bits_of( k, g.num_inputs() ) )[output] );
  return t;
}

/// True when both graphs agree on every assignment (n <= 16 inputs).
inline bool brute_force_equal( const Aig& a, const Aig& b )
{
  for ( uint64_t k = 0; k < ( uint64_t{ 1 } << a.num_inputs() ); ++k )
  {
    const auto in = bits_of( k, a.num_inputs() );
    if ( eval_scalar( a, in ) != eval_scalar( b, in ) )
      return false;
  }
  return true;
}

} // namespace almost::test
