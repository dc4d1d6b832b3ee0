#include "oracles.hpp"

#include "almost/cec.hpp"
#include "almost/errors.hpp"
#include "almost/io.hpp"
#include "almost/locking.hpp"
#include "almost/simulate.hpp"
#include "almost/synthesis.hpp"
#include "almost/synthetic.hpp"

#include <doctest.h>

#include <set>

using namespace almost;

namespace
{

Aig random_circuit( uint32_t inputs, uint32_t ands, uint64_t seed )
{
  SyntheticSpec spec;
  spec.num_inputs = inputs;
  spec.num_ands = ands;
  spec.num_outputs = 4;
  spec.seed = seed;
  return generate_random_aig( spec );
}

/// Bit guess from the first-layer ANDs driven by key input `k`: {0,2} complemented fanins means XNOR.
int guess_bit_from_structure( const Aig& g, uint32_t k )
{
  std::vector<int> counts;
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
    if ( g.fanin0( n ).node() == k || g.fanin1( n ).node() == k )
      counts.push_back( int( g.fanin0( n ).complemented() ) + int( g.fanin1( n ).complemented() ) );
  if ( counts.size() != 2 )
    return -1;
  std::sort( counts.begin(), counts.end() );
  if ( counts == std::vector<int>{ 0, 2 } )
    return 1;
  if ( counts == std::vector<int>{ 1, 1 } )
    return 0;
  return -1;
}

/// Number of differing output rows over `words * 64` random vectors.
uint32_t differing_vectors( const Aig& a, const Aig& b, uint32_t words, uint64_t seed )
{
  const auto in = random_batch( a.num_inputs(), words, seed );
  const auto oa = simulate( a, in ), ob = simulate( b, in );
  uint32_t diff = 0;
  for ( uint32_t w = 0; w < words; ++w )
  {
    uint64_t any = 0;
    for ( uint32_t o = 0; o < a.num_outputs(); ++o )
      any |= oa.rows[o][w] ^ ob.rows[o][w];
    diff += static_cast<uint32_t>( __builtin_popcountll( any ) );
  }
  return diff;
}

} // namespace

TEST_SUITE( "locking" )
{

TEST_CASE( "single key-gate is an XOR that the correct key removes" )
{
  AigBuilder b;
  const auto x = b.add_input( "x" ), y = b.add_input( "y" );
  b.add_output( b.and_( x, y ), "o" );
  const auto g = std::move( b ).build();

  for ( uint64_t seed = 0; seed < 20; ++seed )
  {
    const auto ld = lock_rll( g, 1, seed );
    REQUIRE( ld.aig.num_inputs() == 3 );
    CHECK( ld.num_functional_inputs == 2 );
    CHECK( ld.aig.input_name( 2 ) == "keyinput0" );
    CHECK( ld.key_gates[0].key_input == ld.key_input_node( 0 ) );
    CHECK( ld.aig.num_ands() == g.num_ands() + 3 );

    // host wire value w: the locked circuit computes w ^ k ^ bit at the gate
    for ( uint32_t m = 0; m < 8; ++m )
    {
      const bool xv = m & 1u, yv = m & 2u, kv = m & 4u;
      const bool out = test::eval_scalar( ld.aig, { xv, yv, kv } )[0];
      if ( kv == ld.key[0] )
        CHECK( out == ( xv && yv ) );
    }
    CHECK( check_equiv( apply_key( ld, ld.key ), g ).equivalent );
    CHECK_FALSE( check_equiv( apply_key( ld, { !ld.key[0] } ), g ).equivalent );
  }
}

TEST_CASE( "key-gates add three AND nodes each" )
{
  const auto g = parse_bench( read_file( std::string( ALMOST_SOURCE_DIR ) + "/benchmarks/c880.bench" ) );
  const auto ld = lock_rll( g, 64, 3 );
  CHECK( ld.aig.num_inputs() == g.num_inputs() + 64 );
  CHECK( ld.aig.num_ands() == g.num_ands() + 3 * 64 );
  CHECK( ld.aig.num_outputs() == g.num_outputs() );
  for ( uint32_t o = 0; o < g.num_outputs(); ++o )
    CHECK( ld.aig.output_name( o ) == g.output_name( o ) );
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    CHECK( ld.aig.input_name( i ) == g.input_name( i ) );
  CHECK( is_structurally_hashed( ld.aig ) );
}

TEST_CASE( "locking is deterministic in the seed" )
{
  const auto g = random_circuit( 16, 300, 9 );
  const auto a = lock_rll( g, 32, 11 ), b = lock_rll( g, 32, 11 );
  CHECK( a.aig == b.aig );
  CHECK( a.key == b.key );
  CHECK( write_key_file( a ) == write_key_file( b ) );
  CHECK_FALSE( lock_rll( g, 32, 12 ).aig == a.aig );
}

TEST_CASE( "correct key restores the function" )
{
  for ( uint64_t seed = 0; seed < 20; ++seed )
  {
    const auto g = random_circuit( 6 + seed % 8, 100 + 10 * seed, seed );
    const auto ld = lock_rll( g, 16, seed + 100 );
    const auto r = check_equiv( apply_key( ld, ld.key ), g );
    CHECK( r.equivalent );
    CHECK( r.method == CecMethod::exhaustive );
  }
}

TEST_CASE( "wrong key bits corrupt the function" )
{
  const auto g = random_circuit( 12, 300, 5 );
  const auto ld = lock_rll( g, 32, 6 );
  int corrupting = 0;
  for ( uint32_t i = 0; i < ld.key_size(); ++i )
  {
    auto key = ld.key;
    key[i] = !key[i];
    // 10,000 vectors rounded up to whole words
    if ( differing_vectors( apply_key( ld, key ), g, 157, 40 + i ) > 0 )
      ++corrupting;
    else
      MESSAGE( "key bit " << i << " sits on a redundant wire" );
  }
  CHECK( corrupting >= 30 );
}

TEST_CASE( "all-zero key" )
{
  const auto g = random_circuit( 10, 150, 2 );
  for ( uint64_t seed = 0; seed < 200; ++seed )
  {
    const auto ld = lock_rll( g, 4, seed );
    if ( std::find( ld.key.begin(), ld.key.end(), true ) != ld.key.end() )
      continue;
    CHECK( check_equiv( apply_key( ld, Key( 4, false ) ), g ).equivalent );
    return;
  }
  FAIL( "no all-zero key drawn" );
}

TEST_CASE( "key bits are balanced" )
{
  const auto g = random_circuit( 16, 800, 1 );
  const auto ld = lock_rll( g, 512, 2 );
  const auto ones = std::count( ld.key.begin(), ld.key.end(), true );
  CHECK( ones > 200 );
  CHECK( ones < 312 );
}

TEST_CASE( "unsynthesized key-gates reveal their bits" )
{
  const auto g = random_circuit( 16, 500, 4 );
  const auto ld = lock_rll( g, 64, 8 );
  for ( uint32_t i = 0; i < ld.key_size(); ++i )
    CHECK( guess_bit_from_structure( ld.aig, ld.key_input_node( i ) ) == int( ld.key[i] ) );
}

TEST_CASE( "relocking" )
{
  const auto g = random_circuit( 12, 300, 21 );
  const auto ld = lock_rll( g, 64, 22 );
  const auto same = relock( ld, 0, 5 );
  CHECK( same.aig == ld.aig );
  CHECK( same.key == ld.key );

  const auto re = relock( ld, 64, 23 );
  CHECK( re.key_size() == 128 );
  CHECK( re.num_functional_inputs == ld.num_functional_inputs );
  for ( uint32_t i = 0; i < 64; ++i )
  {
    CHECK( re.key[i] == ld.key[i] );
    CHECK( re.key_gates[i].provenance == Provenance::original );
    CHECK( re.key_gates[i].key_input == ld.key_gates[i].key_input );
    CHECK( re.key_gates[64 + i].provenance == Provenance::relock );
    CHECK( re.aig.input_name( re.num_functional_inputs + 64 + i ) == "keyinput" + std::to_string( 64 + i ) );
  }
  CHECK( check_equiv( apply_key( re, re.key ), g ).equivalent );

  std::set<std::set<uint32_t>> selections;
  for ( uint64_t s = 0; s < 10; ++s )
  {
    const auto r = relock( ld, 16, 100 + s );
    std::set<uint32_t> hosts;
    for ( uint32_t i = 64; i < 80; ++i )
      hosts.insert( r.key_gates[i].host.node() );
    selections.insert( hosts );
  }
  CHECK( selections.size() == 10 );
}

TEST_CASE( "locking argument errors" )
{
  const auto g = random_circuit( 4, 10, 1 );
  CHECK_THROWS_AS( lock_rll( g, 0, 1 ), std::invalid_argument );
  CHECK_THROWS_AS( lock_rll( g, g.num_inputs() + g.num_ands() + 1, 1 ), std::invalid_argument );
  CHECK_NOTHROW( lock_rll( g, g.num_inputs() + g.num_ands(), 1 ) );
  const auto ld = lock_rll( g, 2, 1 );
  CHECK_THROWS_AS( apply_key( ld, Key( 3, false ) ), std::invalid_argument );
}

TEST_CASE( "locked design survives synthesis with the correct key" )
{
  for ( const char* name : { "c432", "c499" } )
  {
    const auto g = parse_bench( read_file( std::string( ALMOST_SOURCE_DIR ) + "/benchmarks/" + name + ".bench" ) );
    const auto ld = lock_rll( g, 64, 1 );
    const auto synth = ld.with_aig( apply_recipe( ld.aig, resyn2_baseline() ).first );
    CHECK( synth.aig.num_inputs() == ld.aig.num_inputs() );
    CHECK( differing_vectors( apply_key( synth, synth.key ), g, 157, 3 ) == 0 );
  }
}

TEST_CASE( "key file round-trip" )
{
  const auto g = random_circuit( 12, 200, 3 );
  const auto ld = relock( lock_rll( g, 8, 4 ), 4, 5 );
  const auto text = write_key_file( ld );
  CHECK( text.rfind( "ALMOST-KEY v1 seed 4\n", 0 ) == 0 );
  CHECK( text.find( "key_input keyinput9 bit " ) != std::string::npos );
  CHECK( text.find( "provenance relock" ) != std::string::npos );

  const auto back = read_locked( parse_aiger_ascii( write_aiger_ascii( ld.aig ) ), text );
  CHECK( back.key == ld.key );
  CHECK( back.num_functional_inputs == ld.num_functional_inputs );
  CHECK( back.lock_seed == ld.lock_seed );
  for ( std::size_t i = 0; i < ld.key_gates.size(); ++i )
  {
    CHECK( back.key_gates[i].key_input == ld.key_gates[i].key_input );
    CHECK( back.key_gates[i].host.node() == ld.key_gates[i].host.node() );
    CHECK( back.key_gates[i].provenance == ld.key_gates[i].provenance );
  }
  CHECK( write_key_file( back ) == text );

  CHECK_THROWS_AS( read_locked( ld.aig, "ALMOST-KEY v2 seed 1\n" ), ParseError );
  CHECK_THROWS_AS( read_locked( ld.aig, "ALMOST-KEY v1 seed 1\nkey_input nope bit 0 host n5 provenance orig\n" ),
                   ParseError );
  CHECK_THROWS_AS( read_locked( ld.aig, "ALMOST-KEY v1 seed 1\nkey_input keyinput0 bit 2 host n5 provenance orig\n" ),
                   ParseError );
}

}
