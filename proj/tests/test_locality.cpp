#include "almost/errors.hpp"
#include "almost/locality.hpp"
#include "almost/rng.hpp"
#include "almost/synthetic.hpp"

#include "checks.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
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

/// Undirected BFS distances over fanin edges, computed independently of the extractor.
std::vector<int> bfs_distances( const Aig& g, uint32_t center )
{
  std::vector<std::vector<uint32_t>> adj( g.size() );
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
    for ( auto f : { g.fanin0( n ).node(), g.fanin1( n ).node() } )
      if ( f != 0 )
      {
        adj[n].push_back( f );
        adj[f].push_back( n );
      }
  std::vector<int> dist( g.size(), -1 );
  std::vector<uint32_t> queue{ center };
  dist[center] = 0;
  for ( std::size_t i = 0; i < queue.size(); ++i )
    for ( auto m : adj[queue[i]] )
      if ( dist[m] < 0 )
      {
        dist[m] = dist[queue[i]] + 1;
        queue.push_back( m );
      }
  return dist;
}

/// Copy of `loc` with node order shuffled and edge endpoints remapped.
double norm( const FeatureVector& v )
{
  double s = 0;
  for ( auto x : v )
    s += x * x;
  return std::sqrt( s );
}

} // namespace

TEST_SUITE( "locality" )
{

TEST_CASE( "embed config validation and fingerprint" )
{
  EmbedConfig c;
  CHECK_NOTHROW( c.validate() );
  CHECK( EmbedConfig::from_fingerprint( c.fingerprint() ).fingerprint() == c.fingerprint() );
  c.dimension = 100;
  CHECK_THROWS_AS( c.validate(), std::invalid_argument );
  c = {};
  c.hops = 0;
  CHECK_THROWS_AS( c.validate(), std::invalid_argument );
  CHECK_THROWS_AS( EmbedConfig::from_fingerprint( "h2-r2" ), DataError );
}

TEST_CASE( "one-hop locality of an unsynthesized key-gate" )
{
  AigBuilder b;
  const auto x = b.add_input( "x" ), y = b.add_input( "y" ), z = b.add_input( "z" );
  b.add_output( b.and_( b.and_( x, y ), z ), "o" );
  const auto g = std::move( b ).build();
  const auto ld = lock_rll( g, 1, 3 );
  const auto host = ld.key_gates[0].host.node();

  // by hand: the key input feeds the two first-layer ANDs of the XOR cone
  const auto loc1 = extract_locality( ld, 0, 1 );
  REQUIRE( loc1.nodes.size() == 3 );
  CHECK( loc1.nodes[0].kind == LocalityKind::key_input );
  for ( std::size_t i = 1; i < 3; ++i )
  {
    CHECK( loc1.nodes[i].kind == LocalityKind::gate );
    CHECK( loc1.nodes[i].hop == 1 );
  }
  CHECK( loc1.edges.size() == 2 );

  // two hops add the host wire and the XOR root
  const auto loc2 = extract_locality( ld, 0, 2 );
  std::set<uint32_t> nodes;
  for ( const auto& n : loc2.nodes )
    nodes.insert( n.node );
  CHECK( nodes.contains( host ) );
  CHECK( nodes.contains( ld.key_gates[0].root.node() ) );
  CHECK( nodes.size() == 5 );
}

TEST_CASE( "zero hops keeps only the center" )
{
  const auto ld = lock_rll( random_circuit( 8, 60, 1 ), 4, 1 );
  const auto loc = extract_locality( ld.aig, ld.key_input_node( 0 ), 0, ld.num_functional_inputs );
  CHECK( loc.nodes.size() == 1 );
  CHECK( loc.edges.empty() );
  const auto v = embed( loc, EmbedConfig{} );
  CHECK( std::abs( norm( v ) - 1.0 ) < 1e-12 );
  CHECK( v == embed( loc, EmbedConfig{} ) );
  CHECK_THROWS_AS( extract_locality( ld, 4, 2 ), std::out_of_range );
}

TEST_CASE( "locality membership matches breadth-first distances" )
{
  const auto ld = lock_rll( random_circuit( 16, 400, 5 ), 16, 6 );
  for ( uint32_t k = 0; k < ld.key_size(); ++k )
    for ( uint32_t h : { 1u, 2u, 3u } )
    {
      const auto center = ld.key_input_node( k );
      const auto dist = bfs_distances( ld.aig, center );
      const auto loc = extract_locality( ld, k, h );
      CHECK( loc.nodes[0].node == center );
      std::set<uint32_t> expected, got;
      for ( uint32_t n = 1; n < ld.aig.size(); ++n )
        if ( dist[n] >= 0 && dist[n] <= int( h ) )
          expected.insert( n );
      for ( const auto& n : loc.nodes )
      {
        got.insert( n.node );
        CHECK( int( n.hop ) == dist[n.node] );
      }
      CHECK( got == expected );
      // edges are exactly the fanin relations inside the set
      std::size_t inner = 0;
      for ( auto n : expected )
        if ( ld.aig.is_and( n ) )
          inner += expected.contains( ld.aig.fanin0( n ).node() ) + expected.contains( ld.aig.fanin1( n ).node() );
      CHECK( loc.edges.size() == inner );
    }
}

TEST_CASE( "distant key-gates have disjoint localities" )
{
  // two independent cones joined only at the outputs
  AigBuilder b;
  std::vector<Literal> in;
  for ( int i = 0; i < 8; ++i )
    in.push_back( b.add_input() );
  auto left = b.and_( b.and_( b.and_( in[0], in[1] ), in[2] ), in[3] );
  auto right = b.and_( b.and_( b.and_( in[4], in[5] ), in[6] ), in[7] );
  b.add_output( left );
  b.add_output( right );
  const auto g = std::move( b ).build();
  for ( uint64_t seed = 0; seed < 50; ++seed )
  {
    const auto ld = lock_rll( g, 2, seed );
    const auto a = ld.key_gates[0].host.node(), c = ld.key_gates[1].host.node();
    const bool a_left = a == 1 || a == 2 || a == 3 || a == 4 || ( a > 8 && a <= 11 );
    const bool c_left = c == 1 || c == 2 || c == 3 || c == 4 || ( c > 8 && c <= 11 );
    if ( a_left == c_left )
      continue;
    std::set<uint32_t> na, nc;
    for ( const auto& n : extract_locality( ld, 0, 1 ).nodes )
      na.insert( n.node );
    for ( const auto& n : extract_locality( ld, 1, 1 ).nodes )
      nc.insert( n.node );
    for ( auto n : na )
      CHECK_FALSE( nc.contains( n ) );
  }
}

TEST_CASE( "embedding is unit length, finite and permutation invariant" )
{
  const auto ld = lock_rll( random_circuit( 16, 400, 8 ), 100, 9 );
  const EmbedConfig cfg;
  for ( uint32_t k = 0; k < 100; ++k )
  {
    const auto loc = extract_locality( ld, k, cfg.hops );
    const auto v = embed( loc, cfg );
    REQUIRE( v.size() == cfg.dimension );
    CHECK( std::all_of( v.begin(), v.end(), []( double x ) { return std::isfinite( x ); } ) );
    CHECK( std::abs( norm( v ) - 1.0 ) < 1e-12 );
    CHECK( embed( test::relabel( loc, k ), cfg ) == v );
  }
}

TEST_CASE( "a single polarity flip changes the embedding" )
{
  const auto ld = lock_rll( random_circuit( 16, 400, 10 ), 100, 11 );
  const EmbedConfig cfg;
  for ( uint32_t k = 0; k < 100; ++k )
  {
    auto loc = extract_locality( ld, k, cfg.hops );
    REQUIRE( !loc.edges.empty() );
    const auto v = embed( loc, cfg );
    loc.edges[k % loc.edges.size()].complemented ^= true;
    CHECK_FALSE( embed( loc, cfg ) == v );
  }
}

TEST_CASE( "hand-built five-node locality reacts to one complemented fanin" )
{
  Locality loc;
  loc.nodes = { { 3, LocalityKind::key_input, false, 0, 2, 0, 0 },
                { 5, LocalityKind::gate, false, 1, 1, 0, 1 },
                { 6, LocalityKind::gate, false, 1, 1, 0, 1 },
                { 1, LocalityKind::input, false, 0, 2, 0, 2 },
                { 7, LocalityKind::gate, false, 2, 0, 1, 2 } };
  loc.edges = { { 0, 1, true }, { 0, 2, false }, { 3, 1, false }, { 3, 2, true }, { 1, 4, true }, { 2, 4, true } };
  const auto v = embed( loc, EmbedConfig{} );
  auto flipped = loc;
  flipped.edges[4].complemented = false;
  CHECK_FALSE( embed( flipped, EmbedConfig{} ) == v );
}

TEST_CASE( "features never read the key bit" )
{
  const auto ld = lock_rll( random_circuit( 16, 300, 12 ), 32, 13 );
  auto erased = ld;
  for ( auto& r : erased.key_gates )
    r.bit = false;
  std::fill( erased.key.begin(), erased.key.end(), false );
  const auto a = embed_key_gates( ld, Provenance::original, EmbedConfig{}, "d", "none" );
  const auto b = embed_key_gates( erased, Provenance::original, EmbedConfig{}, "d", "none" );
  REQUIRE( a.size() == 32 );
  for ( std::size_t i = 0; i < a.size(); ++i )
  {
    CHECK( a.samples[i].feature == b.samples[i].feature );
    CHECK( a.samples[i].label == int( ld.key[i] ) );
  }
}

TEST_CASE( "building datasets" )
{
  const auto ld = lock_rll( random_circuit( 16, 300, 14 ), 16, 15 );
  const EmbedConfig cfg;

  SUBCASE( "bookkeeping" )
  {
    const auto d = build_dataset( ld, { resyn2_baseline() }, 4, 4, cfg, 3, "bench" );
    REQUIRE( d.size() == 4 );
    const auto re = relock( ld, 4, derive_seed( 3, 0 ) );
    for ( const auto& s : d.samples )
    {
      CHECK( s.prov.design == "bench" );
      CHECK( s.prov.recipe == resyn2_baseline().to_string() );
      CHECK( s.prov.kind == Provenance::relock );
      CHECK( s.label == int( re.key[s.prov.key_gate] ) );
      CHECK( s.prov.key_gate >= 16 );
    }
    CHECK( d.embed_fingerprint == cfg.fingerprint() );
  }
  SUBCASE( "determinism" )
  {
    const std::vector<Recipe> rs{ random_recipe( 10, 1 ), random_recipe( 10, 2 ) };
    CHECK( write_dataset( build_dataset( ld, rs, 8, 5, cfg, 7 ) ) == write_dataset( build_dataset( ld, rs, 8, 5, cfg, 7 ) ) );
  }
  SUBCASE( "sample count cannot exceed the relock size" )
  {
    CHECK_THROWS_AS( build_dataset( ld, { resyn2_baseline() }, 4, 5, cfg, 1 ), std::invalid_argument );
  }
}

TEST_CASE( "dataset labels are balanced" )
{
  const auto ld = lock_rll( random_circuit( 16, 500, 16 ), 8, 17 );
  const auto d = build_dataset( ld, std::vector<Recipe>( 16, Recipe{} ), 64, 64, EmbedConfig{}, 18 );
  REQUIRE( d.size() == 1024 );
  double mean = 0;
  for ( const auto& s : d.samples )
    mean += s.label;
  mean /= double( d.size() );
  CHECK( mean >= 0.45 );
  CHECK( mean <= 0.55 );
}

TEST_CASE( "recipes change localities" )
{
  const auto ld = lock_rll( random_circuit( 16, 500, 19 ), 64, 20 );
  const EmbedConfig cfg;
  const auto a = embed_key_gates( ld.with_aig( apply_recipe( ld.aig, resyn2_baseline() ).first ), Provenance::original,
                                  cfg, "d", "a" );
  const auto r = Recipe::from_string( "rs.rfz.b.rf.rsz.rw.b.rs.rf.rfz" );
  const auto b = embed_key_gates( ld.with_aig( apply_recipe( ld.aig, r ).first ), Provenance::original, cfg, "d", "b" );
  std::size_t differ = 0;
  for ( std::size_t i = 0; i < a.size(); ++i )
    differ += !( a.samples[i].feature == b.samples[i].feature );
  CHECK( differ * 2 >= a.size() );
}

TEST_CASE( "dataset file round-trip" )
{
  const auto ld = lock_rll( random_circuit( 12, 200, 21 ), 8, 22 );
  const auto d = build_dataset( ld, { resyn2_baseline(), random_recipe( 10, 3 ) }, 6, 3, EmbedConfig{}, 23, "c:x" );
  const auto text = write_dataset( d );
  CHECK( text.rfind( "ALMOST-DATA v1\n", 0 ) == 0 );
  const auto back = parse_dataset( text );
  REQUIRE( back.size() == d.size() );
  CHECK( back.embed_fingerprint == d.embed_fingerprint );
  for ( std::size_t i = 0; i < d.size(); ++i )
  {
    CHECK( back.samples[i].feature == d.samples[i].feature );
    CHECK( back.samples[i].label == d.samples[i].label );
    CHECK( back.samples[i].prov == d.samples[i].prov );
  }
  CHECK_THROWS_AS( parse_dataset( "ALMOST-DATA v2\n" ), ParseError );
  CHECK_THROWS_AS( parse_dataset( "ALMOST-DATA v1\nlabel 3 prov a:b:1:orig vec 1\n" ), ParseError );
  CHECK_THROWS_AS( parse_dataset( "ALMOST-DATA v1\nlabel 1 prov a:b:1:orig vec 1 2\nlabel 0 prov a:b:2:orig vec 1\n" ),
                   ParseError );
}

TEST_CASE( "train/validation split" )
{
  Dataset d;
  for ( int i = 0; i < 1000; ++i )
    d.samples.push_back( { { double( i ) }, i % 2, {} } );
  const auto [tr, val] = split_dataset( d, 0.1, 4 );
  CHECK( tr.size() == 900 );
  CHECK( val.size() == 100 );
  std::set<double> all;
  for ( const auto* part : { &tr, &val } )
    for ( const auto& s : part->samples )
      all.insert( s.feature[0] );
  CHECK( all.size() == 1000 );
  CHECK( split_dataset( d, 0.1, 4 ).second.samples[0].feature == val.samples[0].feature );
  CHECK_THROWS_AS( split_dataset( d, 1.0, 4 ), std::invalid_argument );
}

}
