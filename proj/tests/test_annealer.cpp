#include "almost/annealer.hpp"
#include "almost/errors.hpp"
#include "almost/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace almost;

namespace
{

EnergyFn hamming_to( const Recipe& target )
{
  return { EnergyRole::defense, [target]( const Recipe& r ) {
            double d = 0;
            for ( std::size_t i = 0; i < r.size(); ++i )
              d += r.steps[i] != target.steps[i];
            return d;
          } };
}

int hamming( const Recipe& a, const Recipe& b )
{
  int d = 0;
  for ( std::size_t i = 0; i < a.size(); ++i )
    d += a.steps[i] != b.steps[i];
  return d;
}

ModelParams zero_model( uint32_t dim, std::string fp )
{
  auto m = init_params( dim, 4, 1, std::move( fp ) );
  std::fill( m.w1.begin(), m.w1.end(), 0.0 );
  std::fill( m.w2.begin(), m.w2.end(), 0.0 );
  return m;
}

} // namespace

TEST_SUITE( "recipe-annealer" )
{

TEST_CASE( "neighbors differ in exactly one position" )
{
  const auto r = resyn2_baseline();
  Rng rng( 1 );
  std::set<std::string> seen;
  for ( int i = 0; i < 700; ++i )
  {
    const auto n = neighbor( r, rng );
    CHECK( n.size() == r.size() );
    CHECK( hamming( n, r ) == 1 );
    seen.insert( n.to_string() );
  }
  CHECK( seen.size() == 60 );
}

TEST_CASE( "acceptance rule" )
{
  CHECK( acceptance_probability( -1.0, 10.0, 1.8 ) == 1.0 );
  CHECK( acceptance_probability( 0.0, 10.0, 1.8 ) == 1.0 );
  CHECK( acceptance_probability( 1.0, 10.0, 1.8 ) == doctest::Approx( std::exp( -0.18 ) ) );
  double prev = 1.0;
  for ( double d = 0.1; d < 5; d += 0.1 )
  {
    const double p = acceptance_probability( d, 2.0, 1.8 );
    CHECK( p < prev );
    prev = p;
  }
  prev = 1.0;
  for ( double t = 100; t > 0.01; t *= 0.5 )
  {
    const double p = acceptance_probability( 0.5, t, 1.8 );
    CHECK( p < prev );
    prev = p;
  }
}

TEST_CASE( "config validation" )
{
  AnnealerConfig c;
  CHECK_NOTHROW( c.validate() );
  c.cooling = 1.0;
  CHECK_THROWS_AS( c.validate(), std::invalid_argument );
  c = {};
  c.initial_temperature = 0;
  CHECK_THROWS_AS( c.validate(), std::invalid_argument );
  c = {};
  c.max_iterations = 0;
  CHECK_THROWS_AS( c.validate(), std::invalid_argument );
  CHECK( AnnealerConfig::defense().stop_threshold == 0.005 );
  CHECK( AnnealerConfig::defense().max_iterations == 100 );
  CHECK( AnnealerConfig::adversarial().max_iterations == 20 );
}

TEST_CASE( "flat landscape accepts every move and keeps the initial recipe" )
{
  const EnergyFn flat{ EnergyRole::defense, []( const Recipe& ) { return 0.25; } };
  const auto res = anneal( resyn2_baseline(), flat, AnnealerConfig{} );
  CHECK( res.best == resyn2_baseline() );
  REQUIRE( res.trace.records.size() == 101 );
  for ( const auto& r : res.trace.records )
  {
    CHECK( r.accepted );
    CHECK( r.best_energy == 0.25 );
  }
}

TEST_CASE( "trace invariants" )
{
  const auto target = random_recipe( 10, 77 );
  AnnealerConfig cfg;
  cfg.seed = 3;
  const auto res = anneal( resyn2_baseline(), hamming_to( target ), cfg );
  const auto& rec = res.trace.records;
  REQUIRE( rec.size() == 101 );
  CHECK( rec[0].iteration == 0 );
  CHECK( rec[0].recipe == resyn2_baseline() );
  double best = rec[0].energy;
  for ( std::size_t i = 1; i < rec.size(); ++i )
  {
    CHECK( rec[i].iteration == i );
    CHECK( rec[i].best_energy <= rec[i - 1].best_energy );
    best = std::min( best, rec[i].energy );
    CHECK( rec[i].best_energy == best );
    CHECK( rec[i].temperature == doctest::Approx( 120.0 * std::pow( 0.95, double( i ) ) ).epsilon( 1e-12 ) );
    CHECK( rec[i].temperature < rec[i - 1].temperature );
    if ( rec[i].energy < rec[i - 1].energy && hamming( rec[i].recipe, rec[i - 1].recipe ) <= 1 )
      CHECK( rec[i].accepted );
  }
  CHECK( res.best_energy == rec.back().best_energy );
  // the earliest record reaching the best energy is the returned recipe
  for ( const auto& r : rec )
    if ( r.energy == res.best_energy )
    {
      CHECK( r.recipe == res.best );
      break;
    }
}

TEST_CASE( "annealing replays bit-identically" )
{
  const auto e = hamming_to( random_recipe( 10, 5 ) );
  AnnealerConfig cfg;
  cfg.seed = 9;
  CHECK( write_trace_csv( anneal( resyn2_baseline(), e, cfg ).trace ) ==
         write_trace_csv( anneal( resyn2_baseline(), e, cfg ).trace ) );
  cfg.seed = 10;
  CHECK_FALSE( write_trace_csv( anneal( resyn2_baseline(), e, cfg ).trace ) ==
               write_trace_csv( anneal( resyn2_baseline(), hamming_to( random_recipe( 10, 5 ) ), AnnealerConfig{} ).trace ) );
}

TEST_CASE( "annealing finds a hidden recipe" )
{
  int found = 0;
  for ( uint64_t s = 0; s < 20; ++s )
  {
    AnnealerConfig cfg;
    cfg.initial_temperature = 1.0;
    cfg.max_iterations = 300;
    cfg.stop_threshold = 0.0;
    cfg.seed = s;
    const auto res = anneal( resyn2_baseline(), hamming_to( random_recipe( 10, 1000 + s ) ), cfg );
    found += res.best_energy == 0.0;
    if ( res.best_energy == 0.0 )
      CHECK( res.trace.records.back().energy == 0.0 ); // stopped right at the hit
  }
  CHECK( found >= 18 );
}

TEST_CASE( "stop threshold" )
{
  const EnergyFn zero{ EnergyRole::defense, []( const Recipe& ) { return 0.0; } };
  const auto res = anneal( resyn2_baseline(), zero, AnnealerConfig::defense() );
  CHECK( res.trace.records.size() == 1 );
  CHECK( res.best == resyn2_baseline() );
}

TEST_CASE( "non-finite energy aborts" )
{
  const EnergyFn bad{ EnergyRole::defense, []( const Recipe& r ) {
                       return r == resyn2_baseline() ? 1.0 : std::numeric_limits<double>::quiet_NaN();
                     } };
  CHECK_THROWS_AS( anneal( resyn2_baseline(), bad, AnnealerConfig{} ), DataError );
}

TEST_CASE( "trace csv round-trip" )
{
  AnnealerConfig cfg;
  cfg.max_iterations = 30;
  const auto res = anneal( resyn2_baseline(), hamming_to( random_recipe( 10, 2 ) ), cfg );
  const auto text = write_trace_csv( res.trace );
  CHECK( text.rfind( "iter,recipe,energy,accepted,best_energy,temperature\n", 0 ) == 0 );
  const auto back = parse_trace_csv( text );
  REQUIRE( back.records.size() == res.trace.records.size() );
  for ( std::size_t i = 0; i < back.records.size(); ++i )
  {
    CHECK( back.records[i].recipe == res.trace.records[i].recipe );
    CHECK( back.records[i].energy == res.trace.records[i].energy );
    CHECK( back.records[i].accepted == res.trace.records[i].accepted );
    CHECK( back.records[i].temperature == res.trace.records[i].temperature );
  }
  CHECK( write_trace_csv( back ) == text );
  CHECK_THROWS_AS( parse_trace_csv( "iter,recipe\n" ), ParseError );
  CHECK_THROWS_AS( parse_trace_csv( "iter,recipe,energy,accepted,best_energy,temperature\n1,b.zz,0,1,0,1\n" ), ParseError );
}

TEST_CASE( "security energies" )
{
  SyntheticSpec spec;
  spec.num_inputs = 12;
  spec.num_ands = 200;
  spec.seed = 4;
  const auto ld = lock_rll( generate_random_aig( spec ), 16, 5 );
  const EmbedConfig ec;
  const auto zero = zero_model( ec.dimension, ec.fingerprint() );

  const double frac0 = double( std::count( ld.key.begin(), ld.key.end(), false ) ) / 16.0;
  const auto def = defense_energy( ld, zero, ec );
  CHECK( def.role == EnergyRole::defense );
  for ( uint64_t s = 0; s < 3; ++s )
  {
    const double e = def( random_recipe( 10, s ) );
    CHECK( e == doctest::Approx( std::abs( frac0 - 0.5 ) ) );
    CHECK( e >= 0.0 );
    CHECK( e <= 0.5 );
  }

  const auto adv = adversarial_energy( ld, zero, ec, 8, 6 );
  CHECK( adv( resyn2_baseline() ) == doctest::Approx( -std::log( 2.0 ) ) );
  CHECK( adv( random_recipe( 10, 1 ) ) == doctest::Approx( -std::log( 2.0 ) ) );

  auto wrong = zero;
  wrong.embed_fingerprint = "h1-r0-d256-s1";
  CHECK_THROWS_AS( defense_energy( ld, wrong, ec ), DataError );
}

TEST_CASE( "area and delay energies" )
{
  SyntheticSpec spec;
  spec.num_inputs = 12;
  spec.num_ands = 100;
  spec.seed = 8;
  const auto g = generate_random_aig( spec );
  CHECK( ppa_energy( g, PpaObjective::area )( resyn2_baseline() ) == 1.0 );
  CHECK( ppa_energy( g, PpaObjective::delay )( resyn2_baseline() ) == 1.0 );

  // a single AND gate has no headroom
  AigBuilder b;
  b.add_output( b.and_( b.add_input(), b.add_input() ) );
  const auto tiny = std::move( b ).build();
  AnnealerConfig cfg;
  cfg.max_iterations = 20;
  CHECK( anneal( resyn2_baseline(), ppa_energy( tiny, PpaObjective::area ), cfg ).best_energy == 1.0 );
}

TEST_CASE( "area annealing exploits redundancy" )
{
  // 100-node circuit with duplicated logic that balance-heavy recipes keep
  SyntheticSpec spec;
  spec.num_inputs = 10;
  spec.num_ands = 100;
  spec.seed = 12;
  const auto g = generate_random_aig( spec );
  AnnealerConfig cfg;
  cfg.max_iterations = 50;
  cfg.seed = 2;
  const auto start = Recipe{ std::vector<TransformId>( 10, TransformId::balance ) };
  const auto e = ppa_energy( g, PpaObjective::area );
  const auto res = anneal( start, e, cfg );
  CHECK( res.best_energy < e( start ) );
}

}
