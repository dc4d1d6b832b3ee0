#include "oracles.hpp"

#include "almost/aig.hpp"
#include "almost/cec.hpp"
#include "almost/errors.hpp"
#include "almost/io.hpp"
#include "almost/rng.hpp"
#include "almost/simulate.hpp"
#include "almost/synthetic.hpp"

#include <doctest.h>

using namespace almost;

TEST_SUITE( "netlist-core" )
{

TEST_CASE( "literal encoding round-trips" )
{
  Rng rng( 3 );
  for ( int i = 0; i < 1000; ++i )
  {
    const auto node = static_cast<uint32_t>( rng.uniform( uint64_t{ 1 } << 31 ) );
    const bool c = rng.coin();
    const Literal l( node, c );
    CHECK( l.node() == node );
    CHECK( l.complemented() == c );
    CHECK( l.raw() == 2 * node + ( c ? 1 : 0 ) );
  }
  CHECK( lit_false.raw() == 0 );
  CHECK( lit_true.raw() == 1 );
  CHECK( !lit_false == lit_true );
}

TEST_CASE( "strash_and simplifications" )
{
  AigBuilder b;
  const auto x = b.add_input( "x" );
  const auto y = b.add_input( "y" );
  CHECK( b.and_( x, lit_false ) == lit_false );
  CHECK( b.and_( x, lit_true ) == x );
  CHECK( b.and_( x, x ) == x );
  CHECK( b.and_( x, !x ) == lit_false );
  CHECK( b.num_ands() == 0 );

  const auto xy = b.and_( x, y );
  CHECK( b.num_ands() == 1 );
  CHECK( b.and_( y, x ) == xy );
  CHECK( b.num_ands() == 1 );
  CHECK( b.lookup_and( !x, y ) == std::nullopt );
  CHECK( b.lookup_and( y, x ) == xy );
}

TEST_CASE( "depth and node count" )
{
  SUBCASE( "inverter costs nothing" )
  {
    const auto g = parse_bench( "INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n" );
    CHECK( g.num_inputs() == 1 );
    CHECK( node_count( g ) == 0 );
    CHECK( depth( g ) == 0 );
    CHECK( g.output( 0 ) == !g.input( 0 ) );
  }
  SUBCASE( "balanced and chain" )
  {
    AigBuilder b;
    std::vector<Literal> in;
    for ( int i = 0; i < 4; ++i )
      in.push_back( b.add_input() );
    AigBuilder c = b;
    b.add_output( b.and_( b.and_( in[0], in[1] ), b.and_( in[2], in[3] ) ) );
    c.add_output( c.and_( c.and_( c.and_( in[0], in[1] ), in[2] ), in[3] ) );
    const auto balanced = std::move( b ).build();
    const auto chain = std::move( c ).build();
    CHECK( node_count( balanced ) == 3 );
    CHECK( depth( balanced ) == 2 );
    CHECK( node_count( chain ) == 3 );
    CHECK( depth( chain ) == 3 );
  }
}

TEST_CASE( "parse_bench" )
{
  SUBCASE( "xor lowers to three nodes" )
  {
    const auto g = parse_bench( "INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = XOR(a, b)\n" );
    CHECK( node_count( g ) == 3 );
    for ( uint64_t k = 0; k < 4; ++k )
      CHECK( test::eval_scalar( g, test::bits_of( k, 2 ) )[0] == ( ( k & 1 ) != ( ( k >> 1 ) & 1 ) ) );
  }
  SUBCASE( "c17 matches its gate-level truth table" )
  {
    const auto g = read_netlist( ALMOST_SOURCE_DIR "/benchmarks/c17.bench" );
    REQUIRE( g.num_inputs() == 5 );
    REQUIRE( g.num_outputs() == 2 );
    // gate-level oracle over inputs N1 N2 N3 N6 N7
    for ( uint64_t k = 0; k < 32; ++k )
    {
      const bool n1 = k & 1, n2 = k & 2, n3 = k & 4, n6 = k & 8, n7 = k & 16;
      const bool n10 = !( n1 && n3 ), n11 = !( n3 && n6 ), n16 = !( n2 && n11 ), n19 = !( n11 && n7 );
      const bool n22 = !( n10 && n16 ), n23 = !( n16 && n19 );
      const auto out = test::eval_scalar( g, test::bits_of( k, 5 ) );
      CHECK( out[0] == n22 );
      CHECK( out[1] == n23 );
    }
  }
  SUBCASE( "out-of-order definitions, multi-input gates, case-insensitive" )
  {
    const auto g = parse_bench( "# comment\nINPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\n"
                                "y = nor(t, c)\nt = And(a, b, c) # trailing\n" );
    for ( uint64_t k = 0; k < 8; ++k )
    {
      const bool a = k & 1, b = k & 2, c = k & 4;
      CHECK( test::eval_scalar( g, test::bits_of( k, 3 ) )[0] == !( ( a && b && c ) || c ) );
    }
  }
  SUBCASE( "errors" )
  {
    CHECK_THROWS_AS( parse_bench( "INPUT(a)\nOUTPUT(y)\ny = FOO(a)\n" ), ParseError );
    CHECK_THROWS_AS( parse_bench( "INPUT(a)\nOUTPUT(y)\ny = AND(a, z)\n" ), ParseError );
    CHECK_THROWS_AS( parse_bench( "INPUT(a)\nOUTPUT(y)\ny = AND(a, w)\nw = OR(y, a)\n" ), ParseError );
    CHECK_THROWS_AS( parse_bench( "INPUT(a\n" ), ParseError );
    try
    {
      parse_bench( "INPUT(a)\nOUTPUT(y)\ny = AND(a,  zz)\n" );
      FAIL( "expected ParseError" );
    }
    catch ( const ParseError& e )
    {
      CHECK( e.line() == 3 );
      CHECK( e.column() == 13 );
    }
  }
}

TEST_CASE( "aiger ascii" )
{
  SUBCASE( "constant true output" )
  {
    const auto g = parse_aiger_ascii( "aag 0 0 0 1 0\n1\n" );
    CHECK( g.num_inputs() == 0 );
    REQUIRE( g.num_outputs() == 1 );
    CHECK( g.output( 0 ) == lit_true );
  }
  SUBCASE( "header counts" )
  {
    AigBuilder b;
    const auto x = b.add_input( "x" ), y = b.add_input( "y" ), z = b.add_input( "z" );
    b.add_output( b.and_( b.and_( x, y ), !b.and_( y, z ) ), "f" );
    const auto text = write_aiger_ascii( std::move( b ).build() );
    CHECK( text.substr( 0, text.find( '\n' ) ) == "aag 6 3 0 1 3" );
  }
  SUBCASE( "write/parse preserves semantics" )
  {
    for ( uint64_t seed = 1; seed <= 5; ++seed )
    {
      const auto g = generate_random_aig( { 20, 200, 6, seed } );
      const auto h = parse_aiger_ascii( write_aiger_ascii( g ) );
      CHECK( h.num_ands() == g.num_ands() );
      CHECK( h.num_inputs() == g.num_inputs() );
      CHECK( h.num_outputs() == g.num_outputs() );
      CHECK( h.input_name( 3 ) == g.input_name( 3 ) );
      const auto in = random_batch( g.num_inputs(), 16, seed );
      CHECK( simulate( g, in ).rows == simulate( h, in ).rows );
    }
  }
  SUBCASE( "exact round trip on small circuits" )
  {
    for ( uint64_t seed = 1; seed <= 10; ++seed )
    {
      const auto g = generate_random_aig( { 10, 60, 3, seed } );
      const auto h = parse_aiger_ascii( write_aiger_ascii( g ) );
      const auto r = check_equiv( g, h );
      CHECK( r.equivalent );
      CHECK( r.method == CecMethod::exhaustive );
    }
  }
  SUBCASE( "errors" )
  {
    CHECK_THROWS_AS( parse_aiger_ascii( "aag 1 0 1 0 0\n2 3\n" ), ParseError );
    CHECK_THROWS_AS( parse_aiger_ascii( "aig 0 0 0 1 0\n1\n" ), ParseError );
    CHECK_THROWS_AS( parse_aiger_ascii( "aag 1 1 0 1 0\n2\n9\n" ), ParseError );
    CHECK_THROWS_AS( parse_aiger_ascii( "aag 1 1 0 1\n2\n2\n" ), ParseError );
  }
}

TEST_CASE( "simulate" )
{
  SUBCASE( "constant false output" )
  {
    AigBuilder b;
    b.add_input();
    b.add_output( lit_false );
    const auto out = simulate( std::move( b ).build(), random_batch( 1, 4, 9 ) );
    for ( auto w : out.rows[0] )
      CHECK( w == 0 );
  }
  SUBCASE( "full adder truth table" )
  {
    const auto g = parse_bench( "INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(s)\nOUTPUT(co)\n"
                                "s = XOR(a, b, c)\nab = AND(a, b)\nx = XOR(a, b)\nxc = AND(x, c)\nco = OR(ab, xc)\n" );
    const auto out = simulate( g, exhaustive_batch( 3 ) );
    for ( uint32_t k = 0; k < 8; ++k )
    {
      const int sum = int( k & 1 ) + int( ( k >> 1 ) & 1 ) + int( ( k >> 2 ) & 1 );
      CHECK( out.get( 0, k ) == bool( sum & 1 ) );
      CHECK( out.get( 1, k ) == bool( sum >> 1 ) );
    }
  }
  SUBCASE( "bit-parallel equals scalar evaluation" )
  {
    for ( uint64_t seed = 1; seed <= 8; ++seed )
    {
      const auto g = generate_random_aig( { 12, 150, 4, seed } );
      const auto in = random_batch( g.num_inputs(), 2, seed * 11 );
      const auto out = simulate( g, in );
      CHECK( out.rows == simulate( g, in ).rows );
      for ( uint32_t col = 0; col < 128; col += 7 )
      {
        std::vector<bool> a( g.num_inputs() );
        for ( uint32_t i = 0; i < g.num_inputs(); ++i )
          a[i] = in.get( i, col );
        for ( uint32_t o = 0; o < g.num_outputs(); ++o )
          CHECK( out.get( o, col ) == test::eval_recursive( g, g.output( o ), a ) );
      }
    }
  }
  SUBCASE( "input count mismatch" )
  {
    const auto g = generate_random_aig( { 4, 10, 1, 1 } );
    CHECK_THROWS_AS( simulate( g, random_batch( 3, 1, 1 ) ), DataError );
  }
}

TEST_CASE( "check_equiv" )
{
  SUBCASE( "reflexive" )
  {
    const auto g = generate_random_aig( { 10, 80, 3, 4 } );
    CHECK( check_equiv( g, g ).equivalent );
  }
  SUBCASE( "complemented output yields valid counterexample" )
  {
    for ( uint32_t inputs : { 10u, 24u } )
    {
      const auto g = generate_random_aig( { inputs, 120, 3, 5 } );
      AigBuilder b;
      std::vector<Literal> map( g.size() );
      for ( uint32_t i = 0; i < g.num_inputs(); ++i )
        map[g.input_node( i )] = b.add_input();
      for ( uint32_t n = g.first_and(); n < g.size(); ++n )
        map[n] = b.and_( map[g.fanin0( n ).node()] ^ g.fanin0( n ).complemented(),
                         map[g.fanin1( n ).node()] ^ g.fanin1( n ).complemented() );
      for ( uint32_t o = 0; o < g.num_outputs(); ++o )
        b.add_output( ( map[g.output( o ).node()] ^ g.output( o ).complemented() ) ^ ( o == 1 ) );
      const auto h = std::move( b ).build();
      const auto r = check_equiv( g, h );
      CHECK_FALSE( r.equivalent );
      REQUIRE( r.counterexample );
      CHECK( evaluate( g, *r.counterexample ) != evaluate( h, *r.counterexample ) );
    }
  }
  SUBCASE( "xor lowering vs or-of-minterms" )
  {
    AigBuilder b1, b2;
    const auto a1 = b1.add_input(), c1 = b1.add_input();
    b1.add_output( b1.xor_( a1, c1 ) );
    const auto a2 = b2.add_input(), c2 = b2.add_input();
    b2.add_output( b2.or_( b2.and_( a2, !c2 ), b2.and_( !a2, c2 ) ) );
    const auto r = check_equiv( std::move( b1 ).build(), std::move( b2 ).build() );
    CHECK( r.equivalent );
    CHECK( r.method == CecMethod::exhaustive );
  }
  SUBCASE( "sat path proves equivalence of restructured circuits" )
  {
    // (a & b) & c versus a & (b & c) over 20 inputs: not structurally identical
    AigBuilder b1, b2;
    std::vector<Literal> x1, x2;
    for ( int i = 0; i < 20; ++i )
    {
      x1.push_back( b1.add_input() );
      x2.push_back( b2.add_input() );
    }
    Literal acc1 = x1[0], acc2 = x2[19];
    for ( int i = 1; i < 20; ++i )
    {
      acc1 = b1.and_( acc1, x1[i] );
      acc2 = b2.and_( x2[19 - i], acc2 );
    }
    b1.add_output( b1.or_( acc1, b1.xor_( x1[0], x1[1] ) ) );
    b2.add_output( b2.or_( acc2, b2.or_( b2.and_( x2[0], !x2[1] ), b2.and_( !x2[0], x2[1] ) ) ) );
    const auto r = check_equiv( std::move( b1 ).build(), std::move( b2 ).build() );
    CHECK( r.equivalent );
    CHECK( r.method == CecMethod::sat );
  }
  SUBCASE( "sat finds rare counterexample" )
  {
    // differ only when all 20 inputs are 1: random sampling is unlikely to hit it
    AigBuilder b1, b2;
    std::vector<Literal> x1, x2;
    for ( int i = 0; i < 20; ++i )
    {
      x1.push_back( b1.add_input() );
      x2.push_back( b2.add_input() );
    }
    Literal all = x1[0];
    for ( int i = 1; i < 20; ++i )
      all = b1.and_( all, x1[i] );
    b1.add_output( all );
    b2.add_output( b2.and_( x2[0], b2.and_( x2[1], !x2[1] ) ) );
    const auto g1 = std::move( b1 ).build(), g2 = std::move( b2 ).build();
    const auto r = check_equiv( g1, g2 );
    CHECK_FALSE( r.equivalent );
    CHECK( r.method == CecMethod::sat );
    REQUIRE( r.counterexample );
    CHECK( evaluate( g1, *r.counterexample ) != evaluate( g2, *r.counterexample ) );
  }
  SUBCASE( "arity mismatch" )
  {
    const auto g = generate_random_aig( { 4, 10, 1, 1 } );
    const auto h = generate_random_aig( { 5, 10, 1, 1 } );
    CHECK_THROWS_AS( check_equiv( g, h ), DataError );
  }
}

TEST_CASE( "hash-consing holds for all construction paths" )
{
  for ( uint64_t seed = 1; seed <= 10; ++seed )
  {
    const auto g = generate_random_aig( { 16, 300, 5, seed } );
    CHECK( is_structurally_hashed( g ) );
    CHECK( is_structurally_hashed( parse_aiger_ascii( write_aiger_ascii( g ) ) ) );
  }
  for ( auto name : { "c17", "c432", "c880" } )
    CHECK( is_structurally_hashed( read_netlist( std::string( ALMOST_SOURCE_DIR "/benchmarks/" ) + name + ".bench" ) ) );
}

}
