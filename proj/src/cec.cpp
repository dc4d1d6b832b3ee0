#include "almost/cec.hpp"

#include "almost/errors.hpp"
#include "almost/sat.hpp"
#include "almost/simulate.hpp"

namespace almost
{

const char* to_string( CecMethod m )
{
  switch ( m )
  {
  case CecMethod::exhaustive: return "exhaustive";
  case CecMethod::sat: return "sat";
  case CecMethod::sampled: return "sampled";
  }
  return "?";
}

std::vector<bool> evaluate( const Aig& g, const std::vector<bool>& assignment )
{
  if ( assignment.size() != g.num_inputs() )
    throw DataError( "evaluate: assignment size mismatch" );
  std::vector<bool> v( g.size(), false );
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    v[g.input_node( i )] = assignment[i];
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    const auto f0 = g.fanin0( n ), f1 = g.fanin1( n );
    v[n] = ( v[f0.node()] != f0.complemented() ) && ( v[f1.node()] != f1.complemented() );
  }
  std::vector<bool> out;
  for ( auto o : g.outputs() )
    out.push_back( v[o.node()] != o.complemented() );
  return out;
}

namespace
{

/// First column where any output row differs, restricted to `columns` valid columns.
std::optional<uint64_t> first_difference( const SimBatch& x, const SimBatch& y, uint64_t columns )
{
  for ( uint32_t w = 0; w < x.num_words; ++w )
  {
    uint64_t diff = 0;
    for ( std::size_t o = 0; o < x.rows.size(); ++o )
      diff |= x.rows[o][w] ^ y.rows[o][w];
    const uint64_t base = uint64_t( w ) * 64;
    if ( base + 64 > columns )
      diff &= columns - base >= 64 ? ~uint64_t{ 0 } : ( ( uint64_t{ 1 } << ( columns - base ) ) - 1 );
    if ( diff )
      return base + static_cast<uint64_t>( __builtin_ctzll( diff ) );
  }
  return std::nullopt;
}

std::vector<bool> column_assignment( const SimBatch& in, uint64_t column )
{
  std::vector<bool> a( in.rows.size() );
  for ( std::size_t i = 0; i < in.rows.size(); ++i )
    a[i] = in.get( static_cast<uint32_t>( i ), static_cast<uint32_t>( column ) );
  return a;
}

std::optional<std::vector<bool>> sample_search( const Aig& a, const Aig& b, uint32_t vectors, uint64_t seed )
{
  const uint32_t words = ( vectors + 63 ) / 64;
  const auto in = random_batch( a.num_inputs(), words, seed );
  if ( auto col = first_difference( simulate( a, in ), simulate( b, in ), uint64_t( words ) * 64 ) )
    return column_assignment( in, *col );
  return std::nullopt;
}

} // namespace

CecResult check_equiv( const Aig& a, const Aig& b, const CecBudget& budget )
{
  if ( a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs() )
    throw DataError( "check_equiv: input/output arity mismatch" );

  const uint32_t n = a.num_inputs();
  if ( n <= exhaustive_input_limit )
  {
    const auto in = exhaustive_batch( n );
    if ( auto col = first_difference( simulate( a, in ), simulate( b, in ), uint64_t{ 1 } << n ) )
      return { false, column_assignment( in, *col ), CecMethod::exhaustive };
    return { true, std::nullopt, CecMethod::exhaustive };
  }

  // cheap random pass first: most inequivalent pairs differ on random patterns
  if ( auto cex = sample_search( a, b, 1024, budget.seed ) )
    return { false, std::move( cex ), CecMethod::sampled };

  // miter: shared inputs, OR of pairwise output XORs
  AigBuilder mb;
  std::vector<Literal> inputs;
  for ( uint32_t i = 0; i < n; ++i )
    inputs.push_back( mb.add_input() );
  auto copy = [&]( const Aig& g ) {
    std::vector<Literal> map( g.size(), lit_false );
    for ( uint32_t i = 0; i < n; ++i )
      map[g.input_node( i )] = inputs[i];
    for ( uint32_t v = g.first_and(); v < g.size(); ++v )
    {
      const auto f0 = g.fanin0( v ), f1 = g.fanin1( v );
      map[v] = mb.and_( map[f0.node()] ^ f0.complemented(), map[f1.node()] ^ f1.complemented() );
    }
    std::vector<Literal> outs;
    for ( auto o : g.outputs() )
      outs.push_back( map[o.node()] ^ o.complemented() );
    return outs;
  };
  const auto oa = copy( a );
  const auto ob = copy( b );
  Literal miter = lit_false;
  for ( std::size_t i = 0; i < oa.size(); ++i )
    miter = mb.or_( miter, mb.xor_( oa[i], ob[i] ) );
  if ( miter == lit_false )
    return { true, std::nullopt, CecMethod::sat };

  // Tseitin encoding: solver variable i corresponds to miter node i
  SatSolver solver;
  for ( uint32_t v = 0; v < mb.size(); ++v )
    solver.new_var();
  solver.add_clause( { SatLit::neg( 0 ) } );
  auto to_sat = []( Literal l ) { return l.complemented() ? SatLit::neg( l.node() ) : SatLit::pos( l.node() ); };
  for ( uint32_t v = n + 1; v < mb.size(); ++v )
  {
    const auto& nd = mb.and_node( v );
    const auto x = SatLit::pos( v ), f0 = to_sat( nd.fanin0 ), f1 = to_sat( nd.fanin1 );
    solver.add_clause( { !x, f0 } );
    solver.add_clause( { !x, f1 } );
    solver.add_clause( { x, !f0, !f1 } );
  }
  solver.add_clause( { to_sat( miter ) } );

  switch ( solver.solve( budget.conflicts ) )
  {
  case SatResult::unsat: return { true, std::nullopt, CecMethod::sat };
  case SatResult::sat:
  {
    std::vector<bool> cex( n );
    for ( uint32_t i = 0; i < n; ++i )
      cex[i] = solver.value( i + 1 );
    return { false, std::move( cex ), CecMethod::sat };
  }
  case SatResult::unknown: break;
  }

  if ( auto cex = sample_search( a, b, std::max( budget.sample_vectors, 10'000u ), budget.seed + 1 ) )
    return { false, std::move( cex ), CecMethod::sampled };
  return { true, std::nullopt, CecMethod::sampled };
}

} // namespace almost
