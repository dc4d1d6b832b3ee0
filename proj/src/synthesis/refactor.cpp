#include "almost/synthesis.hpp"
#include "almost/truth_table.hpp"

#include "rebuild.hpp"

namespace almost
{

namespace
{

constexpr uint32_t max_cut_leaves = 10;

Literal and_tree( AigBuilder& b, std::vector<Literal> lits )
{
  if ( lits.empty() )
    return lit_true;
  while ( lits.size() > 1 )
  {
    std::vector<Literal> next;
    for ( std::size_t i = 0; i + 1 < lits.size(); i += 2 )
      next.push_back( b.and_( lits[i], lits[i + 1] ) );
    if ( lits.size() % 2 )
      next.push_back( lits.back() );
    lits = std::move( next );
  }
  return lits[0];
}

Literal or_tree( AigBuilder& b, std::vector<Literal> lits )
{
  for ( auto& l : lits )
    l = !l;
  return !and_tree( b, std::move( lits ) );
}

/// Algebraic factoring by repeatedly extracting the most frequent literal.
Literal factor( AigBuilder& b, const std::vector<Cube>& cubes, std::span<const Literal> vars )
{
  if ( cubes.empty() )
    return lit_false;

  // literal index: 2*v for positive, 2*v+1 for negative
  std::vector<uint32_t> count( 2 * vars.size(), 0 );
  for ( const auto& c : cubes )
    for ( uint32_t v = 0; v < vars.size(); ++v )
    {
      count[2 * v] += ( c.pos >> v ) & 1u;
      count[2 * v + 1] += ( c.neg >> v ) & 1u;
    }
  const auto best = static_cast<uint32_t>( std::max_element( count.begin(), count.end() ) - count.begin() );

  if ( count[best] < 2 )
  {
    std::vector<Literal> terms;
    for ( const auto& c : cubes )
    {
      std::vector<Literal> lits;
      for ( uint32_t v = 0; v < vars.size(); ++v )
      {
        if ( ( c.pos >> v ) & 1u )
          lits.push_back( vars[v] );
        if ( ( c.neg >> v ) & 1u )
          lits.push_back( !vars[v] );
      }
      terms.push_back( and_tree( b, std::move( lits ) ) );
    }
    return or_tree( b, std::move( terms ) );
  }

  const uint32_t v = best / 2;
  const bool neg = best % 2;
  std::vector<Cube> with, without;
  for ( auto c : cubes )
  {
    auto& mask = neg ? c.neg : c.pos;
    if ( ( mask >> v ) & 1u )
    {
      mask &= ~( 1u << v );
      with.push_back( c );
    }
    else
      without.push_back( c );
  }
  const auto lit = vars[v] ^ neg;
  const auto inner = b.and_( lit, factor( b, with, vars ) );
  if ( without.empty() )
    return inner;
  return b.or_( inner, factor( b, without, vars ) );
}

/// Smaller of the factored forms of `f` and of its complement, as a one-output structure.
Aig factored_structure( const TruthTable& f )
{
  auto build = [&]( const TruthTable& t, bool complement ) {
    AigBuilder b;
    std::vector<Literal> vars;
    for ( uint32_t v = 0; v < f.num_vars(); ++v )
      vars.push_back( b.add_input() );
    b.add_output( factor( b, isop( t ), vars ) ^ complement );
    return std::move( b ).build();
  };
  auto pos = build( f, false );
  auto neg = build( ~f, true );
  return neg.num_ands() < pos.num_ands() ? std::move( neg ) : std::move( pos );
}

} // namespace

/*
 * Each node's reconvergence-driven cut is collapsed into a truth table,
 * re-expressed as a factored sum of products, and swapped in when the new
 * form saves nodes (zero_gain: when it costs none and changes the structure).
 */
Aig refactor( const Aig& g, bool zero_gain )
{
  detail::MffcCounter mffc( g );
  detail::Rebuild rb( g );
  auto& b = rb.builder();
  std::vector<uint32_t> cone;

  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    const auto default_hit = rb.copy_lookup( n );
    const int default_cost = default_hit ? 0 : 1;

    const auto leaves = detail::reconvergence_cut( g, n, max_cut_leaves, cone );
    const auto mffc_nodes = mffc.collect( n, leaves );
    if ( leaves.size() < 2 || ( mffc_nodes.size() < 2 && !zero_gain ) )
    {
      rb.set( n, rb.copy( n ) );
      continue;
    }

    const auto f = detail::cone_tables( g, leaves, cone ).back();
    const auto structure = factored_structure( f );
    std::vector<Literal> inputs;
    for ( auto l : leaves )
      inputs.push_back( rb.get( l ) );

    const auto dead = detail::dead_set( rb, mffc_nodes, n );
    const auto run = detail::dry_run( b, structure, inputs, dead );
    const int gain = static_cast<int>( dead.size() ) + default_cost - static_cast<int>( run.added );
    const bool identical = run.existing && default_hit && *run.existing == *default_hit;

    if ( !identical && ( gain > 0 || ( zero_gain && gain == 0 ) ) )
      rb.set( n, detail::instantiate( b, structure, inputs ) );
    else
      rb.set( n, rb.copy( n ) );
  }
  return rb.finish();
}

} // namespace almost
