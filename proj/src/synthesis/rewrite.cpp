#include "almost/npn.hpp"
#include "almost/synthesis.hpp"

#include "rebuild.hpp"

namespace almost
{

namespace
{

constexpr uint32_t cut_size = 4;
constexpr uint32_t cuts_per_node = 8;

struct Cut
{
  std::array<uint32_t, cut_size> leaves{};
  uint32_t size = 0;

  std::span<const uint32_t> view() const { return { leaves.data(), size }; }
  bool operator==( const Cut& o ) const { return size == o.size && std::equal( leaves.begin(), leaves.begin() + size, o.leaves.begin() ); }
};

bool subset_of( const Cut& a, const Cut& b )
{
  return std::includes( b.leaves.begin(), b.leaves.begin() + b.size, a.leaves.begin(), a.leaves.begin() + a.size );
}

std::optional<Cut> merge( const Cut& a, const Cut& b )
{
  Cut c;
  std::size_t i = 0, j = 0;
  while ( i < a.size || j < b.size )
  {
    uint32_t next;
    if ( j == b.size || ( i < a.size && a.leaves[i] < b.leaves[j] ) )
      next = a.leaves[i++];
    else if ( i == a.size || b.leaves[j] < a.leaves[i] )
      next = b.leaves[j++];
    else
    {
      next = a.leaves[i++];
      ++j;
    }
    if ( c.size == cut_size )
      return std::nullopt;
    c.leaves[c.size++] = next;
  }
  return c;
}

/// Priority cuts: at most `cuts_per_node` non-trivial cuts per node, smallest first.
std::vector<std::vector<Cut>> enumerate_cuts( const Aig& g )
{
  std::vector<std::vector<Cut>> cuts( g.size() );
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
  {
    const auto n = g.input_node( i );
    Cut t;
    t.leaves[0] = n;
    t.size = 1;
    cuts[n].push_back( t );
  }
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    std::vector<Cut> cand;
    for ( const auto& c0 : cuts[g.fanin0( n ).node()] )
      for ( const auto& c1 : cuts[g.fanin1( n ).node()] )
        if ( auto m = merge( c0, c1 ) )
          cand.push_back( *m );
    std::sort( cand.begin(), cand.end(), []( const Cut& a, const Cut& b ) {
      if ( a.size != b.size )
        return a.size < b.size;
      return std::lexicographical_compare( a.leaves.begin(), a.leaves.begin() + a.size, b.leaves.begin(),
                                           b.leaves.begin() + b.size );
    } );
    auto& out = cuts[n];
    for ( const auto& c : cand )
    {
      if ( out.size() == cuts_per_node )
        break;
      const bool dominated = std::any_of( out.begin(), out.end(), [&]( const Cut& o ) { return subset_of( o, c ); } );
      if ( !dominated )
        out.push_back( c );
    }
    Cut trivial;
    trivial.leaves[0] = n;
    trivial.size = 1;
    out.push_back( trivial );
  }
  return cuts;
}

/// Interior nodes between `root` and the cut leaves, in id order.
std::vector<uint32_t> cut_cone( const Aig& g, uint32_t root, std::span<const uint32_t> leaves )
{
  std::vector<uint32_t> cone, stack{ root };
  while ( !stack.empty() )
  {
    const auto n = stack.back();
    stack.pop_back();
    if ( std::find( cone.begin(), cone.end(), n ) != cone.end() )
      continue;
    cone.push_back( n );
    for ( auto f : { g.fanin0( n ).node(), g.fanin1( n ).node() } )
      if ( f != 0 && std::find( leaves.begin(), leaves.end(), f ) == leaves.end() )
        stack.push_back( f );
  }
  std::sort( cone.begin(), cone.end() );
  return cone;
}

uint16_t cut_function( const Aig& g, uint32_t root, const Cut& cut )
{
  const auto cone = cut_cone( g, root, cut.view() );
  // evaluate over 4 variables regardless of the cut size; unused variables are don't-cares
  std::vector<uint16_t> tt( cone.size() );
  constexpr uint16_t vars[4] = { 0xaaaa, 0xcccc, 0xf0f0, 0xff00 };
  auto value = [&]( Literal l ) -> uint16_t {
    const auto n = l.node();
    uint16_t t = 0;
    if ( n != 0 )
    {
      const auto* lp = std::find( cut.leaves.begin(), cut.leaves.begin() + cut.size, n );
      if ( lp != cut.leaves.begin() + cut.size )
        t = vars[lp - cut.leaves.begin()];
      else
        t = tt[static_cast<std::size_t>( std::lower_bound( cone.begin(), cone.end(), n ) - cone.begin() )];
    }
    return l.complemented() ? uint16_t( ~t ) : t;
  };
  for ( std::size_t i = 0; i < cone.size(); ++i )
    tt[i] = value( g.fanin0( cone[i] ) ) & value( g.fanin1( cone[i] ) );
  return tt.back();
}

} // namespace

/*
 * For every node, each 4-feasible cut is matched against the NPN library and
 * the best structure replaces the cone when it saves nodes (zero_gain: when it
 * does not cost nodes and changes the structure).
 */
Aig rewrite( const Aig& g, bool zero_gain )
{
  const auto& lib = NpnLibrary::instance();
  const auto cuts = enumerate_cuts( g );
  detail::MffcCounter mffc( g );
  detail::Rebuild rb( g );
  auto& b = rb.builder();

  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    const auto default_hit = rb.copy_lookup( n );
    const int default_cost = default_hit ? 0 : 1;

    int best_gain = std::numeric_limits<int>::min();
    uint16_t best_tt = 0;
    std::array<Literal, 4> best_leaves{};

    for ( const auto& cut : cuts[n] )
    {
      if ( cut.size == 1 && cut.leaves[0] == n )
        continue;
      const auto tt = cut_function( g, n, cut );
      const auto* structure = lib.structure( lib.representative( tt ) );
      if ( !structure )
        continue;

      std::array<Literal, 4> leaves{ lit_false, lit_false, lit_false, lit_false };
      for ( uint32_t i = 0; i < cut.size; ++i )
        leaves[i] = rb.get( cut.leaves[i] );
      const auto inputs = transform_leaves( lib.transform( tt ), leaves );

      const auto cone = mffc.collect( n, cut.view() );
      const auto dead = detail::dead_set( rb, cone, n );
      auto run = detail::dry_run( b, *structure, inputs, dead );
      if ( run.existing )
        run.existing = *run.existing ^ lib.transform( tt ).output_neg;
      // a replacement identical to the plain copy is not a move
      if ( run.existing && default_hit && *run.existing == *default_hit )
        continue;
      const int gain = static_cast<int>( dead.size() ) + default_cost - static_cast<int>( run.added );
      if ( gain > best_gain )
      {
        best_gain = gain;
        best_tt = tt;
        best_leaves = leaves;
      }
    }

    if ( best_gain > 0 || ( zero_gain && best_gain == 0 ) )
      rb.set( n, *lib.instantiate( b, best_tt, best_leaves ) );
    else
      rb.set( n, rb.copy( n ) );
  }
  return rb.finish();
}

} // namespace almost
