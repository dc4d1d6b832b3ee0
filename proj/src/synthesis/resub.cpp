#include "almost/synthesis.hpp"
#include "almost/truth_table.hpp"

#include "rebuild.hpp"

namespace almost
{

namespace
{

constexpr uint32_t max_cut_leaves = 8;
constexpr std::size_t max_divisors = 64;
constexpr std::size_t max_fanouts_per_divisor = 16;

std::vector<std::vector<uint32_t>> fanout_lists( const Aig& g )
{
  std::vector<std::vector<uint32_t>> fo( g.size() );
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    fo[g.fanin0( n ).node()].push_back( n );
    if ( g.fanin1( n ).node() != g.fanin0( n ).node() )
      fo[g.fanin1( n ).node()].push_back( n );
  }
  return fo;
}

struct Candidate
{
  int gain = std::numeric_limits<int>::min();
  Literal lit;          // 0-resub: divisor literal in the new graph
  Literal a, b;         // 1-resub operands
  bool single = false;  // 0-resub when set
  bool out_neg = false; // 1-resub output complement
};

} // namespace

/*
 * A node is re-expressed through divisors (signals of its reconvergence cut
 * that survive its removal): either a single divisor or the AND of two
 * divisors in any polarity.  Matching is exact on the cut truth table.
 */
Aig resub( const Aig& g, bool zero_gain )
{
  const auto fanouts = fanout_lists( g );
  detail::MffcCounter mffc( g );
  detail::Rebuild rb( g );
  auto& b = rb.builder();
  std::vector<uint32_t> cone;
  std::vector<uint32_t> mark( g.size(), 0 ); // 1 leaf/divisor, 2 mffc
  uint32_t epoch_base = 0;

  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
  {
    const auto default_hit = rb.copy_lookup( n );
    const int default_cost = default_hit ? 0 : 1;

    const auto leaves = detail::reconvergence_cut( g, n, max_cut_leaves, cone );
    const auto mffc_nodes = mffc.collect( n, leaves );
    const auto dead = detail::dead_set( rb, mffc_nodes, n );
    const int freed = static_cast<int>( dead.size() ) + default_cost;
    if ( freed < 1 && !zero_gain )
    {
      rb.set( n, rb.copy( n ) );
      continue;
    }

    epoch_base += 3;
    const uint32_t in_mffc = epoch_base, is_div = epoch_base + 1;
    for ( auto m : mffc_nodes )
      mark[m] = in_mffc;

    // divisors: leaves, cone nodes outside the MFFC, then nodes fed only by divisors
    const auto tts = detail::cone_tables( g, leaves, cone );
    const auto nv = static_cast<uint32_t>( leaves.size() );
    std::vector<uint32_t> divs;
    std::vector<TruthTable> div_tts;
    auto add_div = [&]( uint32_t d, TruthTable t ) {
      mark[d] = is_div;
      divs.push_back( d );
      div_tts.push_back( std::move( t ) );
    };
    for ( uint32_t i = 0; i < nv; ++i )
      add_div( leaves[i], TruthTable::nth_var( nv, i ) );
    for ( std::size_t i = 0; i < cone.size(); ++i )
      if ( mark[cone[i]] != in_mffc )
        add_div( cone[i], tts[i] );
    const auto& target = tts.back();

    auto tt_of = [&]( Literal l ) {
      const auto it = std::find( divs.begin(), divs.end(), l.node() );
      const auto& t = div_tts[static_cast<std::size_t>( it - divs.begin() )];
      return l.complemented() ? ~t : t;
    };
    for ( std::size_t i = 0; i < divs.size() && divs.size() < max_divisors; ++i )
    {
      const auto& fo = fanouts[divs[i]];
      for ( std::size_t k = 0; k < fo.size() && k < max_fanouts_per_divisor && divs.size() < max_divisors; ++k )
      {
        const auto o = fo[k];
        if ( o >= n || mark[o] == is_div || mark[o] == in_mffc )
          continue;
        const auto f0 = g.fanin0( o ), f1 = g.fanin1( o );
        if ( mark[f0.node()] != is_div || mark[f1.node()] != is_div )
          continue;
        add_div( o, tt_of( f0 ) & tt_of( f1 ) );
      }
    }

    // a divisor whose new-graph node is scheduled to die cannot be reused for free
    std::vector<bool> usable( divs.size() );
    for ( std::size_t i = 0; i < divs.size(); ++i )
      usable[i] = !dead.contains( rb.get( divs[i] ).node() );

    Candidate best;
    for ( std::size_t i = 0; i < divs.size(); ++i )
    {
      if ( !usable[i] )
        continue;
      if ( div_tts[i] == target || div_tts[i] == ~target )
      {
        const auto lit = rb.get( divs[i] ) ^ !( div_tts[i] == target );
        if ( default_hit && lit == *default_hit )
          continue;
        best.gain = freed;
        best.single = true;
        best.lit = lit;
        break;
      }
    }

    if ( !best.single )
    {
      const auto not_target = ~target;
      for ( std::size_t i = 0; i < divs.size(); ++i )
      {
        if ( !usable[i] )
          continue;
        for ( std::size_t j = i + 1; j < divs.size(); ++j )
        {
          if ( !usable[j] )
            continue;
          for ( uint32_t pol = 0; pol < 4; ++pol )
          {
            const auto ti = ( pol & 1u ) ? ~div_tts[i] : div_tts[i];
            const auto tj = ( pol & 2u ) ? ~div_tts[j] : div_tts[j];
            const auto conj = ti & tj;
            const bool pos = conj == target;
            if ( !pos && !( conj == not_target ) )
              continue;
            const auto a = rb.get( divs[i] ) ^ bool( pol & 1u );
            const auto c = rb.get( divs[j] ) ^ bool( pol & 2u );
            const auto hit = b.lookup_and( a, c );
            if ( hit && dead.contains( hit->node() ) )
              continue;
            if ( hit && default_hit && ( *hit ^ !pos ) == *default_hit )
              continue;
            const int gain = freed - ( hit ? 0 : 1 );
            if ( gain > best.gain )
            {
              best.gain = gain;
              best.a = a;
              best.b = c;
              best.out_neg = !pos;
            }
          }
        }
      }
    }

    if ( best.gain > 0 || ( zero_gain && best.gain == 0 ) )
      rb.set( n, best.single ? best.lit : ( b.and_( best.a, best.b ) ^ best.out_neg ) );
    else
      rb.set( n, rb.copy( n ) );
  }
  return rb.finish();
}

} // namespace almost
