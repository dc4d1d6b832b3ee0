#include "almost/io.hpp"

#include "almost/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace almost
{

namespace
{

enum class GateType
{
  and_gate,
  nand_gate,
  or_gate,
  nor_gate,
  xor_gate,
  xnor_gate,
  not_gate,
  buf_gate
};

struct BenchGate
{
  GateType type;
  std::vector<std::string> operands;
  std::size_t line;
  std::vector<std::size_t> columns;
};

bool is_name_char( char c )
{
  return std::isalnum( static_cast<unsigned char>( c ) ) || c == '_' || c == '.' || c == '[' || c == ']' || c == '$' ||
         c == '\\' || c == '/' || c == '-';
}

std::optional<GateType> gate_type( std::string name )
{
  std::transform( name.begin(), name.end(), name.begin(), []( unsigned char c ) { return std::toupper( c ); } );
  static const std::unordered_map<std::string, GateType> table = {
      { "AND", GateType::and_gate }, { "NAND", GateType::nand_gate }, { "OR", GateType::or_gate },
      { "NOR", GateType::nor_gate }, { "XOR", GateType::xor_gate },   { "XNOR", GateType::xnor_gate },
      { "NOT", GateType::not_gate }, { "INV", GateType::not_gate },   { "BUFF", GateType::buf_gate },
      { "BUF", GateType::buf_gate } };
  if ( auto it = table.find( name ); it != table.end() )
    return it->second;
  return std::nullopt;
}

/// Cursor over one BENCH line that reports 1-based columns.
class LineLexer
{
public:
  LineLexer( std::string_view line, std::size_t line_no ) : s_( line ), line_no_( line_no ) {}

  void skip_ws()
  {
    while ( pos_ < s_.size() && std::isspace( static_cast<unsigned char>( s_[pos_] ) ) )
      ++pos_;
  }
  bool at_end()
  {
    skip_ws();
    return pos_ >= s_.size();
  }
  std::size_t column() const { return pos_ + 1; }

  std::string name()
  {
    skip_ws();
    const auto start = pos_;
    while ( pos_ < s_.size() && is_name_char( s_[pos_] ) )
      ++pos_;
    if ( start == pos_ )
      fail( "expected identifier" );
    return std::string( s_.substr( start, pos_ - start ) );
  }

  bool accept( char c )
  {
    skip_ws();
    if ( pos_ < s_.size() && s_[pos_] == c )
    {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect( char c )
  {
    if ( !accept( c ) )
      fail( std::string( "expected '" ) + c + "'" );
  }

  [[noreturn]] void fail( const std::string& what ) const { throw ParseError( what, line_no_, column() ); }

private:
  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

std::vector<std::string_view> split_lines( std::string_view text )
{
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while ( start <= text.size() )
  {
    auto end = text.find( '\n', start );
    if ( end == std::string_view::npos )
      end = text.size();
    auto line = text.substr( start, end - start );
    if ( !line.empty() && line.back() == '\r' )
      line.remove_suffix( 1 );
    lines.push_back( line );
    start = end + 1;
  }
  return lines;
}

} // namespace

Aig parse_bench( std::string_view text )
{
  std::vector<std::pair<std::string, std::size_t>> inputs;
  std::vector<std::pair<std::string, std::size_t>> outputs;
  std::unordered_map<std::string, BenchGate> gates;
  std::vector<std::string> gate_order;

  const auto lines = split_lines( text );
  for ( std::size_t i = 0; i < lines.size(); ++i )
  {
    auto line = lines[i];
    if ( auto hash = line.find( '#' ); hash != std::string_view::npos )
      line = line.substr( 0, hash );
    LineLexer lex( line, i + 1 );
    if ( lex.at_end() )
      continue;

    const auto first_col = lex.column();
    auto head = lex.name();
    auto upper = head;
    std::transform( upper.begin(), upper.end(), upper.begin(), []( unsigned char c ) { return std::toupper( c ); } );

    if ( ( upper == "INPUT" || upper == "OUTPUT" ) && lex.accept( '(' ) )
    {
      auto name = lex.name();
      lex.expect( ')' );
      if ( !lex.at_end() )
        lex.fail( "trailing characters" );
      ( upper == "INPUT" ? inputs : outputs ).emplace_back( std::move( name ), i + 1 );
      continue;
    }

    lex.expect( '=' );
    const auto type_col = lex.column();
    auto type_name = lex.name();
    auto type = gate_type( type_name );
    if ( !type )
      throw ParseError( "unknown gate type '" + type_name + "'", i + 1, type_col );
    lex.expect( '(' );
    BenchGate gate{ *type, {}, i + 1, {} };
    if ( !lex.accept( ')' ) )
    {
      do
      {
        lex.skip_ws();
        gate.columns.push_back( lex.column() );
        gate.operands.push_back( lex.name() );
      } while ( lex.accept( ',' ) );
      lex.expect( ')' );
    }
    if ( !lex.at_end() )
      lex.fail( "trailing characters" );

    const bool unary = gate.type == GateType::not_gate || gate.type == GateType::buf_gate;
    if ( unary && gate.operands.size() != 1 )
      throw ParseError( type_name + " expects exactly one operand", i + 1, type_col );
    if ( gate.operands.empty() )
      throw ParseError( type_name + " expects at least one operand", i + 1, type_col );
    if ( gates.count( head ) )
      throw ParseError( "signal '" + head + "' defined twice", i + 1, first_col );
    gate_order.push_back( head );
    gates.emplace( std::move( head ), std::move( gate ) );
  }

  AigBuilder b;
  std::unordered_map<std::string, Literal> signals;
  for ( const auto& [name, line] : inputs )
  {
    if ( signals.count( name ) || gates.count( name ) )
      throw ParseError( "signal '" + name + "' defined twice", line );
    signals.emplace( name, b.add_input( name ) );
  }

  // iterative DFS so deep netlists do not exhaust the stack
  std::unordered_map<std::string, int> state; // 1 = on stack, 2 = done
  auto resolve = [&]( const std::string& root, std::size_t line, std::size_t col ) -> Literal {
    if ( auto it = signals.find( root ); it != signals.end() )
      return it->second;
    if ( !gates.count( root ) )
      throw ParseError( "undeclared signal '" + root + "'", line, col );

    std::vector<std::pair<const std::string*, std::size_t>> stack{ { &root, 0 } };
    state[root] = 1;
    while ( !stack.empty() )
    {
      auto& [name, next] = stack.back();
      const auto& gate = gates.at( *name );
      if ( next < gate.operands.size() )
      {
        const auto& op = gate.operands[next];
        const auto op_col = gate.columns[next];
        ++next;
        if ( signals.count( op ) )
          continue;
        if ( !gates.count( op ) )
          throw ParseError( "undeclared signal '" + op + "'", gate.line, op_col );
        if ( state[op] == 1 )
          throw ParseError( "combinational cycle through '" + op + "'", gate.line, op_col );
        state[op] = 1;
        stack.emplace_back( &gates.find( op )->first, 0 );
        continue;
      }

      std::vector<Literal> ops;
      for ( const auto& op : gate.operands )
        ops.push_back( signals.at( op ) );
      auto fold = [&]( auto&& combine ) {
        Literal acc = ops.back();
        for ( auto k = ops.size() - 1; k-- > 0; )
          acc = combine( ops[k], acc );
        return acc;
      };
      auto and_fold = [&] { return fold( [&]( Literal x, Literal y ) { return b.and_( x, y ); } ); };
      auto or_fold = [&] { return fold( [&]( Literal x, Literal y ) { return b.or_( x, y ); } ); };
      auto xor_fold = [&] { return fold( [&]( Literal x, Literal y ) { return b.xor_( x, y ); } ); };

      Literal result;
      switch ( gate.type )
      {
      case GateType::and_gate: result = and_fold(); break;
      case GateType::nand_gate: result = !and_fold(); break;
      case GateType::or_gate: result = or_fold(); break;
      case GateType::nor_gate: result = !or_fold(); break;
      case GateType::xor_gate: result = xor_fold(); break;
      case GateType::xnor_gate: result = !xor_fold(); break;
      case GateType::not_gate: result = !ops[0]; break;
      case GateType::buf_gate: result = ops[0]; break;
      }
      signals.emplace( *name, result );
      state[*name] = 2;
      stack.pop_back();
    }
    return signals.at( root );
  };

  for ( const auto& name : gate_order )
    resolve( name, gates.at( name ).line, 1 );

  for ( const auto& [name, line] : outputs )
    b.add_output( resolve( name, line, 0 ), name );

  return cleanup( std::move( b ).build() );
}

namespace
{

std::vector<uint64_t> parse_numbers( std::string_view line, std::size_t line_no )
{
  std::vector<uint64_t> values;
  std::size_t pos = 0;
  while ( pos < line.size() )
  {
    while ( pos < line.size() && line[pos] == ' ' )
      ++pos;
    if ( pos >= line.size() )
      break;
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars( line.data() + pos, line.data() + line.size(), v );
    if ( ec != std::errc() )
      throw ParseError( "expected unsigned integer", line_no, pos + 1 );
    pos = static_cast<std::size_t>( ptr - line.data() );
    values.push_back( v );
  }
  return values;
}

} // namespace

Aig parse_aiger_ascii( std::string_view text )
{
  const auto lines = split_lines( text );
  if ( lines.empty() || lines[0].substr( 0, 4 ) != "aag " )
    throw ParseError( "missing 'aag' header", 1, 1 );
  const auto header = parse_numbers( lines[0].substr( 4 ), 1 );
  if ( header.size() != 5 )
    throw ParseError( "header must be 'aag M I L O A'", 1 );
  const auto [max_var, num_in, num_latch, num_out, num_and] =
      std::tuple{ header[0], header[1], header[2], header[3], header[4] };
  if ( num_latch != 0 )
    throw ParseError( "latches are not supported (combinational AIGs only)", 1 );
  if ( max_var < num_in + num_and )
    throw ParseError( "header M is smaller than I + A", 1 );
  if ( lines.size() < 1 + num_in + num_out + num_and )
    throw ParseError( "unexpected end of file", lines.size() );

  const uint64_t max_lit = 2 * max_var + 1;
  auto check_lit = [&]( uint64_t lit, std::size_t line_no ) {
    if ( lit > max_lit )
      throw ParseError( "literal " + std::to_string( lit ) + " out of range", line_no );
  };

  std::size_t ln = 1;
  std::vector<uint64_t> input_lits;
  for ( uint64_t i = 0; i < num_in; ++i, ++ln )
  {
    const auto v = parse_numbers( lines[ln], ln + 1 );
    if ( v.size() != 1 || v[0] < 2 || ( v[0] & 1 ) )
      throw ParseError( "invalid input literal", ln + 1 );
    check_lit( v[0], ln + 1 );
    input_lits.push_back( v[0] );
  }
  std::vector<std::pair<uint64_t, std::size_t>> output_lits;
  for ( uint64_t i = 0; i < num_out; ++i, ++ln )
  {
    const auto v = parse_numbers( lines[ln], ln + 1 );
    if ( v.size() != 1 )
      throw ParseError( "invalid output line", ln + 1 );
    check_lit( v[0], ln + 1 );
    output_lits.emplace_back( v[0], ln + 1 );
  }
  struct AndDef
  {
    uint64_t rhs0, rhs1;
    std::size_t line;
  };
  std::unordered_map<uint64_t, AndDef> and_defs; // keyed by variable
  std::vector<uint64_t> and_order;
  for ( uint64_t i = 0; i < num_and; ++i, ++ln )
  {
    const auto v = parse_numbers( lines[ln], ln + 1 );
    if ( v.size() != 3 || v[0] < 2 || ( v[0] & 1 ) )
      throw ParseError( "invalid AND line", ln + 1 );
    for ( auto x : v )
      check_lit( x, ln + 1 );
    if ( !and_defs.emplace( v[0] >> 1, AndDef{ v[1], v[2], ln + 1 } ).second )
      throw ParseError( "variable defined twice", ln + 1 );
    and_order.push_back( v[0] >> 1 );
  }

  // symbol table and comments
  std::vector<std::string> input_names( num_in ), output_names( num_out );
  for ( ; ln < lines.size(); ++ln )
  {
    const auto line = lines[ln];
    if ( line.empty() )
      continue;
    if ( line[0] == 'c' )
      break;
    const auto space = line.find( ' ' );
    if ( ( line[0] != 'i' && line[0] != 'o' && line[0] != 'l' ) || space == std::string_view::npos )
      throw ParseError( "invalid symbol table entry", ln + 1, 1 );
    uint64_t idx = 0;
    auto [ptr, ec] = std::from_chars( line.data() + 1, line.data() + space, idx );
    if ( ec != std::errc() || ptr != line.data() + space )
      throw ParseError( "invalid symbol index", ln + 1, 2 );
    auto name = std::string( line.substr( space + 1 ) );
    if ( line[0] == 'i' && idx < num_in )
      input_names[idx] = std::move( name );
    else if ( line[0] == 'o' && idx < num_out )
      output_names[idx] = std::move( name );
    else
      throw ParseError( "symbol index out of range", ln + 1, 2 );
  }

  AigBuilder b;
  std::unordered_map<uint64_t, Literal> var_map{ { 0, lit_false } };
  for ( uint64_t i = 0; i < num_in; ++i )
  {
    if ( !var_map.emplace( input_lits[i] >> 1, b.add_input( input_names[i] ) ).second )
      throw ParseError( "input variable defined twice", 2 + i );
  }

  std::unordered_map<uint64_t, int> state;
  std::function<Literal( uint64_t, std::size_t )> lit_of;
  auto resolve_var = [&]( uint64_t root, std::size_t line_no ) {
    if ( var_map.count( root ) )
      return;
    if ( !and_defs.count( root ) )
      throw ParseError( "undefined variable " + std::to_string( root ), line_no );
    std::vector<uint64_t> stack{ root };
    state[root] = 1;
    while ( !stack.empty() )
    {
      const auto var = stack.back();
      const auto& def = and_defs.at( var );
      bool pushed = false;
      for ( auto rhs : { def.rhs0, def.rhs1 } )
      {
        const auto v = rhs >> 1;
        if ( var_map.count( v ) )
          continue;
        if ( !and_defs.count( v ) )
          throw ParseError( "undefined variable " + std::to_string( v ), def.line );
        if ( state[v] == 1 )
          throw ParseError( "cycle through variable " + std::to_string( v ), def.line );
        state[v] = 1;
        stack.push_back( v );
        pushed = true;
        break;
      }
      if ( pushed )
        continue;
      const auto a = var_map.at( def.rhs0 >> 1 ) ^ ( def.rhs0 & 1 );
      const auto c = var_map.at( def.rhs1 >> 1 ) ^ ( def.rhs1 & 1 );
      var_map.emplace( var, b.and_( a, c ) );
      state[var] = 2;
      stack.pop_back();
    }
  };

  for ( auto var : and_order )
    resolve_var( var, and_defs.at( var ).line );
  for ( uint64_t i = 0; i < num_out; ++i )
  {
    const auto [lit, line_no] = output_lits[i];
    resolve_var( lit >> 1, line_no );
    b.add_output( var_map.at( lit >> 1 ) ^ ( lit & 1 ), output_names[i] );
  }
  return std::move( b ).build();
}

std::string write_aiger_ascii( const Aig& g )
{
  std::ostringstream os;
  os << "aag " << g.size() - 1 << ' ' << g.num_inputs() << " 0 " << g.num_outputs() << ' ' << g.num_ands() << '\n';
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    os << g.input( i ).raw() << '\n';
  for ( auto o : g.outputs() )
    os << o.raw() << '\n';
  for ( uint32_t n = g.first_and(); n < g.size(); ++n )
    os << Literal( n, false ).raw() << ' ' << g.fanin1( n ).raw() << ' ' << g.fanin0( n ).raw() << '\n';
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    if ( !g.input_name( i ).empty() )
      os << 'i' << i << ' ' << g.input_name( i ) << '\n';
  for ( uint32_t i = 0; i < g.num_outputs(); ++i )
    if ( !g.output_name( i ).empty() )
      os << 'o' << i << ' ' << g.output_name( i ) << '\n';
  return os.str();
}

std::string read_file( const std::filesystem::path& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw DataError( "cannot open '" + path.string() + "'" );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file( const std::filesystem::path& path, std::string_view content )
{
  if ( path.has_parent_path() )
    std::filesystem::create_directories( path.parent_path() );
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw DataError( "cannot write '" + path.string() + "'" );
  out << content;
}

Aig read_netlist( const std::filesystem::path& path )
{
  const auto text = read_file( path );
  if ( path.extension() == ".aag" )
    return parse_aiger_ascii( text );
  if ( path.extension() == ".bench" )
    return parse_bench( text );
  throw DataError( "unknown netlist extension '" + path.extension().string() + "' (expected .bench or .aag)" );
}

} // namespace almost
