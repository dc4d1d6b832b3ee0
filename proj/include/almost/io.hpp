/*!
  \file io.hpp
  \brief BENCH (ISCAS85 dialect) and ASCII AIGER readers and writers
*/

#pragma once

#include "almost/aig.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace almost
{

/*! \brief Parses a combinational BENCH netlist.
 *
 * Supported gates (case-insensitive): AND, NAND, OR, NOR, XOR, XNOR, NOT,
 * BUFF/BUF.  Gates may appear in any order.  Multi-input gates fold to the
 * right, e.g. `AND(a, b, c)` becomes `a & (b & c)`.  Gates not reachable from
 * an output are dropped.
 *
 * Throws `ParseError` on syntax errors, undeclared signals and cycles.
 */
Aig parse_bench( std::string_view text );

/// Parses `aag` text. Only the combinational subset (no latches) is accepted.
Aig parse_aiger_ascii( std::string_view text );
std::string write_aiger_ascii( const Aig& g );

std::string read_file( const std::filesystem::path& path );
void write_file( const std::filesystem::path& path, std::string_view content );

/// Reads a netlist, choosing the parser from the extension (.bench or .aag).
Aig read_netlist( const std::filesystem::path& path );

} // namespace almost
