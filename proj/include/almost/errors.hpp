#pragma once

#include <stdexcept>
#include <string>

namespace almost
{

/// Malformed or inconsistent input data (files, datasets, mismatched sizes).
class DataError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in a text format, with 1-based position.
class ParseError : public DataError
{
public:
  ParseError( const std::string& what, std::size_t line, std::size_t column = 0 )
      : DataError( format( what, line, column ) ), line_( line ), column_( column ) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  static std::string format( const std::string& what, std::size_t line, std::size_t column )
  {
    auto s = "line " + std::to_string( line );
    if ( column != 0 )
      s += ", column " + std::to_string( column );
    return s + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

} // namespace almost
