// sga/text.hpp

#ifndef SGA_TEXT_HPP_
#define SGA_TEXT_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sga {

using TokenList = std::vector<std::string>;

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lowercases, splits on whitespace and strips leading/trailing punctuation
/// from each token. Internal hyphens and apostrophes survive, so
/// "re-reading" stays one token. Bytes >= 0x80 count as word characters.
TokenList tokenize(std::string_view text);

// Joins tokens with single spaces.
std::string join(const TokenList &tokens, std::string_view sep = " ");

// Trims ASCII whitespace at both ends.
std::string_view trim(std::string_view s);

// Trims, then collapses inner whitespace runs to a single space.
std::string squeeze_spaces(std::string_view s);

std::string to_lower(std::string_view s);

}  // namespace sga

#endif  // SGA_TEXT_HPP_
