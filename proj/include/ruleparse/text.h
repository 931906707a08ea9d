// Small string helpers shared by the readers: splitting, UTF-8 checks and
// Turkish-aware case folding.

#ifndef RULEPARSE_TEXT_H_
#define RULEPARSE_TEXT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ruleparse {

std::vector<std::string_view> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string_view trim(std::string_view s);

bool is_valid_utf8(std::string_view s);

// Lowercases with the Turkish dotted/dotless rules (I -> ı, İ -> i) and
// the usual Latin-1 / Latin Extended-A pairs. Invalid UTF-8 bytes are
// copied through unchanged.
std::string turkish_fold(std::string_view s);

// Strict decimal integer parse; rejects signs other than a leading '-',
// whitespace and trailing garbage.
std::optional<long long> parse_int(std::string_view s);

std::optional<double> parse_double(std::string_view s);

// Fixed-point rendering with exactly `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

}  // namespace ruleparse

#endif  // RULEPARSE_TEXT_H_
