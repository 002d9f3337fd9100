#ifndef EMBIAS_TEXT_H_
#define EMBIAS_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace embias {

// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string ToLower(std::string_view s);

std::string_view Trim(std::string_view s);

// Splits on runs of spaces and tabs.
std::vector<std::string_view> SplitWhitespace(std::string_view s);

std::vector<std::string_view> Split(std::string_view s, char sep);

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);

// Parses the whole of `s` as a double; returns false on any trailing junk.
bool ParseDouble(std::string_view s, double *out);
bool ParseInt(std::string_view s, long long *out);

// Splits one CSV record. Handles double-quoted fields with "" escapes; does
// not support newlines inside quotes.
std::vector<std::string> ParseCsvLine(std::string_view line);

// Quotes `field` if it contains a comma, quote or newline.
std::string CsvEscape(std::string_view field);

}  // namespace embias

#endif  // EMBIAS_TEXT_H_
