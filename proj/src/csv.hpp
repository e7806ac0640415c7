#pragma once

// Minimal RFC 4180 subset: one record per LF-terminated line, optional
// double-quoted fields with "" escapes, no embedded line breaks.

#include <string>
#include <string_view>
#include <vector>

namespace tracerec::csv {

/// Splits one line into fields. Throws ValidationError on a stray quote.
std::vector<std::string> split(std::string_view line);

/// Quotes the field if it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Splits `text` on LF. A missing final newline is tolerated.
std::vector<std::string_view> lines(std::string_view text);

}  // namespace tracerec::csv
