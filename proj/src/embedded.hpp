#pragma once

#include <string_view>

namespace tracerec::embedded {

/// Contents of data/stopwords_en.txt.
std::string_view stoplist();
/// Contents of data/words_en.txt.
std::string_view wordlist();

}  // namespace tracerec::embedded
