#ifndef PROPSUM_PORTER_STEMMER_H_
#define PROPSUM_PORTER_STEMMER_H_

#include <string>
#include <string_view>

namespace propsum {

// The original Porter (1980) suffix-stripping stemmer. Input must be a
// lowercase ASCII word; anything of length <= 2 is returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace propsum

#endif  // PROPSUM_PORTER_STEMMER_H_
