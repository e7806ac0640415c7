// Porter stemmer, following the ANSI C reference implementation by Martin
// Porter, including its two documented departures from the 1980 article
// ("bli" -> "ble" replaces "abli" -> "able", and "logi" -> "log").

#include <algorithm>
#include <string>
#include <string_view>

#include "tracerec/textprep.hpp"

namespace tracerec {

namespace {

class PorterStemmer {
  public:
    explicit PorterStemmer(std::string_view word) : b_(word), k_(static_cast<int>(word.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
        return b_;
    }

  private:
    std::string b_;
    int k_;      // end of the current word
    int j_ = 0;  // end of the stem preceding a matched suffix

    [[nodiscard]] char at(int i) const { return b_[static_cast<std::size_t>(i)]; }

    [[nodiscard]] bool cons(int i) const {
        switch (at(i)) {
            case 'a':
            case 'e':
            case 'i':
            case 'o':
            case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of VC sequences in b[0..j].
    [[nodiscard]] int measure() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    [[nodiscard]] bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i) {
            if (!cons(i)) return true;
        }
        return false;
    }

    [[nodiscard]] bool double_consonant(int j) const {
        return j >= 1 && at(j) == at(j - 1) && cons(j);
    }

    // consonant-vowel-consonant ending at i, last consonant not w, x or y
    [[nodiscard]] bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = at(i);
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        const int length = static_cast<int>(s.size());
        if (s.back() != at(k_)) return false;
        if (length > k_ + 1) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - length + 1), s.size()) != s) return false;
        j_ = k_ - length;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_measured(std::string_view s) {
        if (measure() > 0) set_to(s);
    }

    // Plurals and -ed / -ing.
    void step1ab() {
        if (at(k_) == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (at(k_ - 1) != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (measure() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_consonant(k_)) {
                --k_;
                const char ch = at(k_);
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else {
                j_ = k_;
                if (measure() == 1 && cvc(k_)) set_to("e");
            }
        }
    }

    // Terminal y -> i when there is another vowel in the stem.
    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    // The first rule whose suffix matches decides; later rules are not tried
    // even if the measure condition fails.
    template <std::size_t N>
    bool apply_first(const Rule (&rules)[N]) {
        for (const auto& rule : rules) {
            if (ends(rule.suffix)) {
                replace_if_measured(rule.replacement);
                return true;
            }
        }
        return false;
    }

    void step2() {
        static constexpr Rule kA[] = {{"ational", "ate"}, {"tional", "tion"}};
        static constexpr Rule kC[] = {{"enci", "ence"}, {"anci", "ance"}};
        static constexpr Rule kE[] = {{"izer", "ize"}};
        static constexpr Rule kL[] = {{"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}};
        static constexpr Rule kO[] = {{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}};
        static constexpr Rule kS[] = {{"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}};
        static constexpr Rule kT[] = {{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}};
        static constexpr Rule kG[] = {{"logi", "log"}};
        switch (at(k_ - 1)) {
            case 'a': apply_first(kA); break;
            case 'c': apply_first(kC); break;
            case 'e': apply_first(kE); break;
            case 'l': apply_first(kL); break;
            case 'o': apply_first(kO); break;
            case 's': apply_first(kS); break;
            case 't': apply_first(kT); break;
            case 'g': apply_first(kG); break;
            default: break;
        }
    }

    void step3() {
        static constexpr Rule kE[] = {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}};
        static constexpr Rule kI[] = {{"iciti", "ic"}};
        static constexpr Rule kL[] = {{"ical", "ic"}, {"ful", ""}};
        static constexpr Rule kS[] = {{"ness", ""}};
        switch (at(k_)) {
            case 'e': apply_first(kE); break;
            case 'i': apply_first(kI); break;
            case 'l': apply_first(kL); break;
            case 's': apply_first(kS); break;
            default: break;
        }
    }

    // Strip a residual suffix when the stem has measure > 1.
    void step4() {
        switch (at(k_ - 1)) {
            case 'a':
                if (ends("al")) break;
                return;
            case 'c':
                if (ends("ance") || ends("ence")) break;
                return;
            case 'e':
                if (ends("er")) break;
                return;
            case 'i':
                if (ends("ic")) break;
                return;
            case 'l':
                if (ends("able") || ends("ible")) break;
                return;
            case 'n':
                if (ends("ant") || ends("ement") || ends("ment") || ends("ent")) break;
                return;
            case 'o':
                if (ends("ion") && j_ >= 0 && (at(j_) == 's' || at(j_) == 't')) break;
                if (ends("ou")) break;
                return;
            case 's':
                if (ends("ism")) break;
                return;
            case 't':
                if (ends("ate") || ends("iti")) break;
                return;
            case 'u':
                if (ends("ous")) break;
                return;
            case 'v':
                if (ends("ive")) break;
                return;
            case 'z':
                if (ends("ize")) break;
                return;
            default:
                return;
        }
        if (measure() > 1) k_ = j_;
    }

    // Final -e and -ll.
    void step5() {
        j_ = k_;
        if (at(k_) == 'e') {
            const int m = measure();
            if (m > 1 || (m == 1 && !cvc(k_ - 1))) --k_;
        }
        if (at(k_) == 'l' && double_consonant(k_) && measure() > 1) --k_;
    }
};

}  // namespace

std::string porter_stem(std::string_view token) {
    const bool lower_ascii = std::all_of(token.begin(), token.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    if (!lower_ascii || token.size() <= 2) return std::string(token);
    return PorterStemmer(token).run();
}

}  // namespace tracerec
