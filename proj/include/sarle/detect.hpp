#ifndef SARLE_DETECT_HPP
#define SARLE_DETECT_HPP

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sarle/normalize.hpp"

namespace sarle {

enum class Direction { forward, backward };

struct PolarityRule {
    std::string trigger;               // lowercase word or phrase
    Direction direction = Direction::forward;
    std::set<std::string> terminators; // scope stoppers; empty -> defaults
};

inline const std::set<std::string>& default_terminators() {
    static const std::set<std::string> terms = {"and", "with", "but", "however", "although"};
    return terms;
}

struct Token {
    std::string word;
    bool abnormal = true;
};

struct AnnotatedSentence {
    std::vector<Token> tokens;
    Sentence source;
};

namespace detail {

inline std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::stringstream ss(text);
    std::string w;
    while (ss >> w) words.push_back(w);
    return words;
}

inline std::vector<std::string> trigger_words(const PolarityRule& r) {
    return split_words(r.trigger);
}

}  // namespace detail

// Load "trigger <TAB> direction [<TAB> comma-separated terminators]" lines.
inline std::vector<PolarityRule> parse_polarity_rules(std::istream& in) {
    std::vector<PolarityRule> rules;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, '\t')) fields.push_back(field);
        if (fields.size() < 2)
            throw std::runtime_error("polarity rule line " + std::to_string(lineno) +
                                     ": expected 'trigger<TAB>direction'");
        PolarityRule r;
        r.trigger = fields[0];
        if (fields[1] == "forward")
            r.direction = Direction::forward;
        else if (fields[1] == "backward")
            r.direction = Direction::backward;
        else
            throw std::runtime_error("polarity rule line " + std::to_string(lineno) +
                                     ": direction must be forward or backward");
        if (fields.size() > 2) {
            std::stringstream ts(fields[2]);
            std::string t;
            while (std::getline(ts, t, ',')) {
                if (!t.empty()) r.terminators.insert(t);
            }
        }
        if (r.trigger.empty())
            throw std::runtime_error("polarity rule line " + std::to_string(lineno) +
                                     ": empty trigger");
        rules.push_back(r);
    }
    return rules;
}

inline std::vector<PolarityRule> load_polarity_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open polarity rules file: " + path);
    return parse_polarity_rules(in);
}

// Tokens default to abnormal; each matched trigger flips itself and the
// tokens in its direction to normal, stopping at a terminator, another
// trigger, or the sentence boundary. Longest trigger wins per position.
// A token beginning with "non" marks itself normal (noncalcified,
// nontuberculous); a standalone "non" also normalizes the next token.
inline AnnotatedSentence detect_polarity(const Sentence& sentence,
                                         const std::vector<PolarityRule>& rules) {
    AnnotatedSentence ann;
    ann.source = sentence;
    std::vector<std::string> words = detail::split_words(sentence.text);
    const size_t n = words.size();
    ann.tokens.reserve(n);
    for (const auto& w : words) ann.tokens.push_back(Token{w, true});

    // Locate trigger occurrences; longest match at each position.
    struct Match { size_t begin; size_t end; const PolarityRule* rule; };
    std::vector<Match> matches;
    std::vector<bool> is_trigger_token(n, false);
    for (size_t i = 0; i < n;) {
        const PolarityRule* best = nullptr;
        size_t best_len = 0;
        for (const auto& r : rules) {
            std::vector<std::string> tw = detail::trigger_words(r);
            if (tw.empty() || i + tw.size() > n || tw.size() <= best_len) continue;
            if (std::equal(tw.begin(), tw.end(), words.begin() + static_cast<long>(i))) {
                best = &r;
                best_len = tw.size();
            }
        }
        if (best) {
            matches.push_back(Match{i, i + best_len, best});
            for (size_t k = i; k < i + best_len; ++k) is_trigger_token[k] = true;
            i += best_len;
        } else {
            ++i;
        }
    }

    // Left-to-right application; marks only ever set tokens normal.
    for (const auto& m : matches) {
        for (size_t k = m.begin; k < m.end; ++k) ann.tokens[k].abnormal = false;
        const std::set<std::string>& stoppers =
            m.rule->terminators.empty() ? default_terminators() : m.rule->terminators;
        if (m.rule->direction == Direction::forward) {
            for (size_t k = m.end; k < n; ++k) {
                if (stoppers.count(words[k]) || is_trigger_token[k]) break;
                ann.tokens[k].abnormal = false;
            }
        } else {
            for (size_t k = m.begin; k-- > 0;) {
                if (stoppers.count(words[k]) || is_trigger_token[k]) break;
                ann.tokens[k].abnormal = false;
            }
        }
    }

    for (size_t i = 0; i < n; ++i) {
        const std::string& w = words[i];
        if (w.size() > 3 && w.compare(0, 3, "non") == 0) ann.tokens[i].abnormal = false;
        if (w == "non") {
            ann.tokens[i].abnormal = false;
            if (i + 1 < n) ann.tokens[i + 1].abnormal = false;
        }
    }
    return ann;
}

// Maximal runs of abnormal tokens, joined by single spaces, in order.
inline std::vector<std::string> abnormal_spans(const AnnotatedSentence& annotated) {
    std::vector<std::string> spans;
    std::string cur;
    for (const auto& tok : annotated.tokens) {
        if (tok.abnormal) {
            if (!cur.empty()) cur += ' ';
            cur += tok.word;
        } else if (!cur.empty()) {
            spans.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) spans.push_back(cur);
    return spans;
}

}  // namespace sarle

#endif  // SARLE_DETECT_HPP
