#ifndef SARLE_NORMALIZE_HPP
#define SARLE_NORMALIZE_HPP

#include <cctype>
#include <regex>
#include <string>
#include <vector>

namespace sarle {

enum class Section { findings, impression, whole };

inline const char* section_name(Section s) {
    switch (s) {
        case Section::findings: return "findings";
        case Section::impression: return "impression";
        default: return "whole";
    }
}

struct Sentence {
    std::string text;     // lowercase, single-spaced, tokenized alphabet
    Section section = Section::whole;
    int index = 0;        // position within the report
};

struct NormalizedReport {
    std::string accession;
    std::vector<Sentence> sentences;
};

namespace detail {

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Sentence-terminating period: a '.' not flanked by digits on both sides.
inline bool is_decimal_period(const std::string& s, size_t i) {
    return i > 0 && i + 1 < s.size() && is_digit(s[i - 1]) && is_digit(s[i + 1]);
}

inline std::string collapse_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;  // swallows leading whitespace
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_ws) out.push_back(' ');
            in_ws = true;
        } else {
            out.push_back(c);
            in_ws = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

inline std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline const std::regex& time_re() {
    // 12:30, 12:30:45, 7:05 pm, 0730 am is out of scope
    static const std::regex re(R"((^|[^0-9])(\d{1,2}:\d{2}(:\d{2})?(\s*(am|pm))?)($|[^0-9a-z]))");
    return re;
}

inline const std::regex& date_re() {
    // numeric m/d/y or m-d-y with 2- or 4-digit year, and month-name + day
    // forms with an optional year ("january 5 2016", "jan 5").
    static const std::regex re(
        R"((^|[^0-9a-z.])()"
        R"(\d{1,2}[/-]\d{1,2}[/-]\d{2}(\d{2})?)"
        R"(|(january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec)\s+\d{1,2}(\s*,?\s*(19|20)\d{2})?)"
        R"()($|[^0-9a-z.]))");
    return re;
}

inline const std::regex& year_re() {
    static const std::regex re(R"((^|[^0-9a-z%.])((19|20)\d{2})($|[^0-9a-z%.]))");
    return re;
}

// Repeated regex substitution keeping the boundary captures. A single
// regex_replace can miss adjacent occurrences that share a boundary char.
inline std::string sub_all(const std::string& input, const std::regex& re,
                           const std::string& token) {
    std::string s = input;
    std::smatch m;
    std::string out;
    while (std::regex_search(s, m, re)) {
        out += m.prefix().str();
        out += m[1].str();
        out += token;
        s = m[m.size() - 1].str() + m.suffix().str();
    }
    out += s;
    return out;
}

}  // namespace detail

// Lowercase, collapse whitespace, substitute %time/%date/%year (in that
// order), then strip punctuation except periods inside decimal numbers.
inline std::string normalize_text(const std::string& text) {
    std::string s = detail::to_lower(text);
    s = detail::collapse_whitespace(s);
    s = detail::sub_all(s, detail::time_re(), "%time");
    s = detail::sub_all(s, detail::date_re(), "%date");
    s = detail::sub_all(s, detail::year_re(), "%year");

    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        bool keep = (c >= 'a' && c <= 'z') || detail::is_digit(c) || c == ' ' || c == '%';
        if (c == '.' && detail::is_decimal_period(s, i)) keep = true;
        if (keep)
            out.push_back(c);
        else
            out.push_back(' ');
    }
    return detail::collapse_whitespace(out);
}

// Split on sentence-terminating periods (periods not inside decimal
// numbers), discarding empty fragments. Runs before punctuation stripping.
inline std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.' && !detail::is_decimal_period(text, i)) {
            std::string t = detail::collapse_whitespace(cur);
            if (!t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    std::string t = detail::collapse_whitespace(cur);
    if (!t.empty()) out.push_back(t);
    return out;
}

struct SectionSpans {
    std::string findings;
    std::string impression;
    bool found = false;   // false -> use whole text with Section::whole
    std::string whole;
};

// Locate "findings"/"impression" headers (case-insensitive, optional colon)
// and return the spans following each header up to the next header or the
// end of the report. Headers themselves are removed.
inline SectionSpans extract_sections(const std::string& raw_text) {
    const std::string lower = detail::to_lower(raw_text);
    struct Header { size_t pos; size_t end; Section sec; };
    std::vector<Header> headers;
    static const std::regex header_re(R"((findings|impression)\s*:?)");
    for (auto it = std::sregex_iterator(lower.begin(), lower.end(), header_re);
         it != std::sregex_iterator(); ++it) {
        Header h;
        h.pos = static_cast<size_t>(it->position(0));
        h.end = h.pos + static_cast<size_t>(it->length(0));
        h.sec = ((*it)[1].str() == "findings") ? Section::findings : Section::impression;
        // Require a word boundary in front ("refindings" is not a header).
        if (h.pos > 0 && std::isalnum(static_cast<unsigned char>(lower[h.pos - 1]))) continue;
        headers.push_back(h);
    }
    SectionSpans spans;
    if (headers.empty()) {
        spans.whole = raw_text;
        return spans;
    }
    spans.found = true;
    for (size_t i = 0; i < headers.size(); ++i) {
        size_t begin = headers[i].end;
        size_t end = (i + 1 < headers.size()) ? headers[i + 1].pos : raw_text.size();
        std::string body = detail::collapse_whitespace(raw_text.substr(begin, end - begin));
        std::string& target =
            (headers[i].sec == Section::findings) ? spans.findings : spans.impression;
        if (!target.empty() && !body.empty()) target += ' ';
        target += body;
    }
    return spans;
}

// Full report pipeline: sections -> sentences -> per-sentence normalization.
inline NormalizedReport normalize_report(const std::string& accession,
                                         const std::string& raw_text) {
    NormalizedReport rep;
    rep.accession = accession;
    SectionSpans spans = extract_sections(raw_text);
    int idx = 0;
    auto add = [&](const std::string& span, Section sec) {
        for (const std::string& raw_sentence : split_sentences(span)) {
            std::string norm = normalize_text(raw_sentence);
            if (norm.empty()) continue;
            rep.sentences.push_back(Sentence{norm, sec, idx++});
        }
    };
    if (spans.found) {
        add(spans.findings, Section::findings);
        add(spans.impression, Section::impression);
    } else {
        add(spans.whole, Section::whole);
    }
    return rep;
}

}  // namespace sarle

#endif  // SARLE_NORMALIZE_HPP
