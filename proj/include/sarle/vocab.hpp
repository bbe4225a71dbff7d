#ifndef SARLE_VOCAB_HPP
#define SARLE_VOCAB_HPP

#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarle/detect.hpp"
#include "sarle/normalize.hpp"

namespace sarle {

inline constexpr int kLabelCount = 83;
inline constexpr double kMeasurementThresholdMm = 10.0;  // strictly greater-than

struct BoundedTerm {
    std::string stem;           // lowercase, boundary spaces already stripped
    bool left_boundary = false;
    bool right_boundary = false;
};

enum class SpecialRule { none, nodule_gr_1cm, lymphadenopathy_measure };

struct TermRule {
    std::string label;
    std::vector<BoundedTerm> any_terms;
    std::vector<BoundedTerm> term1;
    std::vector<BoundedTerm> term2;
    std::vector<BoundedTerm> exclude_terms;
    SpecialRule special = SpecialRule::none;
};

struct Vocabulary {
    std::vector<TermRule> rules;

    std::vector<std::string> label_names() const {
        std::vector<std::string> names;
        names.reserve(rules.size());
        for (const auto& r : rules) names.push_back(r.label);
        return names;
    }
};

struct LabelVector {
    std::string accession;
    std::vector<int> values;  // one 0/1 entry per vocabulary rule
};

struct Measurement {
    double value_mm = 0.0;
    std::string raw_text;
    size_t position = 0;  // character offset in the sentence
};

// Provenance for one positive label: the sentence and span that fired it.
struct LabelEvidence {
    std::string label;
    std::string sentence;
    std::string span;
};

namespace detail {

// A leading/trailing space inside the quoted stem requires a word boundary
// on that side (Table-style convention, e.g. " stent").
inline BoundedTerm make_bounded_term(const std::string& raw) {
    BoundedTerm t;
    std::string s = raw;
    if (!s.empty() && s.front() == ' ') {
        t.left_boundary = true;
        s.erase(s.begin());
    }
    if (!s.empty() && s.back() == ' ') {
        t.right_boundary = true;
        s.pop_back();
    }
    t.stem = s;
    if (t.stem.empty()) throw std::runtime_error("empty vocabulary stem");
    return t;
}

}  // namespace detail

// Substring containment; boundary flags require the adjacent character to
// be a space or the span edge.
inline bool match_term(const std::string& span, const BoundedTerm& term) {
    size_t pos = 0;
    while ((pos = span.find(term.stem, pos)) != std::string::npos) {
        bool left_ok = !term.left_boundary || pos == 0 || span[pos - 1] == ' ';
        size_t end = pos + term.stem.size();
        bool right_ok = !term.right_boundary || end == span.size() || span[end] == ' ';
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

inline bool match_any(const std::string& span, const std::vector<BoundedTerm>& terms) {
    for (const auto& t : terms)
        if (match_term(span, t)) return true;
    return false;
}

// Number+unit pairs ("3 mm", "1.2 cm") including multi-dimension forms
// "1.1 x 0.8 cm" where the unit distributes over all dimensions. Values
// returned in millimeters.
inline std::vector<Measurement> parse_measurements(const std::string& sentence_text) {
    std::vector<Measurement> out;
    static const std::regex re(
        R"((\d+(?:\.\d+)?(?:\s*x\s*\d+(?:\.\d+)?)*)\s*(mm|cm)(?:$|[^a-z]))");
    auto begin = std::sregex_iterator(sentence_text.begin(), sentence_text.end(), re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const std::string numbers = (*it)[1].str();
        const bool cm = (*it)[2].str() == "cm";
        static const std::regex num_re(R"(\d+(?:\.\d+)?)");
        for (auto nit = std::sregex_iterator(numbers.begin(), numbers.end(), num_re);
             nit != std::sregex_iterator(); ++nit) {
            Measurement m;
            m.value_mm = std::stod(nit->str()) * (cm ? 10.0 : 1.0);
            m.raw_text = nit->str() + (cm ? " cm" : " mm");
            m.position = static_cast<size_t>(it->position(0)) +
                         static_cast<size_t>(nit->position(0));
            if (m.value_mm > 0) out.push_back(m);
        }
    }
    return out;
}

// One rule against the abnormal spans of a single sentence. Exclusion terms
// are tested against the whole sentence; term1+term2 must co-occur within
// one span.
inline bool apply_rule(const std::vector<std::string>& spans, const TermRule& rule,
                       const std::vector<Measurement>& measurements,
                       const std::string& sentence_text,
                       std::string* fired_span = nullptr) {
    for (const auto& ex : rule.exclude_terms)
        if (match_term(sentence_text, ex)) return false;

    bool over_threshold = false;
    for (const auto& m : measurements)
        if (m.value_mm > kMeasurementThresholdMm) over_threshold = true;

    for (const auto& span : spans) {
        bool any_hit = match_any(span, rule.any_terms);
        switch (rule.special) {
            case SpecialRule::none:
                if (any_hit || (!rule.term1.empty() && !rule.term2.empty() &&
                                match_any(span, rule.term1) && match_any(span, rule.term2))) {
                    if (fired_span) *fired_span = span;
                    return true;
                }
                break;
            case SpecialRule::nodule_gr_1cm:
                if (any_hit && over_threshold) {
                    if (fired_span) *fired_span = span;
                    return true;
                }
                break;
            case SpecialRule::lymphadenopathy_measure:
                if (any_hit || (over_threshold && match_any(span, rule.term1))) {
                    if (fired_span) *fired_span = span;
                    return true;
                }
                break;
        }
    }
    return false;
}

// SARLE-Rules: per-report OR over sentences of the per-sentence term search
// on abnormal spans.
inline LabelVector extract_labels(const NormalizedReport& report, const Vocabulary& vocabulary,
                                  const std::vector<PolarityRule>& rules,
                                  std::vector<LabelEvidence>* evidence = nullptr) {
    LabelVector lv;
    lv.accession = report.accession;
    lv.values.assign(vocabulary.rules.size(), 0);
    for (const auto& sentence : report.sentences) {
        AnnotatedSentence ann = detect_polarity(sentence, rules);
        std::vector<std::string> spans = abnormal_spans(ann);
        if (spans.empty()) continue;
        std::vector<Measurement> meas = parse_measurements(sentence.text);
        for (size_t i = 0; i < vocabulary.rules.size(); ++i) {
            if (lv.values[i]) continue;
            std::string span;
            if (apply_rule(spans, vocabulary.rules[i], meas, sentence.text, &span)) {
                if (evidence)
                    evidence->push_back(
                        LabelEvidence{vocabulary.rules[i].label, sentence.text, span});
                lv.values[i] = 1;
            }
        }
    }
    return lv;
}

inline Vocabulary parse_vocabulary(const nlohmann::json& doc) {
    Vocabulary vocab;
    std::map<std::string, std::vector<std::string>> macros;
    if (doc.contains("macros")) {
        for (auto it = doc["macros"].begin(); it != doc["macros"].end(); ++it)
            macros[it.key()] = it.value().get<std::vector<std::string>>();
    }
    auto expand = [&](const nlohmann::json& arr) {
        std::vector<BoundedTerm> terms;
        for (const auto& item : arr) {
            std::string s = item.get<std::string>();
            auto mit = macros.find(s);
            if (mit != macros.end()) {
                for (const auto& m : mit->second) terms.push_back(detail::make_bounded_term(m));
            } else {
                terms.push_back(detail::make_bounded_term(s));
            }
        }
        return terms;
    };
    std::set<std::string> seen;
    for (const auto& jr : doc.at("rules")) {
        TermRule r;
        r.label = jr.at("label").get<std::string>();
        if (!seen.insert(r.label).second)
            throw std::runtime_error("duplicate vocabulary label: " + r.label);
        if (jr.contains("any")) r.any_terms = expand(jr["any"]);
        if (jr.contains("term1")) r.term1 = expand(jr["term1"]);
        if (jr.contains("term2")) r.term2 = expand(jr["term2"]);
        if (jr.contains("exclude")) r.exclude_terms = expand(jr["exclude"]);
        if (jr.contains("special")) {
            std::string s = jr["special"].get<std::string>();
            if (s == "nodule_gr_1cm")
                r.special = SpecialRule::nodule_gr_1cm;
            else if (s == "lymphadenopathy_measure")
                r.special = SpecialRule::lymphadenopathy_measure;
            else if (s != "none")
                throw std::runtime_error("unknown special rule: " + s);
        }
        if (r.special == SpecialRule::none && r.any_terms.empty() &&
            (r.term1.empty() || r.term2.empty()))
            throw std::runtime_error("rule '" + r.label +
                                     "' needs any-terms or both term1 and term2");
        vocab.rules.push_back(std::move(r));
    }
    return vocab;
}

inline Vocabulary load_vocabulary(const std::string& path, bool require_83 = true) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
    nlohmann::json doc;
    in >> doc;
    Vocabulary vocab = parse_vocabulary(doc);
    if (require_83 && vocab.rules.size() != kLabelCount)
        throw std::runtime_error("vocabulary has " + std::to_string(vocab.rules.size()) +
                                 " rules, expected " + std::to_string(kLabelCount));
    return vocab;
}

}  // namespace sarle

#endif  // SARLE_VOCAB_HPP
