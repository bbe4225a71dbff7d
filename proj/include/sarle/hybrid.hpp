#ifndef SARLE_HYBRID_HPP
#define SARLE_HYBRID_HPP

#include "sarle/classifier.hpp"
#include "sarle/vocab.hpp"

namespace sarle {

// SARLE-Hybrid: sentences the classifier calls abnormal are forwarded whole
// (one span per sentence) into the shared term search. Whole-sentence
// granularity means a mixed sentence cannot split polarity between two
// findings.
inline LabelVector extract_labels_hybrid(const NormalizedReport& report,
                                         const SentenceClassifier& classifier,
                                         const Vocabulary& vocabulary,
                                         std::vector<LabelEvidence>* evidence = nullptr) {
    LabelVector lv;
    lv.accession = report.accession;
    lv.values.assign(vocabulary.rules.size(), 0);
    for (const auto& sentence : report.sentences) {
        if (!classifier.classify_abnormal(sentence.text)) continue;
        std::vector<std::string> spans = {sentence.text};
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

}  // namespace sarle

#endif  // SARLE_HYBRID_HPP
