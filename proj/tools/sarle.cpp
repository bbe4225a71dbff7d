// sarle: chest-CT report corpus tooling, label extraction, and evaluation.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sarle/corpus.hpp"
#include "sarle/hybrid.hpp"
#include "sarle/io.hpp"
#include "sarle/metrics.hpp"
#include "sarle/normalize.hpp"
#include "sarle/vocab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitConfigError = 2;

struct ExtractResult {
    sarle::LabelVector labels;
    std::vector<sarle::LabelEvidence> evidence;
};

// Bounded worker pool over reports; results land in input order.
std::vector<ExtractResult> extract_all(
    const std::vector<sarle::ReportRecord>& records, const sarle::Vocabulary& vocab,
    const std::vector<sarle::PolarityRule>& polarity_rules,
    const sarle::SentenceClassifier* classifier, unsigned jobs) {
    std::vector<ExtractResult> results(records.size());
    auto worker = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            sarle::NormalizedReport rep =
                sarle::normalize_report(records[i].accession, records[i].text);
            if (classifier)
                results[i].labels = sarle::extract_labels_hybrid(rep, *classifier, vocab,
                                                                 &results[i].evidence);
            else
                results[i].labels =
                    sarle::extract_labels(rep, vocab, polarity_rules, &results[i].evidence);
        }
    };
    jobs = std::max(1u, jobs);
    if (jobs == 1 || records.size() < 2) {
        worker(0, records.size());
    } else {
        std::vector<std::thread> threads;
        size_t chunk = (records.size() + jobs - 1) / jobs;
        for (unsigned t = 0; t < jobs; ++t) {
            size_t begin = t * chunk;
            size_t end = std::min(records.size(), begin + chunk);
            if (begin >= end) break;
            threads.emplace_back(worker, begin, end);
        }
        for (auto& th : threads) th.join();
    }
    return results;
}

std::ofstream open_output(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    return out;
}

sarle::SplitFractions parse_fractions(const std::string& spec) {
    sarle::SplitFractions f;
    if (spec.empty()) return f;
    std::stringstream ss(spec);
    std::string part;
    std::vector<double> vals;
    while (std::getline(ss, part, ',')) vals.push_back(std::stod(part));
    if (vals.size() != 4)
        throw CLI::ValidationError("--fractions", "expected train,val,reserved,test");
    f.train = vals[0];
    f.val = vals[1];
    f.reserved = vals[2];
    f.test = vals[3];
    return f;
}

void write_eval_report(std::ostream& out, const sarle::io::LabelMatrix& pred,
                       const sarle::io::LabelMatrix& truth) {
    if (pred.labels != truth.labels) {
        std::ostringstream msg;
        msg << "label order mismatch between prediction and truth;";
        for (size_t i = 0; i < std::max(pred.labels.size(), truth.labels.size()); ++i) {
            std::string a = i < pred.labels.size() ? pred.labels[i] : "<missing>";
            std::string b = i < truth.labels.size() ? truth.labels[i] : "<missing>";
            if (a != b) msg << " [" << i << "] pred=" << a << " truth=" << b;
        }
        throw std::runtime_error(msg.str());
    }
    std::map<std::string, const sarle::LabelVector*> truth_by_acc;
    for (const auto& row : truth.rows) truth_by_acc[row.accession] = &row;
    if (pred.rows.size() != truth.rows.size())
        throw std::runtime_error("prediction and truth row counts differ");
    for (const auto& row : pred.rows)
        if (!truth_by_acc.count(row.accession))
            throw std::runtime_error("accession missing from truth matrix: " + row.accession);

    out << "label,n_pos,precision,recall,f_score,accuracy\n";
    out << std::setprecision(6) << std::fixed;
    double sum_p = 0, sum_r = 0, sum_f = 0, sum_a = 0;
    for (size_t j = 0; j < pred.labels.size(); ++j) {
        std::vector<int> p, t;
        for (const auto& row : pred.rows) {
            p.push_back(row.values[j]);
            t.push_back(truth_by_acc.at(row.accession)->values[j]);
        }
        sarle::ConfusionMetrics m = sarle::confusion_metrics(p, t);
        int64_t n_pos = m.counts.tp + m.counts.fn;
        out << sarle::io::csv_quote(pred.labels[j]) << ',' << n_pos << ',' << m.precision
            << ',' << m.recall << ',' << m.f_score << ',' << m.accuracy << '\n';
        sum_p += m.precision;
        sum_r += m.recall;
        sum_f += m.f_score;
        sum_a += m.accuracy;
    }
    double nl = static_cast<double>(pred.labels.size());
    out << "macro_average," << (pred.rows.size()) << ',' << sum_p / nl << ',' << sum_r / nl
        << ',' << sum_f / nl << ',' << sum_a / nl << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SARLE chest-CT report labeling pipeline"};
    app.require_subcommand(1);

    std::string in_path, out_path, vocab_path, rules_path, model_path;
    std::string mode = "rules";
    std::string fractions_spec;
    std::string exclude_path, truth_path, train_path;
    uint64_t seed = 0;
    unsigned jobs = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--in", in_path, "input file")->required()->envname("SARLE_IN");
        cmd->add_option("--out", out_path, "output file")->required()->envname("SARLE_OUT");
    };

    auto* cmd_normalize = app.add_subcommand("normalize", "clean reports into sentences");
    add_common(cmd_normalize);

    auto* cmd_extract = app.add_subcommand("extract", "extract the 83-label matrix");
    add_common(cmd_extract);
    cmd_extract->add_option("--vocab", vocab_path, "vocabulary JSON")
        ->required()
        ->envname("SARLE_VOCAB");
    cmd_extract->add_option("--polarity-rules", rules_path, "polarity rules file")
        ->envname("SARLE_POLARITY_RULES");
    cmd_extract->add_option("--mode", mode, "rules|hybrid")
        ->check(CLI::IsMember({"rules", "hybrid"}))
        ->envname("SARLE_MODE");
    cmd_extract->add_option("--model", model_path, "classifier model (hybrid mode)")
        ->envname("SARLE_MODEL");
    cmd_extract->add_option("--jobs", jobs, "worker threads")->envname("SARLE_JOBS");

    auto* cmd_eval = app.add_subcommand("eval", "score a prediction matrix against truth");
    add_common(cmd_eval);
    cmd_eval->add_option("--truth", truth_path, "ground-truth matrix CSV")->required();

    auto* cmd_stats = app.add_subcommand("stats", "dataset statistics for a label matrix");
    add_common(cmd_stats);

    auto* cmd_split = app.add_subcommand("split", "deterministic patient-level split");
    add_common(cmd_split);
    cmd_split->add_option("--fractions", fractions_spec, "train,val,reserved,test")
        ->envname("SARLE_FRACTIONS");
    cmd_split->add_option("--seed", seed, "split seed")->envname("SARLE_SEED");

    auto* cmd_dedup = app.add_subcommand("dedup", "remove duplicate reports");
    add_common(cmd_dedup);
    cmd_dedup->add_option("--exclude", exclude_path, "manual exclusion list (accessions)");

    auto* cmd_train = app.add_subcommand("hybrid-train", "train the sentence classifier");
    cmd_train->add_option("--in", train_path, "sentence examples JSONL")->required();
    cmd_train->add_option("--out", model_path, "model output path")->required();
    cmd_train->add_option("--seed", seed, "training seed")->envname("SARLE_SEED");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_extract) {
            if (mode == "hybrid" && model_path.empty()) {
                std::cerr << "error: hybrid mode requires --model\n";
                return kExitConfigError;
            }
            if (mode == "rules" && rules_path.empty()) {
                std::cerr << "error: rules mode requires --polarity-rules\n";
                return kExitConfigError;
            }
        }

        if (*cmd_normalize) {
            auto records = sarle::io::load_records(in_path);
            auto out = open_output(out_path);
            for (const auto& rec : records) {
                sarle::NormalizedReport rep = sarle::normalize_report(rec.accession, rec.text);
                for (const auto& s : rep.sentences) {
                    nlohmann::json j = {{"accession", rep.accession},
                                        {"section", sarle::section_name(s.section)},
                                        {"index", s.index},
                                        {"text", s.text}};
                    out << j.dump() << '\n';
                }
            }
        } else if (*cmd_extract) {
            auto records = sarle::io::load_records(in_path);
            sarle::Vocabulary vocab = sarle::load_vocabulary(vocab_path);
            std::vector<sarle::PolarityRule> polarity_rules;
            sarle::SentenceClassifier classifier;
            const sarle::SentenceClassifier* clf = nullptr;
            if (mode == "hybrid") {
                classifier = sarle::SentenceClassifier::load(model_path);
                clf = &classifier;
            } else {
                polarity_rules = sarle::load_polarity_rules(rules_path);
            }
            auto results = extract_all(records, vocab, polarity_rules, clf, jobs);

            sarle::io::LabelMatrix matrix;
            matrix.labels = vocab.label_names();
            for (auto& r : results) matrix.rows.push_back(r.labels);
            auto out = open_output(out_path);
            sarle::io::write_matrix_csv(out, matrix);

            auto prov = open_output(out_path + ".provenance.jsonl");
            for (size_t i = 0; i < results.size(); ++i) {
                for (const auto& ev : results[i].evidence) {
                    nlohmann::json j = {{"accession", records[i].accession},
                                        {"label", ev.label},
                                        {"sentence", ev.sentence},
                                        {"span", ev.span}};
                    prov << j.dump() << '\n';
                }
            }
        } else if (*cmd_eval) {
            std::ifstream pin(in_path), tin(truth_path);
            if (!pin) throw std::runtime_error("cannot open prediction matrix: " + in_path);
            if (!tin) throw std::runtime_error("cannot open truth matrix: " + truth_path);
            auto pred = sarle::io::read_matrix_csv(pin, in_path);
            auto truth = sarle::io::read_matrix_csv(tin, truth_path);
            auto out = open_output(out_path);
            write_eval_report(out, pred, truth);
        } else if (*cmd_stats) {
            std::ifstream min(in_path);
            if (!min) throw std::runtime_error("cannot open matrix: " + in_path);
            auto matrix = sarle::io::read_matrix_csv(min, in_path);
            std::vector<std::vector<int>> rows;
            for (const auto& r : matrix.rows) rows.push_back(r.values);
            sarle::DatasetStats st = sarle::dataset_stats(rows);

            auto out = open_output(out_path);
            out << "label,n_pos,frequency\n" << std::setprecision(6) << std::fixed;
            for (size_t j = 0; j < matrix.labels.size(); ++j)
                out << sarle::io::csv_quote(matrix.labels[j]) << ',' << st.label_counts[j]
                    << ',' << st.label_frequency[j] << '\n';

            auto hist = open_output(out_path + ".histogram.txt");
            hist << "abnormality-count histogram (" << st.n_scans << " scans)\n";
            for (size_t bin = 0; bin < st.histogram.size(); ++bin) {
                hist << std::setw(4) << bin << " | ";
                for (int64_t i = 0; i < st.histogram[bin]; ++i) hist << '#';
                hist << ' ' << st.histogram[bin] << '\n';
            }

            auto summary = open_output(out_path + ".summary.json");
            nlohmann::json j = {{"n_scans", st.n_scans},   {"median", st.median},
                                {"q1", st.q1},             {"q3", st.q3},
                                {"iqr", st.iqr},           {"normal_count", st.normal_count}};
            summary << j.dump(2) << '\n';
        } else if (*cmd_split) {
            sarle::SplitFractions fractions;
            try {
                fractions = parse_fractions(fractions_spec);
                sarle::validate_fractions(fractions);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitConfigError;
            }
            auto records = sarle::io::load_records(in_path);
            auto assignments = sarle::split_by_patient(records, fractions, seed);
            auto out = open_output(out_path);
            out << "mrn,split\n";
            for (const auto& a : assignments)
                out << sarle::io::csv_quote(a.mrn) << ',' << sarle::split_name(a.split)
                    << '\n';
        } else if (*cmd_dedup) {
            auto records = sarle::io::load_records(in_path);
            std::set<std::string> excluded;
            if (!exclude_path.empty()) excluded = sarle::io::load_exclusion_list(exclude_path);
            sarle::DedupCounts counts;
            auto cleaned = sarle::dedup(records, excluded, &counts);
            auto out = open_output(out_path);
            for (const auto& r : cleaned) {
                nlohmann::json j = {{"accession", r.accession},
                                    {"mrn", r.mrn},
                                    {"protocol", r.protocol},
                                    {"status", sarle::status_name(r.status)},
                                    {"addendum_count", r.addendum_count},
                                    {"text", r.text}};
                out << j.dump() << '\n';
            }
            std::cout << "raw                  " << counts.raw << '\n'
                      << "exact duplicates     " << counts.after_exact << '\n'
                      << "preliminary dropped  " << counts.after_preliminary << '\n'
                      << "addendum keep-max    " << counts.after_addendum << '\n'
                      << "manual exclusions    " << counts.after_exclusions << '\n'
                      << "min length (550)     " << counts.after_min_length << '\n';
        } else if (*cmd_train) {
            auto examples = sarle::io::load_sentence_examples(train_path);
            sarle::ClassifierConfig cfg;
            cfg.seed = seed ? seed : cfg.seed;
            sarle::SentenceClassifier classifier(cfg);
            std::vector<double> losses = classifier.train(examples);
            classifier.save(model_path);
            std::cout << "trained on " << examples.size() << " sentences; final loss "
                      << losses.back() << '\n';
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitOk;
}
