#ifndef SARLE_IO_HPP
#define SARLE_IO_HPP

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarle/classifier.hpp"
#include "sarle/corpus.hpp"
#include "sarle/metrics.hpp"
#include "sarle/vocab.hpp"

namespace sarle {

namespace io {

// Minimal RFC-4180 CSV row parser (quoted fields, embedded commas/quotes).
inline std::vector<std::string> parse_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline ReportRecord record_from_json(const nlohmann::json& j) {
    ReportRecord r;
    r.accession = j.at("accession").get<std::string>();
    r.mrn = j.at("mrn").get<std::string>();
    r.protocol = j.value("protocol", "");
    r.status = parse_status(j.value("status", "verified"));
    r.addendum_count = j.value("addendum_count", 0);
    r.text = j.value("text", "");
    if (r.accession.empty() || r.mrn.empty())
        throw std::runtime_error("record needs nonempty accession and mrn");
    if (r.addendum_count < 0) throw std::runtime_error("negative addendum_count");
    return r;
}

inline std::vector<ReportRecord> load_records_jsonl(std::istream& in,
                                                    const std::string& name = "<stream>") {
    std::vector<ReportRecord> records;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

inline std::vector<ReportRecord> load_records_csv(std::istream& in,
                                                  const std::string& name = "<stream>") {
    std::string header_line;
    if (!std::getline(in, header_line))
        throw std::runtime_error(name + ": empty CSV input");
    std::vector<std::string> header = parse_csv_row(header_line);
    std::map<std::string, size_t> col;
    for (size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* required : {"accession", "mrn"})
        if (!col.count(required))
            throw std::runtime_error(name + ": CSV header missing column '" +
                                     std::string(required) + "'");
    auto get = [&](const std::vector<std::string>& row, const char* key,
                   const std::string& fallback) -> std::string {
        auto it = col.find(key);
        if (it == col.end() || it->second >= row.size()) return fallback;
        return row[it->second];
    };
    std::vector<ReportRecord> records;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> row = parse_csv_row(line);
        try {
            ReportRecord r;
            r.accession = get(row, "accession", "");
            r.mrn = get(row, "mrn", "");
            r.protocol = get(row, "protocol", "");
            r.status = parse_status(get(row, "status", "verified"));
            r.addendum_count = std::stoi(get(row, "addendum_count", "0"));
            r.text = get(row, "text", "");
            if (r.accession.empty() || r.mrn.empty())
                throw std::runtime_error("record needs nonempty accession and mrn");
            if (r.addendum_count < 0) throw std::runtime_error("negative addendum_count");
            records.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw std::runtime_error(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

// Dispatch on extension: .jsonl/.json -> JSONL, anything else -> CSV.
inline std::vector<ReportRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    if (path.size() >= 5 && (path.ends_with(".json") || path.ends_with(".jsonl")))
        return load_records_jsonl(in, path);
    return load_records_csv(in, path);
}

inline std::set<std::string> load_exclusion_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open exclusion list: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty() && line[0] != '#') out.insert(line);
    }
    return out;
}

struct LabelMatrix {
    std::vector<std::string> labels;
    std::vector<LabelVector> rows;
};

inline void write_matrix_csv(std::ostream& out, const LabelMatrix& matrix) {
    out << "accession";
    for (const auto& l : matrix.labels) out << ',' << csv_quote(l);
    out << '\n';
    for (const auto& row : matrix.rows) {
        out << csv_quote(row.accession);
        for (int v : row.values) out << ',' << v;
        out << '\n';
    }
}

inline LabelMatrix read_matrix_csv(std::istream& in, const std::string& name = "<stream>") {
    LabelMatrix m;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(name + ": empty matrix file");
    std::vector<std::string> header = parse_csv_row(line);
    if (header.empty() || header[0] != "accession")
        throw std::runtime_error(name + ": first matrix column must be 'accession'");
    m.labels.assign(header.begin() + 1, header.end());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> row = parse_csv_row(line);
        if (row.size() != header.size())
            throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                     ": wrong column count");
        LabelVector lv;
        lv.accession = row[0];
        for (size_t i = 1; i < row.size(); ++i) {
            if (row[i] != "0" && row[i] != "1")
                throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                         ": matrix cells must be 0 or 1");
            lv.values.push_back(row[i] == "1" ? 1 : 0);
        }
        m.rows.push_back(std::move(lv));
    }
    return m;
}

inline std::vector<SentenceExample> load_sentence_examples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open training data: " + path);
    std::vector<SentenceExample> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            SentenceExample ex;
            ex.text = j.at("text").get<std::string>();
            std::string label = j.at("label").get<std::string>();
            if (label == "abnormal") ex.abnormal = true;
            else if (label == "normal") ex.abnormal = false;
            else throw std::runtime_error("label must be 'normal' or 'abnormal'");
            out.push_back(std::move(ex));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace io

}  // namespace sarle

#endif  // SARLE_IO_HPP
