#ifndef SARLE_CLASSIFIER_HPP
#define SARLE_CLASSIFIER_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sarle/detect.hpp"
#include "sarle/normalize.hpp"

namespace sarle {

struct SentenceExample {
    std::string text;      // normalized sentence
    bool abnormal = false;
};

struct ClassifierConfig {
    int dim = 50;
    int word_ngrams = 2;       // unigrams .. word_ngrams
    int char_ngram_min = 3;
    int char_ngram_max = 6;
    uint32_t buckets = 1u << 20;
    int epochs = 5;
    double learning_rate = 0.1;
    uint64_t seed = 42;
};

// Averaged bag-of-n-grams linear model: hashed word/char n-gram embeddings
// averaged into a hidden vector, single logistic output, trained by SGD
// with a linearly decaying learning rate. Deterministic for a fixed seed.
class SentenceClassifier {
public:
    SentenceClassifier() = default;
    explicit SentenceClassifier(const ClassifierConfig& config) : cfg_(config) {
        if (cfg_.dim <= 0 || cfg_.buckets == 0 || cfg_.epochs <= 0)
            throw std::invalid_argument("invalid classifier hyperparameters");
        embeddings_.assign(static_cast<size_t>(cfg_.buckets) * cfg_.dim, 0.0f);
        output_.assign(static_cast<size_t>(cfg_.dim), 0.0f);
        bias_ = 0.0f;
        std::mt19937_64 rng(cfg_.seed);
        std::uniform_real_distribution<float> dist(-1.0f / cfg_.dim, 1.0f / cfg_.dim);
        for (auto& v : embeddings_) v = dist(rng);
    }

    const ClassifierConfig& config() const { return cfg_; }

    std::vector<uint32_t> features(const std::string& text) const {
        std::vector<uint32_t> feats;
        std::vector<std::string> words = detail::split_words(text);
        for (size_t i = 0; i < words.size(); ++i) {
            std::string gram;
            for (int g = 0; g < cfg_.word_ngrams && i + g < words.size(); ++g) {
                if (g) gram += ' ';
                gram += words[i + g];
                feats.push_back(hash(gram));
            }
            std::string wrapped = "<" + words[i] + ">";
            for (int len = cfg_.char_ngram_min; len <= cfg_.char_ngram_max; ++len) {
                if (static_cast<size_t>(len) > wrapped.size()) break;
                for (size_t p = 0; p + len <= wrapped.size(); ++p)
                    feats.push_back(hash(wrapped.substr(p, static_cast<size_t>(len))));
            }
        }
        return feats;
    }

    // Logistic score; empty input is defined as normal with score 0.
    double score(const std::string& text) const {
        std::vector<uint32_t> feats = features(text);
        if (feats.empty()) return 0.0;
        std::vector<double> hidden(static_cast<size_t>(cfg_.dim), 0.0);
        for (uint32_t f : feats)
            for (int d = 0; d < cfg_.dim; ++d)
                hidden[static_cast<size_t>(d)] += embeddings_[emb_index(f, d)];
        double logit = bias_;
        for (int d = 0; d < cfg_.dim; ++d)
            logit += output_[static_cast<size_t>(d)] * hidden[static_cast<size_t>(d)] /
                     static_cast<double>(feats.size());
        return 1.0 / (1.0 + std::exp(-logit));
    }

    bool classify_abnormal(const std::string& text) const { return score(text) >= 0.5; }

    double mean_loss(const std::vector<SentenceExample>& examples) const {
        double loss = 0.0;
        for (const auto& ex : examples) {
            double s = score(ex.text);
            double y = ex.abnormal ? 1.0 : 0.0;
            const double eps = 1e-12;
            loss -= y * std::log(s + eps) + (1.0 - y) * std::log(1.0 - s + eps);
        }
        return loss / static_cast<double>(examples.size());
    }

    // Single-threaded SGD over the examples in order, epochs times.
    // Returns the mean training loss after each epoch.
    std::vector<double> train(const std::vector<SentenceExample>& examples) {
        bool pos = false, neg = false;
        for (const auto& ex : examples) (ex.abnormal ? pos : neg) = true;
        if (!pos || !neg)
            throw std::invalid_argument(
                "training set must contain both normal and abnormal sentences");

        const size_t total_updates = examples.size() * static_cast<size_t>(cfg_.epochs);
        size_t t = 0;
        std::vector<double> epoch_losses;
        std::vector<double> hidden(static_cast<size_t>(cfg_.dim));
        for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
            for (const auto& ex : examples) {
                double lr = cfg_.learning_rate *
                            (1.0 - static_cast<double>(t) / static_cast<double>(total_updates));
                ++t;
                std::vector<uint32_t> feats = features(ex.text);
                if (feats.empty()) continue;
                std::fill(hidden.begin(), hidden.end(), 0.0);
                for (uint32_t f : feats)
                    for (int d = 0; d < cfg_.dim; ++d)
                        hidden[static_cast<size_t>(d)] += embeddings_[emb_index(f, d)];
                const double inv = 1.0 / static_cast<double>(feats.size());
                double logit = bias_;
                for (int d = 0; d < cfg_.dim; ++d)
                    logit += output_[static_cast<size_t>(d)] *
                             hidden[static_cast<size_t>(d)] * inv;
                double grad = 1.0 / (1.0 + std::exp(-logit)) - (ex.abnormal ? 1.0 : 0.0);

                std::vector<float> out_old = output_;
                for (int d = 0; d < cfg_.dim; ++d)
                    output_[static_cast<size_t>(d)] -= static_cast<float>(
                        lr * grad * hidden[static_cast<size_t>(d)] * inv);
                bias_ -= static_cast<float>(lr * grad);
                for (uint32_t f : feats)
                    for (int d = 0; d < cfg_.dim; ++d)
                        embeddings_[emb_index(f, d)] -= static_cast<float>(
                            lr * grad * out_old[static_cast<size_t>(d)] * inv);
            }
            epoch_losses.push_back(mean_loss(examples));
        }
        return epoch_losses;
    }

    uint64_t weight_checksum() const {
        uint64_t h = 1469598103934665603ull;
        auto mix = [&h](const void* data, size_t bytes) {
            const unsigned char* p = static_cast<const unsigned char*>(data);
            for (size_t i = 0; i < bytes; ++i) {
                h ^= p[i];
                h *= 1099511628211ull;
            }
        };
        mix(embeddings_.data(), embeddings_.size() * sizeof(float));
        mix(output_.data(), output_.size() * sizeof(float));
        mix(&bias_, sizeof(bias_));
        return h;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write model file: " + path);
        out.write(kMagic, 8);
        int32_t fields[6] = {cfg_.dim, cfg_.word_ngrams, cfg_.char_ngram_min,
                             cfg_.char_ngram_max, static_cast<int32_t>(cfg_.buckets),
                             cfg_.epochs};
        out.write(reinterpret_cast<const char*>(fields), sizeof(fields));
        double lr = cfg_.learning_rate;
        uint64_t seed = cfg_.seed;
        out.write(reinterpret_cast<const char*>(&lr), sizeof(lr));
        out.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
        out.write(reinterpret_cast<const char*>(embeddings_.data()),
                  static_cast<std::streamsize>(embeddings_.size() * sizeof(float)));
        out.write(reinterpret_cast<const char*>(output_.data()),
                  static_cast<std::streamsize>(output_.size() * sizeof(float)));
        out.write(reinterpret_cast<const char*>(&bias_), sizeof(bias_));
        if (!out) throw std::runtime_error("failed writing model file: " + path);
    }

    static SentenceClassifier load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open model file: " + path);
        char magic[8];
        in.read(magic, 8);
        if (!in || std::string(magic, 8) != kMagic)
            throw std::runtime_error("not a sarle model file: " + path);
        int32_t fields[6];
        in.read(reinterpret_cast<char*>(fields), sizeof(fields));
        ClassifierConfig cfg;
        cfg.dim = fields[0];
        cfg.word_ngrams = fields[1];
        cfg.char_ngram_min = fields[2];
        cfg.char_ngram_max = fields[3];
        cfg.buckets = static_cast<uint32_t>(fields[4]);
        cfg.epochs = fields[5];
        in.read(reinterpret_cast<char*>(&cfg.learning_rate), sizeof(double));
        in.read(reinterpret_cast<char*>(&cfg.seed), sizeof(uint64_t));
        SentenceClassifier c(cfg);
        in.read(reinterpret_cast<char*>(c.embeddings_.data()),
                static_cast<std::streamsize>(c.embeddings_.size() * sizeof(float)));
        in.read(reinterpret_cast<char*>(c.output_.data()),
                static_cast<std::streamsize>(c.output_.size() * sizeof(float)));
        in.read(reinterpret_cast<char*>(&c.bias_), sizeof(float));
        if (!in) throw std::runtime_error("truncated model file: " + path);
        return c;
    }

private:
    static constexpr const char* kMagic = "SARLEFT1";

    uint32_t hash(const std::string& s) const {
        uint64_t h = 1469598103934665603ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return static_cast<uint32_t>(h % cfg_.buckets);
    }

    size_t emb_index(uint32_t bucket, int d) const {
        return static_cast<size_t>(bucket) * static_cast<size_t>(cfg_.dim) +
               static_cast<size_t>(d);
    }

    ClassifierConfig cfg_;
    std::vector<float> embeddings_;
    std::vector<float> output_;
    float bias_ = 0.0f;
};

}  // namespace sarle

#endif  // SARLE_CLASSIFIER_HPP
