// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "syngen/bound.hpp"
#include "syngen/evaluation.hpp"
#include "syngen/inference.hpp"
#include "syngen/negative_miner.hpp"
#include "syngen/training.hpp"

using namespace syngen;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* format, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& run) {
    auto t0 = Clock::now();
    Outcome out;
    try {
        out = run();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("criterion %d %-26s %s  %s (%.1fs)\n", id, name.c_str(), out.pass ? "PASS" : "FAIL",
                out.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------------------

Outcome gradient_suite() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto inst = fixture::gradient_instance(rng);
        auto& model = inst.model;
        const auto& b = inst.batch;
        const auto& t = b.triples.front();
        auto check = [&](const Gradients& g, const std::function<double(const ScorerModel&)>& loss) {
            worst = std::max(worst, oracle::relative_error(oracle::flatten(model, g),
                                                           oracle::central_difference(model, loss)));
        };
        check(classification_loss(model, b.positives, b.negatives).grads,
              [&](const ScorerModel& m) { return classification_loss(m, b.positives, b.negatives).loss; });
        check(sdr_loss(model, t.anchor, t.positive, t.negative, inst.config.gamma_s).grads, [&](const ScorerModel& m) {
            return sdr_loss(m, t.anchor, t.positive, t.negative, inst.config.gamma_s).loss;
        });
        check(npr_loss(model, b.positives.front(), b.npr_noise.front()).grads,
              [&](const ScorerModel& m) { return npr_loss(m, b.positives.front(), b.npr_noise.front()).loss; });
        check(total_loss(model, b, inst.config).grads,
              [&](const ScorerModel& m) { return total_loss(m, b, inst.config).total; });
    }
    double elapsed = seconds_since(t0);
    return {worst < 1e-4 && elapsed < 60.0, fmt("max rel err %.2e over 400 checks, %.1fs", worst, elapsed)};
}

Outcome bound_arithmetic() {
    BoundInputs ex;
    ex.kappa = 1.0;
    ex.epsilon = 0.5;
    ex.b = 1.0;
    ex.s_total = 100;
    ex.s_dict = 50;
    ex.delta = 0.05;
    auto r = generalization_bound(ex);
    bool example_ok = std::abs(r.bound_value - 3.2467013) < 1e-4 && std::abs(r.term1 - 3.0546368) < 1e-4 &&
                      std::abs(r.term2 - 0.1920646) < 1e-4;

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 5.0), d(0.001, 0.999);
    std::uniform_int_distribution<std::size_t> size(1, 1000000);
    std::uniform_int_distribution<int> which(0, 5);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        BoundInputs lo;
        lo.kappa = u(rng);
        lo.epsilon = u(rng);
        lo.b = u(rng) + 1e-3;
        lo.s_total = size(rng);
        lo.s_dict = std::uniform_int_distribution<std::size_t>(1, lo.s_total)(rng);
        lo.delta = d(rng);
        BoundInputs hi = lo;
        // hi has one input larger; sign says which way the bound may move.
        int sign = 1;
        switch (which(rng)) {
            case 0: hi.kappa += u(rng); break;
            case 1: hi.epsilon += u(rng); break;
            case 2: hi.b += u(rng); break;
            case 3: hi.s_total += size(rng); break;
            case 4:
                if (lo.s_dict == lo.s_total) lo.s_dict = std::max<std::size_t>(1, lo.s_total / 2), hi.s_dict = lo.s_dict;
                hi.s_dict = std::uniform_int_distribution<std::size_t>(lo.s_dict, lo.s_total)(rng);
                sign = -1;
                break;
            default:
                hi.delta = std::uniform_real_distribution<double>(lo.delta, 0.999)(rng);
                sign = -1;
        }
        double a = generalization_bound(lo).bound_value, b = generalization_bound(hi).bound_value;
        if (sign * (b - a) < 0.0) ++violations;
    }
    return {example_ok && violations == 0,
            fmt("example %.7f, %.0f/1000 monotonicity violations", r.bound_value, violations)};
}

Outcome greedy_oracle() {
    std::mt19937_64 rng(11);
    const std::vector<std::string> vocab{"a", "b", "c", "ab", "x"};
    std::uniform_int_distribution<std::size_t> n_tokens(1, 30), n_terms(1, 6), word(0, vocab.size() - 1);
    std::uniform_real_distribution<double> score(0.5, 1.0);
    int mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::string> tokens;
        for (std::size_t i = n_tokens(rng); i > 0; --i) tokens.push_back(vocab[word(rng)]);
        std::string joined;
        for (const auto& t : tokens) joined += (joined.empty() ? "" : " ") + t;
        auto text = tokenize(joined);
        std::vector<oracle::Term> terms;
        std::vector<SpanCandidate> candidates;
        for (std::size_t k = n_terms(rng); k > 0; --k) {
            std::size_t b = std::uniform_int_distribution<std::size_t>(0, tokens.size() - 1)(rng);
            std::size_t e = b + std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(5, tokens.size() - b))(rng);
            double s = std::round(score(rng) * 4) / 4;
            terms.push_back({b, e, s});
            SpanCandidate c;
            c.token_begin = b;
            c.token_end = e;
            c.start_char = text.tokens[b].begin;
            c.end_char = text.tokens[e - 1].end;
            c.surface = std::string(text.slice(b, e));
            c.score = s;
            candidates.push_back(c);
        }
        auto result = greedy_extract(candidates, text);
        std::set<std::pair<std::size_t, std::size_t>> got;
        for (const auto& ent : result.entities) got.emplace(ent.token_begin, ent.token_end);
        if (got != oracle::greedy_reference(tokens, terms)) ++mismatches;
    }
    return {mismatches == 0, fmt("%.0f/500 mismatches", mismatches)};
}

Outcome nsf_oracle() {
    std::mt19937_64 rng(13);
    int mismatches = 0, monotone_violations = 0;
    EncoderConfig ec;
    ec.dim = 16;
    ec.num_buckets = 4096;
    for (int trial = 0; trial < 50; ++trial) {
        FrozenEncoder frozen(ec, rng());
        std::vector<DictionaryEntry> entries;
        for (int i = 0; i < 20; ++i) entries.push_back({"C" + std::to_string(i), oracle::random_word(rng, "abcdef", 2, 8)});
        auto dict = Dictionary::from_entries(entries);
        std::vector<SampledSpan> spans;
        std::vector<EmbeddingVector> span_vecs, surface_vecs;
        for (int i = 0; i < 50; ++i) {
            auto t = i < 3 ? dict.entries()[static_cast<std::size_t>(i)].surface : oracle::random_word(rng, "abcdef", 2, 8);
            spans.push_back({t, "d", 0, 0});
            span_vecs.push_back(frozen.encode(t));
        }
        for (const auto& e : dict.entries()) surface_vecs.push_back(frozen.encode(e.surface));

        auto distances = nearest_dictionary_distances(spans, dict, frozen);
        std::vector<double> thresholds;
        for (double q : {0.05, 0.25, 0.5, 0.75}) thresholds.push_back(std::max(quantile_threshold(distances, q), 1e-12));
        std::size_t prev = spans.size() + 1;
        for (double t_d : thresholds) {
            auto keep = oracle::nsf_reference(span_vecs, surface_vecs, t_d);
            std::size_t expected = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
            std::size_t kept = 0;
            try {
                auto pool = filter_negatives(spans, dict, frozen, t_d);
                kept = pool.spans.size();
                std::size_t j = 0;
                for (std::size_t i = 0; i < spans.size(); ++i) {
                    if (keep[i] && (j >= pool.spans.size() || !(pool.spans[j++] == spans[i]))) ++mismatches;
                }
            } catch (const std::runtime_error&) {
                kept = 0;
            }
            if (kept != expected) ++mismatches;
            if (kept > prev) ++monotone_violations;
            prev = kept;
        }
    }
    return {mismatches == 0 && monotone_violations == 0,
            fmt("%.0f mismatches, %.0f monotonicity violations over 50 instances x 4 thresholds", mismatches,
                monotone_violations)};
}

// ---------------------------------------------------------------------------

struct SyntheticData {
    Dictionary dictionary;
    Dictionary lexicon;
    Corpus corpus;
    AnnotationSet gold;
};

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

Outcome regularizer_probes(const SyntheticData& data, const RunConfig& base) {
    auto t0 = Clock::now();
    auto texts = data.lexicon.surfaces();
    std::vector<double> syn_median;
    for (double alpha : {0.0, 0.1, 1.0}) {
        std::vector<double> v;
        for (auto seed : kSeeds) {
            RunConfig c = base;
            c.seed = seed;
            c.alpha = alpha;
            auto r = train(data.dictionary, data.corpus, c);
            v.push_back(synonym_distance_probe(r.model, data.dictionary, 10000, seed));
        }
        syn_median.push_back(median(v));
    }
    std::vector<double> lip_median;
    for (double beta : {0.0, 1.0}) {
        std::vector<double> v;
        for (auto seed : kSeeds) {
            RunConfig c = base;
            c.seed = seed;
            c.beta = beta;
            auto r = train(data.dictionary, data.corpus, c);
            v.push_back(lipschitz_probe(r.model, texts, 16, base.noise_sigma, seed));
        }
        lip_median.push_back(median(v));
    }
    double elapsed = seconds_since(t0);
    bool a_ok = syn_median[1] <= syn_median[0] && syn_median[2] <= syn_median[1];
    bool b_ok = lip_median[1] < lip_median[0];
    auto detail = fmt("synonym distance %.4f / %.4f / %.4f (alpha 0 / 0.1 / 1)", syn_median[0], syn_median[1],
                      syn_median[2]) +
                  fmt("; lipschitz %.4f / %.4f (beta 0 / 1)", lip_median[0], lip_median[1]) +
                  fmt(", %.0fs", elapsed);
    return {a_ok && b_ok && elapsed < 600.0, detail};
}

struct SweepRuns {
    std::vector<PrfScore> few;   // ratio 0.2
    std::vector<PrfScore> full;  // ratio 1.0
};

SweepRuns run_sweeps(const SyntheticData& data, const RunConfig& base) {
    SweepRuns out;
    std::vector<double> ratios{0.2, 1.0};
    for (auto seed : kSeeds) {
        RunConfig c = base;
        c.seed = seed;
        auto points = few_shot_sweep(data.dictionary, data.corpus, data.gold, ratios, c);
        out.few.push_back(points[0].score);
        out.full.push_back(points[1].score);
    }
    return out;
}

Outcome recall_headline(const SyntheticData& data, const SweepRuns& runs, bool lowercase) {
    auto baseline = evaluate(exact_match_baseline(data.dictionary, data.corpus, lowercase), data.gold);
    std::vector<double> recall;
    for (const auto& s : runs.full) recall.push_back(s.recall);
    double m = median(recall);
    return {m >= baseline.recall + 0.10,
            fmt("median recall %.3f vs exact-match baseline %.3f (need >= %.3f)", m, baseline.recall,
                baseline.recall + 0.10)};
}

Outcome few_shot_plateau(const SweepRuns& runs) {
    std::vector<double> few, full;
    for (const auto& s : runs.few) few.push_back(s.f1);
    for (const auto& s : runs.full) full.push_back(s.f1);
    double f02 = median(few), f10 = median(full);

    BoundInputs in;
    in.kappa = 1.0;
    in.epsilon = 0.5;
    in.b = loss_upper_bound();
    in.s_total = std::size_t{1} << 50;
    in.s_dict = in.s_total;
    auto r = generalization_bound(in);
    bool plateau = r.term2 < 1e-3 * r.term1;
    bool ratio_ok = f02 >= 0.9 * f10;
    return {ratio_ok && plateau, fmt("median F1 %.3f at 0.2 vs %.3f at 1.0 (ratio %.3f, need >= 0.9)", f02, f10,
                                     f10 > 0 ? f02 / f10 : 0.0) +
                                     fmt("; term2/term1 %.1e at |S^|=2^50", r.term2 / r.term1)};
}

Outcome determinism(const SyntheticData& data, const RunConfig& base) {
    auto dir = fs::temp_directory_path() / "syngen_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<double> ratios{0.2, 1.0};
    for (int run = 0; run < 2; ++run) {
        auto sub = dir / std::to_string(run);
        fs::create_directories(sub);
        auto result = train(data.dictionary, data.corpus, base);
        save_model(result.model, sub / "model.json");
        save_pool(result.pool, sub / "pool.jsonl");
        save_annotations(predict_corpus(result.model, data.corpus, base.t_p, base.m_s), sub / "pred.jsonl");
        write_file_atomic(sub / "sweep.csv",
                          sweep_csv(few_shot_sweep(data.dictionary, data.corpus, data.gold, ratios, base)));
    }
    std::string differing;
    for (const char* name : {"model.json", "pool.jsonl", "pred.jsonl", "sweep.csv"}) {
        if (slurp(dir / "0" / name) != slurp(dir / "1" / name)) differing += std::string(" ") + name;
    }
    fs::remove_all(dir);
    return {differing.empty(), differing.empty() ? "checkpoint, pool, predictions and sweep CSV byte-identical"
                                                 : "differ:" + differing};
}

}  // namespace

int main(int argc, char** argv) {
    fs::path data_dir, config_path;
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string flag = argv[i];
        if (flag == "--data") data_dir = argv[i + 1];
        else if (flag == "--config") config_path = argv[i + 1];
        else {
            std::cerr << "unknown flag " << flag << "\n";
            return 2;
        }
    }
    if (data_dir.empty() || config_path.empty()) {
        std::cerr << "usage: syngen_acceptance --data DIR --config FILE\n";
        return 2;
    }

    RunConfig config;
    SyntheticData data;
    try {
        config = load_config(config_path);
        data.dictionary = load_dictionary(data_dir / "dictionary.tsv", config.lowercase);
        data.lexicon = load_dictionary(data_dir / "lexicon.tsv", config.lowercase);
        data.corpus = load_corpus(data_dir / "corpus.jsonl");
        data.gold = load_annotations(data_dir / "gold.jsonl");
    } catch (const std::exception& e) {
        std::cerr << "setup failed: " << e.what() << "\n";
        return 2;
    }

    report(1, "gradient suite", gradient_suite);
    report(2, "bound arithmetic", bound_arithmetic);
    report(3, "greedy extraction oracle", greedy_oracle);
    report(4, "negative filter oracle", nsf_oracle);
    report(5, "regularizer probes", [&] { return regularizer_probes(data, config); });

    SweepRuns runs;
    bool swept = false;
    auto sweeps = [&] {
        if (!swept) runs = run_sweeps(data, config);
        swept = true;
        return runs;
    };
    report(6, "synonym recall headline", [&] { return recall_headline(data, sweeps(), config.lowercase); });
    report(7, "few-shot plateau", [&] { return few_shot_plateau(sweeps()); });
    report(8, "determinism", [&] { return determinism(data, config); });

    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
