#include "syngen/synthetic.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <set>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

namespace syngen {

namespace {

constexpr std::array<std::string_view, 24> kOnsets = {"b",  "c",  "d",  "f",  "g",  "k",  "l",  "m",
                                                      "n",  "p",  "r",  "s",  "t",  "v",  "z",  "ch",
                                                      "ph", "th", "br", "cr", "gl", "pr", "tr", "st"};
constexpr std::array<std::string_view, 7> kVowels = {"a", "e", "i", "o", "u", "y", "ou"};
constexpr std::array<std::string_view, 5> kCodas = {"", "", "n", "r", "x"};
constexpr std::array<std::string_view, 10> kSuffixes = {"itis", "oma",  "emia",  "osis",   "ase",
                                                        "ine",  "pathy", "algia", "plasia", "cytosis"};
constexpr std::array<std::string_view, 4> kAdjSuffixes = {"ic", "al", "ous", "oid"};

constexpr std::array<std::string_view, 96> kFiller = {
    "the",       "a",        "an",        "of",        "in",        "with",      "and",       "or",
    "to",        "for",      "on",        "at",        "by",        "from",      "after",     "before",
    "during",    "patient",  "patients",  "study",     "results",   "showed",    "reported",  "observed",
    "treated",   "treatment", "was",      "were",      "is",        "are",       "had",       "has",
    "been",      "no",       "not",       "significant", "increase", "decrease", "level",     "levels",
    "clinical",  "case",     "cases",     "group",     "groups",    "control",   "analysis",  "data",
    "we",        "our",      "this",      "these",     "that",      "which",     "between",   "among",
    "associated", "risk",    "history",   "following", "response",  "therapy",   "dose",      "weeks",
    "months",    "years",    "early",     "late",      "severe",    "mild",      "common",    "rare",
    "children",  "adults",   "women",     "men",       "hospital",  "onset",     "diagnosis", "presented",
    "developed", "examined", "compared",  "measured",  "found",     "also",      "however",   "both",
    "two",       "three",    "several",   "most",      "new",       "first",     "sample",    "model"};

// Spelling substitutions applied to find morphological variants.
constexpr std::array<std::pair<std::string_view, std::string_view>, 14> kRewrites = {{
    {"emia", "aemia"},
    {"ph", "f"},
    {"f", "ph"},
    {"y", "i"},
    {"c", "k"},
    {"k", "c"},
    {"oma", "omas"},
    {"ase", "ases"},
    {"ine", "in"},
    {"pathy", "pathia"},
    {"osis", "oses"},
    {"ou", "o"},
    {"ic ", "ical "},
    {"itis", "itic"},
}};

template <typename Array>
std::string_view pick(const Array& values, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> d(0, values.size() - 1);
    return values[d(rng)];
}

std::string make_root(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> syllables(2, 3);
    std::string root;
    for (int i = syllables(rng); i > 0; --i) {
        root += pick(kOnsets, rng);
        root += pick(kVowels, rng);
        if (i == 1) root += pick(kCodas, rng);
    }
    return root;
}

// One random rewrite that changes `s`, or `s` unchanged if none applies.
std::string rewrite(const std::string& s, std::mt19937_64& rng) {
    std::vector<std::string> options;
    for (const auto& [from, to] : kRewrites) {
        auto pos = s.find(from);
        if (pos == std::string::npos) continue;
        std::string out = s;
        out.replace(pos, from.size(), to);
        options.push_back(std::move(out));
    }
    // Hyphenate a multi-word surface or split a long word before its suffix.
    if (auto space = s.find(' '); space != std::string::npos) {
        std::string out = s;
        out[space] = '-';
        options.push_back(std::move(out));
    }
    for (const auto& suffix : kSuffixes) {
        if (s.size() > suffix.size() + 3 && s.ends_with(suffix) && s[s.size() - suffix.size() - 1] != '-') {
            std::string out = s;
            out.insert(s.size() - suffix.size(), "-");
            options.push_back(std::move(out));
            break;
        }
    }
    if (options.empty()) return s;
    std::uniform_int_distribution<std::size_t> d(0, options.size() - 1);
    return options[d(rng)];
}

std::string capitalize(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

}  // namespace

SyntheticDataset make_synthetic(const SyntheticOptions& options) {
    if (options.concepts == 0 || options.documents == 0) throw std::invalid_argument("synthetic: empty request");
    if (options.min_surfaces < 2 || options.min_surfaces > options.max_surfaces) {
        throw std::invalid_argument("synthetic: need 2 <= min_surfaces <= max_surfaces");
    }
    std::mt19937_64 rng(options.seed);
    const std::unordered_set<std::string_view> filler(kFiller.begin(), kFiller.end());

    std::set<std::string> used;
    std::vector<std::vector<std::string>> concept_surfaces;
    std::uniform_int_distribution<std::size_t> surface_count(options.min_surfaces, options.max_surfaces);
    std::bernoulli_distribution multiword(0.35);

    while (concept_surfaces.size() < options.concepts) {
        std::string base = make_root(rng) + std::string(pick(kSuffixes, rng));
        if (multiword(rng)) base = make_root(rng) + std::string(pick(kAdjSuffixes, rng)) + " " + base;

        const std::size_t want = surface_count(rng);
        std::vector<std::string> surfaces{base};
        for (int attempt = 0; attempt < 50 && surfaces.size() < want; ++attempt) {
            std::uniform_int_distribution<std::size_t> from(0, surfaces.size() - 1);
            auto variant = rewrite(surfaces[from(rng)], rng);
            if (std::find(surfaces.begin(), surfaces.end(), variant) == surfaces.end()) surfaces.push_back(variant);
        }
        if (surfaces.size() < options.min_surfaces) continue;

        bool clash = false;
        for (const auto& s : surfaces) {
            if (used.contains(s)) clash = true;
            for (const auto& tok : tokenize(s).tokens) {
                if (filler.contains(std::string_view(s).substr(tok.begin, tok.end - tok.begin))) clash = true;
            }
        }
        if (clash) continue;
        used.insert(surfaces.begin(), surfaces.end());
        concept_surfaces.push_back(std::move(surfaces));
    }

    std::vector<DictionaryEntry> lexicon, kept, heldout;
    for (std::size_t c = 0; c < concept_surfaces.size(); ++c) {
        char id[32];
        std::snprintf(id, sizeof id, "C%04zu", c);
        auto surfaces = concept_surfaces[c];
        for (const auto& s : surfaces) lexicon.push_back({id, s});
        std::shuffle(surfaces.begin(), surfaces.end(), rng);
        std::size_t held = surfaces.size() / 2;
        if (surfaces.size() % 2 == 1 && std::bernoulli_distribution(0.5)(rng)) ++held;
        held = std::min(held, surfaces.size() - 1);
        for (std::size_t i = 0; i < surfaces.size(); ++i) {
            (i < held ? heldout : kept).push_back({id, surfaces[i]});
        }
    }

    std::vector<Document> docs;
    AnnotationSet gold;
    std::uniform_int_distribution<std::size_t> pick_concept(0, concept_surfaces.size() - 1);
    std::uniform_int_distribution<int> lead_words(1, 5), gap_words(1, 4), tail_words(1, 3);
    std::uniform_int_distribution<int> sentences(1, 2), mentions(1, 2);
    std::bernoulli_distribution comma(0.15);
    for (std::size_t d = 0; d < options.documents; ++d) {
        char id[32];
        std::snprintf(id, sizeof id, "doc%04zu", d);
        std::string text;
        AnnotatedDocument annotated{id, {}};
        auto add_filler = [&](int count) {
            for (int i = 0; i < count; ++i) {
                if (!text.empty() && text.back() != ' ') text += ' ';
                text += pick(kFiller, rng);
                if (comma(rng)) text += ',';
            }
        };
        for (int s = sentences(rng); s > 0; --s) {
            std::size_t sentence_start = text.empty() ? 0 : text.size() + 1;
            bool lead = std::bernoulli_distribution(0.8)(rng);
            if (lead) add_filler(lead_words(rng));
            for (int m = mentions(rng); m > 0; --m) {
                const auto& options_for = concept_surfaces[pick_concept(rng)];
                std::uniform_int_distribution<std::size_t> which(0, options_for.size() - 1);
                const auto& surface = options_for[which(rng)];
                if (!text.empty()) text += ' ';
                std::size_t start = text.size();
                text += surface;
                annotated.spans.push_back({id, start, text.size(), {}});
                add_filler(m > 1 ? gap_words(rng) : tail_words(rng));
            }
            if (text.back() == ',') text.pop_back();
            text += '.';
            text.replace(sentence_start, text.size() - sentence_start,
                         capitalize(text.substr(sentence_start)));
        }
        for (auto& span : annotated.spans) span.surface = text.substr(span.start_char, span.end_char - span.start_char);
        docs.push_back({id, std::move(text)});
        gold.push_back(std::move(annotated));
    }

    return SyntheticDataset{Dictionary::from_entries(std::move(lexicon)), Dictionary::from_entries(std::move(kept)),
                            Dictionary::from_entries(std::move(heldout)), Corpus(std::move(docs)), std::move(gold)};
}

void save_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_dictionary(data.dictionary, dir / "dictionary.tsv");
    save_dictionary(data.lexicon, dir / "lexicon.tsv");
    save_dictionary(data.heldout, dir / "heldout.tsv");
    save_corpus(data.corpus, dir / "corpus.jsonl");
    save_annotations(data.gold, dir / "gold.jsonl");
}

}  // namespace syngen
