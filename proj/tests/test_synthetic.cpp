#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "syngen/synthetic.hpp"

using namespace syngen;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("bundled synthetic data matches the generator") {
    auto fresh = std::filesystem::temp_directory_path() / "syngen_test_synthetic";
    std::filesystem::remove_all(fresh);
    save_synthetic(make_synthetic(), fresh);
    const std::filesystem::path bundled = std::filesystem::path(SYNGEN_SOURCE_DIR) / "data" / "synthetic";
    for (const char* name : {"dictionary.tsv", "lexicon.tsv", "heldout.tsv", "corpus.jsonl", "gold.jsonl"}) {
        INFO(name);
        CHECK(read_file(fresh / name) == read_file(bundled / name));
    }
    std::filesystem::remove_all(fresh);
}

TEST_CASE("synthetic dataset structure") {
    SyntheticOptions opts;
    opts.concepts = 40;
    opts.documents = 60;
    auto data = make_synthetic(opts);
    CHECK(data.lexicon.concepts().size() == 40);
    CHECK(data.corpus.size() == 60);
    CHECK(data.dictionary.size() + data.heldout.size() == data.lexicon.size());

    std::set<std::pair<std::string, std::string>> dict_entries;
    for (const auto& e : data.dictionary.entries()) dict_entries.emplace(e.concept_id, e.surface);
    for (const auto& e : data.heldout.entries()) CHECK_FALSE(dict_entries.contains({e.concept_id, e.surface}));
    for (const auto& c : data.lexicon.concepts()) {
        auto n = data.lexicon.surfaces_of(c).size();
        CHECK(n >= opts.min_surfaces);
        CHECK(n <= opts.max_surfaces);
        CHECK_FALSE(data.dictionary.surfaces_of(c).empty());
    }

    std::set<std::string> lexicon;
    for (const auto& e : data.lexicon.entries()) lexicon.insert(e.surface);
    for (const auto& doc : data.gold) {
        const auto* text = data.corpus.find(doc.doc_id);
        REQUIRE(text != nullptr);
        for (const auto& a : doc.spans) {
            CHECK(codepoint_substr(text->text, a.start_char, a.end_char) == a.surface);
            CHECK(lexicon.contains(normalize_surface(a.surface, true)));
        }
    }

    auto again = make_synthetic(opts);
    CHECK(again.dictionary == data.dictionary);
    CHECK(again.gold == data.gold);
    opts.seed += 1;
    CHECK_FALSE(make_synthetic(opts).lexicon == data.lexicon);
}
