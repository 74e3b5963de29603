#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "syngen/text.hpp"

namespace syngen {

struct SyntheticOptions {
    std::size_t concepts = 200;
    std::size_t documents = 500;
    std::size_t min_surfaces = 2;
    std::size_t max_surfaces = 4;
    std::uint64_t seed = 20231;
};

/// Pseudo-biomedical concepts with morphological variants embedded in
/// English filler text. Entity tokens and filler tokens never coincide, and
/// mentions are always separated by filler.
struct SyntheticDataset {
    Dictionary lexicon;      // every surface of every concept
    Dictionary dictionary;   // about half of each concept's surfaces
    Dictionary heldout;      // lexicon minus dictionary
    Corpus corpus;
    AnnotationSet gold;
};

SyntheticDataset make_synthetic(const SyntheticOptions& options = {});

/// Writes dictionary.tsv, lexicon.tsv, heldout.tsv, corpus.jsonl, gold.jsonl.
void save_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace syngen
