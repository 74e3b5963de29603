#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace syngen {

/// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// ASCII case folding (byte-length preserving, so offsets survive).
std::string ascii_lower(std::string_view text);

/// Trim, collapse whitespace runs to one space, optionally case fold.
std::string normalize_surface(std::string_view text, bool lowercase);

struct DictionaryEntry {
    std::string concept_id;
    std::string surface;

    bool operator==(const DictionaryEntry&) const = default;
};

/// Concept-grouped surface forms. Entries are unique (concept_id, surface)
/// pairs in first-seen order.
class Dictionary {
public:
    Dictionary() = default;

    /// Normalizes every surface, drops duplicates, rejects empty ids/surfaces.
    static Dictionary from_entries(std::vector<DictionaryEntry> entries, bool lowercase = true);

    const std::vector<DictionaryEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Concept ids in first-seen order.
    const std::vector<std::string>& concepts() const noexcept { return concepts_; }
    /// Entry indices belonging to `concept_id` (empty span if unknown).
    std::span<const std::size_t> surfaces_of(const std::string& concept_id) const;
    /// Concepts with at least two surfaces, in first-seen order.
    std::vector<std::string> synonym_concepts() const;

    std::vector<std::string> surfaces() const;

    bool operator==(const Dictionary& other) const { return entries_ == other.entries_; }

private:
    std::vector<DictionaryEntry> entries_;
    std::vector<std::string> concepts_;
    std::map<std::string, std::vector<std::size_t>> index_;
};

Dictionary parse_dictionary(std::istream& in, bool lowercase = true);
Dictionary load_dictionary(const std::filesystem::path& path, bool lowercase = true);
void save_dictionary(const Dictionary& dict, const std::filesystem::path& path);

/// Uniformly keeps ceil(ratio * |entries|) entries, original order preserved.
Dictionary subsample_dictionary(const Dictionary& dict, double ratio, std::uint64_t seed);

struct Document {
    std::string doc_id;
    std::string text;
};

class Corpus {
public:
    Corpus() = default;
    /// Throws on duplicate doc ids, or empty text unless `allow_empty_text`.
    explicit Corpus(std::vector<Document> documents, bool allow_empty_text = false);

    const std::vector<Document>& documents() const noexcept { return documents_; }
    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }
    const Document* find(const std::string& doc_id) const;

private:
    std::vector<Document> documents_;
    std::map<std::string, std::size_t> index_;
};

Corpus parse_corpus(std::istream& in, bool allow_empty_text = false);
Corpus load_corpus(const std::filesystem::path& path, bool allow_empty_text = false);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Half-open byte range of one token.
struct Token {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const Token&) const = default;
};

struct TokenizedText {
    std::string text;
    std::vector<Token> tokens;

    std::size_t size() const noexcept { return tokens.size(); }
    std::string_view token(std::size_t i) const {
        return std::string_view(text).substr(tokens[i].begin, tokens[i].end - tokens[i].begin);
    }
    /// Substring covering tokens [first, last).
    std::string_view slice(std::size_t first, std::size_t last) const {
        return std::string_view(text).substr(tokens[first].begin, tokens[last - 1].end - tokens[first].begin);
    }
};

/// Maximal alphanumeric runs and single punctuation characters; whitespace
/// separates. Non-ASCII code points count as alphanumeric.
TokenizedText tokenize(std::string text);

/// Maps each byte offset (0..size inclusive) to a code point index.
std::vector<std::size_t> codepoint_offsets(std::string_view text);
std::size_t codepoint_length(std::string_view text);
/// Substring by code point range [begin, end).
std::string codepoint_substr(std::string_view text, std::size_t begin, std::size_t end);

/// A gold or predicted entity. Offsets count Unicode code points.
struct SpanAnnotation {
    std::string doc_id;
    std::size_t start_char = 0;
    std::size_t end_char = 0;
    std::string surface;

    bool operator==(const SpanAnnotation&) const = default;
};

struct AnnotatedDocument {
    std::string doc_id;
    std::vector<SpanAnnotation> spans;

    bool operator==(const AnnotatedDocument&) const = default;
};

using AnnotationSet = std::vector<AnnotatedDocument>;

AnnotationSet parse_annotations(std::istream& in);
AnnotationSet load_annotations(const std::filesystem::path& path);
void write_annotations(std::ostream& out, const AnnotationSet& annotations);
void save_annotations(const AnnotationSet& annotations, const std::filesystem::path& path);

/// Writes through a sibling temp file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace syngen
