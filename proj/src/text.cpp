#include "syngen/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace syngen {

using json = nlohmann::json;

namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Length of the UTF-8 sequence starting with `lead`; stray bytes count as 1.
std::size_t utf8_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string normalize_surface(std::string_view text, bool lowercase) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(c));
    }
    return lowercase ? ascii_lower(out) : out;
}

// ---------------------------------------------------------------------------
// Dictionary

Dictionary Dictionary::from_entries(std::vector<DictionaryEntry> entries, bool lowercase) {
    Dictionary dict;
    std::set<std::pair<std::string, std::string>> seen;
    for (auto& entry : entries) {
        std::string id = normalize_surface(entry.concept_id, false);
        std::string surface = normalize_surface(entry.surface, lowercase);
        if (id.empty()) throw std::invalid_argument("dictionary entry with empty concept id");
        if (surface.empty()) throw std::invalid_argument("dictionary entry '" + id + "' has an empty surface");
        if (!seen.emplace(id, surface).second) continue;
        auto [it, fresh] = dict.index_.try_emplace(id);
        if (fresh) dict.concepts_.push_back(id);
        it->second.push_back(dict.entries_.size());
        dict.entries_.push_back({std::move(id), std::move(surface)});
    }
    return dict;
}

std::span<const std::size_t> Dictionary::surfaces_of(const std::string& concept_id) const {
    auto it = index_.find(concept_id);
    if (it == index_.end()) return {};
    return it->second;
}

std::vector<std::string> Dictionary::synonym_concepts() const {
    std::vector<std::string> out;
    for (const auto& id : concepts_) {
        if (index_.at(id).size() >= 2) out.push_back(id);
    }
    return out;
}

std::vector<std::string> Dictionary::surfaces() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.surface);
    return out;
}

Dictionary parse_dictionary(std::istream& in, bool lowercase) {
    std::vector<DictionaryEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw ParseError("expected 'concept_id<TAB>surface'", lineno);
        }
        DictionaryEntry entry{line.substr(0, tab), line.substr(tab + 1)};
        if (normalize_surface(entry.concept_id, false).empty() || normalize_surface(entry.surface, false).empty()) {
            throw ParseError("empty concept id or surface", lineno);
        }
        entries.push_back(std::move(entry));
    }
    if (entries.empty()) throw ParseError("dictionary is empty", 0);
    return Dictionary::from_entries(std::move(entries), lowercase);
}

Dictionary load_dictionary(const std::filesystem::path& path, bool lowercase) {
    auto in = open_input(path);
    return parse_dictionary(in, lowercase);
}

void save_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
    std::string out;
    for (const auto& e : dict.entries()) {
        out += e.concept_id;
        out += '\t';
        out += e.surface;
        out += '\n';
    }
    write_file_atomic(path, out);
}

Dictionary subsample_dictionary(const Dictionary& dict, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0) || ratio > 1.0) throw std::invalid_argument("subsample ratio must be in (0, 1]");
    const std::size_t n = dict.size();
    // The epsilon keeps e.g. 0.7 * 10 from rounding up to 8.
    auto keep = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
    keep = std::clamp<std::size_t>(keep, n > 0 ? 1 : 0, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first `keep` slots are a uniform sample.
    for (std::size_t i = 0; i < keep; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    order.resize(keep);
    std::sort(order.begin(), order.end());

    std::vector<DictionaryEntry> entries;
    entries.reserve(keep);
    for (auto i : order) entries.push_back(dict.entries()[i]);
    // Surfaces are already normalized; do not fold case a second time.
    return Dictionary::from_entries(std::move(entries), false);
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(std::vector<Document> documents, bool allow_empty_text) : documents_(std::move(documents)) {
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        const auto& doc = documents_[i];
        if (!allow_empty_text && doc.text.empty()) {
            throw std::invalid_argument("document '" + doc.doc_id + "' has empty text");
        }
        if (!index_.emplace(doc.doc_id, i).second) {
            throw std::invalid_argument("duplicate doc_id '" + doc.doc_id + "'");
        }
    }
}

const Document* Corpus::find(const std::string& doc_id) const {
    auto it = index_.find(doc_id);
    return it == index_.end() ? nullptr : &documents_[it->second];
}

Corpus parse_corpus(std::istream& in, bool allow_empty_text) {
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (normalize_surface(line, false).empty()) continue;
        try {
            auto record = json::parse(line);
            docs.push_back({record.at("doc_id").get<std::string>(), record.at("text").get<std::string>()});
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad corpus record: ") + e.what(), lineno);
        }
    }
    try {
        return Corpus(std::move(docs), allow_empty_text);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 0);
    }
}

Corpus load_corpus(const std::filesystem::path& path, bool allow_empty_text) {
    auto in = open_input(path);
    return parse_corpus(in, allow_empty_text);
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::string out;
    for (const auto& doc : corpus.documents()) {
        out += json{{"doc_id", doc.doc_id}, {"text", doc.text}}.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

// ---------------------------------------------------------------------------
// Tokenizer and offsets

TokenizedText tokenize(std::string text) {
    TokenizedText out;
    out.text = std::move(text);
    const std::string& s = out.text;
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        if (is_space(c)) {
            ++i;
            continue;
        }
        if (c < 0x80 && !is_ascii_alnum(c)) {
            out.tokens.push_back({i, i + 1});
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < s.size()) {
            auto d = static_cast<unsigned char>(s[i]);
            if (d < 0x80 && !is_ascii_alnum(d)) break;
            i += std::min(utf8_length(d), s.size() - i);
        }
        out.tokens.push_back({start, i});
    }
    return out;
}

std::vector<std::size_t> codepoint_offsets(std::string_view text) {
    std::vector<std::size_t> map(text.size() + 1, 0);
    std::size_t cp = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t len = std::min(utf8_length(static_cast<unsigned char>(text[i])), text.size() - i);
        for (std::size_t k = 0; k < len; ++k) map[i + k] = cp;
        i += len;
        ++cp;
    }
    map[text.size()] = cp;
    return map;
}

std::size_t codepoint_length(std::string_view text) {
    return codepoint_offsets(text).back();
}

std::string codepoint_substr(std::string_view text, std::size_t begin, std::size_t end) {
    std::size_t cp = 0;
    std::size_t i = 0;
    std::size_t byte_begin = text.size();
    std::size_t byte_end = text.size();
    while (i <= text.size()) {
        if (cp == begin) byte_begin = std::min(byte_begin, i);
        if (cp == end) {
            byte_end = i;
            break;
        }
        if (i == text.size()) break;
        i += std::min(utf8_length(static_cast<unsigned char>(text[i])), text.size() - i);
        ++cp;
    }
    if (byte_begin > byte_end) return {};
    return std::string(text.substr(byte_begin, byte_end - byte_begin));
}

// ---------------------------------------------------------------------------
// Annotations

AnnotationSet parse_annotations(std::istream& in) {
    AnnotationSet out;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (normalize_surface(line, false).empty()) continue;
        AnnotatedDocument doc;
        try {
            auto record = json::parse(line);
            doc.doc_id = record.at("doc_id").get<std::string>();
            for (const auto& span : record.at("spans")) {
                SpanAnnotation a;
                a.doc_id = doc.doc_id;
                a.start_char = span.at("start_char").get<std::size_t>();
                a.end_char = span.at("end_char").get<std::size_t>();
                a.surface = span.at("text").get<std::string>();
                if (a.start_char >= a.end_char) throw ParseError("span with start_char >= end_char", lineno);
                doc.spans.push_back(std::move(a));
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad annotation record: ") + e.what(), lineno);
        }
        if (!seen.insert(doc.doc_id).second) throw ParseError("duplicate doc_id '" + doc.doc_id + "'", lineno);
        out.push_back(std::move(doc));
    }
    return out;
}

AnnotationSet load_annotations(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_annotations(in);
}

void write_annotations(std::ostream& out, const AnnotationSet& annotations) {
    for (const auto& doc : annotations) {
        json spans = json::array();
        for (const auto& a : doc.spans) {
            spans.push_back({{"start_char", a.start_char}, {"end_char", a.end_char}, {"text", a.surface}});
        }
        out << json{{"doc_id", doc.doc_id}, {"spans", std::move(spans)}}.dump() << '\n';
    }
}

void save_annotations(const AnnotationSet& annotations, const std::filesystem::path& path) {
    std::ostringstream out;
    write_annotations(out, annotations);
    write_file_atomic(path, out.str());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace syngen
