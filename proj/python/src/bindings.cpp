// Python module _syngen. Configs cross the boundary as JSON strings; the
// syngen package wraps them as dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "syngen/bound.hpp"
#include "syngen/config.hpp"
#include "syngen/evaluation.hpp"
#include "syngen/inference.hpp"
#include "syngen/scorer.hpp"
#include "syngen/synthetic.hpp"
#include "syngen/training.hpp"

namespace py = pybind11;
using namespace syngen;

namespace {

using Entry = std::pair<std::string, std::string>;  // (concept_id, surface)
using Span = std::tuple<std::size_t, std::size_t, std::string>;
using Annotations = std::vector<std::pair<std::string, std::vector<Span>>>;

Dictionary to_dictionary(const std::vector<Entry>& entries, bool lowercase) {
    std::vector<DictionaryEntry> out;
    out.reserve(entries.size());
    for (const auto& [c, s] : entries) out.push_back({c, s});
    return Dictionary::from_entries(std::move(out), lowercase);
}

std::vector<Entry> from_dictionary(const Dictionary& dict) {
    std::vector<Entry> out;
    for (const auto& e : dict.entries()) out.emplace_back(e.concept_id, e.surface);
    return out;
}

Corpus to_corpus(const std::vector<std::pair<std::string, std::string>>& docs) {
    std::vector<Document> out;
    for (const auto& [id, text] : docs) out.push_back({id, text});
    return Corpus(std::move(out), true);
}

std::vector<std::pair<std::string, std::string>> from_corpus(const Corpus& corpus) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& d : corpus.documents()) out.emplace_back(d.doc_id, d.text);
    return out;
}

AnnotationSet to_annotations(const Annotations& in) {
    AnnotationSet out;
    for (const auto& [id, spans] : in) {
        AnnotatedDocument doc{id, {}};
        for (const auto& [s, e, text] : spans) doc.spans.push_back({id, s, e, text});
        out.push_back(std::move(doc));
    }
    return out;
}

Annotations from_annotations(const AnnotationSet& in) {
    Annotations out;
    for (const auto& doc : in) {
        std::vector<Span> spans;
        for (const auto& a : doc.spans) spans.emplace_back(a.start_char, a.end_char, a.surface);
        out.emplace_back(doc.doc_id, std::move(spans));
    }
    return out;
}

RunConfig parse_config(const std::string& text) {
    RunConfig c = text.empty() ? RunConfig{} : config_from_json(nlohmann::json::parse(text));
    apply_seed_override(c);
    return c;
}

py::dict prf_dict(const PrfScore& s) {
    py::dict d;
    d["precision"] = s.precision;
    d["recall"] = s.recall;
    d["f1"] = s.f1;
    d["tp"] = s.tp;
    d["fp"] = s.fp;
    d["fn"] = s.fn;
    return d;
}

}  // namespace

PYBIND11_MODULE(_syngen, m) {
    m.doc() = "Dictionary-only named entity recognition";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<LoadError>(m, "LoadError", PyExc_IOError);
    py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

    m.def("default_config", [] { return to_json(RunConfig{}).dump(); });
    m.def("normalize_config", [](const std::string& text) { return to_json(parse_config(text)).dump(); });

    py::class_<ScorerModel>(m, "Model")
        .def_static("load", &load_model, py::arg("path"))
        .def("save", [](const ScorerModel& self, const std::filesystem::path& p) { save_model(self, p); },
             py::arg("path"))
        .def("score", [](const ScorerModel& self, const std::string& text) { return score_text(self, text); },
             py::arg("text"))
        .def("score_many",
             [](const ScorerModel& self, const std::vector<std::string>& texts) { return score_texts(self, texts); },
             py::arg("texts"))
        .def("encode",
             [](const ScorerModel& self, const std::string& text) {
                 return self.encoder.encode(model_view(self, text));
             },
             py::arg("text"))
        .def_property_readonly("config_json", [](const ScorerModel& self) { return to_json(self.config).dump(); })
        .def("__eq__", [](const ScorerModel& a, const ScorerModel& b) { return a == b; });

    m.def(
        "train",
        [](const std::vector<Entry>& entries, const std::vector<std::pair<std::string, std::string>>& docs,
           const std::string& config_json) {
            auto config = parse_config(config_json);
            auto dict = to_dictionary(entries, config.lowercase);
            auto corpus = to_corpus(docs);
            py::gil_scoped_release release;
            auto result = train(dict, corpus, config);
            return std::make_pair(std::move(result.model), result.pool.spans.size());
        },
        py::arg("entries"), py::arg("documents"), py::arg("config_json") = "");

    m.def(
        "predict",
        [](const ScorerModel& model, const std::vector<std::pair<std::string, std::string>>& docs, double t_p,
           std::size_t m_s) {
            auto corpus = to_corpus(docs);
            py::gil_scoped_release release;
            return from_annotations(predict_corpus(model, corpus, t_p, m_s));
        },
        py::arg("model"), py::arg("documents"), py::arg("t_p"), py::arg("m_s"));

    m.def(
        "evaluate",
        [](const Annotations& pred, const Annotations& gold) {
            return prf_dict(evaluate(to_annotations(pred), to_annotations(gold)));
        },
        py::arg("predictions"), py::arg("gold"));

    m.def(
        "exact_match_baseline",
        [](const std::vector<Entry>& entries, const std::vector<std::pair<std::string, std::string>>& docs,
           bool lowercase) {
            return from_annotations(exact_match_baseline(to_dictionary(entries, lowercase), to_corpus(docs), lowercase));
        },
        py::arg("entries"), py::arg("documents"), py::arg("lowercase") = true);

    m.def(
        "bound",
        [](double kappa, double epsilon, double b, std::size_t s_total, std::size_t s_dict, double delta) {
            BoundInputs in;
            in.kappa = kappa;
            in.epsilon = epsilon;
            in.b = b;
            in.s_total = s_total;
            in.s_dict = s_dict;
            in.delta = delta;
            return to_json(generalization_bound(in)).dump();
        },
        py::arg("kappa"), py::arg("epsilon"), py::arg("b"), py::arg("s_total"), py::arg("s_dict"),
        py::arg("delta") = 0.05);
    m.def("loss_upper_bound", &loss_upper_bound);
    m.def("epsilon_net_estimate", &epsilon_net_estimate, py::arg("dict_embeddings"), py::arg("heldout_embeddings"));
    m.def(
        "empirical_error",
        [](const ScorerModel& model, const std::vector<Entry>& entries) {
            return empirical_error(model, to_dictionary(entries, model.config.lowercase));
        },
        py::arg("model"), py::arg("entries"));

    m.def(
        "synonym_distance",
        [](const ScorerModel& model, const std::vector<Entry>& entries, std::size_t n_pairs, std::uint64_t seed) {
            return synonym_distance_probe(model, to_dictionary(entries, model.config.lowercase), n_pairs, seed);
        },
        py::arg("model"), py::arg("entries"), py::arg("n_pairs") = 10000, py::arg("seed") = 0);
    m.def(
        "lipschitz",
        [](const ScorerModel& model, const std::vector<std::string>& texts, std::size_t n_draws, double sigma,
           std::uint64_t seed) { return lipschitz_probe(model, texts, n_draws, sigma, seed); },
        py::arg("model"), py::arg("texts"), py::arg("n_draws") = 16, py::arg("sigma") = 0.1, py::arg("seed") = 0);

    m.def(
        "synthetic",
        [](std::size_t concepts, std::size_t documents, std::uint64_t seed) {
            SyntheticOptions opts;
            opts.concepts = concepts;
            opts.documents = documents;
            opts.seed = seed;
            auto data = make_synthetic(opts);
            py::dict d;
            d["lexicon"] = from_dictionary(data.lexicon);
            d["dictionary"] = from_dictionary(data.dictionary);
            d["heldout"] = from_dictionary(data.heldout);
            d["corpus"] = from_corpus(data.corpus);
            d["gold"] = from_annotations(data.gold);
            return d;
        },
        py::arg("concepts") = SyntheticOptions{}.concepts, py::arg("documents") = SyntheticOptions{}.documents,
        py::arg("seed") = SyntheticOptions{}.seed);

    m.def(
        "load_dictionary",
        [](const std::filesystem::path& p, bool lowercase) { return from_dictionary(load_dictionary(p, lowercase)); },
        py::arg("path"), py::arg("lowercase") = true);
    m.def("load_corpus", [](const std::filesystem::path& p) { return from_corpus(load_corpus(p, true)); },
          py::arg("path"));
    m.def("load_annotations", [](const std::filesystem::path& p) { return from_annotations(load_annotations(p)); },
          py::arg("path"));
}
