// syngen command line: train, predict, eval, bound, sweep, probe, synth.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "syngen/bound.hpp"
#include "syngen/config.hpp"
#include "syngen/evaluation.hpp"
#include "syngen/inference.hpp"
#include "syngen/negative_miner.hpp"
#include "syngen/scorer.hpp"
#include "syngen/synthetic.hpp"
#include "syngen/text.hpp"
#include "syngen/training.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace syngen;

namespace {

// Bad flags or config values. Exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigFlags {
    std::string path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::optional<double> alpha, beta, lr, t_d, t_p;
    std::optional<std::size_t> m_s;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", path, "JSON run config");
        cmd->add_option("--seed", seed, "override config seed");
        cmd->add_option("--epochs", epochs);
        cmd->add_option("--alpha", alpha, "synonym distance weight");
        cmd->add_option("--beta", beta, "noise perturbation weight");
        cmd->add_option("--lr", lr);
        cmd->add_option("--t-d", t_d, "negative filtering threshold (default: calibrated)");
        cmd->add_option("--t_p", t_p, "score threshold");
        cmd->add_option("--m_s", m_s, "max span length in tokens");
    }

    // File, then flags, then SYNGEN_SEED.
    RunConfig resolve() const {
        try {
            RunConfig c = path.empty() ? RunConfig{} : load_config(path);
            if (seed) c.seed = *seed;
            if (epochs) c.epochs = *epochs;
            if (alpha) c.alpha = *alpha;
            if (beta) c.beta = *beta;
            if (lr) c.lr = *lr;
            if (t_d) c.t_d = *t_d;
            if (t_p) c.t_p = *t_p;
            if (m_s) c.m_s = *m_s;
            apply_seed_override(c);
            c.validate();
            return c;
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
};

std::string log_jsonl(const std::vector<EpochLog>& log) {
    std::string out;
    for (const auto& e : log) {
        out += json{{"epoch", e.epoch},
                    {"steps", e.steps},
                    {"loss", e.total},
                    {"classification", e.classification},
                    {"sdr", e.sdr},
                    {"npr", e.npr}}
                   .dump();
        out += '\n';
    }
    return out;
}

std::vector<double> parse_ratios(const std::string& text) {
    std::vector<double> ratios;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            double r = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            if (!(r > 0.0 && r <= 1.0)) throw UsageError("ratio " + item + " is outside (0, 1]");
            ratios.push_back(r);
        } catch (const std::logic_error&) {
            throw UsageError("cannot parse ratio '" + item + "'");
        }
    }
    if (ratios.empty()) throw UsageError("--ratios is empty");
    std::sort(ratios.begin(), ratios.end());
    return ratios;
}

std::vector<EmbeddingVector> encode_all(const ScorerModel& model, const Dictionary& dict) {
    std::vector<EmbeddingVector> out;
    for (const auto& entry : dict.entries()) out.push_back(model.encoder.encode(model_view(model, entry.surface)));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dictionary-only named entity recognition"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "train a span scorer from a dictionary and a raw corpus");
    std::string dict_path, corpus_path, out_path, pool_path, log_path;
    ConfigFlags train_flags;
    train_cmd->add_option("--dict", dict_path, "dictionary TSV")->required();
    train_cmd->add_option("--corpus", corpus_path, "corpus JSONL")->required();
    train_cmd->add_option("--out", out_path, "checkpoint path")->required();
    train_cmd->add_option("--pool", pool_path, "negative pool path (default <out>.pool.jsonl)");
    train_cmd->add_option("--log", log_path, "per-epoch log path (default <out>.log.jsonl)");
    train_flags.attach(train_cmd);

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "extract entities from a corpus");
    std::string model_path, input_path, output_path;
    std::optional<double> predict_t_p;
    std::optional<std::size_t> predict_m_s;
    predict_cmd->add_option("--model", model_path)->required();
    predict_cmd->add_option("--input", input_path, "corpus JSONL")->required();
    predict_cmd->add_option("--output", output_path, "predictions JSONL")->required();
    predict_cmd->add_option("--t_p", predict_t_p, "score threshold (default: checkpoint config)");
    predict_cmd->add_option("--m_s", predict_m_s, "max span length (default: checkpoint config)");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "span-level exact-match precision/recall/F1");
    std::string pred_path, gold_path;
    eval_cmd->add_option("--pred", pred_path)->required();
    eval_cmd->add_option("--gold", gold_path)->required();

    // bound
    auto* bound_cmd = app.add_subcommand("bound", "synonym generalization bound");
    BoundInputs bound_in;
    std::optional<double> kappa, epsilon, b;
    std::optional<std::size_t> s_total, s_dict;
    std::string heldout_path, bound_dict_path, bound_model_path;
    std::size_t probe_draws = 16;
    bound_cmd->add_option("--kappa", kappa);
    bound_cmd->add_option("--epsilon", epsilon);
    bound_cmd->add_option("--b", b);
    bound_cmd->add_option("--s-total", s_total);
    bound_cmd->add_option("--s-dict", s_dict);
    bound_cmd->add_option("--delta", bound_in.delta, "failure probability in (0, 1)");
    bound_cmd->add_option("--model", bound_model_path, "estimate kappa, epsilon and R from a checkpoint");
    bound_cmd->add_option("--dict", bound_dict_path);
    bound_cmd->add_option("--heldout", heldout_path, "surfaces outside the dictionary (TSV)");
    bound_cmd->add_option("--draws", probe_draws, "noise draws per text for the kappa estimate");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "few-shot dictionary-size sweep");
    std::string sweep_dict, sweep_corpus, sweep_gold, sweep_out, ratios_text;
    ConfigFlags sweep_flags;
    sweep_cmd->add_option("--dict", sweep_dict)->required();
    sweep_cmd->add_option("--corpus", sweep_corpus)->required();
    sweep_cmd->add_option("--gold", sweep_gold)->required();
    sweep_cmd->add_option("--ratios", ratios_text, "comma separated, e.g. 0.2,0.5,1.0")->required();
    sweep_cmd->add_option("--out", sweep_out, "CSV path")->required();
    sweep_flags.attach(sweep_cmd);

    // probe
    auto* probe_cmd = app.add_subcommand("probe", "synonym distance and Lipschitz probes as JSON");
    std::string probe_model, probe_dict;
    std::size_t probe_pairs = 10000;
    std::uint64_t probe_seed = 0;
    probe_cmd->add_option("--model", probe_model)->required();
    probe_cmd->add_option("--dict", probe_dict)->required();
    probe_cmd->add_option("--pairs", probe_pairs);
    probe_cmd->add_option("--draws", probe_draws);
    probe_cmd->add_option("--seed", probe_seed);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "write the synthetic benchmark");
    std::string synth_dir;
    SyntheticOptions synth_opts;
    synth_cmd->add_option("--out", synth_dir, "output directory")->required();
    synth_cmd->add_option("--concepts", synth_opts.concepts);
    synth_cmd->add_option("--documents", synth_opts.documents);
    synth_cmd->add_option("--seed", synth_opts.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*train_cmd) {
            RunConfig config = train_flags.resolve();
            auto dict = load_dictionary(dict_path, config.lowercase);
            auto corpus = load_corpus(corpus_path);
            auto result = train(dict, corpus, config, [](const EpochLog& e) {
                std::fprintf(stderr, "epoch %zu loss %.6f\n", e.epoch, e.total);
            });
            save_model(result.model, out_path);
            save_pool(result.pool, pool_path.empty() ? out_path + ".pool.jsonl" : pool_path);
            write_file_atomic(log_path.empty() ? out_path + ".log.jsonl" : log_path, log_jsonl(result.log));
        } else if (*predict_cmd) {
            auto model = load_model(model_path);
            double t_p = predict_t_p.value_or(model.config.t_p);
            std::size_t m_s = predict_m_s.value_or(model.config.m_s);
            if (!(t_p > 0.0 && t_p < 1.0)) throw UsageError("--t_p must be in (0, 1)");
            if (m_s < 1) throw UsageError("--m_s must be >= 1");
            auto corpus = load_corpus(input_path, true);
            std::ostringstream out;
            write_annotations(out, predict_corpus(model, corpus, t_p, m_s));
            write_file_atomic(output_path, out.str());
        } else if (*eval_cmd) {
            auto s = evaluate(load_annotations(pred_path), load_annotations(gold_path));
            std::cout << json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                              {"tp", s.tp},               {"fp", s.fp},         {"fn", s.fn}}
                             .dump()
                      << "\n";
        } else if (*bound_cmd) {
            const bool estimate = !bound_model_path.empty();
            if (estimate) {
                if (bound_dict_path.empty() || heldout_path.empty()) {
                    throw UsageError("estimator mode needs --model, --dict and --heldout");
                }
                auto model = load_model(bound_model_path);
                auto dict = load_dictionary(bound_dict_path, model.config.lowercase);
                auto heldout = load_dictionary(heldout_path, model.config.lowercase);
                auto dict_vecs = encode_all(model, dict);
                auto held_vecs = encode_all(model, heldout);
                std::vector<std::string> texts = dict.surfaces();
                for (const auto& s : heldout.surfaces()) texts.push_back(s);
                bound_in.epsilon = epsilon.value_or(epsilon_net_estimate(dict_vecs, held_vecs));
                bound_in.kappa = kappa.value_or(
                    lipschitz_probe(model, texts, probe_draws, model.config.noise_sigma, model.config.seed));
                bound_in.b = b.value_or(loss_upper_bound());
                bound_in.s_dict = s_dict.value_or(dict.size());
                bound_in.s_total = s_total.value_or(dict.size() + heldout.size());
                try {
                    bound_in.validate();
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
                auto report = generalization_bound(bound_in);
                report.estimated = true;
                auto j = to_json(report);
                j["empirical_error"] = empirical_error(model, dict);
                std::cout << j.dump() << "\n";
            } else {
                if (!kappa || !epsilon || !b || !s_total || !s_dict) {
                    throw UsageError("give --kappa --epsilon --b --s-total --s-dict, or --model --dict --heldout");
                }
                bound_in.kappa = *kappa;
                bound_in.epsilon = *epsilon;
                bound_in.b = *b;
                bound_in.s_total = *s_total;
                bound_in.s_dict = *s_dict;
                try {
                    bound_in.validate();
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
                std::cout << to_json(generalization_bound(bound_in)).dump() << "\n";
            }
        } else if (*sweep_cmd) {
            RunConfig config = sweep_flags.resolve();
            auto ratios = parse_ratios(ratios_text);
            auto dict = load_dictionary(sweep_dict, config.lowercase);
            auto corpus = load_corpus(sweep_corpus);
            auto gold = load_annotations(sweep_gold);
            write_file_atomic(sweep_out, sweep_csv(few_shot_sweep(dict, corpus, gold, ratios, config)));
        } else if (*probe_cmd) {
            auto model = load_model(probe_model);
            auto dict = load_dictionary(probe_dict, model.config.lowercase);
            std::cout << json{{"synonym_distance", synonym_distance_probe(model, dict, probe_pairs, probe_seed)},
                              {"lipschitz", lipschitz_probe(model, dict.surfaces(), probe_draws,
                                                            model.config.noise_sigma, probe_seed)},
                              {"alpha", model.config.alpha},
                              {"beta", model.config.beta},
                              {"seed", model.config.seed}}
                             .dump()
                      << "\n";
        } else if (*synth_cmd) {
            save_synthetic(make_synthetic(synth_opts), synth_dir);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
