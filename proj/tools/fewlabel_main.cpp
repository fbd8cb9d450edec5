// Command-line pipeline: preprocess -> split -> train-embeddings / tfidf ->
// augment -> featurize -> train / train-uda -> evaluate -> report-compare,
// plus predict and serve over a saved model.
//
// Every artifact-producing subcommand also writes "<first output>.manifest.json"
// recording the exact argv, the seed and content hashes of all inputs and
// outputs, so a run can be checked for byte-level reproducibility.
//
// Exit codes: 0 success, 1 usage error, 2 data/contract error, 3 numeric
// failure during training.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fewlabel/augment.hpp"
#include "fewlabel/dataset.hpp"
#include "fewlabel/embedding.hpp"
#include "fewlabel/errors.hpp"
#include "fewlabel/features_io.hpp"
#include "fewlabel/grid.hpp"
#include "fewlabel/io.hpp"
#include "fewlabel/layers.hpp"
#include "fewlabel/metrics.hpp"
#include "fewlabel/model.hpp"
#include "fewlabel/model_io.hpp"
#include "fewlabel/predictor.hpp"
#include "fewlabel/report.hpp"
#include "fewlabel/serve.hpp"
#include "fewlabel/tfidf.hpp"
#include "fewlabel/translate.hpp"
#include "fewlabel/uda.hpp"
#include "fewlabel/vocab.hpp"

namespace {

using namespace fewlabel;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Run manifests

struct RunContext {
    std::vector<std::string> argv;
};

// Features files carry a metadata sidecar; hash it with its parent so the
// manifest covers everything the command actually read or wrote.
void push_with_sidecar(std::vector<std::string>& paths, const std::string& path) {
    paths.push_back(path);
    const std::string meta = path + ".meta.json";
    if (std::filesystem::exists(meta)) paths.push_back(meta);
}

void write_manifest(const RunContext& ctx, const std::string& command,
                    std::optional<std::uint64_t> seed, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    json manifest;
    manifest["schema_version"] = 1;
    manifest["command"] = command;
    manifest["argv"] = ctx.argv;
    if (seed) {
        manifest["seed"] = *seed;
    } else {
        manifest["seed"] = nullptr;
    }
    json in = json::object();
    for (const auto& path : inputs) in[path] = file_content_hash(path);
    json out = json::object();
    for (const auto& path : outputs) out[path] = file_content_hash(path);
    manifest["inputs"] = in;
    manifest["outputs"] = out;
    write_text_file(outputs.front() + ".manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// JSON config file: {"seed": <global>, "<subcommand>": {"<flag name>": value}}.
// The file is translated into command-line tokens appended after the user's
// own, skipping options the user already passed, so explicit flags always win
// and CLI11 applies the same conversion and validation to both sources.

std::vector<std::string> config_tokens(const std::string& path, CLI::App& app,
                                       const std::string& subcommand,
                                       const std::vector<std::string>& user_args) {
    json config;
    try {
        config = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw DataError("config " + path + ": " + e.what());
    }
    if (!config.is_object()) throw DataError("config " + path + ": top level must be an object");

    auto user_passed = [&user_args](const std::string& flag) {
        return std::any_of(user_args.begin(), user_args.end(), [&flag](const std::string& token) {
            return token == flag || token.rfind(flag + "=", 0) == 0;
        });
    };

    std::vector<std::string> tokens;
    for (const auto& [section, body] : config.items()) {
        if (section == "seed") {
            if (!body.is_number_integer() && !body.is_number_unsigned())
                throw DataError("config " + path + ": seed must be a nonnegative integer");
            if (body.is_number_integer() && body.get<long long>() < 0)
                throw DataError("config " + path + ": seed must be a nonnegative integer");
            continue;
        }
        CLI::App* cmd = app.get_subcommand_no_throw(section);
        if (cmd == nullptr) throw DataError("config " + path + ": unknown section: " + section);
        if (!body.is_object())
            throw DataError("config " + path + ": section " + section + " must be an object");
        for (const auto& [key, value] : body.items()) {
            const std::string flag = "--" + key;
            const CLI::Option* option = cmd->get_option_no_throw(flag);
            if (option == nullptr)
                throw DataError("config " + path + ": unknown key: " + section + "." + key);
            if (section != subcommand) continue; // validated, but not for this run
            if (key == "set") {
                // Hyper-parameter block; merged under any --set flags so the
                // command line still overrides per parameter.
                if (!value.is_object())
                    throw DataError("config " + path + ": " + section + ".set must be an object");
                for (const auto& [name, entry] : value.items()) {
                    if (!entry.is_number())
                        throw DataError("config " + path + ": " + section + ".set." + name +
                                        " must be a number");
                    tokens.insert(tokens.end(), {"--config-set", name + "=" + entry.dump()});
                }
                continue;
            }
            if (user_passed(flag)) continue;
            if (option->get_type_size() == 0) { // boolean flag
                if (!value.is_boolean())
                    throw DataError("config " + path + ": " + section + "." + key +
                                    " expects true or false");
                if (value.get<bool>()) tokens.push_back(flag);
            } else if (value.is_string()) {
                tokens.insert(tokens.end(), {flag, value.get<std::string>()});
            } else if (value.is_number() || value.is_boolean()) {
                tokens.insert(tokens.end(), {flag, value.dump()});
            } else {
                throw DataError("config " + path + ": " + section + "." + key +
                                " has an unsupported value type");
            }
        }
    }

    // The global seed reaches any seeded subcommand that got no closer value.
    if (config.contains("seed") && !subcommand.empty()) {
        CLI::App* cmd = app.get_subcommand_no_throw(subcommand);
        const bool section_has_seed =
            config.contains(subcommand) && config[subcommand].contains("seed");
        if (cmd != nullptr && cmd->get_option_no_throw("--seed") != nullptr &&
            !user_passed("--seed") && !section_has_seed)
            tokens.insert(tokens.end(), {"--seed", config["seed"].dump()});
    }
    return tokens;
}

// ---------------------------------------------------------------------------
// TF-IDF table artifact: document frequencies plus the vocabulary snapshot the
// augmenter needs, as one JSON file.

void save_tfidf_table(const std::string& path, const TfIdfTable& table, const Vocabulary& vocab) {
    json file;
    file["schema_version"] = 1;
    file["doc_count"] = table.doc_count;
    json df = json::object();
    for (const auto& [token, count] : table.df) df[token] = count;
    file["df"] = df;
    file["min_count"] = vocab.min_count;
    json entries = json::array();
    for (std::size_t i = 0; i < vocab.tokens.size(); ++i)
        entries.push_back(json::array({vocab.tokens[i], vocab.counts[i]}));
    file["vocab"] = entries;
    write_text_file(path, file.dump(2) + "\n");
}

std::pair<TfIdfTable, Vocabulary> load_tfidf_table(const std::string& path) {
    json file;
    try {
        file = json::parse(read_text_file(path));
        if (file.value("schema_version", 0) != 1)
            throw DataError("tfidf table " + path + ": unsupported schema_version");
        TfIdfTable table;
        table.doc_count = file.at("doc_count").get<long long>();
        if (table.doc_count < 1) throw DataError("tfidf table " + path + ": doc_count must be >= 1");
        for (const auto& [token, count] : file.at("df").items()) {
            const long long value = count.get<long long>();
            if (value < 1 || value > table.doc_count)
                throw DataError("tfidf table " + path + ": df out of range for token: " + token);
            table.df[token] = value;
        }
        Vocabulary vocab;
        vocab.min_count = file.at("min_count").get<int>();
        for (const json& entry : file.at("vocab")) {
            if (!entry.is_array() || entry.size() != 2)
                throw DataError("tfidf table " + path + ": vocab entries must be [token, count]");
            vocab.index[entry[0].get<std::string>()] = static_cast<int>(vocab.tokens.size());
            vocab.tokens.push_back(entry[0].get<std::string>());
            vocab.counts.push_back(entry[1].get<long long>());
        }
        return {std::move(table), std::move(vocab)};
    } catch (const json::exception& e) {
        throw DataError("tfidf table " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Small shared helpers

std::string format_params(const ParamMap& params) {
    std::string out;
    for (const auto& [name, value] : params) {
        if (!out.empty()) out += " ";
        out += name + "=" + json(value).dump();
    }
    return out.empty() ? "(defaults)" : out;
}

double training_accuracy(const Model& model, const FeatureMatrix& data) {
    const std::vector<int> preds = model_predict(model, data.rows);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] == data.labels[i]) ++hits;
    return preds.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(preds.size());
}

ParamMap merge_param_assignments(ParamMap base, const std::vector<std::string>& assignments) {
    for (const auto& text : assignments) {
        const auto eq = text.find('=');
        base[text.substr(0, eq)] = std::stod(text.substr(eq + 1));
    }
    return base;
}

// Validates "--set name=value" at parse time so malformed assignments are
// usage errors, not data errors.
const CLI::Validator kParamAssignment(
    [](std::string& text) -> std::string {
        const auto eq = text.find('=');
        if (eq == std::string::npos || eq == 0) return "expected name=value, got: " + text;
        try {
            std::size_t used = 0;
            std::stod(text.substr(eq + 1), &used);
            if (used != text.size() - eq - 1) return "value is not a number: " + text;
        } catch (const std::exception&) {
            return "value is not a number: " + text;
        }
        return {};
    },
    "NAME=NUM");

const CLI::Validator kTopkList(
    [](std::string& text) -> std::string {
        if (text.empty()) return std::string("expected comma-separated positive integers");
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto comma = text.find(',', start);
            const std::string item =
                text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos ||
                std::stoll(item) < 1)
                return "expected comma-separated positive integers, got: " + text;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return {};
    },
    "K[,K...]");

std::vector<int> parse_topk(const std::string& text) {
    std::vector<int> ks;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        ks.push_back(std::stoi(
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return ks;
}

// ---------------------------------------------------------------------------
// Subcommand runners

struct PreprocessOpts {
    std::string input, output;
    bool require_labels = false;
};

void run_preprocess(const PreprocessOpts& o, const RunContext& ctx) {
    Dataset dataset = load_dataset(o.input, o.require_labels);
    save_dataset(dataset, o.output);
    write_manifest(ctx, "preprocess", std::nullopt, {o.input}, {o.output});
    std::printf("preprocess: %zu documents, %zu classes -> %s\n", dataset.docs.size(),
                dataset.classes.size(), o.output.c_str());
}

struct SplitOpts {
    std::string input, out_train, out_valid, out_test;
    int train_n = 70, valid_n = 30, test_n = 30;
    std::uint64_t seed = 1;
};

void run_split(const SplitOpts& o, const RunContext& ctx) {
    Dataset dataset = load_dataset(o.input, true);
    SplitResult result = stratified_split(dataset, SplitSpec{o.train_n, o.valid_n, o.test_n, o.seed});
    save_dataset(result.train, o.out_train);
    save_dataset(result.valid, o.out_valid);
    save_dataset(result.test, o.out_test);
    write_manifest(ctx, "split", o.seed, {o.input}, {o.out_train, o.out_valid, o.out_test});
    std::printf("split: %zu / %zu / %zu documents\n", result.train.docs.size(),
                result.valid.docs.size(), result.test.docs.size());
}

struct EmbedOpts {
    std::string input, output;
    SkipGramConfig cfg;
};

void run_train_embeddings(const EmbedOpts& o, const RunContext& ctx) {
    Dataset dataset = load_dataset(o.input, false);
    EmbeddingMatrix embeddings = train_skipgram(dataset.docs, o.cfg);
    write_embeddings(embeddings, o.output);
    write_manifest(ctx, "train-embeddings", o.cfg.seed, {o.input}, {o.output});
    std::printf("train-embeddings: %d tokens, dim %d -> %s\n", embeddings.vocab.size(),
                embeddings.dim(), o.output.c_str());
}

struct TfidfOpts {
    std::string input, output;
    int min_count = 1;
};

void run_tfidf(const TfidfOpts& o, const RunContext& ctx) {
    Dataset dataset = load_dataset(o.input, false);
    TfIdfTable table = compute_tfidf(dataset.docs);
    Vocabulary vocab = build_vocab(dataset.docs, o.min_count);
    save_tfidf_table(o.output, table, vocab);
    write_manifest(ctx, "tfidf", std::nullopt, {o.input}, {o.output});
    std::printf("tfidf: %lld documents, %d vocabulary tokens -> %s\n", table.doc_count,
                vocab.size(), o.output.c_str());
}

struct AugmentOpts {
    std::string input, output, strategy, table_path;
    std::string translator = "mock", source_lang = "pt", pivot_lang = "en", endpoint;
    AugmentConfig cfg;
};

void run_augment(const AugmentOpts& o, const RunContext& ctx) {
    Dataset dataset = load_dataset(o.input, false);
    std::vector<std::string> inputs = {o.input};
    Dataset augmented;
    if (o.strategy == "tfidf-replace") {
        if (o.table_path.empty()) throw CLI::RequiredError("--tfidf (augment tfidf-replace)");
        auto [table, vocab] = load_tfidf_table(o.table_path);
        inputs.push_back(o.table_path);
        AugmentDeps deps;
        deps.table = &table;
        deps.vocab = &vocab;
        augmented = augment_dataset(dataset, AugmentStrategy::TfIdfReplace, deps, o.cfg);
    } else {
        std::unique_ptr<Translator> translator;
        if (o.translator == "mock") {
            translator = std::make_unique<MockTranslator>();
        } else {
            translator = translator_from_env(o.endpoint);
        }
        AugmentDeps deps;
        deps.translator = translator.get();
        deps.source_lang = o.source_lang;
        deps.pivot_lang = o.pivot_lang;
        augmented = augment_dataset(dataset, AugmentStrategy::BackTranslation, deps, o.cfg);
    }
    save_dataset(augmented, o.output);
    write_manifest(ctx, "augment", o.cfg.seed, inputs, {o.output});
    std::printf("augment: %zu -> %zu documents (%s)\n", dataset.docs.size(), augmented.docs.size(),
                o.strategy.c_str());
}

struct FeaturizeOpts {
    std::string input, output, mode, embeddings_path, layers_path;
    std::string strategy = "last";
};

void run_featurize(const FeaturizeOpts& o, const RunContext& ctx) {
    Dataset dataset = load_dataset(o.input, false);
    if (dataset.docs.empty()) throw DataError("featurize: dataset is empty: " + o.input);
    std::vector<std::string> inputs = {o.input};

    FeatureFile out;
    out.rows.resize(static_cast<Eigen::Index>(dataset.docs.size()), 0);
    if (o.mode == "embeddings") {
        if (o.embeddings_path.empty())
            throw CLI::RequiredError("--embeddings (featurize --mode embeddings)");
        EmbeddingMatrix embeddings = load_embeddings(o.embeddings_path);
        inputs.push_back(o.embeddings_path);
        out.rows.resize(out.rows.rows(), embeddings.dim());
        for (std::size_t i = 0; i < dataset.docs.size(); ++i)
            out.rows.row(static_cast<Eigen::Index>(i)) =
                doc_vector(dataset.docs[i].tokens, embeddings).transpose();
        out.featurizer.kind = "avg_embeddings";
        out.featurizer.embeddings = o.embeddings_path;
    } else {
        if (o.layers_path.empty()) throw CLI::RequiredError("--layers (featurize --mode layers)");
        const LayerStrategy strategy = parse_layer_strategy(o.strategy);
        std::vector<LayerFeatures> stacks = load_layer_features(o.layers_path);
        inputs.push_back(o.layers_path);
        std::unordered_map<std::string, const LayerFeatures*> by_id;
        for (const auto& stack : stacks) by_id[stack.id] = &stack;
        for (std::size_t i = 0; i < dataset.docs.size(); ++i) {
            const auto it = by_id.find(dataset.docs[i].id);
            if (it == by_id.end())
                throw DataError("featurize: no layer features for document " + dataset.docs[i].id);
            const Eigen::VectorXd vec = select_layers(*it->second, strategy);
            if (i == 0) out.rows.resize(out.rows.rows(), vec.size());
            if (vec.size() != out.rows.cols())
                throw DataError("featurize: inconsistent feature dimension for document " +
                                dataset.docs[i].id);
            out.rows.row(static_cast<Eigen::Index>(i)) = vec.transpose();
        }
        out.featurizer.kind = "layers";
        out.featurizer.strategy = layer_strategy_name(strategy);
    }

    for (const auto& doc : dataset.docs) {
        out.ids.push_back(doc.id);
        out.labels.push_back(doc.label.value_or(""));
        out.labeled.push_back(doc.label.has_value());
    }
    write_features(o.output, out);
    write_manifest(ctx, "featurize", std::nullopt, inputs, {o.output, o.output + ".meta.json"});
    std::printf("featurize: %zu documents, dim %lld -> %s\n", dataset.docs.size(),
                static_cast<long long>(out.rows.cols()), o.output.c_str());
}

struct TrainOpts {
    std::string features, output, model;
    bool grid = false;
    int folds = 5;
    std::vector<std::string> sets;        // --set flags
    std::vector<std::string> config_sets; // config-file "set" block (lower precedence)
    std::uint64_t seed = 1;
};

void run_train(const TrainOpts& o, const RunContext& ctx) {
    FeatureFile file = load_features(o.features);
    FeatureMatrix data = to_feature_matrix(file);
    const ModelKind kind = parse_model_kind(o.model);
    ParamMap params =
        merge_param_assignments(merge_param_assignments({}, o.config_sets), o.sets);

    if (o.grid) {
        GridSpec grid = default_grid(kind);
        grid.folds = o.folds;
        grid.seed = o.seed;
        GridSearchOutcome outcome = grid_search_cv(kind, data, grid);
        for (const auto& row : outcome.table)
            std::printf("  %s mean=%.4f std=%.4f\n", format_params(row.params).c_str(),
                        row.mean_accuracy, row.std_accuracy);
        params = outcome.best;
        std::printf("train: grid winner %s\n", format_params(params).c_str());
    }

    Model model = train_model(kind, data, params, o.seed);
    const double acc = training_accuracy(model, data);
    SavedModel saved;
    saved.model = std::move(model);
    saved.params = params;
    saved.featurizer = file.featurizer;
    save_model(o.output, saved);

    std::vector<std::string> inputs;
    push_with_sidecar(inputs, o.features);
    write_manifest(ctx, "train", o.seed, inputs, {o.output});
    std::printf("train: %s on %lld documents, training accuracy %.4f -> %s\n", o.model.c_str(),
                static_cast<long long>(data.n()), acc, o.output.c_str());
}

// Pairs every unlabeled document with its augmented counterpart by id suffix
// ("#aug" or "#bt"), the shape `augment` followed by `featurize` produces.
std::vector<UnlabeledPair> pair_unlabeled(const FeatureFile& file, const std::string& path) {
    auto base_of = [](const std::string& id) -> std::optional<std::string> {
        for (const std::string suffix : {"#aug", "#bt"}) {
            if (id.size() > suffix.size() &&
                id.compare(id.size() - suffix.size(), suffix.size(), suffix) == 0)
                return id.substr(0, id.size() - suffix.size());
        }
        return std::nullopt;
    };
    std::unordered_map<std::string, Eigen::Index> augmented;
    std::unordered_map<std::string, Eigen::Index> originals;
    for (std::size_t i = 0; i < file.ids.size(); ++i) {
        if (auto base = base_of(file.ids[i])) {
            augmented[*base] = static_cast<Eigen::Index>(i);
        } else {
            originals[file.ids[i]] = static_cast<Eigen::Index>(i);
        }
    }
    for (const auto& [base, row] : augmented)
        if (originals.count(base) == 0)
            throw DataError("train-uda: augmented document " +
                            file.ids[static_cast<std::size_t>(row)] + " has no original in " + path);
    std::vector<UnlabeledPair> pairs;
    for (std::size_t i = 0; i < file.ids.size(); ++i) {
        const std::string& id = file.ids[i];
        if (base_of(id)) continue;
        const auto it = augmented.find(id);
        if (it == augmented.end())
            throw DataError("train-uda: no augmented counterpart for document " + id + " in " + path);
        UnlabeledPair pair;
        pair.id = id;
        pair.original = file.rows.row(static_cast<Eigen::Index>(i)).transpose();
        pair.augmented = file.rows.row(it->second).transpose();
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

struct UdaOpts {
    std::string labeled, unlabeled, output;
    std::string tsa = "log";
    UdaConfig cfg;
};

void run_train_uda(const UdaOpts& o, const RunContext& ctx) {
    FeatureFile labeled_file = load_features(o.labeled);
    FeatureMatrix data = to_feature_matrix(labeled_file);
    FeatureFile unlabeled_file = load_features(o.unlabeled);
    std::vector<UnlabeledPair> pairs = pair_unlabeled(unlabeled_file, o.unlabeled);
    if (!pairs.empty() && pairs.front().original.size() != data.dim())
        throw DataError("train-uda: labeled dim " + std::to_string(data.dim()) +
                        " but unlabeled dim " + std::to_string(pairs.front().original.size()));

    UdaConfig cfg = o.cfg;
    cfg.schedule = parse_tsa(o.tsa);
    LinearModel model = train_uda(data, pairs, cfg);

    SavedModel saved;
    saved.model = std::move(model);
    saved.params = {{"total_steps", static_cast<double>(cfg.total_steps)},
                    {"lambda", cfg.lambda},
                    {"temperature", cfg.temperature},
                    {"confidence", cfg.confidence},
                    {"sup_batch", static_cast<double>(cfg.sup_batch)},
                    {"unsup_batch", static_cast<double>(cfg.unsup_batch)},
                    {"learning_rate", cfg.learning_rate}};
    saved.featurizer = labeled_file.featurizer;
    save_model(o.output, saved);

    std::vector<std::string> inputs;
    push_with_sidecar(inputs, o.labeled);
    push_with_sidecar(inputs, o.unlabeled);
    write_manifest(ctx, "train-uda", cfg.seed, inputs, {o.output});
    std::printf("train-uda: %lld labeled, %zu unlabeled pairs, tsa %s -> %s\n",
                static_cast<long long>(data.n()), pairs.size(), o.tsa.c_str(), o.output.c_str());
}

struct EvaluateOpts {
    std::string model, features, output;
    std::string topk = "1,3,5";
};

void run_evaluate(const EvaluateOpts& o, const RunContext& ctx) {
    SavedModel saved = load_model(o.model);
    FeatureFile file = load_features(o.features);
    if (file.rows.cols() != model_dim(saved.model))
        throw DataError("evaluate: features have dim " + std::to_string(file.rows.cols()) +
                        " but the model expects " + std::to_string(model_dim(saved.model)));

    const std::vector<std::string>& classes = model_classes(saved.model);
    const Eigen::MatrixXd scores = model_scores(saved.model, file.rows);
    std::vector<PredRanking> rankings;
    rankings.reserve(file.ids.size());
    std::map<std::string, std::string> preds;
    std::map<std::string, std::string> gold;
    for (std::size_t i = 0; i < file.ids.size(); ++i) {
        if (!file.labeled[i])
            throw DataError("evaluate: document " + file.ids[i] + " has no label");
        rankings.push_back(make_ranking(file.ids[i], classes,
                                        scores.row(static_cast<Eigen::Index>(i)).transpose()));
        preds[file.ids[i]] = rankings.back().ranked.front().first;
        gold[file.ids[i]] = file.labels[i];
    }

    EvalSummary summary = per_class_metrics(preds, gold, classes);
    std::map<int, double> acc_at;
    for (int k : parse_topk(o.topk)) acc_at[k] = accuracy_at_k(rankings, gold, k);

    write_text_file(o.output, evaluation_report_json(summary, acc_at));
    std::vector<std::string> inputs = {o.model};
    push_with_sidecar(inputs, o.features);
    write_manifest(ctx, "evaluate", std::nullopt, inputs, {o.output});

    std::printf("evaluate: accuracy %.4f, macro-f1 %.4f", summary.accuracy, summary.macro_f1);
    for (const auto& [k, value] : acc_at) std::printf(", acc@%d %.4f", k, value);
    std::printf(" -> %s\n", o.output.c_str());
}

struct CompareOpts {
    std::string report, audit, out_csv, out_svg;
};

void run_report_compare(const CompareOpts& o, const RunContext& ctx) {
    json report;
    try {
        report = json::parse(read_text_file(o.report));
    } catch (const json::exception& e) {
        throw DataError("report-compare: " + o.report + ": " + e.what());
    }
    if (!report.contains("per_class") || !report["per_class"].is_array())
        throw DataError("report-compare: " + o.report + " has no per_class array");

    // A class's accuracy is the fraction of its gold examples predicted
    // correctly, which is exactly its recall.
    std::map<std::string, double> model_accuracy;
    try {
        for (const json& entry : report["per_class"])
            model_accuracy[entry.at("class").get<std::string>()] = entry.at("recall").get<double>();
    } catch (const json::exception& e) {
        throw DataError("report-compare: " + o.report + ": " + e.what());
    }

    HumanAudit audit = load_audit_csv(o.audit);
    std::vector<ComparisonRow> rows = comparison_rows(model_accuracy, audit);
    write_text_file(o.out_csv, comparison_csv(rows));
    write_text_file(o.out_svg, comparison_svg(rows));
    write_manifest(ctx, "report-compare", std::nullopt, {o.report, o.audit}, {o.out_csv, o.out_svg});
    std::printf("report-compare: %s\n", comparison_summary(rows).c_str());
}

struct PredictOpts {
    std::string model, text;
    int k = 3;
};

void run_predict(const PredictOpts& o) {
    Predictor predictor(o.model);
    const PredRanking ranking = predictor.rank("cli", o.text);
    const int k = std::min(o.k, predictor.num_classes());
    for (int i = 0; i < k; ++i)
        std::printf("%s\t%s\n", ranking.ranked[static_cast<std::size_t>(i)].first.c_str(),
                    json(ranking.ranked[static_cast<std::size_t>(i)].second).dump().c_str());
}

struct ServeOpts {
    std::string model;
    std::string host = "127.0.0.1";
    int port = 8080;
};

void run_serve(const ServeOpts& o) {
    Predictor predictor(o.model);
    std::printf("serving %s on %s:%d\n", o.model.c_str(), o.host.c_str(), o.port);
    std::fflush(stdout);
    run_server(predictor, o.host, o.port);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"few-label text classification pipeline"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; command-line flags override it");

    RunContext ctx;
    for (int i = 0; i < argc; ++i) ctx.argv.emplace_back(argv[i]);

    PreprocessOpts preprocess;
    {
        CLI::App* cmd = app.add_subcommand("preprocess", "normalize and tokenize a raw JSONL dataset");
        cmd->fallthrough();
        cmd->add_option("--input", preprocess.input, "raw dataset JSONL")->required()->check(CLI::ExistingFile);
        cmd->add_option("--output", preprocess.output, "tokenized dataset JSONL")->required();
        cmd->add_flag("--require-labels", preprocess.require_labels, "reject unlabeled records");
        cmd->callback([&] { run_preprocess(preprocess, ctx); });
    }

    SplitOpts split;
    {
        CLI::App* cmd = app.add_subcommand("split", "stratified train/valid/test split with exact per-class counts");
        cmd->fallthrough();
        cmd->add_option("--input", split.input, "labeled dataset JSONL")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out-train", split.out_train)->required();
        cmd->add_option("--out-valid", split.out_valid)->required();
        cmd->add_option("--out-test", split.out_test)->required();
        cmd->add_option("--train-n", split.train_n, "per-class training count")->check(CLI::NonNegativeNumber);
        cmd->add_option("--valid-n", split.valid_n, "per-class validation count")->check(CLI::NonNegativeNumber);
        cmd->add_option("--test-n", split.test_n, "per-class test count")->check(CLI::NonNegativeNumber);
        cmd->add_option("--seed", split.seed, "sampling seed");
        cmd->callback([&] { run_split(split, ctx); });
    }

    EmbedOpts embed;
    {
        CLI::App* cmd = app.add_subcommand("train-embeddings", "train skip-gram word embeddings on a dataset");
        cmd->fallthrough();
        cmd->add_option("--input", embed.input, "dataset JSONL (labels optional)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--output", embed.output, "embedding text file")->required();
        cmd->add_option("--dim", embed.cfg.dim, "vector size")->check(CLI::PositiveNumber);
        cmd->add_option("--window", embed.cfg.window, "context window")->check(CLI::PositiveNumber);
        cmd->add_option("--min-count", embed.cfg.min_count, "minimum token count")->check(CLI::PositiveNumber);
        cmd->add_option("--negatives", embed.cfg.negatives, "negative samples per pair")->check(CLI::PositiveNumber);
        cmd->add_option("--epochs", embed.cfg.epochs, "passes over the corpus")->check(CLI::NonNegativeNumber);
        cmd->add_option("--lr", embed.cfg.learning_rate, "initial learning rate")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", embed.cfg.seed, "initialization and sampling seed");
        cmd->callback([&] { run_train_embeddings(embed, ctx); });
    }

    TfidfOpts tfidf;
    {
        CLI::App* cmd = app.add_subcommand("tfidf", "compute document frequencies and a vocabulary snapshot");
        cmd->fallthrough();
        cmd->add_option("--input", tfidf.input, "dataset JSONL")->required()->check(CLI::ExistingFile);
        cmd->add_option("--output", tfidf.output, "tf-idf table JSON")->required();
        cmd->add_option("--min-count", tfidf.min_count, "vocabulary count threshold")->check(CLI::PositiveNumber);
        cmd->callback([&] { run_tfidf(tfidf, ctx); });
    }

    AugmentOpts augment;
    {
        CLI::App* cmd = app.add_subcommand("augment", "double a dataset with synthetic counterparts");
        cmd->fallthrough();
        cmd->add_option("--input", augment.input, "dataset JSONL")->required()->check(CLI::ExistingFile);
        cmd->add_option("--output", augment.output, "augmented dataset JSONL")->required();
        cmd->add_option("--strategy", augment.strategy, "augmentation strategy")
            ->required()
            ->check(CLI::IsMember({"tfidf-replace", "back-translate"}));
        cmd->add_option("--tfidf", augment.table_path, "tf-idf table JSON (tfidf-replace)")->check(CLI::ExistingFile);
        cmd->add_option("--p-max", augment.cfg.p_max, "replacement probability ceiling")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--pool-fraction", augment.cfg.pool_fraction, "low-idf vocabulary fraction eligible as replacements")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--seed", augment.cfg.seed, "replacement sampling seed");
        cmd->add_option("--translator", augment.translator, "back-translation backend")
            ->check(CLI::IsMember({"mock", "http"}));
        cmd->add_option("--source", augment.source_lang, "source language code");
        cmd->add_option("--pivot", augment.pivot_lang, "pivot language code");
        cmd->add_option("--endpoint", augment.endpoint, "translator URL (defaults to TRANSLATOR_ENDPOINT)");
        cmd->callback([&] { run_augment(augment, ctx); });
    }

    FeaturizeOpts featurize;
    {
        CLI::App* cmd = app.add_subcommand("featurize", "turn documents into feature vectors");
        cmd->fallthrough();
        cmd->add_option("--input", featurize.input, "dataset JSONL")->required()->check(CLI::ExistingFile);
        cmd->add_option("--output", featurize.output, "features JSONL")->required();
        cmd->add_option("--mode", featurize.mode, "vector source")
            ->required()
            ->check(CLI::IsMember({"embeddings", "layers"}));
        cmd->add_option("--embeddings", featurize.embeddings_path, "embedding text file (embeddings mode)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--layers", featurize.layers_path, "precomputed layer features JSONL (layers mode)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--strategy", featurize.strategy, "layer selection")
            ->check(CLI::IsMember({"first", "last", "concat4"}));
        cmd->callback([&] { run_featurize(featurize, ctx); });
    }

    TrainOpts train;
    {
        CLI::App* cmd = app.add_subcommand("train", "train a supervised classifier on labeled features");
        cmd->fallthrough();
        cmd->add_option("--features", train.features, "labeled features JSONL")->required()->check(CLI::ExistingFile);
        cmd->add_option("--output", train.output, "model JSON")->required();
        cmd->add_option("--model", train.model, "classifier kind")
            ->required()
            ->check(CLI::IsMember({"logreg", "svm", "rf", "gb"}));
        cmd->add_flag("--grid", train.grid, "cross-validated search over the stock hyper-parameter grid");
        cmd->add_option("--folds", train.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
        cmd->add_option("--set", train.sets, "hyper-parameter assignment, e.g. --set l2=0.5")
            ->check(kParamAssignment);
        cmd->add_option("--config-set", train.config_sets)->check(kParamAssignment)->group("");
        cmd->add_option("--seed", train.seed, "training seed");
        cmd->callback([&] { run_train(train, ctx); });
    }

    UdaOpts uda;
    {
        CLI::App* cmd = app.add_subcommand(
            "train-uda", "semi-supervised training on labeled features plus augmented unlabeled pairs");
        cmd->fallthrough();
        cmd->add_option("--labeled", uda.labeled, "labeled features JSONL")->required()->check(CLI::ExistingFile);
        cmd->add_option("--unlabeled", uda.unlabeled,
                        "unlabeled features JSONL holding originals and their #aug/#bt counterparts")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--output", uda.output, "model JSON")->required();
        cmd->add_option("--tsa", uda.tsa, "training-signal annealing schedule")
            ->check(CLI::IsMember({"none", "linear", "exp", "log"}));
        cmd->add_option("--steps", uda.cfg.total_steps, "training steps")->check(CLI::PositiveNumber);
        cmd->add_option("--lambda", uda.cfg.lambda, "consistency loss weight")->check(CLI::NonNegativeNumber);
        cmd->add_option("--temp", uda.cfg.temperature, "target sharpening temperature")->check(CLI::PositiveNumber);
        cmd->add_option("--conf", uda.cfg.confidence, "minimum max-probability for a pair to count")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--sup-batch", uda.cfg.sup_batch, "labeled batch size")->check(CLI::PositiveNumber);
        cmd->add_option("--unsup-batch", uda.cfg.unsup_batch, "unlabeled batch size")->check(CLI::PositiveNumber);
        cmd->add_option("--lr", uda.cfg.learning_rate, "learning rate")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", uda.cfg.seed, "training seed");
        cmd->callback([&] { run_train_uda(uda, ctx); });
    }

    EvaluateOpts evaluate;
    {
        CLI::App* cmd = app.add_subcommand("evaluate", "score a model on labeled features and write a report");
        cmd->fallthrough();
        cmd->add_option("--model", evaluate.model, "model JSON")->required()->check(CLI::ExistingFile);
        cmd->add_option("--features", evaluate.features, "labeled features JSONL")->required()->check(CLI::ExistingFile);
        cmd->add_option("--output", evaluate.output, "report JSON")->required();
        cmd->add_option("--topk", evaluate.topk, "comma-separated k values for acc@k")->check(kTopkList);
        cmd->callback([&] { run_evaluate(evaluate, ctx); });
    }

    CompareOpts compare;
    {
        CLI::App* cmd = app.add_subcommand("report-compare",
                                           "compare per-class model accuracy against a human audit");
        cmd->fallthrough();
        cmd->add_option("--report", compare.report, "evaluation report JSON")->required()->check(CLI::ExistingFile);
        cmd->add_option("--audit", compare.audit, "human audit CSV")->required()->check(CLI::ExistingFile);
        cmd->add_option("--output-csv", compare.out_csv, "comparison table CSV")->required();
        cmd->add_option("--output-svg", compare.out_svg, "dumbbell chart SVG")->required();
        cmd->callback([&] { run_report_compare(compare, ctx); });
    }

    PredictOpts predict;
    {
        CLI::App* cmd = app.add_subcommand("predict", "rank classes for one document");
        cmd->fallthrough();
        cmd->add_option("--model", predict.model, "model JSON")->required()->check(CLI::ExistingFile);
        cmd->add_option("--text", predict.text, "document text")->required();
        cmd->add_option("--k", predict.k, "how many predictions to print")->check(CLI::PositiveNumber);
        cmd->callback([&] { run_predict(predict); });
    }

    ServeOpts serve;
    {
        CLI::App* cmd = app.add_subcommand("serve", "HTTP prediction endpoint over a saved model");
        cmd->fallthrough();
        cmd->add_option("--model", serve.model, "model JSON")->required()->check(CLI::ExistingFile);
        cmd->add_option("--host", serve.host, "bind address");
        cmd->add_option("--port", serve.port, "bind port")->check(CLI::Range(1, 65535));
        cmd->callback([&] { run_serve(serve); });
    }

    try {
        std::vector<std::string> args(argv + 1, argv + argc);

        // Locate --config and the subcommand; the only pre-subcommand tokens
        // are the top-level options, so the first other token names the
        // subcommand.
        std::string subcommand;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config") {
                if (i + 1 < args.size()) config_path = args[++i];
                continue;
            }
            if (args[i].rfind("--config=", 0) == 0) {
                config_path = args[i].substr(9);
                continue;
            }
            if (args[i].rfind('-', 0) == 0) continue;
            if (subcommand.empty()) subcommand = args[i];
        }
        if (!config_path.empty()) {
            const std::vector<std::string> extra = config_tokens(config_path, app, subcommand, args);
            args.insert(args.end(), extra.begin(), extra.end());
        }

        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
