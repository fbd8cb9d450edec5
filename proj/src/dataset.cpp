#include "fewlabel/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "fewlabel/errors.hpp"
#include "fewlabel/io.hpp"
#include "fewlabel/rng.hpp"
#include "fewlabel/text.hpp"

namespace fewlabel {

namespace {

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace

TokenizedDoc make_doc(const RawRecord& record) {
    if (record.id.empty()) throw DataError("document has empty id");
    if (is_blank(record.text)) throw DataError("document has empty text: " + record.id);
    TokenizedDoc doc;
    doc.id = record.id;
    doc.tokens = tokenize(normalize_text(record.text));
    doc.label = record.label;
    if (doc.tokens.empty()) throw DataError("document produced no tokens: " + record.id);
    return doc;
}

Dataset make_dataset(std::vector<TokenizedDoc> docs) {
    std::set<std::string> labels;
    for (const auto& d : docs) {
        if (d.label) labels.insert(*d.label);
    }
    Dataset ds;
    ds.docs = std::move(docs);
    ds.classes.assign(labels.begin(), labels.end());
    return ds;
}

Dataset load_dataset(const std::string& path, bool require_labels) {
    const auto lines = read_lines(path);
    std::vector<TokenizedDoc> docs;
    docs.reserve(lines.size());
    std::unordered_set<std::string> seen_ids;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (is_blank(line)) continue;
        const std::string where = path + ":" + std::to_string(i + 1);
        nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object()) throw DataError(where + ": malformed JSON record");

        RawRecord rec;
        if (!j.contains("id") || !j["id"].is_string()) throw DataError(where + ": missing string field \"id\"");
        rec.id = j["id"].get<std::string>();
        if (rec.id.empty()) throw DataError(where + ": empty id");
        if (!j.contains("text") || !j["text"].is_string()) throw DataError(where + ": missing string field \"text\"");
        rec.text = j["text"].get<std::string>();
        if (is_blank(rec.text)) throw DataError(where + ": empty text");
        if (j.contains("label") && !j["label"].is_null()) {
            if (!j["label"].is_string()) throw DataError(where + ": label must be a string or null");
            rec.label = j["label"].get<std::string>();
            if (rec.label->empty()) throw DataError(where + ": empty label");
        }
        if (require_labels && !rec.label) throw DataError(where + ": missing label for id " + rec.id);
        if (!seen_ids.insert(rec.id).second) throw DataError(where + ": duplicate id " + rec.id);
        docs.push_back(make_doc(rec));
    }
    return make_dataset(std::move(docs));
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::string out;
    for (const auto& d : dataset.docs) {
        nlohmann::json j;
        j["id"] = d.id;
        j["text"] = detokenize(d.tokens);
        if (d.label) {
            j["label"] = *d.label;
        } else {
            j["label"] = nullptr;
        }
        out += j.dump();
        out += '\n';
    }
    write_text_file(path, out);
}

SplitResult stratified_split(const Dataset& dataset, const SplitSpec& spec) {
    if (spec.train_n < 0 || spec.valid_n < 0 || spec.test_n < 0) {
        throw DataError("split counts must be non-negative");
    }
    const std::size_t need = static_cast<std::size_t>(spec.train_n) + spec.valid_n + spec.test_n;
    if (need == 0) throw DataError("split requires at least one document per class");

    std::map<std::string, std::size_t> class_index;
    for (std::size_t k = 0; k < dataset.classes.size(); ++k) class_index[dataset.classes[k]] = k;

    std::vector<std::vector<std::size_t>> per_class(dataset.classes.size());
    for (std::size_t i = 0; i < dataset.docs.size(); ++i) {
        const auto& d = dataset.docs[i];
        if (!d.label) continue;
        auto it = class_index.find(*d.label);
        if (it == class_index.end()) throw DataError("label outside class list: " + *d.label);
        per_class[it->second].push_back(i);
    }

    std::string deficient;
    for (std::size_t k = 0; k < per_class.size(); ++k) {
        if (per_class[k].size() < need) {
            if (!deficient.empty()) deficient += ", ";
            deficient += dataset.classes[k] + " (need " + std::to_string(need) +
                         ", have " + std::to_string(per_class[k].size()) + ")";
        }
    }
    if (!deficient.empty()) throw DataError("not enough documents for split: " + deficient);

    Rng rng(spec.seed);
    SplitResult result;
    result.train.classes = dataset.classes;
    result.valid.classes = dataset.classes;
    result.test.classes = dataset.classes;
    for (auto& ids : per_class) {
        rng.shuffle(ids);
        std::size_t pos = 0;
        for (int i = 0; i < spec.train_n; ++i) result.train.docs.push_back(dataset.docs[ids[pos++]]);
        for (int i = 0; i < spec.valid_n; ++i) result.valid.docs.push_back(dataset.docs[ids[pos++]]);
        for (int i = 0; i < spec.test_n; ++i) result.test.docs.push_back(dataset.docs[ids[pos++]]);
    }
    return result;
}

} // namespace fewlabel
