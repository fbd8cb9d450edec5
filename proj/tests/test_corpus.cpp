#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "fewlabel/dataset.hpp"
#include "fewlabel/errors.hpp"
#include "fewlabel/rng.hpp"
#include "fewlabel/text.hpp"
#include "test_util.hpp"

using namespace fewlabel;

TEST_CASE("normalize_text replaces urls, emails and digit runs") {
    CHECK(normalize_text("Visite https://mp.br AGORA") == "visite URL agora");
    CHECK(normalize_text("Contato: joao@mp.br") == "contato: EMAIL");
    CHECK(normalize_text("ano 2019, processo 12345") == "ano 0, processo 0");
}

TEST_CASE("normalize_text handles case and accents") {
    CHECK(normalize_text("DENÚNCIA Grave") == "denúncia grave");
    CHECK(normalize_text("ÀÉÎÕÜ Ção") == "àéîõü ção");
    CHECK(normalize_text("WWW.site.com.br caiu") == "URL caiu");
    CHECK(normalize_text("HTTP://X.COM") == "URL");
}

TEST_CASE("normalize_text keeps sentinels whitespace-delimited") {
    // Matches glued to other characters must not merge into mixed-case tokens.
    CHECK(normalize_text("(https://x.com)") == "( URL");
    CHECK(normalize_text("mande p/joao@mp.br, ok?") == "mande EMAIL , ok?");
    auto toks = tokenize(normalize_text("Veja(www.a.br)JÁ ou a2b@c.de!"));
    for (const auto& t : toks) {
        bool has_upper = std::any_of(t.begin(), t.end(), [](unsigned char c) {
            return c >= 'A' && c <= 'Z';
        });
        if (has_upper) CHECK((t == "URL" || t == "EMAIL"));
    }
}

TEST_CASE("normalize_text is idempotent") {
    const char* samples[] = {
        "Visite https://mp.br AGORA",
        "Contato: joao@mp.br",
        "ano 2019, processo 12345",
        "DENÚNCIA contra www.empresa.com.br enviada a fulano@mp.gov.br em 12/03/2019!!",
        "URL e EMAIL já normalizados; resto segue 0 igual.",
        "",
    };
    for (const char* s : samples) {
        std::string once = normalize_text(s);
        CHECK(normalize_text(once) == once);
        // Tokenize + detokenize + normalize must also be stable.
        std::string again = normalize_text(detokenize(tokenize(once)));
        CHECK(tokenize(again) == tokenize(once));
    }
}

TEST_CASE("normalize_text output is free of digits runs and raw urls") {
    std::string out = normalize_text("pedido 123456 em www.a.b e x@y.com.br: 7 dias");
    CHECK(out.find("www.") == std::string::npos);
    CHECK(out.find('@') == std::string::npos);
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        bool both_digits = std::isdigit(static_cast<unsigned char>(out[i])) &&
                           std::isdigit(static_cast<unsigned char>(out[i + 1]));
        CHECK_FALSE(both_digits);
    }
}

TEST_CASE("tokenize splits punctuation into single-character tokens") {
    CHECK(tokenize("contato: EMAIL") == std::vector<std::string>{"contato", ":", "EMAIL"});
    CHECK(tokenize("a,b!c") == std::vector<std::string>{"a", ",", "b", "!", "c"});
    CHECK(tokenize("  espaços\t e\nlinhas ") == std::vector<std::string>{"espaços", "e", "linhas"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("ação über") == std::vector<std::string>{"ação", "über"});
}

TEST_CASE("detokenize joins with single spaces") {
    CHECK(detokenize({"a", ",", "b"}) == "a , b");
    CHECK(detokenize({}) == "");
}

TEST_CASE("make_doc applies the full text pipeline") {
    RawRecord rec{"d1", "Visite https://mp.br AGORA", std::string("saude")};
    TokenizedDoc doc = make_doc(rec);
    CHECK(doc.id == "d1");
    CHECK(doc.tokens == std::vector<std::string>{"visite", "URL", "agora"});
    CHECK(doc.label == "saude");
    CHECK_THROWS_AS(make_doc(RawRecord{"", "x", {}}), DataError);
    CHECK_THROWS_AS(make_doc(RawRecord{"d2", "   ", {}}), DataError);
}

TEST_CASE("load_dataset parses jsonl and validates records") {
    auto dir = test_dir("corpus");
    auto path = write_file(dir / "data.jsonl",
                           R"({"id":"a","text":"Primeiro DOC","label":"x"})"
                           "\n"
                           R"({"id":"b","text":"Segundo doc","label":null})"
                           "\n"
                           "\n"
                           R"({"id":"c","text":"Terceiro doc","label":"y"})"
                           "\n");
    Dataset ds = load_dataset(path);
    REQUIRE(ds.docs.size() == 3);
    CHECK(ds.docs[0].tokens == std::vector<std::string>{"primeiro", "doc"});
    CHECK_FALSE(ds.docs[1].label.has_value());
    CHECK(ds.classes == std::vector<std::string>{"x", "y"});

    CHECK_THROWS_AS(load_dataset(path, /*require_labels=*/true), DataError);
    CHECK_THROWS_AS(load_dataset((dir / "missing.jsonl").string()), DataError);

    auto bad = write_file(dir / "bad.jsonl", "{\"id\":\"a\",\"text\":\"ok\"}\nnot json\n");
    try {
        load_dataset(bad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }

    auto dup = write_file(dir / "dup.jsonl",
                          "{\"id\":\"a\",\"text\":\"um\"}\n{\"id\":\"a\",\"text\":\"dois\"}\n");
    try {
        load_dataset(dup);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("duplicate id a") != std::string::npos);
    }
}

TEST_CASE("save_dataset round-trips through load_dataset") {
    auto dir = test_dir("corpus-save");
    Dataset ds = make_dataset({
        TokenizedDoc{"a", {"um", "doc", ":", "URL"}, std::string("x")},
        TokenizedDoc{"b", {"outro"}, std::nullopt},
    });
    auto path = (dir / "out.jsonl").string();
    save_dataset(ds, path);
    Dataset back = load_dataset(path);
    REQUIRE(back.docs.size() == 2);
    CHECK(back.docs[0].tokens == ds.docs[0].tokens);
    CHECK(back.docs[1].tokens == ds.docs[1].tokens);
    CHECK(back.docs[0].label == ds.docs[0].label);
    CHECK_FALSE(back.docs[1].label.has_value());
}

namespace {

Dataset toy_corpus(const std::vector<std::pair<std::string, int>>& class_sizes) {
    std::vector<TokenizedDoc> docs;
    for (const auto& [cls, n] : class_sizes) {
        for (int i = 0; i < n; ++i) {
            docs.push_back(TokenizedDoc{cls + "-" + std::to_string(i), {"w"}, cls});
        }
    }
    return make_dataset(std::move(docs));
}

} // namespace

TEST_CASE("stratified_split draws exact per-class counts") {
    Dataset ds = toy_corpus({{"a", 5}, {"b", 5}});
    ds.docs.push_back(TokenizedDoc{"u-1", {"w"}, std::nullopt}); // ignored

    SplitResult r = stratified_split(ds, SplitSpec{2, 1, 1, 7});
    CHECK(r.train.docs.size() == 4);
    CHECK(r.valid.docs.size() == 2);
    CHECK(r.test.docs.size() == 2);

    std::map<std::string, int> train_counts;
    for (const auto& d : r.train.docs) train_counts[*d.label]++;
    CHECK(train_counts["a"] == 2);
    CHECK(train_counts["b"] == 2);

    // Partition: no id appears twice across the three splits.
    std::set<std::string> ids;
    for (const auto* split : {&r.train, &r.valid, &r.test}) {
        for (const auto& d : split->docs) CHECK(ids.insert(d.id).second);
    }
    CHECK(ids.size() == 8);
}

TEST_CASE("stratified_split is seed-deterministic") {
    Dataset ds = toy_corpus({{"a", 30}, {"b", 30}, {"c", 30}});
    auto ids_of = [](const Dataset& d) {
        std::vector<std::string> ids;
        for (const auto& doc : d.docs) ids.push_back(doc.id);
        return ids;
    };
    SplitResult r1 = stratified_split(ds, SplitSpec{10, 5, 5, 42});
    SplitResult r2 = stratified_split(ds, SplitSpec{10, 5, 5, 42});
    CHECK(ids_of(r1.train) == ids_of(r2.train));
    CHECK(ids_of(r1.valid) == ids_of(r2.valid));
    CHECK(ids_of(r1.test) == ids_of(r2.test));

    SplitResult r3 = stratified_split(ds, SplitSpec{10, 5, 5, 43});
    CHECK(ids_of(r1.train) != ids_of(r3.train));
}

TEST_CASE("stratified_split names every deficient class") {
    Dataset ds = toy_corpus({{"a", 3}, {"b", 2}, {"c", 9}});
    try {
        stratified_split(ds, SplitSpec{3, 1, 1, 0});
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("a") != std::string::npos);
        CHECK(msg.find("b") != std::string::npos);
        CHECK(msg.find("c (") == std::string::npos);
    }
}

TEST_CASE("rng primitives are reproducible") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(1);
    for (int i = 0; i < 1000; ++i) {
        double x = c.next_real();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        CHECK(c.next_index(7) < 7);
    }
    CHECK(derive_seed(5, "doc-1") != derive_seed(5, "doc-2"));
    CHECK(derive_seed(5, "doc-1") == derive_seed(5, "doc-1"));
    CHECK(derive_seed(5, 0) != derive_seed(5, 1));
}
