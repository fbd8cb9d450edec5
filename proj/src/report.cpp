#include "fewlabel/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fewlabel/errors.hpp"
#include "fewlabel/io.hpp"

namespace fewlabel {

namespace {

// Splits one CSV record; quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            ++i;
            continue;
        }
        if (c == ',') {
            fields.push_back(field);
            field.clear();
            ++i;
            continue;
        }
        field += c;
        ++i;
    }
    if (quoted) throw DataError(where + ": unterminated quote");
    fields.push_back(field);
    return fields;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

// Shortest decimal form that parses back to the same double.
std::string csv_number(double value) { return nlohmann::json(value).dump(); }

double parse_number(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw DataError(where + ": not a number: " + text);
    }
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

HumanAudit load_audit_csv(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty audit file");
    if (lines[0] != "class,human_accuracy,audited_count") {
        throw DataError(path + ":1: expected header class,human_accuracy,audited_count");
    }
    HumanAudit audit;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        const std::string where = path + ":" + std::to_string(n + 1);
        const auto fields = split_csv_line(lines[n], where);
        if (fields.size() != 3) {
            throw DataError(where + ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        const std::string& name = fields[0];
        if (name.empty()) throw DataError(where + ": empty class name");
        if (audit.accuracy.count(name)) throw DataError(where + ": duplicate class " + name);
        const double acc = parse_number(fields[1], where);
        if (!(acc >= 0.0 && acc <= 1.0)) {
            throw DataError(where + ": human_accuracy out of [0,1]: " + fields[1]);
        }
        const double count = parse_number(fields[2], where);
        if (count < 0 || count != std::floor(count)) {
            throw DataError(where + ": audited_count must be a nonnegative integer");
        }
        audit.accuracy[name] = acc;
        audit.audited[name] = static_cast<long long>(count);
    }
    if (audit.accuracy.empty()) throw DataError(path + ": no audit rows");
    return audit;
}

std::vector<ComparisonRow> comparison_rows(const std::map<std::string, double>& model_accuracy,
                                           const HumanAudit& audit) {
    std::set<std::string> only_model, only_audit;
    for (const auto& [name, acc] : model_accuracy) {
        (void)acc;
        if (!audit.accuracy.count(name)) only_model.insert(name);
    }
    for (const auto& [name, acc] : audit.accuracy) {
        (void)acc;
        if (!model_accuracy.count(name)) only_audit.insert(name);
    }
    if (!only_model.empty() || !only_audit.empty()) {
        std::string message = "comparison: class sets differ;";
        if (!only_model.empty()) {
            message += " model only:";
            for (const auto& name : only_model) message += " " + name;
            message += ";";
        }
        if (!only_audit.empty()) {
            message += " audit only:";
            for (const auto& name : only_audit) message += " " + name;
        }
        throw DataError(message);
    }

    std::vector<ComparisonRow> rows;
    rows.reserve(model_accuracy.size());
    for (const auto& [name, acc] : model_accuracy) {
        ComparisonRow row;
        row.class_name = name;
        row.human_acc = audit.accuracy.at(name);
        row.model_acc = acc;
        row.delta = row.model_acc - row.human_acc;
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        if (a.model_acc != b.model_acc) return a.model_acc > b.model_acc;
        return a.class_name < b.class_name;
    });
    return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "class,human_acc,model_acc,delta\n";
    for (const auto& row : rows) {
        out += csv_field(row.class_name) + "," + csv_number(row.human_acc) + "," +
               csv_number(row.model_acc) + "," + csv_number(row.delta) + "\n";
    }
    return out;
}

std::vector<ComparisonRow> parse_comparison_csv(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) lines.push_back(line);
    if (lines.empty() || lines[0] != "class,human_acc,model_acc,delta") {
        throw DataError("comparison csv: expected header class,human_acc,model_acc,delta");
    }
    std::vector<ComparisonRow> rows;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        const std::string where = "comparison csv:" + std::to_string(n + 1);
        const auto fields = split_csv_line(lines[n], where);
        if (fields.size() != 4) {
            throw DataError(where + ": expected 4 fields, got " + std::to_string(fields.size()));
        }
        ComparisonRow row;
        row.class_name = fields[0];
        row.human_acc = parse_number(fields[1], where);
        row.model_acc = parse_number(fields[2], where);
        row.delta = parse_number(fields[3], where);
        rows.push_back(row);
    }
    return rows;
}

std::string comparison_svg(const std::vector<ComparisonRow>& rows) {
    const int width = 800;
    const int height = 20 * static_cast<int>(rows.size()) + 40;
    const double x0 = 180.0; // plot area left edge, after the label gutter
    const double x1 = 780.0;

    auto x_of = [&](double accuracy) { return x0 + accuracy * (x1 - x0); };
    char buf[256];

    std::string svg;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %d %d\" "
                  "width=\"%d\" height=\"%d\">\n",
                  width, height, width, height);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // Accuracy gridlines at 0, 0.5 and 1 for orientation.
    for (double tick : {0.0, 0.5, 1.0}) {
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"20\" x2=\"%.1f\" y2=\"%d\" stroke=\"#ddd\"/>\n",
                      x_of(tick), x_of(tick), height - 20);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"14\" font-size=\"10\" text-anchor=\"middle\" "
                      "fill=\"#666\">%.1f</text>\n",
                      x_of(tick), tick);
        svg += buf;
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const double y = 30.0 + 20.0 * static_cast<double>(i);
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"4\" y=\"%.1f\" font-size=\"11\" text-anchor=\"start\">",
                      y + 4.0);
        svg += buf;
        svg += xml_escape(row.class_name);
        svg += "</text>\n";
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.1f\" x2=\"%.2f\" y2=\"%.1f\" "
                      "stroke=\"#999\" stroke-width=\"2\"/>\n",
                      x_of(row.human_acc), y, x_of(row.model_acc), y);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.1f\" r=\"5\" fill=\"red\"/>\n",
                      x_of(row.human_acc), y);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.1f\" r=\"5\" fill=\"blue\"/>\n",
                      x_of(row.model_acc), y);
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

std::string comparison_summary(const std::vector<ComparisonRow>& rows) {
    std::size_t human_ahead = 0;
    for (const auto& row : rows) {
        if (row.delta < 0.0) ++human_ahead;
    }
    return std::to_string(human_ahead) + " of " + std::to_string(rows.size()) +
           " classes have higher human than model accuracy";
}

} // namespace fewlabel
