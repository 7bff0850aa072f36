#include "eslab/sample_io.hpp"

#include "eslab/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace eslab {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) {
        return false;
    }
    if (field.front() == '+') {
        field.remove_prefix(1);
    }
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

ReturnSample from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        throw ParseError("return sample has no data rows");
    }
    const auto n = rows.front().size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = rows[t][i];
        }
    }
    return ReturnSample(std::move(m));
}

}  // namespace

ReturnSample read_sample_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto fields = split_commas(body);
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t col = 0; col < fields.size(); ++col) {
            double value = 0.0;
            if (!parse_double(fields[col], value)) {
                if (first_content_line && col == 0) {
                    row.clear();
                    break;  // header row
                }
                throw ParseError("line " + std::to_string(line_no) + ", column " +
                                 std::to_string(col + 1) + ": not a number: '" +
                                 std::string(trim(fields[col])) + "'");
            }
            row.push_back(value);
        }
        const bool was_header = first_content_line && row.empty();
        first_content_line = false;
        if (was_header) {
            continue;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(rows.front().size()) + " columns, got " +
                             std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    return from_rows(rows);
}

ReturnSample read_sample_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON sample: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("returns") || !doc["returns"].is_array()) {
        throw ParseError("JSON sample needs a \"returns\" array of rows");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& row : doc["returns"]) {
        if (!row.is_array()) {
            throw ParseError("JSON sample rows must be arrays");
        }
        std::vector<double> r;
        for (const auto& x : row) {
            if (!x.is_number()) {
                throw ParseError("JSON sample entries must be numbers");
            }
            r.push_back(x.get<double>());
        }
        if (!rows.empty() && r.size() != rows.front().size()) {
            throw ParseError("JSON sample rows have unequal lengths");
        }
        rows.push_back(std::move(r));
    }
    ReturnSample sample = from_rows(rows);
    if (doc.contains("n_assets") && doc["n_assets"].get<std::size_t>() != sample.n_assets()) {
        throw ParseError("JSON n_assets disagrees with the returns rows");
    }
    if (doc.contains("n_periods") && doc["n_periods"].get<std::size_t>() != sample.n_periods()) {
        throw ParseError("JSON n_periods disagrees with the number of rows");
    }
    return sample;
}

ReturnSample load_sample(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "'");
    }
    if (path.extension() == ".json") {
        std::stringstream buffer;
        buffer << in.rdbuf();
        return read_sample_json(buffer.str());
    }
    return read_sample_csv(in);
}

std::string format_roundtrip(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string format_significant(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

void write_sample_csv(std::ostream& out, const ReturnSample& sample) {
    const auto& r = sample.returns();
    for (Eigen::Index t = 0; t < r.rows(); ++t) {
        for (Eigen::Index i = 0; i < r.cols(); ++i) {
            if (i > 0) {
                out << ',';
            }
            out << format_roundtrip(r(t, i));
        }
        out << '\n';
    }
}

std::string sample_to_json(const ReturnSample& sample) {
    nlohmann::json rows = nlohmann::json::array();
    const auto& r = sample.returns();
    for (Eigen::Index t = 0; t < r.rows(); ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index i = 0; i < r.cols(); ++i) {
            row.push_back(r(t, i));
        }
        rows.push_back(std::move(row));
    }
    nlohmann::json doc = {{"n_assets", sample.n_assets()}, {"n_periods", sample.n_periods()},
                          {"returns", std::move(rows)}};
    return doc.dump();
}

}  // namespace eslab
