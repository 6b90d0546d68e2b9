#include "ellab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ellab {

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["inputs"] = inputs;
    j["verdicts"] = verdicts;
    j["values"] = values;
    j["witnesses"] = witnesses;
    j["artifacts"] = artifacts;
    j["duration_ms"] = duration_ms;
    j["version"] = kVersion;
    return j;
}

namespace {

std::string fmt_number(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump_impl(const nlohmann::json& j, std::ostringstream& os, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            std::size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                os << pad_in << nlohmann::json(it.key()).dump() << ": ";
                dump_impl(it.value(), os, indent, depth + 1);
                if (i + 1 < j.size()) os << ',';
                os << '\n';
            }
            os << pad << '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                os << pad_in;
                dump_impl(j[i], os, indent, depth + 1);
                if (i + 1 < j.size()) os << ',';
                os << '\n';
            }
            os << pad << ']';
            return;
        }
        case nlohmann::json::value_t::number_float:
            os << fmt_number(j.get<double>());
            return;
        default:
            os << j.dump();
            return;
    }
}

}  // namespace

std::string stable_dump(const nlohmann::json& j, int indent) {
    std::ostringstream os;
    dump_impl(j, os, indent, 0);
    os << '\n';
    return os.str();
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
    std::ostringstream os;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) os << ',';
        os << header[c];
    }
    os << '\n';
    std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) os << ',';
            os << fmt_number(columns[c][r]);
        }
        os << '\n';
    }
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ellab
