#ifndef ELLAB_REPORT_HPP
#define ELLAB_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace ellab {

inline constexpr const char* kVersion = "ellab 0.1.0";

struct Report {
    std::string command;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json verdicts = nlohmann::json::object();
    nlohmann::json values = nlohmann::json::object();
    nlohmann::json witnesses = nlohmann::json::array();
    std::vector<std::string> artifacts;
    long long duration_ms = 0;

    nlohmann::json to_json() const;
};

// Deterministic serialization: keys sorted (nlohmann objects are ordered maps),
// floats printed with 17 significant digits, LF line endings.
std::string stable_dump(const nlohmann::json& j, int indent = 2);

// CSV helpers: comma-separated, '.' decimal point, LF endings, mandatory header.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);
void write_file(const std::string& path, const std::string& content);

}  // namespace ellab

#endif
