#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace fracmc {

// 17 significant digits ("%.17g"); NaN and infinities as nan, inf, -inf.
std::string format_double(double v);

// Rows are buffered and written in one piece; the column order is fixed at
// construction.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);
    CsvTable& row();
    CsvTable& add(double v);
    CsvTable& add(long v);
    CsvTable& add(const std::string& v);
    std::string str() const;
    size_t rows() const { return rows_; }

private:
    std::vector<std::string> columns_;
    std::string body_;
    size_t rows_ = 0;
    size_t cells_in_row_ = 0;
};

// Throws an io Error on failure.
void write_text(const std::string& path, const std::string& text);
void write_csv(const std::string& path, const CsvTable& table);
// Indented by two spaces, newline terminated; doubles keep 17 digits.
void write_json(const std::string& path, const nlohmann::ordered_json& j);

// Replaces non-finite doubles by null so the output is valid JSON.
nlohmann::ordered_json json_number(double v);

}  // namespace fracmc
