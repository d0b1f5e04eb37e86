#include "fracmc/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fracmc/errors.hpp"

namespace fracmc {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw Error(ErrorKind::invalid_parameter, "csv table needs at least one column");
}

CsvTable& CsvTable::row() {
    if (rows_ > 0 && cells_in_row_ != columns_.size())
        throw Error(ErrorKind::invalid_parameter, "csv row has the wrong number of cells");
    if (rows_ > 0) body_ += '\n';
    ++rows_;
    cells_in_row_ = 0;
    return *this;
}

CsvTable& CsvTable::add(const std::string& v) {
    if (rows_ == 0 || cells_in_row_ >= columns_.size())
        throw Error(ErrorKind::invalid_parameter, "csv cell outside a row");
    if (cells_in_row_ > 0) body_ += ',';
    body_ += v;
    ++cells_in_row_;
    return *this;
}

CsvTable& CsvTable::add(double v) { return add(format_double(v)); }
CsvTable& CsvTable::add(long v) { return add(std::to_string(v)); }

std::string CsvTable::str() const {
    if (rows_ > 0 && cells_in_row_ != columns_.size())
        throw Error(ErrorKind::invalid_parameter, "csv row has the wrong number of cells");
    std::string out;
    for (size_t k = 0; k < columns_.size(); ++k) {
        if (k) out += ',';
        out += columns_[k];
    }
    out += '\n';
    if (rows_ > 0) out += body_ + '\n';
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::io, "failed writing '" + path + "'");
}

void write_csv(const std::string& path, const CsvTable& table) { write_text(path, table.str()); }

void write_json(const std::string& path, const nlohmann::ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::ordered_json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace fracmc
