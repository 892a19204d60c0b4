#include "mehler/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mehler {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void Table::add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw std::logic_error("csv row width mismatch");
    rows.push_back(std::move(row));
}

std::string Table::text() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

std::string cell(double v) { return format_full(v); }
std::string cell(int v) { return std::to_string(v); }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mehler
