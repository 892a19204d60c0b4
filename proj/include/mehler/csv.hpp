#pragma once

#include <string>
#include <vector>

namespace mehler {

// Full round-trip precision (17 significant digits).
std::string format_full(double v);

// Comma-separated table with a single header row; every float passes through
// format_full so identical inputs serialize to identical bytes.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    Table() = default;
    explicit Table(std::vector<std::string> h) : header(std::move(h)) {}
    void add(std::vector<std::string> row);
    std::string text() const;
};

std::string cell(double v);
std::string cell(int v);

void write_file(const std::string& path, const std::string& content);

}  // namespace mehler
