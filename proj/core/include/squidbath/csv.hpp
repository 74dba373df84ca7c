// csv.hpp: Plot-ready CSV tables with `# key=value` metadata header

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace squidbath {

// 17 significant digits, scientific notation.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_meta(std::string key, std::string value) {
        metadata.emplace_back(std::move(key), std::move(value));
    }
};

void write_csv(std::ostream& os, const CsvTable& table);
std::string to_csv_string(const CsvTable& table);

}  // namespace squidbath
