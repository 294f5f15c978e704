#pragma once

#include <string>
#include <vector>

namespace tripod::csv {

// One output table: '#'-prefixed header comments, a column-name row, then
// data rows. Numbers are formatted with %.17g so values round-trip.
struct Table {
    std::vector<std::string> comments;  // written as "# <line>"
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
};

std::string format_double(double value);
std::string render(const Table& table);
void write_file(const std::string& path, const std::string& content);
void write(const std::string& path, const Table& table);

// Inverse of render(); used to check that emitted tables re-parse losslessly.
Table parse(const std::string& content);

// Minimal gnuplot script plotting the named CSV columns against column 1.
struct PlotSeries {
    int column = 2;  // 1-based CSV column
    std::string title;
};

std::string plot_script(const std::string& csv_name, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        const std::vector<PlotSeries>& series);

}  // namespace tripod::csv
