#include "tripod/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tripod::csv {

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size())
        throw std::invalid_argument("csv: row width does not match column count");
    rows.push_back(std::move(cells));
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string render(const Table& table) {
    std::ostringstream out;
    for (const auto& line : table.comments) out << "# " << line << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

void write(const std::string& path, const Table& table) {
    write_file(path, render(table));
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

Table parse(const std::string& content) {
    Table table;
    std::istringstream in(content);
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::size_t start = 1;
            if (start < line.size() && line[start] == ' ') ++start;
            table.comments.push_back(line.substr(start));
            continue;
        }
        if (!have_columns) {
            table.columns = split_cells(line);
            have_columns = true;
        } else {
            table.add_row(split_cells(line));
        }
    }
    return table;
}

std::string plot_script(const std::string& csv_name, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        const std::vector<PlotSeries>& series) {
    std::ostringstream out;
    out << "# gnuplot script for " << csv_name << "\n";
    out << "set datafile separator ','\n";
    out << "set datafile commentschars '#'\n";
    out << "set key outside\n";
    out << "set grid\n";
    out << "set title '" << title << "'\n";
    out << "set xlabel '" << xlabel << "'\n";
    out << "set ylabel '" << ylabel << "'\n";
    out << "plot ";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (i) out << ", \\\n     ";
        out << "'" << csv_name << "' using 1:" << series[i].column << " skip 1 with linespoints title '"
            << series[i].title << "'";
    }
    out << "\n";
    return out.str();
}

}  // namespace tripod::csv
