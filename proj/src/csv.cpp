#include "eecm/csv.hpp"

#include <charconv>
#include <cmath>

#include "eecm/errors.hpp"

namespace eecm {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    // strip trailing CR from DOS line endings
    if (!cells.empty() && !cells.back().empty() && cells.back().back() == '\r')
        cells.back().pop_back();
    return cells;
}

CsvReader::CsvReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw DataError("cannot open csv: " + path);
    if (!std::getline(in_, line_)) throw DataError("empty csv: " + path);
    header_ = split_csv_line(line_);
    row_ = 1;
}

int CsvReader::column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return static_cast<int>(i);
    return -1;
}

bool CsvReader::next(std::vector<double>& out) {
    while (std::getline(in_, line_)) {
        ++row_;
        if (line_.empty() || line_ == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line_);
        if (cells.size() != header_.size())
            throw DataError(path_ + ":" + std::to_string(row_) + ": expected " +
                            std::to_string(header_.size()) + " cells, got " +
                            std::to_string(cells.size()));
        out.resize(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string& c = cells[i];
            if (c.empty() || c == "nan" || c == "NaN") {
                out[i] = std::nan("");
                continue;
            }
            const char* begin = c.data();
            const char* end = begin + c.size();
            auto [ptr, ec] = std::from_chars(begin, end, out[i]);
            if (ec != std::errc() || ptr != end)
                throw DataError(path_ + ":" + std::to_string(row_) + ": bad number '" + c + "'");
        }
        return true;
    }
    return false;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
    if (!out_) throw DataError("cannot write csv: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
    out_.precision(10);
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != width_) throw DataError("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << values[i];
    }
    out_ << '\n';
}

} // namespace eecm
