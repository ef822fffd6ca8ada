#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace eecm {

// Streaming CSV reader: header row first, then one row at a time. Throws
// DataError with the row number on malformed rows.
class CsvReader {
public:
    explicit CsvReader(const std::string& path);

    const std::vector<std::string>& header() const { return header_; }

    // Column index by exact name; -1 when absent.
    int column(const std::string& name) const;

    // Reads the next data row into `out` (resized to the header width).
    // Returns false at end of file. NaN cells parse as NaN.
    bool next(std::vector<double>& out);

    long row_number() const { return row_; }

private:
    std::ifstream in_;
    std::string path_;
    std::vector<std::string> header_;
    std::string line_;
    long row_ = 0;
};

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::size_t width_;
};

std::vector<std::string> split_csv_line(const std::string& line);

} // namespace eecm
