#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fdkl {

/// Shortest decimal text that reads back to the same double ('.' decimal point).
std::string format_double(double v);

/// Comma-separated writer with a header row. Throws on I/O failure, naming the path.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    /// Mixed row: preformatted cells.
    void raw_row(const std::vector<std::string>& cells);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;
};

/// Reads a numeric CSV with a header row.
CsvTable read_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Lowercase hex SHA-256 of a byte string / file.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

} // namespace fdkl
