// Minimal CSV I/O for numeric tables. Values are written with %.17g so a
// write/read cycle is bit-exact for finite doubles; infinities and NaNs are
// written as "inf", "-inf", "nan".
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tvcsim {

// Full-precision decimal form of x (round-trips through strtod).
std::string format_full(double x);

// Parses a decimal field, accepting the inf/nan literals above.
// Throws std::runtime_error on malformed input.
double parse_field(const std::string& field);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // Index of a header column; throws if absent.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

class CsvWriter {
public:
    // Opens path for writing and emits the header row. Throws on I/O failure.
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();

    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    // Writes one row; size must match the header.
    void row(const std::vector<double>& values);

    void close();

private:
    struct Impl;
    Impl* impl_;
    std::size_t width_;
};

} // namespace tvcsim
