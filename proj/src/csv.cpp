#include "tvcsim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tvcsim {

std::string format_full(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_field(const std::string& field) {
    // Trim surrounding whitespace.
    std::size_t b = field.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        throw std::runtime_error("empty CSV field");
    std::size_t e = field.find_last_not_of(" \t\r");
    std::string s = field.substr(b, e - b + 1);

    if (s == "inf" || s == "+inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan" || s == "-nan") return std::nan("");

    const char* c = s.c_str();
    char* end = nullptr;
    double v = std::strtod(c, &end);
    if (end == c || *end != '\0')
        throw std::runtime_error("bad CSV field: '" + s + "'");
    return v;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("CSV column not found: " + name);
}

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);

    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty CSV file: " + path);
    for (auto& name : split_line(line)) {
        std::size_t b = name.find_first_not_of(" \t");
        std::size_t e = name.find_last_not_of(" \t");
        table.header.push_back(b == std::string::npos ? std::string()
                                                      : name.substr(b, e - b + 1));
    }

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_line(line);
        if (fields.size() != table.header.size()) {
            std::ostringstream msg;
            msg << path << ":" << lineno << ": expected " << table.header.size()
                << " fields, got " << fields.size();
            throw std::runtime_error(msg.str());
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto& f : fields) row.push_back(parse_field(f));
        table.rows.push_back(std::move(row));
    }
    return table;
}

struct CsvWriter::Impl {
    std::ofstream out;
    std::string path;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl{std::ofstream(path), path}), width_(header.size()) {
    if (!impl_->out) {
        delete impl_;
        impl_ = nullptr;
        throw std::runtime_error("cannot write " + path);
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) impl_->out << ',';
        impl_->out << header[i];
    }
    impl_->out << '\n';
}

CsvWriter::~CsvWriter() {
    delete impl_;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (!impl_)
        throw std::runtime_error("CSV writer already closed");
    if (values.size() != width_)
        throw std::runtime_error("CSV row width mismatch in " + impl_->path);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) impl_->out << ',';
        impl_->out << format_full(values[i]);
    }
    impl_->out << '\n';
}

void CsvWriter::close() {
    if (!impl_) return;
    impl_->out.flush();
    if (!impl_->out)
        throw std::runtime_error("write failure on " + impl_->path);
    delete impl_;
    impl_ = nullptr;
}

} // namespace tvcsim
