#include "grf/csv.hpp"

#include <chrono>
#include <stdexcept>

namespace grf {

CsvWriter::CsvWriter(const std::string& path, const std::string& schema,
                     std::vector<std::string> columns, bool with_timestamp)
    : out_(path), ncols_(columns.size()) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    out_ << "# schema: " << schema << " v1\n";
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        out_ << "# generated: " << now << "\n";
    }
    for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

void CsvWriter::row(std::initializer_list<double> values) {
    if (values.size() != ncols_) throw std::logic_error("CsvWriter: column count mismatch");
    bool first = true;
    for (double v : values) {
        if (!first) out_ << ",";
        out_ << format(v);
        first = false;
    }
    out_ << "\n";
}

void CsvWriter::raw_row(const std::string& line) { out_ << line << "\n"; }

}  // namespace grf
