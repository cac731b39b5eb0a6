#ifndef GRF_CSV_HPP
#define GRF_CSV_HPP

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace grf {

/// Deterministic CSV writer: fixed %.17g formatting, one schema comment line,
/// and an optional timestamp line that reproducible runs suppress.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& schema,
              std::vector<std::string> columns, bool with_timestamp);

    void row(std::initializer_list<double> values);
    void raw_row(const std::string& line);

    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

private:
    std::ofstream out_;
    size_t ncols_;
};

}  // namespace grf

#endif
