#pragma once
// Deterministic report serialization: JSON with keys sorted and floats at 17
// significant digits, CSV with the same float format, both with a trailing
// newline. Identical inputs produce byte-identical files.

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace adveig {

class Json {
  public:
    Json() : kind_(Kind::Null) {}

    static Json object() { return Json(Kind::Object); }
    static Json array() { return Json(Kind::Array); }
    static Json number(double v);
    static Json integer(long long v);
    static Json boolean(bool v);
    static Json string(std::string v);

    Json& set(const std::string& key, Json v);
    Json& push(Json v);

    std::string dump() const;  // pretty, 2-space indent, trailing newline

  private:
    enum class Kind { Null, Object, Array, Number, Integer, Bool, String };
    explicit Json(Kind k) : kind_(k) {}

    Kind kind_;
    double num_ = 0.0;
    long long int_ = 0;
    bool bool_ = false;
    std::string str_;
    std::map<std::string, Json> obj_;
    std::vector<Json> arr_;

    void emit(std::string& out, int indent) const;
};

// 17-significant-digit decimal form used across every report and CSV.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_text_file(const std::string& path, const std::string& content);
void write_csv_file(const std::string& path, const CsvTable& table);
std::string read_text_file(const std::string& path);

}  // namespace adveig
