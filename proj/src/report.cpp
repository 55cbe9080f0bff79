#include "adveig/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adveig/errors.hpp"

namespace adveig {

std::string format_double(double v) {
    char buf[40];
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json Json::number(double v) {
    Json j(Kind::Number);
    j.num_ = v;
    return j;
}

Json Json::integer(long long v) {
    Json j(Kind::Integer);
    j.int_ = v;
    return j;
}

Json Json::boolean(bool v) {
    Json j(Kind::Bool);
    j.bool_ = v;
    return j;
}

Json Json::string(std::string v) {
    Json j(Kind::String);
    j.str_ = std::move(v);
    return j;
}

Json& Json::set(const std::string& key, Json v) {
    if (kind_ != Kind::Object) raise("IoError", "Json::set on a non-object");
    obj_[key] = std::move(v);
    return *this;
}

Json& Json::push(Json v) {
    if (kind_ != Kind::Array) raise("IoError", "Json::push on a non-array");
    arr_.push_back(std::move(v));
    return *this;
}

namespace {

void emit_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
}

}  // namespace

void Json::emit(std::string& out, int indent) const {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (kind_) {
        case Kind::Null: out += "null"; break;
        case Kind::Number:
            // JSON has no nan/inf; quote them so the value survives.
            if (std::isfinite(num_))
                out += format_double(num_);
            else
                emit_escaped(out, format_double(num_));
            break;
        case Kind::Integer: out += std::to_string(int_); break;
        case Kind::Bool: out += bool_ ? "true" : "false"; break;
        case Kind::String: emit_escaped(out, str_); break;
        case Kind::Object: {
            if (obj_.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            std::size_t k = 0;
            for (const auto& [key, val] : obj_) {
                out += pad_in;
                emit_escaped(out, key);
                out += ": ";
                val.emit(out, indent + 1);
                if (++k < obj_.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            break;
        }
        case Kind::Array: {
            if (arr_.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < arr_.size(); ++i) {
                out += pad_in;
                arr_[i].emit(out, indent + 1);
                if (i + 1 < arr_.size()) out += ',';
                out += '\n';
            }
            out += pad + "]";
            break;
        }
    }
}

std::string Json::dump() const {
    std::string out;
    emit(out, 0);
    out += '\n';
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) raise("IoError", "cannot open " + path + " for writing");
    if (!content.empty() && std::fwrite(content.data(), 1, content.size(), fp) != content.size()) {
        std::fclose(fp);
        raise("IoError", "short write to " + path);
    }
    std::fclose(fp);
}

void write_csv_file(const std::string& path, const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    write_text_file(path, out);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise("IoError", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace adveig
