#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fairtest/errors.hpp"

namespace fairtest {

struct Sample {
    std::vector<double> x;
    int label = 0;
    int sensitive_value = 0;  // attribute tag
};

struct Dataset {
    std::vector<Sample> samples;
    std::size_t dim = 0;
    std::size_t class_count = 0;
    std::vector<std::string> attribute_names;  // index = tag

    std::size_t size() const { return samples.size(); }
    int attribute_tag(const std::string& name) const {
        for (std::size_t i = 0; i < attribute_names.size(); ++i)
            if (attribute_names[i] == name) return static_cast<int>(i);
        throw attribute_error("unknown attribute '" + name + "'");
    }
};

// A sample and its transformed counterpart; differs only in the sensitive
// attribute.
struct SamplePair {
    std::vector<double> x;
    std::vector<double> x_prime;
    int label = 0;
    int source_attr = 0;
    int target_attr = 0;
};

// ---------------------------------------------------------------------------
// Binary dataset container.
//
//   magic "DFT1"
//   u32 count          number of records
//   u32 dim
//   u32 class_count
//   u32 paired         0 plain, 1 records interleaved (x, x')
//   count * { dim * f32 features, u32 label, u32 attribute_tag }
//
// All integers little-endian. A sidecar text file "<path>.attrs" maps
// attribute tags to names, one "<tag> <name>" per line.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(os, bits);
}

class container_reader {
public:
    container_reader(std::istream& is, const std::string& path) : is_(is), path_(path) {}

    std::uint32_t u32() {
        unsigned char b[4];
        read(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    float f32() {
        std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    void magic() {
        char m[4];
        read(m, 4);
        if (std::memcmp(m, "DFT1", 4) != 0)
            throw parse_error(path_ + ": bad magic, not a dataset container", 0);
    }

    std::size_t offset() const { return offset_; }

private:
    void read(void* dst, std::size_t n) {
        is_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n)
            throw parse_error(path_ + ": truncated file", offset_);
        offset_ += n;
    }

    std::istream& is_;
    std::string path_;
    std::size_t offset_ = 0;
};

inline void write_attr_sidecar(const std::string& path, const std::vector<std::string>& names) {
    std::ofstream os(path + ".attrs");
    if (!os) throw io_error("cannot write " + path + ".attrs");
    for (std::size_t i = 0; i < names.size(); ++i) os << i << " " << names[i] << "\n";
}

inline std::vector<std::string> read_attr_sidecar(const std::string& path, int max_tag) {
    std::vector<std::string> names;
    std::ifstream is(path + ".attrs");
    if (is) {
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            int tag;
            std::string name;
            if (ls >> tag >> name) {
                if (tag >= static_cast<int>(names.size())) names.resize(tag + 1);
                names[tag] = name;
            }
        }
    }
    for (int t = 0; t <= max_tag; ++t) {
        if (t >= static_cast<int>(names.size())) names.resize(t + 1);
        if (names[t].empty()) names[t] = "attr" + std::to_string(t);
    }
    return names;
}

}  // namespace detail

inline void write_dataset(const std::string& path, const Dataset& d) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write " + path);
    os.write("DFT1", 4);
    detail::put_u32(os, static_cast<std::uint32_t>(d.samples.size()));
    detail::put_u32(os, static_cast<std::uint32_t>(d.dim));
    detail::put_u32(os, static_cast<std::uint32_t>(d.class_count));
    detail::put_u32(os, 0);
    for (const Sample& s : d.samples) {
        for (double v : s.x) detail::put_f32(os, static_cast<float>(v));
        detail::put_u32(os, static_cast<std::uint32_t>(s.label));
        detail::put_u32(os, static_cast<std::uint32_t>(s.sensitive_value));
    }
    detail::write_attr_sidecar(path, d.attribute_names);
}

inline Dataset read_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot read " + path);
    detail::container_reader r(is, path);
    r.magic();
    const std::uint32_t count = r.u32();
    const std::uint32_t dim = r.u32();
    const std::uint32_t classes = r.u32();
    const std::uint32_t paired = r.u32();
    if (paired != 0)
        throw validation_error(path + ": paired container where a plain dataset was expected");

    Dataset d;
    d.dim = dim;
    d.class_count = classes;
    d.samples.reserve(count);
    int max_tag = -1;
    for (std::uint32_t n = 0; n < count; ++n) {
        Sample s;
        s.x.resize(dim);
        for (std::uint32_t i = 0; i < dim; ++i) s.x[i] = static_cast<double>(r.f32());
        s.label = static_cast<int>(r.u32());
        s.sensitive_value = static_cast<int>(r.u32());
        if (s.label < 0 || static_cast<std::uint32_t>(s.label) >= classes)
            throw validation_error(path + ": record " + std::to_string(n) + " label out of range");
        max_tag = std::max(max_tag, s.sensitive_value);
        d.samples.push_back(std::move(s));
    }
    d.attribute_names = detail::read_attr_sidecar(path, max_tag);
    return d;
}

inline void write_pairs(const std::string& path, std::span<const SamplePair> pairs,
                        std::size_t dim, std::size_t class_count,
                        const std::vector<std::string>& attribute_names) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write " + path);
    os.write("DFT1", 4);
    detail::put_u32(os, static_cast<std::uint32_t>(pairs.size() * 2));
    detail::put_u32(os, static_cast<std::uint32_t>(dim));
    detail::put_u32(os, static_cast<std::uint32_t>(class_count));
    detail::put_u32(os, 1);
    for (const SamplePair& p : pairs) {
        for (double v : p.x) detail::put_f32(os, static_cast<float>(v));
        detail::put_u32(os, static_cast<std::uint32_t>(p.label));
        detail::put_u32(os, static_cast<std::uint32_t>(p.source_attr));
        for (double v : p.x_prime) detail::put_f32(os, static_cast<float>(v));
        detail::put_u32(os, static_cast<std::uint32_t>(p.label));
        detail::put_u32(os, static_cast<std::uint32_t>(p.target_attr));
    }
    detail::write_attr_sidecar(path, attribute_names);
}

struct PairFile {
    std::vector<SamplePair> pairs;
    std::size_t dim = 0;
    std::size_t class_count = 0;
    std::vector<std::string> attribute_names;
};

inline PairFile read_pairs(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot read " + path);
    detail::container_reader r(is, path);
    r.magic();
    const std::uint32_t count = r.u32();
    const std::uint32_t dim = r.u32();
    const std::uint32_t classes = r.u32();
    const std::uint32_t paired = r.u32();
    if (paired != 1) throw validation_error(path + ": not a paired container");
    if (count % 2 != 0)
        throw validation_error(path + ": paired container with odd record count");

    PairFile f;
    f.dim = dim;
    f.class_count = classes;
    f.pairs.reserve(count / 2);
    int max_tag = -1;
    for (std::uint32_t n = 0; n < count / 2; ++n) {
        SamplePair p;
        p.x.resize(dim);
        for (std::uint32_t i = 0; i < dim; ++i) p.x[i] = static_cast<double>(r.f32());
        p.label = static_cast<int>(r.u32());
        p.source_attr = static_cast<int>(r.u32());
        p.x_prime.resize(dim);
        for (std::uint32_t i = 0; i < dim; ++i) p.x_prime[i] = static_cast<double>(r.f32());
        const int label2 = static_cast<int>(r.u32());
        p.target_attr = static_cast<int>(r.u32());
        if (label2 != p.label)
            throw validation_error(path + ": pair " + std::to_string(n) + " labels disagree");
        if (p.label < 0 || static_cast<std::uint32_t>(p.label) >= classes)
            throw validation_error(path + ": pair " + std::to_string(n) + " label out of range");
        max_tag = std::max({max_tag, p.source_attr, p.target_attr});
        f.pairs.push_back(std::move(p));
    }
    f.attribute_names = detail::read_attr_sidecar(path, max_tag);
    return f;
}

}  // namespace fairtest
