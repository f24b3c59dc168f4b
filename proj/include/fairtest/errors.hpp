#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairtest {

// Base of all toolkit errors. `kind()` is a stable machine-readable tag used
// by the CLI error records.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
    virtual const char* kind() const noexcept { return "error"; }
};

#define FAIRTEST_DEFINE_ERROR(name, tag)                                  \
    class name : public error {                                           \
    public:                                                               \
        explicit name(const std::string& msg) : error(msg) {}             \
        const char* kind() const noexcept override { return tag; }        \
    }

FAIRTEST_DEFINE_ERROR(shape_error, "input-shape");
FAIRTEST_DEFINE_ERROR(numeric_error, "numeric-overflow");
FAIRTEST_DEFINE_ERROR(label_error, "label");
FAIRTEST_DEFINE_ERROR(data_error, "data");
FAIRTEST_DEFINE_ERROR(validation_error, "validation");
FAIRTEST_DEFINE_ERROR(pairing_error, "pairing");
FAIRTEST_DEFINE_ERROR(attribute_error, "attribute");
FAIRTEST_DEFINE_ERROR(construction_error, "construction");
FAIRTEST_DEFINE_ERROR(degenerate_partition_error, "degenerate-partition");
FAIRTEST_DEFINE_ERROR(undefined_statistic_error, "undefined-statistic");
FAIRTEST_DEFINE_ERROR(parameter_error, "parameter");
FAIRTEST_DEFINE_ERROR(selection_error, "selection");
FAIRTEST_DEFINE_ERROR(mutation_error, "mutation");
FAIRTEST_DEFINE_ERROR(config_error, "configuration");
FAIRTEST_DEFINE_ERROR(io_error, "io");

#undef FAIRTEST_DEFINE_ERROR

// Malformed file content; carries the byte offset where parsing stopped.
class parse_error : public error {
public:
    parse_error(const std::string& msg, std::size_t byte_offset)
        : error(msg + " (byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}
    const char* kind() const noexcept override { return "parse"; }
    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

}  // namespace fairtest
