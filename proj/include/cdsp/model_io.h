// LP and free-MPS writers for MipModel. Output is byte-deterministic.

#ifndef CDSP_MODEL_IO_H_
#define CDSP_MODEL_IO_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "cdsp/formulation.h"

namespace cdsp {

enum class ModelFormat { kLp, kMps };

std::optional<ModelFormat> parse_model_format(std::string_view s);
std::string_view file_extension(ModelFormat format);  // ".lp" / ".mps"

void write_lp(const MipModel& m, std::ostream& out);
// Free MPS: whitespace separated fields, integer columns between
// 'MARKER' 'INTORG'/'INTEND' lines, explicit bounds on every binary.
void write_mps(const MipModel& m, std::ostream& out);

void emit_model(const MipModel& m, ModelFormat format, std::ostream& out);
std::string emit_model(const MipModel& m, ModelFormat format);
// Throws std::runtime_error on i/o failure.
void emit_model_file(const MipModel& m, ModelFormat format, const std::filesystem::path& path);

}  // namespace cdsp

#endif  // CDSP_MODEL_IO_H_
