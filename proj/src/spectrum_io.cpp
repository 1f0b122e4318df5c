#include <string>

#include "hbatk/errors.hpp"
#include "hbatk/io_util.hpp"
#include "hbatk/spectrum.hpp"

namespace hbatk {

namespace {
constexpr std::string_view kSpectrumHeader = "wavelength_nm,value";
}

std::string format_spectrum_csv(const Spectrum& s) {
  std::string out(kSpectrumHeader);
  out += '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_double(s.wavelengths()[i]);
    out += ',';
    out += format_double(s.values()[i]);
    out += '\n';
  }
  return out;
}

Spectrum parse_spectrum_csv(std::string_view text, SpectrumKind kind) {
  std::vector<double> w;
  std::vector<double> v;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kSpectrumHeader) {
        throw ConfigError("spectrum CSV: expected header '" + std::string(kSpectrumHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw ConfigError("spectrum CSV line " + std::to_string(line_no) + ": expected 2 fields");
    }
    w.push_back(parse_double(fields[0], "wavelength_nm"));
    v.push_back(parse_double(fields[1], "value"));
  }
  if (!header_seen) throw ConfigError("spectrum CSV: empty input");
  try {
    return Spectrum(std::move(w), std::move(v), kind);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("spectrum CSV: ") + e.what());
  }
}

Spectrum read_spectrum_csv(const std::string& path, SpectrumKind kind) {
  try {
    return parse_spectrum_csv(read_text_file(path), kind);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace hbatk
