#pragma once

// Source text to a runnable Program in one call.

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>

#include "elaborate.hpp"
#include "kernel.hpp"
#include "normalize.hpp"
#include "parser.hpp"

namespace vsched {

struct Loaded {
  ElabDesign elab;
  std::string normalized;  // printed normalised design
};

inline Loaded load_design(std::string_view source, const ElabOptions& opts = {}) {
  Design d = normalize(parse(source));
  Loaded out;
  out.normalized = print_design(d);
  out.elab = check_coercion(elaborate(d, opts));
  validate(out.elab);
  return out;
}

inline std::shared_ptr<const Program> compile(const Loaded& l, Semantics sem) {
  return make_program(l.elab, sem, l.normalized);
}

inline std::shared_ptr<const Program> compile(std::string_view source, Semantics sem,
                                              const ElabOptions& opts = {}) {
  return compile(load_design(source, opts), sem);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vsched
