#include "vru/error.hpp"

namespace vru {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInput:
      return 2;
    case ErrorKind::kNumerical:
      return 3;
    case ErrorKind::kConfig:
      return 4;
  }
  return 1;
}

ValueError::ValueError(std::size_t row, const std::string& what)
    : Error(ErrorKind::kInput,
            row == 0 ? "ValueError: " + what
                     : "ValueError: row " + std::to_string(row) + ": " + what),
      row_(row) {}

}  // namespace vru
