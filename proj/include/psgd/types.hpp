#ifndef PSGD_TYPES_HPP
#define PSGD_TYPES_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>

namespace psgd {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                              ", got " + std::to_string(got)) {}
};

inline void require_dim(std::size_t expected, Eigen::Index got) {
  if (static_cast<std::size_t>(got) != expected) {
    throw DimensionMismatch(expected, static_cast<std::size_t>(got));
  }
}

}  // namespace psgd

#endif
