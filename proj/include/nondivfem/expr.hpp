#ifndef NONDIVFEM_EXPR_HPP
#define NONDIVFEM_EXPR_HPP

#include <memory>
#include <string>

#include "nondivfem/core.hpp"

namespace ndfem {

// Arithmetic expressions over x1, x2, alpha with + - * / ^, unary minus,
// sin, cos, sqrt, numeric literals and pi. '^' is right-associative.
class Expr {
  public:
    static Expr parse(const std::string& text);
    double eval(double x1, double x2, double alpha = 0.0) const;
    bool uses_alpha() const;

    struct Node;
    Expr() = default;

  private:
    std::shared_ptr<const Node> root_;
};

}  // namespace ndfem

#endif
