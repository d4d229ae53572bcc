#pragma once

#include <memory>
#include <string>
#include <vector>

namespace contacton {

// Arithmetic expression over named variables: + - * / ^, unary minus,
// sin cos tan exp log sqrt abs sinh cosh tanh, constants pi and e.
class Expression {
public:
    Expression() = default;
    Expression(const std::string& source, const std::vector<std::string>& variables);

    double eval(const double* values) const;
    const std::string& source() const { return source_; }
    // True when the expression folds to a constant without reading variables.
    bool is_constant() const;
    bool depends_on(int variable) const;

    struct Node;

private:
    std::string source_;
    std::shared_ptr<const Node> root_;
};

}  // namespace contacton
