#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace levyclt {

/// Exponent vector alpha in N^q. |alpha| and |alpha|_* are computed on demand.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t dim) : exps_(dim, 0) {}
    MultiIndex(std::initializer_list<int> exps);
    explicit MultiIndex(std::vector<int> exps);

    static MultiIndex unit(std::size_t dim, std::size_t j);

    std::size_t dim() const { return exps_.size(); }
    int operator[](std::size_t j) const { return exps_[j]; }
    void set(std::size_t j, int value);
    const std::vector<int>& exponents() const { return exps_; }

    /// |alpha| = sum_j alpha_j.
    int order() const;
    /// |alpha|_* = alpha_1 + 2 alpha_2 + ... + q alpha_q.
    int weighted_order() const;

    bool is_zero() const { return order() == 0; }
    /// Componentwise alpha <= other.
    bool dominated_by(const MultiIndex& other) const;

    MultiIndex operator+(const MultiIndex& other) const;
    /// Requires other <= *this componentwise.
    MultiIndex operator-(const MultiIndex& other) const;
    MultiIndex incremented(std::size_t j, int by = 1) const;

    bool operator==(const MultiIndex& other) const = default;

    std::string to_string() const;

private:
    std::vector<int> exps_;
};

/// Graded-lexicographic order: lower total degree first; within a degree,
/// larger leading exponents first (x1^2 < x1 x2 < x2^2 in iteration order).
struct GradedLexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

/// alpha! = prod_j alpha_j!
mpz_class factorial(const MultiIndex& alpha);
/// prod_j C(alpha_j, beta_j); zero unless beta <= alpha.
mpz_class binomial(const MultiIndex& alpha, const MultiIndex& beta);

/// All multi-indices of exact total degree `degree` in graded-lex order.
std::vector<MultiIndex> multi_indices_of_degree(std::size_t dim, int degree);
/// All multi-indices with lo <= |alpha| <= hi in graded-lex order.
std::vector<MultiIndex> multi_indices_between(std::size_t dim, int lo, int hi);
/// All beta with beta <= alpha componentwise.
std::vector<MultiIndex> sub_indices(const MultiIndex& alpha);

}  // namespace levyclt
