#include "levyclt/polycore/multi_index.hpp"

#include <numeric>
#include <stdexcept>

namespace levyclt {

MultiIndex::MultiIndex(std::initializer_list<int> exps) : MultiIndex(std::vector<int>(exps)) {}

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
    for (int e : exps_)
        if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t j) {
    if (j >= dim) throw std::out_of_range("MultiIndex::unit: index out of range");
    MultiIndex m(dim);
    m.exps_[j] = 1;
    return m;
}

void MultiIndex::set(std::size_t j, int value) {
    if (value < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    exps_.at(j) = value;
}

int MultiIndex::order() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

int MultiIndex::weighted_order() const {
    int s = 0;
    for (std::size_t j = 0; j < exps_.size(); ++j) s += static_cast<int>(j + 1) * exps_[j];
    return s;
}

bool MultiIndex::dominated_by(const MultiIndex& other) const {
    if (other.dim() != dim()) return false;
    for (std::size_t j = 0; j < exps_.size(); ++j)
        if (exps_[j] > other.exps_[j]) return false;
    return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
    MultiIndex out(*this);
    for (std::size_t j = 0; j < exps_.size(); ++j) out.exps_[j] += other.exps_[j];
    return out;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
    if (!other.dominated_by(*this)) throw std::invalid_argument("MultiIndex: subtraction would go negative");
    MultiIndex out(*this);
    for (std::size_t j = 0; j < exps_.size(); ++j) out.exps_[j] -= other.exps_[j];
    return out;
}

MultiIndex MultiIndex::incremented(std::size_t j, int by) const {
    MultiIndex out(*this);
    out.set(j, out.exps_.at(j) + by);
    return out;
}

std::string MultiIndex::to_string() const {
    std::string s = "(";
    for (std::size_t j = 0; j < exps_.size(); ++j) {
        if (j) s += ",";
        s += std::to_string(exps_[j]);
    }
    return s + ")";
}

bool GradedLexLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
    const int oa = a.order();
    const int ob = b.order();
    if (oa != ob) return oa < ob;
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    for (std::size_t j = 0; j < a.dim(); ++j)
        if (a[j] != b[j]) return a[j] > b[j];
    return false;
}

mpz_class factorial(const MultiIndex& alpha) {
    mpz_class out = 1;
    for (int e : alpha.exponents()) {
        mpz_class f;
        mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(e));
        out *= f;
    }
    return out;
}

mpz_class binomial(const MultiIndex& alpha, const MultiIndex& beta) {
    if (!beta.dominated_by(alpha)) return 0;
    mpz_class out = 1;
    for (std::size_t j = 0; j < alpha.dim(); ++j) {
        mpz_class b;
        mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(alpha[j]), static_cast<unsigned long>(beta[j]));
        out *= b;
    }
    return out;
}

namespace {

void fill_degree(std::vector<int>& cur, std::size_t pos, int remaining, std::vector<MultiIndex>& out) {
    if (pos + 1 == cur.size()) {
        cur[pos] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur[pos] = e;
        fill_degree(cur, pos + 1, remaining - e, out);
    }
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_degree(std::size_t dim, int degree) {
    if (dim == 0) throw std::invalid_argument("multi_indices_of_degree: dim must be >= 1");
    std::vector<MultiIndex> out;
    if (degree < 0) return out;
    std::vector<int> cur(dim, 0);
    fill_degree(cur, 0, degree, out);
    return out;
}

std::vector<MultiIndex> multi_indices_between(std::size_t dim, int lo, int hi) {
    std::vector<MultiIndex> out;
    for (int d = std::max(lo, 0); d <= hi; ++d) {
        auto layer = multi_indices_of_degree(dim, d);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

std::vector<MultiIndex> sub_indices(const MultiIndex& alpha) {
    std::vector<MultiIndex> out;
    std::vector<int> cur(alpha.dim(), 0);
    while (true) {
        out.emplace_back(cur);
        std::size_t j = 0;
        while (j < cur.size()) {
            if (cur[j] < alpha[j]) {
                ++cur[j];
                break;
            }
            cur[j] = 0;
            ++j;
        }
        if (j == cur.size()) break;
    }
    return out;
}

}  // namespace levyclt
