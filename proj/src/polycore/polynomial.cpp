#include "levyclt/polycore/polynomial.hpp"

namespace levyclt {

template class Polynomial<double>;
template class Polynomial<Rational>;

}  // namespace levyclt
