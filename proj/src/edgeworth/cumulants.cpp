#include "levyclt/edgeworth/cumulants.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace levyclt {

CumulantSet<Rational> read_cumulants(std::istream& in, int order) {
    IndexMap<Rational> mu;
    std::size_t dim = 0;
    int max_order = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() < 2) throw std::invalid_argument("cumulant line " + std::to_string(lineno) + ": expected indices and a value");
        const std::size_t q = tok.size() - 1;
        if (dim == 0) dim = q;
        if (q != dim) throw std::invalid_argument("cumulant line " + std::to_string(lineno) + ": inconsistent dimension");
        std::vector<int> e(q);
        for (std::size_t j = 0; j < q; ++j) {
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(tok[j], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok[j].size() || v < 0)
                throw std::invalid_argument("cumulant line " + std::to_string(lineno) + ": bad exponent '" + tok[j] + "'");
            e[j] = v;
        }
        MultiIndex a(e);
        if (mu.count(a)) throw std::invalid_argument("cumulant line " + std::to_string(lineno) + ": duplicate index " + a.to_string());
        mu.emplace(a, parse_rational(tok.back()));
        max_order = std::max(max_order, a.order());
    }
    if (dim == 0) throw std::invalid_argument("cumulant file: no entries");
    return CumulantSet<Rational>(dim, order > 0 ? order : max_order, std::move(mu));
}

CumulantSet<Rational> read_cumulants_file(const std::string& path, int order) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open cumulant file '" + path + "'");
    return read_cumulants(f, order);
}

void write_cumulants(std::ostream& out, const CumulantSet<Rational>& c) {
    for (const auto& a : multi_indices_between(c.dim(), 2, c.order())) {
        Rational v = c.mu(a);
        if (sgn(v) == 0) continue;
        for (std::size_t j = 0; j < c.dim(); ++j) out << a[j] << ' ';
        out << v.get_str() << '\n';
    }
}

}  // namespace levyclt
