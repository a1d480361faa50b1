#include "sectoria/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace sectoria {

namespace {

Complex complex_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        throw InvalidInputError("expected complex value as [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

nlohmann::json complex_to_json(Complex z) { return {z.real(), z.imag()}; }

} // namespace

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.contains("dim") || !j.contains("entries"))
        throw InvalidInputError("matrix JSON needs 'dim' and 'entries'");
    const auto dim = j["dim"].get<Eigen::Index>();
    if (dim < 1) throw InvalidInputError("matrix JSON: dim must be >= 1");
    const auto& entries = j["entries"];
    if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim * dim))
        throw InvalidInputError("matrix JSON: entries must hold dim^2 [re, im] pairs (square)");
    ComplexMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c)
            m(r, c) = complex_from_json(entries[static_cast<std::size_t>(r * dim + c)]);
    return m;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json j;
    j["dim"] = m.rows();
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(complex_to_json(m(r, c)));
    j["entries"] = entries;
    return j;
}

SectorialOperator operator_from_json(const nlohmann::json& j) {
    if (j.contains("family")) {
        FamilyParams p;
        p.seed = j.value("seed", 0ull);
        const nlohmann::json params = j.value("params", nlohmann::json::object());
        const Family fam = family_from_name(j["family"].get<std::string>());
        switch (fam) {
            case Family::positive_diagonal:
                p.diagonal = params.value("diagonal", std::vector<double>{});
                break;
            case Family::complex_diagonal:
            case Family::conjugated_accretive:
                if (params.contains("entries"))
                    for (const auto& e : params["entries"]) p.entries.push_back(complex_from_json(e));
                p.dim = params.value("dim", 0);
                break;
            case Family::jordan_shifted:
                p.dim = params.value("dim", 0);
                p.lambda = Complex(params.value("lambda", 1.0), 0.0);
                p.epsilon = params.value("epsilon", 1.0);
                break;
            case Family::random_accretive:
                p.dim = params.value("dim", 0);
                break;
        }
        return make_family(fam, p);
    }
    return SectorialOperator(matrix_from_json(j), "matrix");
}

SectorialOperator load_operator(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInputError(std::string("cannot parse operator file: ") + e.what());
    }
    return operator_from_json(j);
}

RationalVectorFn rational_fn_from_json(const nlohmann::json& j) {
    if (!j.contains("poles") || !j.contains("coeff_vectors"))
        throw InvalidInputError("rational function JSON needs 'poles' and 'coeff_vectors'");
    const auto& poles = j["poles"];
    const auto& coeffs = j["coeff_vectors"];
    if (poles.size() != coeffs.size())
        throw InvalidInputError("rational function JSON: poles/coeff_vectors size mismatch");
    std::vector<int> orders(poles.size(), 1);
    if (j.contains("orders")) orders = j["orders"].get<std::vector<int>>();
    if (orders.size() != poles.size())
        throw InvalidInputError("rational function JSON: orders size mismatch");

    RationalVectorFn f;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        RationalVectorFn::Term t;
        t.pole = complex_from_json(poles[i]);
        t.order = orders[i];
        if (t.order < 1) throw InvalidInputError("rational function JSON: order must be >= 1");
        t.coeff = ComplexVector(coeffs[i].size());
        for (std::size_t k = 0; k < coeffs[i].size(); ++k)
            t.coeff[static_cast<Eigen::Index>(k)] = complex_from_json(coeffs[i][k]);
        f.terms.push_back(std::move(t));
    }
    return f;
}

nlohmann::json boundary_fn_to_json(const BoundaryFunction& f) {
    nlohmann::json j;
    j["contour"] = {{"theta_prime", f.contour.theta_prime},
                    {"u_min", f.contour.grid.u_min},
                    {"u_max", f.contour.grid.u_max},
                    {"n_nodes", f.contour.grid.size()}};
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& v : f.samples) {
        nlohmann::json vec = nlohmann::json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) vec.push_back(complex_to_json(v[i]));
        samples.push_back(vec);
    }
    j["samples"] = samples;
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInputError("cannot open file for writing: " + tmp);
        out << content;
        if (!out.good()) throw InvalidInputError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace sectoria
