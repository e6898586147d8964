#include "nbcs/model_io.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "nbcs/error.hpp"

namespace nbcs {

namespace {

class Tokens {
public:
    explicit Tokens(std::istream& in) : in_(in) {}

    std::string next(const char* what) {
        std::string t;
        if (!(in_ >> t)) throw DataError(fmt::format("model file truncated: expected {}", what));
        return t;
    }

    std::string peek() {
        const auto pos = in_.tellg();
        std::string t;
        if (!(in_ >> t)) {
            in_.clear();
            return {};
        }
        in_.seekg(pos);
        return t;
    }

    void expect(std::string_view keyword) {
        const std::string t = next(keyword.data());
        if (t != keyword) throw DataError(fmt::format("model file: expected '{}', found '{}'", keyword, t));
    }

    double number(const char* what) {
        const std::string t = next(what);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size())
            throw DataError(fmt::format("model file: bad {} '{}'", what, t));
        return v;
    }

    std::size_t count(const char* what) {
        const std::string t = next(what);
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size())
            throw DataError(fmt::format("model file: bad {} '{}'", what, t));
        return v;
    }

private:
    std::istream& in_;
};

void write_point(std::ostream& out, const Point& p) {
    for (Eigen::Index i = 0; i < p.size(); ++i) out << (i ? " " : "") << fmt::format("{}", p[i]);
    out << '\n';
}

Point read_point(Tokens& t, std::size_t d, const char* what) {
    Point p(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) p[static_cast<Eigen::Index>(i)] = t.number(what);
    return p;
}

void write_system(std::ostream& out, const NestedSystem& sys, const std::vector<WeightVector>& weights) {
    const std::size_t d = sys.dim();
    out << "nbcs-model " << kModelFormatVersion << '\n';
    out << "dimension " << d << '\n';
    out << "root\n";
    for (std::size_t v = 0; v <= d; ++v) write_point(out, sys.vertex(v));
    out << "splits " << sys.split_count() << '\n';
    for (VertexId v = d + 1; v < sys.vertex_count(); ++v) {
        out << sys.split_record(v).parent << ' ';
        write_point(out, sys.vertex(v));
    }
    out << "weights " << weights.size() << '\n';
    for (const auto& w : weights) {
        if (w.size() != sys.vertex_count()) throw DomainError("weight vector does not match system");
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (i) out << ' ';
            if (w.excluded(i))
                out << 'x';
            else
                out << fmt::format("{}", w[i]);
        }
        out << '\n';
    }
}

WeightedSystem read_system(Tokens& t) {
    t.expect("nbcs-model");
    const std::size_t version = t.count("version");
    if (version != static_cast<std::size_t>(kModelFormatVersion))
        throw DataError(fmt::format("unsupported model format version {}", version));
    t.expect("dimension");
    const std::size_t d = t.count("dimension");
    if (d == 0 || d > 100000) throw DataError("model file: bad dimension");

    t.expect("root");
    Eigen::MatrixXd root(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d + 1));
    for (std::size_t v = 0; v <= d; ++v) root.col(static_cast<Eigen::Index>(v)) = read_point(t, d, "root coordinate");
    std::vector<std::size_t> ids(d + 1);
    std::iota(ids.begin(), ids.end(), std::size_t{0});

    try {
        NestedSystem sys{Simplex(std::move(ids), std::move(root))};
        t.expect("splits");
        const std::size_t splits = t.count("split count");
        for (std::size_t s = 0; s < splits; ++s) {
            const std::size_t parent = t.count("split parent");
            if (parent >= sys.node_count()) throw DataError("model file: split parent out of range");
            sys.split(parent, read_point(t, d, "split coordinate"));
        }
        t.expect("weights");
        const std::size_t k = t.count("weight vector count");
        std::vector<WeightVector> weights;
        for (std::size_t j = 0; j < k; ++j) {
            WeightVector w;
            for (std::size_t i = 0; i < sys.vertex_count(); ++i) {
                if (t.peek() == "x") {
                    t.next("weight");
                    w.push_excluded();
                } else {
                    w.push_back(t.number("weight"));
                }
            }
            weights.push_back(std::move(w));
        }
        return {std::move(sys), std::move(weights)};
    } catch (const DataError&) {
        throw;
    } catch (const Error& e) {
        throw DataError(std::string("model file describes an invalid system: ") + e.what());
    }
}

}  // namespace

void save_system(std::ostream& out, const NestedSystem& sys, const std::vector<WeightVector>& weights) {
    write_system(out, sys, weights);
    out << "end\n";
}

WeightedSystem load_system(std::istream& in) {
    Tokens t(in);
    auto ws = read_system(t);
    while (true) {
        const std::string next = t.next("end");
        if (next == "end") break;
    }
    return ws;
}

void save_model(std::ostream& out, const Model& model) {
    write_system(out, model.system, model.weights);
    out << "classes " << model.classes.size();
    for (int c : model.classes) out << ' ' << c;
    out << '\n';
    out << "transform\n";
    out << "scale " << fmt::format("{}", model.transform.scale) << '\n';
    out << "source ";
    write_point(out, model.transform.source);
    out << "target ";
    write_point(out, model.transform.target);
    out << "training " << model.stages_used << ' ' << model.data_splits << ' ' << fmt::format("{}", model.C) << '\n';
    out << "end\n";
}

void save_model_file(const std::string& path, const Model& model) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    save_model(out, model);
    if (!out) throw DataError("write failed for '" + path + "'");
}

Model load_model(std::istream& in) {
    Tokens t(in);
    auto [sys, weights] = read_system(t);
    const std::size_t d = sys.dim();

    t.expect("classes");
    const std::size_t m = t.count("class count");
    if (m == 0 || m > 1000000) throw DataError("model file: bad class count");
    std::vector<int> classes;
    for (std::size_t i = 0; i < m; ++i) {
        const double c = t.number("class id");
        if (c != std::round(c)) throw DataError("model file: class ids must be integers");
        classes.push_back(static_cast<int>(c));
    }
    const std::size_t expected = m == 1 ? 0 : (m == 2 ? 1 : m);
    if (weights.size() != expected)
        throw DataError(fmt::format("model file: {} classes need {} weight vectors, found {}", m, expected,
                                    weights.size()));

    t.expect("transform");
    AffineTransform transform;
    t.expect("scale");
    transform.scale = t.number("scale");
    t.expect("source");
    transform.source = read_point(t, d, "transform source");
    t.expect("target");
    transform.target = read_point(t, d, "transform target");

    t.expect("training");
    const std::size_t stages = t.count("stage count");
    const std::size_t splits = t.count("data split count");
    const double C = t.number("C");
    t.expect("end");

    return Model{std::move(sys), std::move(weights), std::move(transform), std::move(classes),
                 static_cast<int>(stages), splits, C};
}

Model load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model '" + path + "'");
    return load_model(in);
}

}  // namespace nbcs
