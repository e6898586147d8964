#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nbcs/bench.hpp"
#include "nbcs/dataset_io.hpp"
#include "nbcs/error.hpp"
#include "nbcs/experiment.hpp"
#include "nbcs/learner.hpp"
#include "nbcs/model_io.hpp"
#include "nbcs/polytope_approx.hpp"
#include "nbcs/svg.hpp"

namespace {

using namespace nbcs;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

// Shortest text that parses back to the same double.
std::string num(double v) { return fmt::format("{}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string("NA"); }

ParsedDataset load_dataset(const std::string& path, const std::string& format, std::size_t dim = 0) {
    if (format == "csv") {
        auto parsed = read_csv_file(path, true);
        if (dim != 0 && parsed.data.size() > 0 && parsed.data.dim != dim)
            throw DataError(fmt::format("'{}' has {} features, model expects {}", path, parsed.data.dim, dim));
        if (dim != 0) parsed.data.dim = dim;
        return parsed;
    }
    return read_libsvm_file(path, dim);
}

// Output goes to a file when a path is given, otherwise to stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw DataError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string input;
    std::string format = "libsvm";
    std::string strategy = "adaptive";
    int q = 3;
    double C = 1.0;
    bool cv = false;
    int folds = 5;
    std::uint64_t seed = 1;
    double splits = 0.7;
    int trials = 1;
    std::string test;
    std::string model;
    std::string report;
    std::string holdout;
    std::size_t min_misclassified = 0;
    std::size_t threads = 0;
    bool timing = false;
};

int cmd_train(const TrainArgs& a) {
    const ParsedDataset parsed = load_dataset(a.input, a.format);
    if (!parsed.labeled) throw DataError("training data needs labels");
    const LabeledDataset& data = parsed.data;
    if (data.size() == 0) throw DataError("training file '" + a.input + "' has no rows");

    TrialConfig cfg;
    cfg.fit.strategy = a.strategy == "uniform" ? Strategy::Uniform : Strategy::Adaptive;
    cfg.fit.q = a.q;
    cfg.fit.C = a.C;
    cfg.fit.min_misclassified = a.min_misclassified;
    cfg.cross_validate = a.cv;
    cfg.cv.folds = a.folds;
    cfg.train_fraction = a.splits;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.threads = a.threads;

    std::optional<Model> model;
    std::vector<TrialResult> results;
    if (!a.test.empty()) {
        ParsedDataset test = load_dataset(a.test, a.format, data.dim);
        if (!test.labeled) throw DataError("test data needs labels");
        results.push_back(run_trial(data, &test.data, cfg, a.seed, &model));
    } else if (a.splits >= 1.0) {
        results.push_back(run_trial(data, nullptr, cfg, a.seed, &model));
    } else {
        LabeledDataset holdout;
        results = run_trials(data, cfg, &model, &holdout);
        if (!a.holdout.empty()) write_libsvm_file(a.holdout, holdout);
    }
    if (!a.model.empty()) save_model_file(a.model, *model);

    const std::string name = std::filesystem::path(a.input).stem().string();
    Sink sink(a.report);
    std::ostream& out = sink.stream();
    out << "dataset,trial,seed,n,d,strategy,C,q,stages,leaves,data_splits,train_n,test_n,train_accuracy,"
           "test_accuracy,margin_bound,vc_compression_bound";
    if (a.timing) out << ",seconds";
    out << '\n';
    double sum = 0.0, sum_sq = 0.0;
    std::size_t scored = 0;
    for (const auto& r : results) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", name, r.trial, r.seed, data.size(),
                           data.dim, a.strategy, num(r.C), r.q, r.stages, r.leaves, r.data_splits, r.train_size,
                           r.test_size, num(r.train_accuracy), num(r.test_accuracy), num(r.margin_bound),
                           num(r.vc_bound));
        if (a.timing) out << ',' << num(r.seconds);
        out << '\n';
        if (r.test_accuracy) {
            sum += *r.test_accuracy;
            sum_sq += *r.test_accuracy * *r.test_accuracy;
            ++scored;
        }
    }
    if (scored > 1) {
        const double mean = sum / static_cast<double>(scored);
        const double var = std::max(0.0, sum_sq / static_cast<double>(scored) - mean * mean);
        std::cerr << fmt::format("mean test accuracy {:.4f} +- {:.4f} over {} trials\n", mean, std::sqrt(var), scored);
    } else if (scored == 1) {
        std::cerr << fmt::format("test accuracy {:.4f}\n", *results.front().test_accuracy);
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct PredictArgs {
    std::string model;
    std::string input;
    std::string format = "libsvm";
    std::string output;
};

int cmd_predict(const PredictArgs& a) {
    const Model model = load_model_file(a.model);
    const ParsedDataset parsed = load_dataset(a.input, a.format, model.system.dim());
    Sink sink(a.output);
    std::ostream& out = sink.stream();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < parsed.data.size(); ++i) {
        const int label = model.predict(parsed.data.points[i]);
        out << label << '\n';
        if (label == parsed.data.labels[i]) ++hits;
    }
    if (parsed.labeled && parsed.data.size() > 0) {
        const double acc = static_cast<double>(hits) / static_cast<double>(parsed.data.size());
        std::cerr << fmt::format("accuracy {} ({}/{})\n", num(acc), hits, parsed.data.size());
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ApproxArgs {
    std::optional<int> stages;
    std::optional<double> epsilon;
    int max_stages = 8;
    std::string polygon;
    std::string out_dir = ".";
    std::string model;
};

Polygon2D parse_polygon(const std::string& text) {
    Polygon2D p;
    std::stringstream ss(text);
    std::string vertex;
    while (std::getline(ss, vertex, ';')) {
        const auto comma = vertex.find(',');
        if (comma == std::string::npos) throw DomainError("polygon vertices must be written x,y");
        try {
            std::size_t used_x = 0, used_y = 0;
            const std::string xs = vertex.substr(0, comma), ys = vertex.substr(comma + 1);
            const double x = std::stod(xs, &used_x);
            const double y = std::stod(ys, &used_y);
            if (used_x != xs.size() || used_y != ys.size()) throw std::invalid_argument(vertex);
            p.vertices.emplace_back(x, y);
        } catch (const std::logic_error&) {
            throw DomainError("bad polygon vertex '" + vertex + "'");
        }
    }
    // Accept either orientation; the clipping code wants counter-clockwise.
    double twice_area = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = p.vertices[i];
        const auto& v = p.vertices[(i + 1) % p.size()];
        twice_area += u.x() * v.y() - v.x() * u.y();
    }
    if (twice_area < 0.0) std::reverse(p.vertices.begin(), p.vertices.end());
    return p;
}

int cmd_approx(const ApproxArgs& a) {
    ApproxConfig cfg;
    cfg.target = a.polygon.empty() ? builtin_pentagon() : parse_polygon(a.polygon);
    cfg.max_stages = a.max_stages;
    cfg.epsilon = a.epsilon;
    cfg.stages = a.stages.value_or(4);
    const ApproxResult result = approximate(cfg);

    const std::filesystem::path dir(a.out_dir);
    std::filesystem::create_directories(dir);
    for (std::size_t s = 1; s < result.snapshots.size(); ++s) {
        const auto& snap = result.snapshots[s];
        std::ofstream svg(dir / fmt::format("stage_{}.svg", s));
        if (!svg) throw DataError("cannot write SVG into '" + a.out_dir + "'");
        svg << render_stage_svg(snap.system, snap.weights, cfg.target, fmt::format("stage {}", s));
    }
    std::ofstream csv(dir / "metrics.csv");
    if (!csv) throw DataError("cannot write metrics into '" + a.out_dir + "'");
    csv << "stage,leaves,max_diameter,region_area,error_area,error_ratio,containment_margin\n";
    for (const auto& m : result.stages)
        csv << fmt::format("{},{},{},{},{},{},{}\n", m.stage, m.leaves, num(m.max_diameter), num(m.region_area),
                           num(m.error_area), num(m.error_ratio), num(m.containment_margin));
    if (!a.model.empty()) {
        std::ofstream out(a.model);
        if (!out) throw DataError("cannot write '" + a.model + "'");
        save_system(out, result.system(), {result.weights()});
    }
    const auto& last = result.stages.back();
    std::cerr << fmt::format("stage {}: {} leaves, error ratio {:.5f}\n", last.stage, last.leaves, last.error_ratio);
    for (const auto& m : result.stages)
        if (!m.contains_target) {
            std::cerr << fmt::format("containment violated at stage {} (margin {})\n", m.stage, m.containment_margin);
            return kExitNumerical;
        }
    return 0;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::size_t n = 1000;
    std::size_t d = 2;
    std::size_t halfspaces = 5;
    double margin = 0.05;
    std::uint64_t seed = 1;
    std::string output;
};

int cmd_generate(const GenerateArgs& a) {
    const PolytopeDataset gen = generate_polytope_dataset(a.n, a.d, a.halfspaces, a.margin, a.seed);
    Sink sink(a.output);
    write_libsvm(sink.stream(), gen.data);
    std::cerr << fmt::format("kept {} points, discarded {}\n", gen.data.size(), gen.discarded);
    return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
    std::vector<std::size_t> sizes = {10000, 20000, 40000};
    std::size_t d = 2;
    int q = 3;
    int repeats = 7;
    int epochs = 20;
    std::uint64_t seed = 1;
    std::string output;
};

int cmd_bench(const BenchArgs& a) {
    BenchConfig cfg;
    cfg.sizes = a.sizes;
    cfg.d = a.d;
    cfg.q = a.q;
    cfg.repeats = a.repeats;
    cfg.epochs = a.epochs;
    cfg.seed = a.seed;
    const auto rows = run_training_bench(cfg);
    Sink sink(a.output);
    std::ostream& out = sink.stream();
    out << "n,d,q,leaves,seconds,ratio_to_previous\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string ratio = i == 0 ? "NA" : num(r.seconds / rows[i - 1].seconds);
        out << fmt::format("{},{},{},{},{},{}\n", r.n, r.d, r.q, r.leaves, num(r.seconds), ratio);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested barycentric coordinate classifiers and convex-body approximation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "nbcs 0.1.0");

    TrainArgs train;
    auto* t = app.add_subcommand("train", "Train a classifier and write a CSV report");
    t->add_option("--input", train.input, "Training data")->required()->check(CLI::ExistingFile);
    t->add_option("--format", train.format, "libsvm or csv")->check(CLI::IsMember({"libsvm", "csv"}));
    t->add_option("--strategy", train.strategy, "uniform or adaptive")
        ->check(CLI::IsMember({"uniform", "adaptive"}));
    t->add_option("--q", train.q, "Stages (uniform) or stage bound (adaptive)")->check(CLI::Range(0, 12));
    t->add_option("--C", train.C, "SVM regularisation constant")->check(CLI::PositiveNumber);
    t->add_flag("--cv", train.cv, "Cross-validate C and q on each training split");
    t->add_option("--folds", train.folds, "Cross-validation folds")->check(CLI::Range(2, 100));
    t->add_option("--seed", train.seed, "Base seed; trial t uses seed + t");
    t->add_option("--splits", train.splits, "Training fraction of each random split (1 trains on everything)")
        ->check(CLI::Range(0.01, 1.0));
    t->add_option("--trials", train.trials, "Number of random splits")->check(CLI::Range(1, 1000));
    t->add_option("--test", train.test, "Separate test file (disables random splits)")->check(CLI::ExistingFile);
    t->add_option("--model", train.model, "Write the first trial's model here");
    t->add_option("--report", train.report, "CSV report path (default stdout)");
    t->add_option("--holdout", train.holdout, "Write the first trial's test split here (LibSVM)");
    t->add_option("--min-misclassified", train.min_misclassified, "Adaptive skip threshold (0 = default)");
    t->add_option("--threads", train.threads, "Worker threads (default NBCS_THREADS or all cores)");
    t->add_flag("--timing", train.timing, "Add a wall-clock seconds column (breaks byte-identical reports)");

    PredictArgs predict;
    auto* p = app.add_subcommand("predict", "Predict labels with a saved model");
    p->add_option("--model", predict.model, "Model file")->required();
    p->add_option("--input", predict.input, "Data to classify")->required()->check(CLI::ExistingFile);
    p->add_option("--format", predict.format, "libsvm or csv")->check(CLI::IsMember({"libsvm", "csv"}));
    p->add_option("--output", predict.output, "Predictions path (default stdout)");

    ApproxArgs approx;
    auto* a = app.add_subcommand("approx", "Approximate a convex polygon; writes SVGs and metrics.csv");
    a->add_option("--stages", approx.stages, "Number of stages")->check(CLI::NonNegativeNumber);
    a->add_option("--epsilon", approx.epsilon, "Stop once the error ratio is at most this")
        ->check(CLI::PositiveNumber);
    a->add_option("--max-stages", approx.max_stages, "Stage cap")->check(CLI::Range(0, 12));
    a->add_option("--polygon", approx.polygon, "Target as \"x,y;x,y;...\" in root coordinates");
    a->add_option("--out-dir", approx.out_dir, "Output directory");
    a->add_option("--model", approx.model, "Also save the final system and weights");
    a->get_option("--stages")->excludes("--epsilon");

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Sample a synthetic polytope dataset (LibSVM, labels +-1)");
    g->add_option("--n", gen.n, "Points to draw before the margin filter")->check(CLI::PositiveNumber);
    g->add_option("--d", gen.d, "Dimension")->check(CLI::PositiveNumber);
    g->add_option("--halfspaces", gen.halfspaces, "Halfspaces defining the polytope")->check(CLI::PositiveNumber);
    g->add_option("--margin", gen.margin, "Discard band around the boundary")->check(CLI::NonNegativeNumber);
    g->add_option("--seed", gen.seed, "Seed");
    g->add_option("--output", gen.output, "Output path (default stdout)");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Time uniform training as n grows; writes CSV");
    b->add_option("--sizes", bench.sizes, "Sample sizes")->delimiter(',');
    b->add_option("--d", bench.d, "Dimension")->check(CLI::PositiveNumber);
    b->add_option("--q", bench.q, "Stages")->check(CLI::Range(0, 8));
    b->add_option("--repeats", bench.repeats, "Repeats per size (fastest kept)")->check(CLI::Range(1, 100));
    b->add_option("--epochs", bench.epochs, "Fixed SVM epochs")->check(CLI::Range(1, 100000));
    b->add_option("--seed", bench.seed, "Seed");
    b->add_option("--output", bench.output, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (t->parsed()) return cmd_train(train);
        if (p->parsed()) return cmd_predict(predict);
        if (a->parsed()) return cmd_approx(approx);
        if (g->parsed()) return cmd_generate(gen);
        if (b->parsed()) return cmd_bench(bench);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
