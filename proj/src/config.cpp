#include "srda/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace srda {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct LineContext {
    const std::string& file;
    std::size_t line;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(file + ":" + std::to_string(line) + ": " + msg);
    }
};

double parse_real(const std::string& v, const LineContext& ctx) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) ctx.fail("trailing characters in number '" + v + "'");
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        ctx.fail("expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_count(const std::string& v, const LineContext& ctx) {
    try {
        std::size_t used = 0;
        const unsigned long long u = std::stoull(v, &used);
        if (used != v.size()) ctx.fail("trailing characters in count '" + v + "'");
        return u;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        ctx.fail("expected a nonnegative integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const LineContext& ctx) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    ctx.fail("expected true/false, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& v, const LineContext& ctx, F item) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(item(trim(cell), ctx));
    if (out.empty()) ctx.fail("expected a comma-separated list");
    return out;
}

} // namespace

void RunSpec::validate() const {
    if (data_kind == "two-moons" || data_kind == "blobs") {
        if (data_n < 2) throw ConfigError("data.n must be >= 2");
        if (data_kind == "blobs" && blob_classes < 2)
            throw ConfigError("data.classes must be >= 2");
    } else if (data_kind == "csv") {
        if (source_path.empty() || target_path.empty())
            throw ConfigError("csv data kind requires data.source and data.target");
    } else if (data_kind == "idx") {
        if (source_images.empty() || source_labels.empty() || target_images.empty())
            throw ConfigError(
                "idx data kind requires data.source_images, data.source_labels and "
                "data.target_images");
    } else {
        throw ConfigError("unknown data.kind '" + data_kind + "'");
    }
    if (generator_widths.size() < 2) throw ConfigError("model.generator needs >= 2 widths");
    if (classifier_widths.size() < 2) throw ConfigError("model.classifier needs >= 2 widths");
    if (generator_widths.back() != classifier_widths.front())
        throw ConfigError("model.generator feature width must match model.classifier input");
    if (classifier_widths.back() < 2) throw ConfigError("model.classifier needs >= 2 classes");
    TrainConfig tc = resolved_train_config();
    tc.validate();
}

TrainConfig RunSpec::resolved_train_config() const {
    TrainConfig tc = train;
    if (!entropy_enabled) tc.entropy_weight = 0.0;
    tc.resolve_learning_rates();
    return tc;
}

RunSpec parse_run_spec(std::istream& in, const std::string& filename) {
    RunSpec spec;
    spec.train.entropy_weight = 0.05; // used only when entropy is enabled
    std::string section;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const LineContext ctx{filename, lineno};
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') ctx.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "data" && section != "model" && section != "train" &&
                section != "output")
                ctx.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) ctx.fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) ctx.fail("empty key");
        if (value.empty()) ctx.fail("empty value for key '" + key + "'");
        if (section.empty()) ctx.fail("key '" + key + "' outside any section");

        if (section == "data") {
            if (key == "kind") spec.data_kind = value;
            else if (key == "n") spec.data_n = parse_count(value, ctx);
            else if (key == "classes") spec.blob_classes = parse_count(value, ctx);
            else if (key == "noise_sd") spec.noise_sd = parse_real(value, ctx);
            else if (key == "rotate") spec.rotate_deg = parse_real(value, ctx);
            else if (key == "translate")
                spec.translate = parse_list<double>(value, ctx, parse_real);
            else if (key == "source") spec.source_path = value;
            else if (key == "target") spec.target_path = value;
            else if (key == "source_images") spec.source_images = value;
            else if (key == "source_labels") spec.source_labels = value;
            else if (key == "target_images") spec.target_images = value;
            else if (key == "target_labels") spec.target_labels = value;
            else if (key == "n_source") spec.n_source = parse_count(value, ctx);
            else if (key == "n_target") spec.n_target = parse_count(value, ctx);
            else if (key == "standardize") spec.standardize = parse_bool(value, ctx);
            else if (key == "seed") spec.data_seed = parse_count(value, ctx);
            else ctx.fail("unknown key 'data." + key + "'");
        } else if (section == "model") {
            auto widths = [&]() {
                return parse_list<std::size_t>(value, ctx, [](const std::string& s,
                                                              const LineContext& c) {
                    const auto n = parse_count(s, c);
                    if (n == 0) c.fail("layer width must be positive");
                    return static_cast<std::size_t>(n);
                });
            };
            if (key == "generator") spec.generator_widths = widths();
            else if (key == "classifier") spec.classifier_widths = widths();
            else ctx.fail("unknown key 'model." + key + "'");
        } else if (section == "train") {
            if (key == "epochs") spec.train.epochs = parse_count(value, ctx);
            else if (key == "batch_size") spec.train.batch_size = parse_count(value, ctx);
            else if (key == "lr_source") spec.train.lr_source = parse_real(value, ctx);
            else if (key == "lr_smooth") spec.train.lr_smooth = parse_real(value, ctx);
            else if (key == "optimizer") {
                if (value == "adam") spec.train.optimizer = OptimizerKind::Adam;
                else if (value == "sgd") spec.train.optimizer = OptimizerKind::Sgd;
                else ctx.fail("optimizer must be adam or sgd");
            } else if (key == "plan") {
                try {
                    spec.train.plan.kind = plan_kind_from_string(value);
                } catch (const InvalidInput& e) {
                    ctx.fail(e.what());
                }
            } else if (key == "epsilon") spec.train.plan.epsilon = parse_real(value, ctx);
            else if (key == "vat_xi") spec.train.plan.vat_xi = parse_real(value, ctx);
            else if (key == "vat_power_iters")
                spec.train.plan.vat_power_iters = static_cast<int>(parse_count(value, ctx));
            else if (key == "entropy") spec.entropy_enabled = parse_bool(value, ctx);
            else if (key == "entropy_weight") spec.train.entropy_weight = parse_real(value, ctx);
            else if (key == "entropy_stage") {
                if (value == "smooth") spec.train.entropy_stage = EntropyStage::Smooth;
                else if (value == "source") spec.train.entropy_stage = EntropyStage::Source;
                else ctx.fail("entropy_stage must be smooth or source");
            } else if (key == "warmup_epochs") spec.train.warmup_epochs = parse_count(value, ctx);
            else if (key == "seed") spec.train.seed = parse_count(value, ctx);
            else if (key == "eval_every") spec.train.eval_every = parse_count(value, ctx);
            else ctx.fail("unknown key 'train." + key + "'");
        } else { // output
            if (key == "dir") spec.out_dir = value;
            else if (key == "checkpoint_every") spec.checkpoint_every = parse_count(value, ctx);
            else ctx.fail("unknown key 'output." + key + "'");
        }
    }
    return spec;
}

RunSpec parse_run_spec_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path);
    return parse_run_spec(f, path);
}

namespace {

std::string real_str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_run_spec(const RunSpec& spec, std::ostream& out) {
    out << "[data]\n";
    out << "kind = " << spec.data_kind << "\n";
    if (spec.data_kind == "two-moons" || spec.data_kind == "blobs") {
        out << "n = " << spec.data_n << "\n";
        if (spec.data_kind == "blobs") out << "classes = " << spec.blob_classes << "\n";
        out << "noise_sd = " << real_str(spec.noise_sd) << "\n";
        out << "rotate = " << real_str(spec.rotate_deg) << "\n";
        if (!spec.translate.empty()) {
            out << "translate = ";
            for (std::size_t i = 0; i < spec.translate.size(); ++i)
                out << (i ? "," : "") << real_str(spec.translate[i]);
            out << "\n";
        }
        out << "seed = " << spec.data_seed << "\n";
    } else if (spec.data_kind == "csv") {
        out << "source = " << spec.source_path << "\n";
        out << "target = " << spec.target_path << "\n";
    } else {
        out << "source_images = " << spec.source_images << "\n";
        out << "source_labels = " << spec.source_labels << "\n";
        out << "target_images = " << spec.target_images << "\n";
        if (!spec.target_labels.empty())
            out << "target_labels = " << spec.target_labels << "\n";
        if (spec.n_source) out << "n_source = " << spec.n_source << "\n";
        if (spec.n_target) out << "n_target = " << spec.n_target << "\n";
    }
    out << "standardize = " << (spec.standardize ? "true" : "false") << "\n";
    out << "\n[model]\n";
    out << "generator = ";
    for (std::size_t i = 0; i < spec.generator_widths.size(); ++i)
        out << (i ? "," : "") << spec.generator_widths[i];
    out << "\nclassifier = ";
    for (std::size_t i = 0; i < spec.classifier_widths.size(); ++i)
        out << (i ? "," : "") << spec.classifier_widths[i];
    out << "\n";
    TrainConfig tc = spec.train;
    tc.resolve_learning_rates();
    out << "\n[train]\n";
    out << "epochs = " << tc.epochs << "\n";
    out << "batch_size = " << tc.batch_size << "\n";
    out << "lr_source = " << real_str(tc.lr_source) << "\n";
    out << "lr_smooth = " << real_str(tc.lr_smooth) << "\n";
    out << "optimizer = " << (tc.optimizer == OptimizerKind::Adam ? "adam" : "sgd") << "\n";
    out << "plan = " << to_string(tc.plan.kind) << "\n";
    out << "epsilon = " << real_str(tc.plan.epsilon) << "\n";
    if (tc.plan.kind == PlanKind::Vat) {
        out << "vat_xi = " << real_str(tc.plan.vat_xi) << "\n";
        out << "vat_power_iters = " << tc.plan.vat_power_iters << "\n";
    }
    out << "entropy = " << (spec.entropy_enabled ? "true" : "false") << "\n";
    out << "entropy_weight = " << real_str(tc.entropy_weight) << "\n";
    out << "entropy_stage = "
        << (tc.entropy_stage == EntropyStage::Smooth ? "smooth" : "source") << "\n";
    out << "warmup_epochs = " << tc.warmup_epochs << "\n";
    out << "seed = " << tc.seed << "\n";
    out << "eval_every = " << tc.eval_every << "\n";
    out << "\n[output]\n";
    out << "dir = " << spec.out_dir << "\n";
    out << "checkpoint_every = " << spec.checkpoint_every << "\n";
}

DomainPair load_domains(const RunSpec& spec) {
    spec.validate();
    const std::uint64_t dseed =
        spec.data_seed ? spec.data_seed : derive_seed(spec.train.seed, 0xDA7A);
    Rng source_rng(derive_seed(dseed, 1));
    Rng target_rng(derive_seed(dseed, 2));
    DomainPair pair;
    if (spec.data_kind == "two-moons" || spec.data_kind == "blobs") {
        if (spec.data_kind == "two-moons") {
            pair.source = gen_two_moons(spec.data_n, spec.noise_sd, source_rng);
            pair.target = gen_two_moons(spec.data_n, spec.noise_sd, target_rng);
        } else {
            pair.source = gen_blobs(spec.data_n, spec.blob_classes, spec.noise_sd, source_rng);
            pair.target = gen_blobs(spec.data_n, spec.blob_classes, spec.noise_sd, target_rng);
        }
        if (spec.rotate_deg != 0.0) pair.target = rotate_domain(pair.target, spec.rotate_deg);
        if (!spec.translate.empty()) pair.target = translate_domain(pair.target, spec.translate);
        pair.source.name = "source";
        pair.target.name = "target";
    } else if (spec.data_kind == "csv") {
        pair.source = read_dataset_csv_file(spec.source_path);
        pair.target = read_dataset_csv_file(spec.target_path);
    } else { // idx
        pair.source = load_idx_dataset(spec.source_images, spec.source_labels, "source");
        pair.target = load_idx_dataset(spec.target_images, spec.target_labels, "target");
        if (spec.n_source && spec.n_source < pair.source.size()) {
            Rng r = source_rng.child(7);
            pair.source = subsample(pair.source, spec.n_source, r);
        }
        if (spec.n_target && spec.n_target < pair.target.size()) {
            Rng r = target_rng.child(7);
            pair.target = subsample(pair.target, spec.n_target, r);
        }
    }
    if (spec.standardize) {
        // Fit on source only; the same transform is applied to the target.
        Dataset fit = pair.source;
        pair.source = standardize(fit, pair.source);
        pair.target = standardize(fit, pair.target);
    }
    return pair;
}

} // namespace srda
