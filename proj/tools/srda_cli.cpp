// srda: smoothness-regularized unsupervised domain adaptation.
//
// Subcommands: gen-data (synthetic shifted-domain datasets), train (the
// three-step schedule), eval (accuracy / mean LSD / disagreement proxy on a
// checkpoint), gradcheck (backprop vs central finite differences).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "srda/config.hpp"
#include "srda/gradcheck.hpp"
#include "srda/log.hpp"
#include "srda/metrics.hpp"
#include "srda/model.hpp"
#include "srda/train.hpp"

namespace fs = std::filesystem;
using namespace srda;

namespace {

std::string real6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int cmd_gen_data(const std::string& kind, std::size_t n, double noise_sd, double rotate,
                 const std::vector<double>& translate, std::size_t classes,
                 std::uint64_t seed, const std::string& out_dir) {
    RunSpec spec;
    spec.data_kind = kind;
    spec.data_n = n;
    spec.noise_sd = noise_sd;
    spec.rotate_deg = rotate;
    spec.translate = translate;
    spec.blob_classes = classes;
    spec.data_seed = seed;
    spec.standardize = false; // raw export; training standardizes on load
    if (kind != "two-moons" && kind != "blobs")
        throw ConfigError("gen-data: kind must be two-moons or blobs");
    spec.validate();
    const DomainPair pair = load_domains(spec);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_dataset_csv_file(pair.source, (dir / "source.csv").string());
    write_dataset_csv_file(pair.target, (dir / "target.csv").string());
    std::ofstream manifest(dir / "manifest.txt", std::ios::binary);
    if (!manifest) throw IoError("cannot write manifest");
    manifest << "kind = " << kind << "\n";
    manifest << "n = " << n << "\n";
    manifest << "noise_sd = " << noise_sd << "\n";
    manifest << "rotate = " << rotate << "\n";
    if (!translate.empty()) {
        manifest << "translate = ";
        for (std::size_t i = 0; i < translate.size(); ++i)
            manifest << (i ? "," : "") << translate[i];
        manifest << "\n";
    }
    if (kind == "blobs") manifest << "classes = " << classes << "\n";
    manifest << "seed = " << seed << "\n";
    manifest << "source = source.csv\n";
    manifest << "target = target.csv\n";
    log_info("wrote " + (dir / "source.csv").string() + ", target.csv, manifest.txt");
    return 0;
}

int cmd_train(const RunSpec& spec) {
    spec.validate();
    const DomainPair pair = load_domains(spec);
    const TrainConfig cfg = spec.resolved_train_config();

    Rng init(model_init_seed(cfg.seed));
    Model model(GeneratorSpec{spec.generator_widths}, ClassifierSpec{spec.classifier_widths},
                init);
    if (pair.source.dim() != model.input_width())
        throw ConfigError("model.generator input width (" +
                          std::to_string(model.input_width()) +
                          ") does not match data dim (" + std::to_string(pair.source.dim()) +
                          ")");

    fs::create_directories(spec.out_dir);
    const fs::path dir(spec.out_dir);
    {
        std::ofstream echo(dir / "config_resolved.cfg", std::ios::binary);
        if (!echo) throw IoError("cannot write resolved config");
        write_run_spec(spec, echo);
    }
    if (spec.data_kind != "idx") {
        write_dataset_csv_file(pair.source, (dir / "source_used.csv").string());
        write_dataset_csv_file(pair.target, (dir / "target_used.csv").string());
    }

    Trainer trainer(std::move(model), cfg);
    std::size_t logged = 0;
    auto epoch_end = [&](std::size_t epoch, const Model& m) {
        if (spec.checkpoint_every && (epoch + 1) % spec.checkpoint_every == 0 &&
            epoch + 1 != cfg.epochs) {
            save_checkpoint(m, (dir / ("checkpoint_epoch" + std::to_string(epoch) + ".ckpt"))
                                   .string());
        }
        const auto& hist = trainer.history();
        while (logged < hist.size()) {
            const auto& rec = hist[logged++];
            std::string line = "epoch " + std::to_string(rec.epoch) +
                               ": source_loss=" + real6(rec.source_loss) +
                               " mean_lsd=" + real6(rec.mean_lsd);
            if (rec.target_accuracy)
                line += " target_accuracy=" + real6(*rec.target_accuracy);
            line += " hdh_proxy=" + real6(rec.hdh_proxy);
            log_info(line);
        }
    };
    trainer.run(pair.source, pair.target, {}, epoch_end);

    save_checkpoint(trainer.model(), (dir / "model.ckpt").string());
    emit_csv_file(trainer.history(), (dir / "metrics.csv").string());
    log_info("wrote " + (dir / "model.ckpt").string() + " and metrics.csv");
    return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& data_path,
             const std::string& labels_path, const std::string& standardize_fit,
             const NoisePlan& plan, std::uint64_t seed) {
    const Model model = load_checkpoint(checkpoint);
    Dataset ds;
    if (data_path.size() > 4 && data_path.substr(data_path.size() - 4) == ".csv") {
        ds = read_dataset_csv_file(data_path);
    } else {
        ds = load_idx_dataset(data_path, labels_path, "eval");
    }
    if (!standardize_fit.empty()) {
        const Dataset fit = read_dataset_csv_file(standardize_fit);
        ds = standardize(fit, ds);
    }
    if (ds.dim() != model.input_width())
        throw InvalidInput("eval: dataset dim does not match the checkpoint input width");

    std::cout << "plan=" << to_string(plan.kind) << "\n";
    std::cout << "epsilon=" << real6(plan.epsilon) << "\n";
    std::cout << "seed=" << seed << "\n";
    std::cout << "n=" << ds.size() << "\n";
    if (ds.labeled()) std::cout << "accuracy=" << real6(accuracy(model, ds)) << "\n";
    std::size_t fallbacks = 0;
    std::cout << "mean_lsd=" << real6(mean_lsd(model, ds, plan, seed, &fallbacks)) << "\n";
    std::cout << "hdh_proxy=" << real6(hdh_proxy(model, ds, plan, seed)) << "\n";
    std::cout << "flat_fallbacks=" << fallbacks << "\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed, std::size_t n_seeds, bool corrupt, double tol) {
    GradCheckReport worst;
    worst.entries = {{"source_loss", 0.0, ""}, {"entropy_loss", 0.0, ""}, {"lsd_value", 0.0, ""}};
    for (std::size_t s = 0; s < n_seeds; ++s) {
        const auto rep = gradcheck_losses(seed + s, corrupt);
        for (std::size_t i = 0; i < rep.entries.size(); ++i) {
            if (rep.entries[i].max_rel_error > worst.entries[i].max_rel_error) {
                worst.entries[i].max_rel_error = rep.entries[i].max_rel_error;
                worst.entries[i].worst_segment = rep.entries[i].worst_segment;
            }
        }
    }
    bool ok = true;
    for (const auto& e : worst.entries) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", e.max_rel_error);
        std::cout << e.loss_name << ": max_rel_error=" << buf;
        const bool pass = e.max_rel_error <= tol;
        std::cout << (pass ? " PASS" : " FAIL");
        if (!pass) std::cout << " (segment " << e.worst_segment << ")";
        std::cout << "\n";
        ok = ok && pass;
    }
    if (!ok) {
        log_error("gradient check failed");
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"smoothness-regularized unsupervised domain adaptation"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a shifted source/target dataset pair");
    std::string gd_kind;
    std::size_t gd_n = 400;
    double gd_noise = 0.1, gd_rotate = 0.0;
    std::vector<double> gd_translate;
    std::size_t gd_classes = 3;
    std::uint64_t gd_seed = 1;
    std::string gd_out = "data";
    gen->add_option("--kind", gd_kind, "two-moons or blobs")->required();
    gen->add_option("--n", gd_n, "samples per domain");
    gen->add_option("--noise-sd", gd_noise, "Gaussian jitter");
    gen->add_option("--rotate", gd_rotate, "target rotation in degrees");
    gen->add_option("--translate", gd_translate, "target offset (dx,dy)")->delimiter(',');
    gen->add_option("--classes", gd_classes, "blob count (blobs kind)");
    gen->add_option("--seed", gd_seed, "generation seed");
    gen->add_option("--out", gd_out, "output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "run the training schedule from a config file");
    std::string tr_config;
    std::string tr_plan, tr_out;
    std::uint64_t tr_seed = 0;
    bool tr_seed_set = false, tr_epochs_set = false, tr_eps_set = false;
    std::size_t tr_epochs = 0;
    double tr_eps = 0.0;
    train->add_option("--config", tr_config, "run config file")->required();
    train->add_option("--plan", tr_plan, "override train.plan (none|isotropic|fgsm|vat)");
    train->add_option("--seed", tr_seed, "override train.seed")
        ->each([&](const std::string&) { tr_seed_set = true; });
    train->add_option("--epochs", tr_epochs, "override train.epochs")
        ->each([&](const std::string&) { tr_epochs_set = true; });
    train->add_option("--epsilon", tr_eps, "override train.epsilon")
        ->each([&](const std::string&) { tr_eps_set = true; });
    train->add_option("--out", tr_out, "override output.dir");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    std::string ev_ckpt, ev_data, ev_labels, ev_fit, ev_plan = "isotropic";
    NoisePlan ev_noise;
    std::uint64_t ev_seed = 1;
    ev->add_option("--checkpoint", ev_ckpt, "model checkpoint")->required();
    ev->add_option("--data", ev_data, "dataset (.csv, or IDX image file)")->required();
    ev->add_option("--labels", ev_labels, "IDX label file for --data");
    ev->add_option("--standardize-fit", ev_fit,
                   "csv whose per-feature stats standardize the eval data");
    ev->add_option("--plan", ev_plan, "noise plan for the LSD metric");
    ev->add_option("--epsilon", ev_noise.epsilon, "perturbation norm");
    ev->add_option("--vat-xi", ev_noise.vat_xi, "VAT probe scale");
    ev->add_option("--vat-power-iters", ev_noise.vat_power_iters, "VAT power iterations");
    ev->add_option("--seed", ev_seed, "evaluation seed");

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck",
                                  "check backprop against central finite differences");
    std::uint64_t gc_seed = 1;
    std::size_t gc_nseeds = 10;
    double gc_tol = 1e-4;
    bool gc_corrupt = false;
    gc->add_option("--seed", gc_seed, "first seed of the sweep");
    gc->add_option("--seeds", gc_nseeds, "number of seeds to sweep");
    gc->add_option("--tol", gc_tol, "max relative error accepted");
    gc->add_flag("--corrupt-backward", gc_corrupt,
                 "bias one analytic gradient (negative-control test hook)")
        ->group(""); // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the message
        return 2;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen_data(gd_kind, gd_n, gd_noise, gd_rotate, gd_translate, gd_classes,
                                gd_seed, gd_out);
        }
        if (train->parsed()) {
            RunSpec spec = parse_run_spec_file(tr_config);
            if (!tr_plan.empty()) spec.train.plan.kind = plan_kind_from_string(tr_plan);
            if (tr_seed_set) spec.train.seed = tr_seed;
            if (tr_epochs_set) spec.train.epochs = tr_epochs;
            if (tr_eps_set) spec.train.plan.epsilon = tr_eps;
            if (!tr_out.empty()) spec.out_dir = tr_out;
            return cmd_train(spec);
        }
        if (ev->parsed()) {
            ev_noise.kind = plan_kind_from_string(ev_plan);
            if (ev_noise.kind == PlanKind::None)
                throw InvalidInput("eval: --plan must be isotropic, fgsm or vat");
            return cmd_eval(ev_ckpt, ev_data, ev_labels, ev_fit, ev_noise, ev_seed);
        }
        if (gc->parsed()) {
            return cmd_gradcheck(gc_seed, gc_nseeds, gc_corrupt, gc_tol);
        }
    } catch (const ConfigError& e) {
        log_error(e.what());
        return 2;
    } catch (const Error& e) {
        log_error(e.what());
        return 1;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 1;
    }
    return 0;
}
