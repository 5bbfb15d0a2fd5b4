// fwm: embed, attack, and detect frequency-carrier watermarks in small
// convolutional hosts. See README.md for the file formats.

#include <cinttypes>
#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fwm/analysis.hpp"
#include "fwm/attacks.hpp"
#include "fwm/model_io.hpp"
#include "fwm/rng.hpp"

namespace {

using namespace fwm;

// Exit contract: 0 ok/match, 1 no-match, 2 usage or config, 3 data/numeric.
constexpr int kExitMatchFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct EmbedArgs {
    std::string out;
    std::string log_path;
    std::uint64_t seed = 42;
    double lambda = 5e-4;
    double noise_ratio = 0.5;
    int steps = 12000;
    double eta = 0.6;
    int batch = 12;
    int classes = 2;
    int samples = 48;
    int channels = 2;
    int rows = 9, cols = 9;
    int wm_filters = 16;
    int backbone_filters = 8;
    int ksize = 3;
    int radius = 1;
};

int run_embed(const EmbedArgs& a) {
    DatasetSpec dspec;
    dspec.n_classes = a.classes;
    dspec.samples_per_class = a.samples;
    dspec.channels = a.channels;
    dspec.rows = a.rows;
    dspec.cols = a.cols;
    dspec.band_limit = a.radius;
    dspec.seed = splitmix64(a.seed ^ 0xda7a);
    const Dataset data = synth_dataset(dspec);

    HostConfig hcfg;
    hcfg.n_classes = a.classes;
    hcfg.channels = a.channels;
    hcfg.rows = a.rows;
    hcfg.cols = a.cols;
    hcfg.backbone_filters = a.backbone_filters;
    hcfg.wm_filters = a.wm_filters;
    hcfg.ksize = a.ksize;
    hcfg.radius = a.radius;
    const HostNetwork host = make_host(hcfg, a.seed);

    LossConfig loss;
    loss.lambda = a.lambda;
    loss.noise_ratio = a.noise_ratio;
    loss.noise_seed = splitmix64(a.seed ^ 0x7ea1);

    std::vector<TrainLogRow> log;
    const HostNetwork trained = train(host, data, loss, SgdConfig{a.eta, a.steps}, a.batch, &log);
    if (!a.log_path.empty()) write_training_log_csv(a.log_path, log);

    const double clean = evaluate(trained, data);
    HostNetwork attacked = trained;
    attacked.wm = attack_overwrite(trained.wm, a.noise_ratio, splitmix64(a.seed ^ 0xa77c));
    const double under_attack = evaluate(attacked, data);

    ModelFile model;
    model.seed = a.seed;
    model.host = trained;
    model.meta = TrainingMeta{a.lambda,  a.noise_ratio, a.steps, a.eta, a.batch,
                              dspec.seed, log.empty() ? 0.0 : log.back().loss,
                              clean,      under_attack};
    save_model(a.out, model);
    std::printf("model written to %s\n", a.out.c_str());
    std::printf("clean accuracy: %.2f%%\n", clean);
    std::printf("accuracy under overwriting: %.2f%%\n", under_attack);
    return 0;
}

int run_extract(const std::string& model_path, const std::string& out) {
    const ModelFile model = load_model(model_path);
    if (!model.host.has_watermark)
        throw data_error("model has no watermark module");
    save_signature(out, extract_signature(model.host.wm));
    std::printf("signature written to %s\n", out.c_str());
    return 0;
}

int run_attack(const std::string& model_path, const std::string& spec_path,
               const std::string& out) {
    ModelFile model = load_model(model_path);
    const AttackSpec spec = load_attack_spec(spec_path);
    switch (spec.kind) {
        case AttackSpec::Kind::Scale:
            if (!model.host.has_watermark) throw data_error("model has no watermark module");
            model.host.wm = attack_scale(model.host.wm, spec.scale_a);
            std::printf("scaled watermark module by %g\n", spec.scale_a);
            break;
        case AttackSpec::Kind::Permute: {
            if (!model.host.has_watermark) throw data_error("model has no watermark module");
            auto [attacked, placement] = attack_permute(model.host.wm, spec.perm_seed);
            model.host.wm = attacked;
            std::printf("permuted %zu filters\n", placement.size());
            break;
        }
        case AttackSpec::Kind::Overwrite:
            if (!model.host.has_watermark) throw data_error("model has no watermark module");
            model.host.wm = attack_overwrite(model.host.wm, spec.noise_ratio, spec.noise_seed);
            std::printf("overwrote watermark weights at ratio %g\n", spec.noise_ratio);
            break;
        case AttackSpec::Kind::Finetune: {
            DatasetSpec task;
            task.n_classes = model.host.n_classes;
            task.channels = model.host.channels;
            task.rows = model.host.rows;
            task.cols = model.host.cols;
            task.band_limit = model.host.has_watermark ? model.host.wm.radius : 1;
            task.seed = spec.ft_dataset_seed;
            model.host = attack_finetune(model.host, task, spec.ft_sgd, spec.ft_batch);
            std::printf("fine-tuned for %d steps on task seed %" PRIu64 "\n", spec.ft_sgd.steps,
                        static_cast<std::uint64_t>(spec.ft_dataset_seed));
            break;
        }
    }
    save_model(out, model);
    std::printf("attacked model written to %s\n", out.c_str());
    return 0;
}

WatermarkSignature load_suspect(const std::string& path) {
    // Either a signature file or a model file; sniff by content.
    const nlohmann::json j = nlohmann::json::parse(read_text(path), nullptr, false);
    if (j.is_discarded()) throw data_error(path + ": not valid JSON");
    if (j.contains("components")) return load_signature(path);
    const ModelFile model = load_model(path);
    if (!model.host.has_watermark)
        throw data_error("suspect model has no watermark module");
    return extract_signature(model.host.wm);
}

int run_detect(const std::string& source, const std::string& suspect, double tau,
               double min_dr, const std::string& out) {
    const WatermarkSignature src = load_signature(source);
    const WatermarkSignature sus = load_suspect(suspect);
    const DetectionReport report = detect(src, sus, tau);

    double cmin = 1.0, csum = 0.0;
    for (double c : report.cosines) {
        cmin = std::min(cmin, c);
        csum += c;
    }
    std::printf("detection rate: %.2f%% (tau = %g)\n", report.dr, report.tau);
    std::printf("matched permutation:");
    for (int p : report.permutation) std::printf(" %d", p);
    std::printf("\n");
    if (!report.cosines.empty())
        std::printf("component cosines: min %.6f, mean %.6f over %zu components\n", cmin,
                    csum / static_cast<double>(report.cosines.size()), report.cosines.size());
    if (!out.empty()) save_report(out, report, src);
    if (report.dr >= min_dr) {
        std::printf("verdict: MATCH (DR >= %.1f%%)\n", min_dr);
        return 0;
    }
    std::printf("verdict: NO MATCH (DR < %.1f%%)\n", min_dr);
    return kExitMatchFailed;
}

int run_heatmap(const std::string& before_path, const std::string& after_path,
                const std::string& out, bool centered) {
    const ModelFile before = load_model(before_path);
    const ModelFile after = load_model(after_path);
    if (!before.host.has_watermark || !after.host.has_watermark)
        throw data_error("both models need a watermark module");
    const WatermarkModule& wb = before.host.wm;
    const WatermarkModule& wa = after.host.wm;
    if (!wb.bank.same_shape(wa.bank) || wb.rows != wa.rows || wb.cols != wa.cols)
        throw data_error("watermark modules have different geometry");
    const std::vector<double> hm = stability_heatmap(wb.bank, wa.bank, wb.rows, wb.cols);
    write_heatmap_csv(out, hm, wb.rows, wb.cols, centered);
    std::printf("heatmap written to %s (%s layout)\n", out.c_str(),
                centered ? "centered" : "natural");
    return 0;
}

int run_verify(std::uint64_t seed) {
    bool all_pass = true;
    for (const VerifierResult& r : run_verifier_suite(seed)) {
        std::printf("[%s] %-45s max deviation %.3e (tolerance %.0e)\n",
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.deviation, r.tolerance);
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : kExitMatchFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-carrier watermarking for convolutional filters"};
    app.require_subcommand(1);

    EmbedArgs embed;
    CLI::App* cmd_embed = app.add_subcommand("embed", "Train a watermarked host and save it");
    cmd_embed->add_option("--out", embed.out, "Output model path")->required();
    cmd_embed->add_option("--seed", embed.seed, "Master seed");
    cmd_embed->add_option("--lambda", embed.lambda, "Weight of the tamper-class loss term");
    cmd_embed->add_option("--noise-ratio", embed.noise_ratio, "Overwrite noise ratio");
    cmd_embed->add_option("--steps", embed.steps, "Training steps");
    cmd_embed->add_option("--eta", embed.eta, "Learning rate");
    cmd_embed->add_option("--batch", embed.batch, "Batch size");
    cmd_embed->add_option("--classes", embed.classes, "Number of classes");
    cmd_embed->add_option("--samples", embed.samples, "Samples per class");
    cmd_embed->add_option("--channels", embed.channels, "Input channels");
    cmd_embed->add_option("--rows", embed.rows, "Feature rows");
    cmd_embed->add_option("--cols", embed.cols, "Feature cols");
    cmd_embed->add_option("--filters", embed.wm_filters, "Watermark filters");
    cmd_embed->add_option("--backbone-filters", embed.backbone_filters, "Backbone filters");
    cmd_embed->add_option("--ksize", embed.ksize, "Kernel size");
    cmd_embed->add_option("--r", embed.radius, "Low-pass radius");
    cmd_embed->add_option("--log", embed.log_path, "Training log CSV path");

    std::string model_path, out_path, spec_path, source_path, suspect_path;
    std::string before_path, after_path;
    double tau = kDefaultTau, min_dr = 50.0;
    bool centered = false;
    std::uint64_t verify_seed = 7;

    CLI::App* cmd_extract = app.add_subcommand("extract", "Extract a signature from a model");
    cmd_extract->add_option("--model", model_path, "Model path")->required();
    cmd_extract->add_option("--out", out_path, "Signature output path")->required();

    CLI::App* cmd_attack = app.add_subcommand("attack", "Apply an attack spec to a model");
    cmd_attack->add_option("--model", model_path, "Model path")->required();
    cmd_attack->add_option("--spec", spec_path, "Attack spec JSON path")->required();
    cmd_attack->add_option("--out", out_path, "Attacked model output path")->required();

    CLI::App* cmd_detect = app.add_subcommand("detect", "Match a signature against a suspect");
    cmd_detect->add_option("--source", source_path, "Source signature path")->required();
    cmd_detect->add_option("--suspect", suspect_path, "Suspect model or signature path")
        ->required();
    cmd_detect->add_option("--tau", tau, "Per-component cosine threshold");
    cmd_detect->add_option("--min-dr", min_dr, "Verdict threshold on the detection rate");
    cmd_detect->add_option("--out", out_path, "Detection report output path");

    CLI::App* cmd_heatmap = app.add_subcommand("heatmap", "Spectrum drift between two models");
    cmd_heatmap->add_option("--before", before_path, "Model before")->required();
    cmd_heatmap->add_option("--after", after_path, "Model after")->required();
    cmd_heatmap->add_option("--out", out_path, "CSV output path")->required();
    cmd_heatmap->add_flag("--centered", centered, "Move frequency (0,0) to the grid center");

    CLI::App* cmd_verify = app.add_subcommand("verify-theorems",
                                              "Run the spectral identity checks");
    cmd_verify->add_option("--seed", verify_seed, "Seed for the verifier draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (cmd_embed->parsed()) return run_embed(embed);
        if (cmd_extract->parsed()) return run_extract(model_path, out_path);
        if (cmd_attack->parsed()) return run_attack(model_path, spec_path, out_path);
        if (cmd_detect->parsed())
            return run_detect(source_path, suspect_path, tau, min_dr, out_path);
        if (cmd_heatmap->parsed()) return run_heatmap(before_path, after_path, out_path, centered);
        if (cmd_verify->parsed()) return run_verify(verify_seed);
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const shape_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const data_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
