#include "fwm/model_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fwm/analysis.hpp"

namespace fwm {

using nlohmann::json;

namespace {

json bank_to_json(const FilterBank& bank) {
    return json{{"filters", bank.filters},
                {"channels", bank.channels},
                {"ksize", bank.ksize},
                {"weights", bank.weights},
                {"biases", bank.biases}};
}

FilterBank bank_from_json(const json& j) {
    FilterBank bank(j.at("filters").get<int>(), j.at("channels").get<int>(),
                    j.at("ksize").get<int>());
    bank.weights = j.at("weights").get<std::vector<double>>();
    bank.biases = j.at("biases").get<std::vector<double>>();
    if (bank.weights.size() != static_cast<std::size_t>(bank.filters) * bank.channels *
                                   bank.ksize * bank.ksize ||
        bank.biases.size() != static_cast<std::size_t>(bank.filters))
        throw data_error("model file: filter bank arrays have the wrong length");
    return bank;
}

json parse(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw data_error(std::string(what) + ": not valid JSON");
    return j;
}

} // namespace

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw data_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw data_error("cannot move " + tmp.string() + " to " + path.string());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    const HostNetwork& h = model.host;
    json j{{"version", model.version},
           {"seed", model.seed},
           {"host",
            {{"n_classes", h.n_classes},
             {"channels", h.channels},
             {"rows", h.rows},
             {"cols", h.cols}}},
           {"backbone", bank_to_json(h.backbone)},
           {"head",
            {{"outputs", h.head_outputs()},
             {"inputs", h.feature_count()},
             {"weights", h.head_w},
             {"biases", h.head_b}}},
           {"training",
            {{"lambda", model.meta.lambda},
             {"noise_ratio", model.meta.noise_ratio},
             {"steps", model.meta.steps},
             {"eta", model.meta.eta},
             {"batch", model.meta.batch},
             {"dataset_seed", model.meta.dataset_seed},
             {"final_loss", model.meta.final_loss},
             {"clean_accuracy", model.meta.clean_accuracy},
             {"attacked_accuracy", model.meta.attacked_accuracy}}}};
    if (h.has_watermark) {
        json wm = bank_to_json(h.wm.bank);
        wm["rows"] = h.wm.rows;
        wm["cols"] = h.wm.cols;
        wm["r"] = h.wm.radius;
        j["wm"] = std::move(wm);
    }
    atomic_write_text(path, j.dump(2) + "\n");
}

ModelFile load_model(const std::filesystem::path& path) {
    const json j = parse(read_text(path), "model file");
    try {
        ModelFile m;
        m.version = j.at("version").get<int>();
        if (m.version != 1) throw data_error("model file: unsupported version");
        m.seed = j.at("seed").get<std::uint64_t>();
        const json& host = j.at("host");
        m.host.n_classes = host.at("n_classes").get<int>();
        m.host.channels = host.at("channels").get<int>();
        m.host.rows = host.at("rows").get<int>();
        m.host.cols = host.at("cols").get<int>();
        m.host.backbone = bank_from_json(j.at("backbone"));
        if (j.contains("wm")) {
            m.host.has_watermark = true;
            m.host.wm.bank = bank_from_json(j.at("wm"));
            m.host.wm.rows = j.at("wm").at("rows").get<int>();
            m.host.wm.cols = j.at("wm").at("cols").get<int>();
            m.host.wm.radius = j.at("wm").at("r").get<int>();
        }
        m.host.head_w = j.at("head").at("weights").get<std::vector<double>>();
        m.host.head_b = j.at("head").at("biases").get<std::vector<double>>();
        if (m.host.head_w.size() != static_cast<std::size_t>(m.host.head_outputs()) *
                                        m.host.feature_count() ||
            m.host.head_b.size() != static_cast<std::size_t>(m.host.head_outputs()))
            throw data_error("model file: head arrays have the wrong length");
        const json& t = j.at("training");
        m.meta.lambda = t.at("lambda").get<double>();
        m.meta.noise_ratio = t.at("noise_ratio").get<double>();
        m.meta.steps = t.at("steps").get<int>();
        m.meta.eta = t.at("eta").get<double>();
        m.meta.batch = t.at("batch").get<int>();
        m.meta.dataset_seed = t.at("dataset_seed").get<std::uint64_t>();
        m.meta.final_loss = t.at("final_loss").get<double>();
        m.meta.clean_accuracy = t.at("clean_accuracy").get<double>();
        m.meta.attacked_accuracy = t.at("attacked_accuracy").get<double>();
        return m;
    } catch (const json::exception& e) {
        throw data_error(std::string("model file: ") + e.what());
    }
}

void save_signature(const std::filesystem::path& path, const WatermarkSignature& sig,
                    double tau_default) {
    json freqs = json::array();
    for (const auto& [u, v] : sig.frequencies) freqs.push_back(json::array({u, v}));
    json comps = json::array();
    for (int d = 0; d < sig.filters; ++d) {
        json per_filter = json::array();
        for (int c = 0; c < sig.channels; ++c) {
            json per_channel = json::array();
            for (std::size_t k = 0; k < sig.frequencies.size(); ++k) {
                const std::size_t i = sig.idx(d, c, static_cast<int>(k));
                per_channel.push_back(json::array({sig.re[i], sig.im[i]}));
            }
            per_filter.push_back(std::move(per_channel));
        }
        comps.push_back(std::move(per_filter));
    }
    const json j{{"version", 1},
                 {"D", sig.filters},
                 {"C", sig.channels},
                 {"K", sig.ksize},
                 {"M", sig.rows},
                 {"N", sig.cols},
                 {"r", sig.radius},
                 {"tau_default", tau_default},
                 {"frequencies", std::move(freqs)},
                 {"components", std::move(comps)}};
    atomic_write_text(path, j.dump(2) + "\n");
}

WatermarkSignature load_signature(const std::filesystem::path& path) {
    const json j = parse(read_text(path), "signature file");
    try {
        WatermarkSignature sig;
        if (j.at("version").get<int>() != 1)
            throw data_error("signature file: unsupported version");
        sig.filters = j.at("D").get<int>();
        sig.channels = j.at("C").get<int>();
        sig.ksize = j.at("K").get<int>();
        sig.rows = j.at("M").get<int>();
        sig.cols = j.at("N").get<int>();
        sig.radius = j.at("r").get<int>();
        const json& freqs = j.at("frequencies");
        const json& comps = j.at("components");
        if (sig.filters <= 0 || sig.channels <= 0 || freqs.empty())
            throw data_error("signature file: empty geometry");
        if (comps.size() != static_cast<std::size_t>(sig.filters))
            throw data_error("signature file: component count does not match D");

        const std::size_t F = freqs.size();
        std::vector<std::pair<int, int>> raw_freqs;
        raw_freqs.reserve(F);
        for (const json& f : freqs)
            raw_freqs.emplace_back(f.at(0).get<int>(), f.at(1).get<int>());

        // Canonical row-major frequency order, independent of file order.
        std::vector<std::size_t> perm(F);
        std::iota(perm.begin(), perm.end(), 0);
        std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
            return raw_freqs[a] < raw_freqs[b];
        });
        sig.frequencies.reserve(F);
        for (std::size_t k : perm) sig.frequencies.push_back(raw_freqs[k]);

        sig.re.resize(static_cast<std::size_t>(sig.filters) * sig.channels * F);
        sig.im.resize(sig.re.size());
        for (int d = 0; d < sig.filters; ++d) {
            const json& per_filter = comps.at(d);
            if (per_filter.size() != static_cast<std::size_t>(sig.channels))
                throw data_error("signature file: channel count mismatch");
            for (int c = 0; c < sig.channels; ++c) {
                const json& per_channel = per_filter.at(c);
                if (per_channel.size() != F)
                    throw data_error("signature file: frequency count mismatch");
                for (std::size_t k = 0; k < F; ++k) {
                    const json& z = per_channel.at(perm[k]);
                    const std::size_t i = sig.idx(d, c, static_cast<int>(k));
                    sig.re[i] = z.at(0).get<double>();
                    sig.im[i] = z.at(1).get<double>();
                }
            }
        }
        return sig;
    } catch (const json::exception& e) {
        throw data_error(std::string("signature file: ") + e.what());
    }
}

AttackSpec parse_attack_spec(const std::string& text) {
    const json j = parse(text, "attack spec");
    try {
        AttackSpec spec;
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "scale") {
            spec.kind = AttackSpec::Kind::Scale;
            spec.scale_a = j.at("a").get<double>();
        } else if (kind == "permute") {
            spec.kind = AttackSpec::Kind::Permute;
            spec.perm_seed = j.at("seed").get<std::uint64_t>();
        } else if (kind == "overwrite") {
            spec.kind = AttackSpec::Kind::Overwrite;
            spec.noise_ratio = j.value("ratio", 0.5);
            spec.noise_seed = j.at("seed").get<std::uint64_t>();
        } else if (kind == "finetune") {
            spec.kind = AttackSpec::Kind::Finetune;
            spec.ft_sgd.steps = j.at("steps").get<int>();
            spec.ft_sgd.eta = j.value("eta", 0.1);
            spec.ft_dataset_seed = j.at("seed").get<std::uint64_t>();
            spec.ft_batch = j.value("batch", 16);
        } else {
            throw config_error("attack spec: unknown kind '" + kind + "'");
        }
        return spec;
    } catch (const json::exception& e) {
        throw config_error(std::string("attack spec: ") + e.what());
    }
}

AttackSpec load_attack_spec(const std::filesystem::path& path) {
    return parse_attack_spec(read_text(path));
}

void save_report(const std::filesystem::path& path, const DetectionReport& report,
                 const WatermarkSignature& src) {
    const std::size_t F = src.frequencies.size();
    double cmin = 1.0, csum = 0.0;
    for (double c : report.cosines) {
        cmin = std::min(cmin, c);
        csum += c;
    }
    json cosines = json::array();
    for (int d = 0; d < src.filters; ++d) {
        json row = json::array();
        for (std::size_t k = 0; k < F; ++k)
            row.push_back(report.cosines[static_cast<std::size_t>(d) * F + k]);
        cosines.push_back(std::move(row));
    }
    const json j{{"version", 1},
                 {"dr", report.dr},
                 {"tau", report.tau},
                 {"permutation", report.permutation},
                 {"components_total", report.cosines.size()},
                 {"cosine_min", report.cosines.empty() ? 0.0 : cmin},
                 {"cosine_mean",
                  report.cosines.empty() ? 0.0 : csum / static_cast<double>(report.cosines.size())},
                 {"cosines", std::move(cosines)}};
    atomic_write_text(path, j.dump(2) + "\n");
}

void write_heatmap_csv(const std::filesystem::path& path, const std::vector<double>& heatmap,
                       int rows, int cols, bool centered) {
    if (heatmap.size() != static_cast<std::size_t>(rows) * cols)
        throw shape_error("write_heatmap_csv: heatmap size mismatch");
    const std::vector<double>* hm = &heatmap;
    std::vector<double> shifted;
    if (centered) {
        shifted = center_shift(heatmap, rows, cols);
        hm = &shifted;
    }
    std::string text;
    char buf[64];
    for (int v = 0; v < cols; ++v) {
        std::snprintf(buf, sizeof buf, v ? ",v%d" : "v%d", v);
        text += buf;
    }
    text += '\n';
    for (int u = 0; u < rows; ++u) {
        for (int v = 0; v < cols; ++v) {
            std::snprintf(buf, sizeof buf, "%.17g", (*hm)[static_cast<std::size_t>(u) * cols + v]);
            if (v) text += ',';
            text += buf;
        }
        text += '\n';
    }
    atomic_write_text(path, text);
}

void write_training_log_csv(const std::filesystem::path& path,
                            const std::vector<TrainLogRow>& log) {
    std::string text = "step,loss\n";
    char buf[64];
    for (const TrainLogRow& row : log) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", row.step, row.loss);
        text += buf;
    }
    atomic_write_text(path, text);
}

} // namespace fwm
