#include "mimocap/cli/run.hpp"

#include "mimocap/capacity.hpp"
#include "mimocap/channel.hpp"
#include "mimocap/cli/svg.hpp"
#include "mimocap/cli/table.hpp"
#include "mimocap/detect.hpp"
#include "mimocap/errors.hpp"
#include "mimocap/waterfill.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace mimocap::cli {

using nlohmann::json;

std::string_view to_string(Command command) noexcept {
    switch (command) {
    case Command::channel_gen: return "channel-gen";
    case Command::link_demo: return "link-demo";
    case Command::waterfill: return "waterfill";
    case Command::capacity_sweep: return "capacity-sweep";
    case Command::mux_gain: return "mux-gain";
    }
    return "unknown";
}

std::optional<Command> parse_command(std::string_view name) noexcept {
    for (Command c : {Command::channel_gen, Command::link_demo, Command::waterfill, Command::capacity_sweep,
                      Command::mux_gain}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
        throw std::runtime_error("sha256: OpenSSL digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

json RunManifest::to_json() const {
    json files = json::array();
    for (const OutputFile& f : outputs) {
        files.push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    return {{"tool", "mimocap"},
            {"version", tool_version},
            {"config", config_echo},
            {"duration_s", duration_s},
            {"outputs", files}};
}

RunConfig load_run_config(Command command, const std::optional<std::filesystem::path>& config_path,
                          const Overrides& overrides) {
    RunConfig cfg;
    cfg.command = command;
    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) {
            throw ConfigError("cannot read config file " + config_path->string());
        }
        try {
            cfg.params = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("config " + config_path->string() + " is not valid JSON (byte " +
                              std::to_string(e.byte) + ")");
        }
        if (!cfg.params.is_object()) {
            throw ConfigError("config root must be a JSON object");
        }
        if (auto it = cfg.params.find("master_seed"); it != cfg.params.end()) {
            if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
                throw ConfigError("master_seed must be a nonnegative integer");
            }
            cfg.master_seed = it->get<std::uint64_t>();
            cfg.params.erase(it);
        }
    }
    if (overrides.seed) {
        cfg.master_seed = *overrides.seed;
    }
    if (overrides.out) {
        cfg.output_dir = *overrides.out;
    }
    cfg.plot = overrides.plot;
    cfg.workers = std::max(1U, overrides.workers);
    return cfg;
}

namespace {

// Typed access to the params object; remembers which keys were consumed so
// leftovers can be reported as typos.
class Params {
public:
    explicit Params(const json& j) : j_(j) {
        if (!j_.is_object()) {
            throw ConfigError("params must be a JSON object");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) {
            throw ConfigError("missing required field '" + key + "'");
        }
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key) && fallback) {
            used_.insert(key);
            return *fallback;
        }
        const json& v = raw(key);
        if (!v.is_number()) {
            throw ConfigError("field '" + key + "' must be a number");
        }
        return v.get<double>();
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
        if (!has(key) && fallback) {
            used_.insert(key);
            return *fallback;
        }
        const json& v = raw(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw ConfigError("field '" + key + "' must be a nonnegative integer");
        }
        return v.get<std::size_t>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        const json& v = raw(key);
        if (!v.is_string()) {
            throw ConfigError("field '" + key + "' must be a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) {
        if (!has(key) && fallback) {
            used_.insert(key);
            return *fallback;
        }
        return to_numbers(raw(key), key);
    }

    static std::vector<double> to_numbers(const json& v, const std::string& key) {
        if (!v.is_array()) {
            throw ConfigError("field '" + key + "' must be an array of numbers");
        }
        std::vector<double> out;
        for (const json& x : v) {
            if (!x.is_number()) {
                throw ConfigError("field '" + key + "' must contain only numbers");
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) {
                throw ConfigError("unknown field '" + key + "'");
            }
        }
    }

private:
    const json& j_;
    std::set<std::string> used_;
};

struct Output {
    std::string name;
    std::string bytes;
};

struct Plan {
    json resolved = json::object();
    std::vector<Output> outputs;
    std::vector<std::string> summary;
};

std::vector<double> default_snr_grid() {
    std::vector<double> grid;
    for (int db = 0; db <= 120; db += 5) {
        grid.push_back(db);
    }
    return grid;
}

void add_plot(Plan& plan, bool enabled, const std::string& name, const Table& table, const AxisSpec& axes) {
    if (enabled) {
        plan.outputs.push_back({name, render_svg(table, axes)});
    }
}

// Wraps module precondition failures raised while checking inputs.
template <class F>
auto validated(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const mimocap::Error& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }
}

// ---- channel-gen ---------------------------------------------------------

Plan run_channel_gen(const RunConfig& cfg) {
    Params p(cfg.params);
    const std::string model = p.text("model", "rayleigh");
    Plan plan;
    plan.resolved["model"] = model;

    std::vector<ChannelRealization> channels;
    if (model == "rayleigh") {
        const std::size_t nt = p.count("nt", 2);
        const std::size_t nr = p.count("nr", 2);
        const std::size_t count = p.count("count", 1);
        const std::size_t first = p.count("first_index", 0);
        p.finish();
        if (nt == 0 || nr == 0 || count == 0) {
            throw ConfigError("nt, nr and count must be >= 1");
        }
        plan.resolved.update({{"nt", nt}, {"nr", nr}, {"count", count}, {"first_index", first}});
        for (std::size_t k = 0; k < count; ++k) {
            channels.push_back(rayleigh_channel(nt, nr, cfg.master_seed, first + k));
        }
    } else if (model == "ar1") {
        FadingTapConfig taps;
        const std::size_t nt = p.count("nt", 2);
        const std::size_t nr = p.count("nr", 2);
        taps.fd_t = p.number("fd_t");
        taps.length = p.count("count", 100);
        taps.seed = cfg.master_seed;
        p.finish();
        if (nt == 0 || nr == 0 || taps.length == 0) {
            throw ConfigError("nt, nr and count must be >= 1");
        }
        validated([&] { return ar1_coefficient(taps.fd_t); });
        plan.resolved.update({{"nt", nt}, {"nr", nr}, {"count", taps.length}, {"fd_t", taps.fd_t}});
        channels = ar1_channel_snapshots(nt, nr, taps);
    } else if (model == "path") {
        const json& list = p.raw("paths");
        ArrayGeometry tx{p.count("nt", 2), p.number("tx_spacing", 0.5)};
        ArrayGeometry rx{p.count("nr", 2), p.number("rx_spacing", 0.5)};
        p.finish();
        if (!list.is_array()) {
            throw ConfigError("field 'paths' must be an array");
        }
        std::vector<RayPath> paths;
        for (const json& item : list) {
            Params path(item);
            const std::vector<double> beta = path.numbers("beta");
            if (beta.size() != 2) {
                throw ConfigError("path 'beta' must be [re, im]");
            }
            paths.push_back({{beta[0], beta[1]}, path.number("aod_rad", 0.0), path.number("aoa_rad", 0.0),
                             path.number("delay_s", 0.0)});
            path.finish();
        }
        plan.resolved.update({{"nt", tx.elements}, {"nr", rx.elements}, {"tx_spacing", tx.spacing_wavelengths},
                              {"rx_spacing", rx.spacing_wavelengths}, {"paths", list}});
        ComplexMatrix g = validated([&] { return path_channel(paths, tx, rx); });
        channels.push_back({std::move(g), ChannelModel::path, cfg.master_seed, 0});
    } else {
        throw ConfigError("unknown channel model '" + model + "' (expected rayleigh, path or ar1)");
    }

    Table csv{{"realization", "row", "col", "re", "im"}, {}};
    Table power{{"realization", "frobenius_sq"}, {}};
    for (const ChannelRealization& ch : channels) {
        const auto k = static_cast<std::int64_t>(ch.index);
        for (std::size_t r = 0; r < ch.g.rows(); ++r) {
            for (std::size_t c = 0; c < ch.g.cols(); ++c) {
                csv.rows.push_back({k, static_cast<std::int64_t>(r), static_cast<std::int64_t>(c), ch.g(r, c).real(),
                                    ch.g(r, c).imag()});
            }
        }
        power.rows.push_back({k, frobenius_sq(ch.g)});
    }
    plan.outputs.push_back({"channels.csv", csv.to_csv()});
    add_plot(plan, cfg.plot, "channels.svg", power,
             {"realization", {"frobenius_sq"}, "Channel power per realization", "realization", "||G||_F^2"});
    plan.summary.push_back("average received power (Pt = 1): " + format_number(avg_received_power(channels, 1.0)));
    return plan;
}

// ---- link-demo -------------------------------------------------------------

Plan run_link_demo(const RunConfig& cfg) {
    Params p(cfg.params);
    const std::size_t length = p.count("length", 100);
    const double sigma_n2 = p.number("sigma_n2", 0.01);
    p.finish();
    if (length < 10) {
        throw ConfigError("length must be >= 10");
    }
    if (!(sigma_n2 >= 0.0)) {
        throw ConfigError("sigma_n2 must be nonnegative");
    }
    Plan plan;
    plan.resolved = {{"length", length}, {"sigma_n2", sigma_n2}};

    const LinkDemoResult demo = link_demo(cfg.master_seed, length, sigma_n2);

    Table csv{{"series", "sample_index", "re", "im"}, {}};
    for (const DemoSeries& s : demo.series) {
        for (std::size_t k = 0; k < s.samples.size(); ++k) {
            csv.rows.push_back({s.name, static_cast<std::int64_t>(k), s.samples[k].real(), s.samples[k].imag()});
        }
    }
    plan.outputs.push_back({"link_demo.csv", csv.to_csv()});

    Table mse{{"detector", "stream", "mse"}, {}};
    for (const DetectionReport& r : demo.reports) {
        for (std::size_t s = 0; s < r.mse_per_stream.size(); ++s) {
            mse.rows.push_back({std::string(to_string(r.filter_used)), std::to_string(s + 1), r.mse_per_stream[s]});
        }
        mse.rows.push_back({std::string(to_string(r.filter_used)), std::string("overall"), r.overall_mse});
        plan.summary.push_back(std::string(to_string(r.filter_used)) + " mse: " + format_number(r.overall_mse));
    }
    plan.outputs.push_back({"link_demo_mse.csv", mse.to_csv()});

    if (cfg.plot) {
        Table wide{{"sample_index"}, {}};
        std::vector<std::string> names;
        for (const DemoSeries& s : demo.series) {
            if (s.name.back() == '1') {
                wide.header.push_back(s.name + " re");
                names.push_back(s.name + " re");
            }
        }
        for (std::size_t k = 0; k < length; ++k) {
            std::vector<Cell> row{static_cast<std::int64_t>(k)};
            for (const DemoSeries& s : demo.series) {
                if (s.name.back() == '1') {
                    row.emplace_back(s.samples[k].real());
                }
            }
            wide.rows.push_back(std::move(row));
        }
        add_plot(plan, true, "link_demo.svg", wide,
                 {"sample_index", names, "Stream 1 real part: sent, received, detected", "sample", "amplitude"});
    }
    return plan;
}

// ---- waterfill -------------------------------------------------------------

WaterfillProblem parse_waterfill(Params& p) {
    WaterfillProblem problem;
    const json& power = p.raw("total_power");
    if (power.is_number()) {
        problem.total_power = power.get<double>();
    } else {
        problem.total_power = Params::to_numbers(power, "total_power");
    }
    const json& noise = p.raw("noise");
    if (noise.is_array() && !noise.empty() && noise.front().is_array()) {
        RealMatrix rows;
        for (const json& row : noise) {
            rows.push_back(Params::to_numbers(row, "noise"));
        }
        problem.noise = std::move(rows);
    } else {
        problem.noise = Params::to_numbers(noise, "noise");
    }
    p.finish();
    return problem;
}

Plan run_waterfill(const RunConfig& cfg) {
    Params p(cfg.params);
    const WaterfillProblem problem = parse_waterfill(p);
    const PowerAllocation alloc = validated([&] { return waterfill_multi(problem); });

    RealMatrix noise_rows;
    if (const auto* table = std::get_if<RealMatrix>(&problem.noise)) {
        noise_rows = *table;
    } else {
        noise_rows.assign(alloc.alloc.size(), std::get<std::vector<double>>(problem.noise));
    }
    RealMatrix gains = noise_rows;
    for (auto& row : gains) {
        for (double& g : row) {
            g = 1.0 / g;
        }
    }
    const double capacity = capacity_from_allocation(alloc, gains);

    Plan plan;
    plan.resolved = cfg.params;
    Table csv{{"subcarrier", "channel", "noise", "allocated", "water_level"}, {}};
    for (std::size_t s = 0; s < alloc.alloc.size(); ++s) {
        for (std::size_t c = 0; c < alloc.alloc[s].size(); ++c) {
            csv.rows.push_back({static_cast<std::int64_t>(s + 1), static_cast<std::int64_t>(c + 1), noise_rows[s][c],
                                alloc.alloc[s][c], alloc.water_level[s]});
        }
    }
    plan.outputs.push_back({"waterfill.csv", csv.to_csv()});
    plan.summary.push_back("total capacity: " + format_number(capacity) + " bit/s/Hz");

    if (cfg.plot) {
        Table wide{{"channel"}, {}};
        std::vector<std::string> names;
        for (std::size_t s = 0; s < alloc.alloc.size(); ++s) {
            names.push_back("subcarrier " + std::to_string(s + 1));
            wide.header.push_back(names.back());
        }
        for (std::size_t c = 0; c < noise_rows.front().size(); ++c) {
            std::vector<Cell> row{static_cast<std::int64_t>(c + 1)};
            for (const auto& a : alloc.alloc) {
                row.emplace_back(a[c]);
            }
            wide.rows.push_back(std::move(row));
        }
        add_plot(plan, true, "waterfill.svg", wide, {"channel", names, "Allocated power", "channel", "power"});
    }
    return plan;
}

// ---- capacity-sweep / mux-gain --------------------------------------------

SweepConfig parse_sweep(Params& p, std::uint64_t seed) {
    SweepConfig sweep;
    sweep.n_realizations = p.count("n_realizations", 1000);
    sweep.nt = p.count("nt", 7);
    sweep.nr = p.count("nr", 5);
    sweep.snr_db_grid = p.numbers("snr_db_grid", default_snr_grid());
    sweep.kappas = p.numbers("kappas", std::vector<double>{0.02, 0.4});
    sweep.master_seed = seed;
    p.finish();
    validated([&] {
        sweep.validate();
        return 0;
    });
    return sweep;
}

json sweep_json(const SweepConfig& s) {
    return {{"n_realizations", s.n_realizations}, {"nt", s.nt},           {"nr", s.nr},
            {"snr_db_grid", s.snr_db_grid},       {"kappas", s.kappas}};
}

std::string kappa_label(double kappa) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "kappa=%g", kappa);
    return buf;
}

Plan run_capacity_sweep(const RunConfig& cfg) {
    Params p(cfg.params);
    const SweepConfig sweep = parse_sweep(p, cfg.master_seed);
    const CapacityCurve curve = monte_carlo_sweep(sweep, cfg.workers);

    Plan plan;
    plan.resolved = sweep_json(sweep);
    Table csv{{"kappa", "snr_db", "mean_capacity", "std_error", "limit"}, {}};
    for (std::size_t j = 0; j < curve.kappas.size(); ++j) {
        for (std::size_t s = 0; s < curve.snr_db.size(); ++s) {
            csv.rows.push_back({curve.kappas[j], curve.snr_db[s], curve.mean_capacity[j][s], curve.std_error[j][s],
                                curve.limits[j].value});
        }
        plan.summary.push_back(kappa_label(curve.kappas[j]) + " limit: " + format_number(curve.limits[j].value));
    }
    plan.outputs.push_back({"capacity.csv", csv.to_csv()});

    if (cfg.plot) {
        Table wide{{"snr_db", "ideal"}, {}};
        std::vector<std::string> names{"ideal"};
        for (double k : curve.kappas) {
            names.push_back(kappa_label(k));
            names.push_back("limit " + kappa_label(k));
        }
        wide.header.insert(wide.header.end(), names.begin() + 1, names.end());
        for (std::size_t s = 0; s < curve.snr_db.size(); ++s) {
            std::vector<Cell> row{curve.snr_db[s], curve.ideal_mean[s]};
            for (std::size_t j = 0; j < curve.kappas.size(); ++j) {
                row.emplace_back(curve.mean_capacity[j][s]);
                row.emplace_back(curve.limits[j].value);
            }
            wide.rows.push_back(std::move(row));
        }
        add_plot(plan, true, "capacity.svg", wide,
                 {"snr_db", names, "Average capacity vs SNR", "SNR [dB]", "capacity [bit/s/Hz]"});
    }
    return plan;
}

Plan run_mux_gain(const RunConfig& cfg) {
    Params p(cfg.params);
    const SweepConfig mimo_cfg = parse_sweep(p, cfg.master_seed);
    SweepConfig siso_cfg = mimo_cfg;
    siso_cfg.nt = 1;
    siso_cfg.nr = 1;

    const CapacityCurve mimo = monte_carlo_sweep(mimo_cfg, cfg.workers);
    const CapacityCurve siso = monte_carlo_sweep(siso_cfg, cfg.workers);
    const RealMatrix finite = finite_snr_mux_gain(mimo, siso);

    Plan plan;
    plan.resolved = sweep_json(mimo_cfg);
    Table csv{{"kappa", "snr_db", "gain_finite", "gain_classic"}, {}};
    for (std::size_t j = 0; j < mimo.kappas.size(); ++j) {
        for (std::size_t s = 0; s < mimo.snr_db.size(); ++s) {
            const double classic = mimo.snr_db[s] > 0.0 ? classic_mux_gain(mimo, mimo.snr_db[s])[j]
                                                        : std::numeric_limits<double>::quiet_NaN();
            csv.rows.push_back({mimo.kappas[j], mimo.snr_db[s], finite[j][s], classic});
        }
    }
    plan.outputs.push_back({"mux_gain.csv", csv.to_csv()});

    if (cfg.plot) {
        Table wide{{"snr_db"}, {}};
        std::vector<std::string> names;
        for (double k : mimo.kappas) {
            names.push_back(kappa_label(k));
        }
        wide.header.insert(wide.header.end(), names.begin(), names.end());
        for (std::size_t s = 0; s < mimo.snr_db.size(); ++s) {
            std::vector<Cell> row{mimo.snr_db[s]};
            for (std::size_t j = 0; j < mimo.kappas.size(); ++j) {
                row.emplace_back(finite[j][s]);
            }
            wide.rows.push_back(std::move(row));
        }
        add_plot(plan, true, "mux_gain.svg", wide,
                 {"snr_db", names, "Finite-SNR multiplexing gain", "SNR [dB]", "MIMO / SISO capacity"});
    }
    return plan;
}

} // namespace

RunManifest run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    Plan plan;
    switch (config.command) {
    case Command::channel_gen: plan = run_channel_gen(config); break;
    case Command::link_demo: plan = run_link_demo(config); break;
    case Command::waterfill: plan = run_waterfill(config); break;
    case Command::capacity_sweep: plan = run_capacity_sweep(config); break;
    case Command::mux_gain: plan = run_mux_gain(config); break;
    }

    RunManifest manifest;
    manifest.tool_version = std::string(kToolVersion);
    manifest.config_echo = {{"command", std::string(to_string(config.command))},
                            {"master_seed", config.master_seed},
                            {"params", plan.resolved}};
    manifest.summary = plan.summary;

    std::filesystem::create_directories(config.output_dir);
    for (const Output& out : plan.outputs) {
        std::ofstream file(config.output_dir / out.name, std::ios::binary | std::ios::trunc);
        file.write(out.bytes.data(), static_cast<std::streamsize>(out.bytes.size()));
        if (!file) {
            throw std::runtime_error("cannot write " + (config.output_dir / out.name).string());
        }
        manifest.outputs.push_back({out.name, sha256_hex(out.bytes), out.bytes.size()});
    }
    manifest.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream file(config.output_dir / "manifest.json", std::ios::binary | std::ios::trunc);
    file << manifest.to_json().dump(2) << '\n';
    if (!file) {
        throw std::runtime_error("cannot write manifest.json");
    }
    return manifest;
}

} // namespace mimocap::cli
