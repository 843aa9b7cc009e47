#include "nmpinv/experiment/config.hpp"

#include <fstream>
#include <set>

#include "nmpinv/errors.hpp"

namespace nmpinv::experiment {

using nlohmann::json;

std::string to_string(SystemKind s) { return s == SystemKind::Pendulum ? "pendulum" : "quad_surrogate"; }

namespace {

const json& pendulum_sim()
{
    static const json j = json::parse(R"({
  "system": "pendulum",
  "plant": {"model": "pendulum_cart", "cart_mass": 1.0, "pendulum_mass": 0.2, "length": 0.5, "gravity": 9.81},
  "controller": {"gain": [-0.8678, -1.808, 25.46, 4.140], "position_slot": 0, "velocity_slot": 1},
  "rates": {"sim_hz": 1000, "control_every": 1, "reference_every": 15},
  "divergence_bound": 1000.0,
  "training_data": {"kind": "sinusoids", "amplitudes": [0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
                    "periods": [5, 10, 15, 20, 25], "duration": 60},
  "selection": {"kind": "approx_inverse", "n": 2, "encoding": "relative", "velocity_channel": false},
  "ablation": {"past": 1},
  "network": {"hidden": [5, 5], "activation": "tanh"},
  "training": {"optimizer": "adam", "learning_rate": 0.01, "batch_size": 64, "epochs": 1000,
               "validation_fraction": 0.3, "patience": 200},
  "dataset": {"skip_seconds": 2.0, "target_rows": 20000},
  "scenarios": {
    "fig3": {"periods": [6, 8, 12, 14, 18, 22], "amplitude": 2.5, "duration": 60},
    "fig4": {"periods": [6, 12, 22], "amplitude": 2.5, "duration": 60},
    "drawings": {"count": 10, "duration": 30, "min_components": 3, "max_components": 6,
                 "min_period": 6, "max_period": 22, "min_amplitude": 0.2, "max_amplitude": 0.8}
  },
  "evaluation": {"skip_seconds": 5.0},
  "run": ["fig3", "fig4"],
  "output_dir": "out",
  "seed": 0,
  "service": {"host": "127.0.0.1", "port": 8080, "workspace": 3.0, "max_duration": 120, "smoothing_window": 5,
              "cors_origin": "*"}
})");
    return j;
}

json pendulum_voltage()
{
    json j = pendulum_sim();
    j.merge_patch(json::parse(R"({
  "plant": {"model": "pendulum_cart_voltage", "length": 0.33, "back_emf": 7.74, "voltage_gain": 1.73},
  "controller": {"gain": [-105.6, -55.04, 130.7, 23.67]},
  "rates": {"sim_hz": 980, "control_every": 1, "reference_every": 14},
  "training_data": {"amplitudes": [0.04, 0.06, 0.08], "periods": [5, 6, 7, 8, 9, 10], "duration": 40},
  "scenarios": {
    "fig3": {"periods": [4, 6, 8, 12], "amplitude": 0.06, "duration": 40},
    "custom": [{"name": "two_tone", "duration": 55,
                "terms": [{"amplitude": 0.0585, "period": 5}, {"amplitude": 0.0065, "period": 5.5}]}],
    "drawings": {"min_amplitude": 0.005, "max_amplitude": 0.03, "min_period": 4, "max_period": 12}
  },
  "service": {"workspace": 0.15},
  "run": ["fig3", "custom"]
})"));
    return j;
}

json quad_surrogate()
{
    json j = pendulum_sim();
    j.erase("controller");
    j.erase("ablation");
    j.erase("plant");
    j.erase("training_data");
    j.merge_patch(json::parse(R"({
  "system": "quad_surrogate",
  "plant": {"model": "quad_axis", "thrust_lag": 0.25, "drag": 1.0},
  "controller": {"natural_frequency": 1.5, "damping": 0.7},
  "rates": {"sim_hz": 700, "control_every": 10, "reference_every": 100},
  "surrogate": {"zero": 1.2, "delay": 0},
  "training_data": {"kind": "multisine", "duration": 400, "components": 20, "component_amplitude": 0.07,
                    "min_period": 4, "max_period": 20},
  "selection": {"kind": "approx_inverse", "n": 3, "encoding": "relative", "velocity_channel": true},
  "exact_selection": {"kind": "exact_inverse", "n": 3, "r": 1, "encoding": "relative"},
  "network": {"hidden": [128, 128, 128, 128], "activation": "relu"},
  "training": {"learning_rate": 0.001, "weight_decay": 0.01, "validation_fraction": 0.1, "epochs": 300, "patience": 50},
  "scenarios": {
    "fig3": null, "fig4": null,
    "drawings": {"count": 10, "duration": 30, "min_components": 3, "max_components": 6,
                 "min_period": 4, "max_period": 20, "min_amplitude": 0.05, "max_amplitude": 0.25}
  },
  "service": {"workspace": 1.0},
  "run": ["threeway"]
})"));
    return j;
}

// Typed access with the JSON-pointer-like path of every key in error messages.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail(path_.empty() ? "/" : path_, "expected an object");
    }

    const std::string& where() const { return path_; }
    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    std::string path(const char* key) const { return path_ + "/" + key; }
    const json& raw(const char* key) const
    {
        if (!has(key)) fail(path(key), "missing required key");
        return j_.at(key);
    }
    Reader object(const char* key) const { return Reader(raw(key), path(key)); }

    double num(const char* key) const
    {
        const json& v = raw(key);
        if (!v.is_number()) fail(path(key), "expected a number");
        return v.get<double>();
    }
    double num(const char* key, double fallback) const { return has(key) ? num(key) : fallback; }
    double positive(const char* key, double fallback) const
    {
        const double v = num(key, fallback);
        if (!(v > 0.0)) fail(path(key), "must be positive");
        return v;
    }

    long long integer(const char* key) const
    {
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(path(key), "expected an integer");
        return v.get<long long>();
    }
    int integer(const char* key, int fallback) const { return has(key) ? static_cast<int>(integer(key)) : fallback; }

    bool boolean(const char* key, bool fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) fail(path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string str(const char* key) const
    {
        const json& v = raw(key);
        if (!v.is_string()) fail(path(key), "expected a string");
        return v.get<std::string>();
    }
    std::string str(const char* key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }

    std::vector<double> numbers(const char* key) const
    {
        const json& v = raw(key);
        if (!v.is_array()) fail(path(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(path(key) + "/" + std::to_string(i), "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void allow(std::initializer_list<const char*> keys) const
    {
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, _] : j_.items())
            if (!ok.count(k)) fail(path_ + "/" + k, "unknown key");
    }

    [[noreturn]] static void fail(const std::string& where, const std::string& what)
    {
        throw ConfigError("config error at " + where + ": " + what);
    }

private:
    const json& j_;
    std::string path_;
};

invlearn::InputSelection parse_selection(const Reader& r)
{
    r.allow({"kind", "n", "r", "past", "encoding", "velocity_channel"});
    json sel = json::object();
    sel["kind"] = r.str("kind");
    for (const char* k : {"n", "r", "past"})
        if (r.has(k)) sel[k] = r.integer(k);
    sel["encoding"]         = r.str("encoding", "absolute");
    sel["velocity_channel"] = r.boolean("velocity_channel", false);
    try {
        invlearn::InputSelection s = invlearn::selection_from_json(sel);
        s.validate();
        return s;
    } catch (const std::exception& e) {
        Reader::fail(r.where(), e.what());
    }
}

SweepSpec parse_sweep(const Reader& r)
{
    r.allow({"periods", "amplitude", "duration"});
    SweepSpec s;
    s.periods   = r.numbers("periods");
    s.amplitude = r.num("amplitude");
    s.duration  = r.positive("duration", 60.0);
    for (std::size_t i = 0; i < s.periods.size(); ++i)
        if (!(s.periods[i] > 0.0)) Reader::fail(r.path("periods") + "/" + std::to_string(i), "must be positive");
    return s;
}

}  // namespace

std::vector<std::string> preset_names() { return {"pendulum_sim", "pendulum_voltage", "quad_surrogate"}; }

json preset(const std::string& name)
{
    json j;
    if (name == "pendulum_sim") j = pendulum_sim();
    else if (name == "pendulum_voltage") j = pendulum_voltage();
    else if (name == "quad_surrogate") j = quad_surrogate();
    else throw ConfigError("config error at /extends: unknown preset '" + name + "'");
    j["preset"] = name;
    return j;
}

json resolve_config(const json& doc)
{
    if (!doc.is_object()) throw ConfigError("config error at /: expected an object");
    if (!doc.contains("extends")) return doc;
    if (!doc.at("extends").is_string()) throw ConfigError("config error at /extends: expected a preset name");
    json base = preset(doc.at("extends").get<std::string>());
    json patch = doc;
    patch.erase("extends");
    base.merge_patch(patch);
    return base;
}

RunConfig parse_config(const json& j)
{
    const Reader root(j, "");
    root.allow({"preset", "system", "plant", "controller", "rates", "divergence_bound", "surrogate", "training_data",
                "selection", "exact_selection", "ablation", "network", "training", "dataset", "scenarios", "evaluation",
                "run", "output_dir", "seed", "service"});
    RunConfig c;
    c.preset = root.str("preset", "custom");

    const std::string system = root.str("system");
    if (system == "pendulum") c.system = SystemKind::Pendulum;
    else if (system == "quad_surrogate") c.system = SystemKind::QuadSurrogate;
    else Reader::fail("/system", "expected 'pendulum' or 'quad_surrogate'");

    {
        const Reader p = root.object("plant");
        const std::string model = p.str("model");
        if (model == "pendulum_cart" || model == "pendulum_cart_voltage") {
            p.allow({"model", "cart_mass", "pendulum_mass", "length", "gravity", "back_emf", "voltage_gain"});
            c.plant = model == "pendulum_cart" ? PlantModel::PendulumCart : PlantModel::PendulumCartVoltage;
            c.pendulum.cart_mass     = p.positive("cart_mass", c.pendulum.cart_mass);
            c.pendulum.pendulum_mass = p.positive("pendulum_mass", c.pendulum.pendulum_mass);
            c.pendulum.length        = p.positive("length", c.pendulum.length);
            c.pendulum.gravity       = p.positive("gravity", c.pendulum.gravity);
            c.voltage.back_emf       = p.num("back_emf", c.voltage.back_emf);
            c.voltage.gain           = p.num("voltage_gain", c.voltage.gain);
        } else if (model == "quad_axis") {
            p.allow({"model", "thrust_lag", "drag"});
            c.plant           = PlantModel::QuadAxis;
            c.quad.thrust_lag = p.positive("thrust_lag", c.quad.thrust_lag);
            c.quad.drag       = p.num("drag", c.quad.drag);
            if (c.quad.drag < 0) Reader::fail("/plant/drag", "must be non-negative");
        } else {
            Reader::fail("/plant/model", "expected pendulum_cart, pendulum_cart_voltage or quad_axis");
        }
        const bool pend_plant = c.plant != PlantModel::QuadAxis;
        if (pend_plant != (c.system == SystemKind::Pendulum))
            Reader::fail("/plant/model", "does not match /system '" + system + "'");
    }

    {
        const Reader k = root.object("controller");
        if (c.system == SystemKind::Pendulum) {
            k.allow({"gain", "position_slot", "velocity_slot"});
            const auto g = k.numbers("gain");
            if (g.size() != 4) Reader::fail("/controller/gain", "expected 4 entries for the pendulum-cart state");
            c.gain = Eigen::Map<const Eigen::RowVectorXd>(g.data(), 4);
            c.position_slot = k.integer("position_slot", 0);
            c.velocity_slot = k.has("velocity_slot") ? std::optional<int>(k.integer("velocity_slot", 1)) : std::optional<int>(1);
        } else {
            k.allow({"natural_frequency", "damping"});
            const double wn = k.positive("natural_frequency", 1.5);
            const double zeta = k.positive("damping", 0.7);
            c.gain = Eigen::RowVector3d(wn * wn, 2.0 * zeta * wn, 0.0);
        }
    }

    {
        const Reader r = root.object("rates");
        r.allow({"sim_hz", "control_every", "reference_every"});
        c.rates.sim_dt          = 1.0 / r.positive("sim_hz", 1000.0);
        c.rates.control_every   = r.integer("control_every", 1);
        c.rates.reference_every = r.integer("reference_every", 15);
        try {
            c.rates.validate();
        } catch (const std::exception& e) {
            Reader::fail("/rates", e.what());
        }
    }
    c.divergence_bound = root.positive("divergence_bound", 1e3);

    if (c.system == SystemKind::QuadSurrogate) {
        const Reader s = root.object("surrogate");
        s.allow({"zero", "delay", "pole"});
        c.nmp_zero        = s.num("zero", 1.2);
        c.surrogate_delay = s.integer("delay", 0);
        if (!(c.nmp_zero > 1.0)) Reader::fail("/surrogate/zero", "must lie outside the unit circle (> 1)");
        if (c.surrogate_delay < 0) Reader::fail("/surrogate/delay", "must be non-negative");
        if (s.has("pole")) {
            c.surrogate_pole = s.num("pole");
            if (!(std::abs(*c.surrogate_pole) < 1.0)) Reader::fail("/surrogate/pole", "must lie inside the unit circle");
        }
    }

    {
        const Reader t = root.object("training_data");
        const std::string kind = t.str("kind");
        if (kind == "sinusoids") {
            t.allow({"kind", "amplitudes", "periods", "duration"});
            c.training_data.kind       = TrainingDataSpec::Kind::Sinusoids;
            c.training_data.amplitudes = t.numbers("amplitudes");
            c.training_data.periods    = t.numbers("periods");
            if (c.training_data.amplitudes.empty()) Reader::fail("/training_data/amplitudes", "must not be empty");
            if (c.training_data.periods.empty()) Reader::fail("/training_data/periods", "must not be empty");
        } else if (kind == "multisine") {
            t.allow({"kind", "duration", "components", "component_amplitude", "min_period", "max_period"});
            c.training_data.kind                = TrainingDataSpec::Kind::Multisine;
            c.training_data.components          = t.integer("components", 20);
            c.training_data.component_amplitude = t.num("component_amplitude", 0.07);
            c.training_data.min_period          = t.positive("min_period", 4.0);
            c.training_data.max_period          = t.positive("max_period", 20.0);
            if (c.training_data.components < 1) Reader::fail("/training_data/components", "must be >= 1");
            if (c.training_data.max_period < c.training_data.min_period)
                Reader::fail("/training_data/max_period", "must be >= min_period");
        } else {
            Reader::fail("/training_data/kind", "expected 'sinusoids' or 'multisine'");
        }
        c.training_data.duration = t.positive("duration", 60.0);
    }

    c.selection = parse_selection(root.object("selection"));
    if (c.selection.kind != invlearn::SelectionKind::ApproxInverse)
        Reader::fail("/selection/kind", "the learned approximate inverse needs kind 'approx_inverse'");
    if (root.has("exact_selection")) {
        c.exact_selection = parse_selection(root.object("exact_selection"));
        if (c.exact_selection->kind != invlearn::SelectionKind::ExactInverse)
            Reader::fail("/exact_selection/kind", "expected 'exact_inverse'");
    }
    if (root.has("ablation")) {
        const Reader a = root.object("ablation");
        a.allow({"past"});
        c.ablation_past = a.integer("past", 1);
        if (c.ablation_past < 1) Reader::fail("/ablation/past", "must be >= 1");
    } else {
        c.ablation_past = 0;
    }

    {
        const Reader n = root.object("network");
        n.allow({"hidden", "activation"});
        c.network.hidden.clear();
        const auto h = n.numbers("hidden");
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h[i] < 1 || h[i] != std::floor(h[i])) Reader::fail("/network/hidden/" + std::to_string(i), "expected a positive integer");
            c.network.hidden.push_back(static_cast<int>(h[i]));
        }
        try {
            c.network.activation = mlp::activation_from_string(n.str("activation", "tanh"));
        } catch (const std::exception& e) {
            Reader::fail("/network/activation", e.what());
        }
    }

    {
        const Reader t = root.object("training");
        t.allow({"optimizer", "learning_rate", "beta1", "beta2", "epsilon", "batch_size", "epochs", "validation_fraction",
                 "patience", "weight_decay"});
        const std::string opt = t.str("optimizer", "adam");
        if (opt == "adam") c.training.optimizer = mlp::Optimizer::Adam;
        else if (opt == "sgd") c.training.optimizer = mlp::Optimizer::Sgd;
        else Reader::fail("/training/optimizer", "expected 'adam' or 'sgd'");
        c.training.learning_rate       = t.positive("learning_rate", c.training.learning_rate);
        c.training.beta1               = t.num("beta1", c.training.beta1);
        c.training.beta2               = t.num("beta2", c.training.beta2);
        c.training.epsilon             = t.positive("epsilon", c.training.epsilon);
        c.training.batch_size          = t.integer("batch_size", c.training.batch_size);
        c.training.epochs              = t.integer("epochs", c.training.epochs);
        c.training.validation_fraction = t.num("validation_fraction", c.training.validation_fraction);
        c.training.patience            = t.integer("patience", c.training.patience);
        c.training.weight_decay        = t.num("weight_decay", c.training.weight_decay);
        try {
            c.training.validate();
        } catch (const std::exception& e) {
            Reader::fail("/training", e.what());
        }
    }

    {
        const Reader d = root.object("dataset");
        d.allow({"skip_seconds", "target_rows", "held_reference_span"});
        c.build.skip_seconds = d.num("skip_seconds", 2.0);
        const int rows       = d.integer("target_rows", 20000);
        if (rows < 0 || c.build.skip_seconds < 0) Reader::fail("/dataset", "values must be non-negative");
        c.build.target_rows         = static_cast<std::size_t>(rows);
        c.build.held_reference_span = d.integer("held_reference_span", 0);
    }

    if (root.has("scenarios")) {
        const Reader s = root.object("scenarios");
        s.allow({"fig3", "fig4", "drawings", "custom"});
        if (s.has("fig3")) c.fig3 = parse_sweep(s.object("fig3"));
        if (s.has("fig4")) c.fig4 = parse_sweep(s.object("fig4"));
        if (s.has("drawings")) {
            const Reader d = s.object("drawings");
            d.allow({"count", "duration", "min_components", "max_components", "min_period", "max_period", "min_amplitude",
                     "max_amplitude"});
            DrawingSpec& ds   = c.drawings;
            ds.count          = d.integer("count", ds.count);
            ds.duration       = d.positive("duration", ds.duration);
            ds.min_components = d.integer("min_components", ds.min_components);
            ds.max_components = d.integer("max_components", ds.max_components);
            ds.min_period     = d.positive("min_period", ds.min_period);
            ds.max_period     = d.positive("max_period", ds.max_period);
            ds.min_amplitude  = d.num("min_amplitude", ds.min_amplitude);
            ds.max_amplitude  = d.num("max_amplitude", ds.max_amplitude);
            if (ds.count < 0) Reader::fail("/scenarios/drawings/count", "must be non-negative");
            if (ds.min_components < 1 || ds.max_components < ds.min_components)
                Reader::fail("/scenarios/drawings/max_components", "need 1 <= min_components <= max_components");
            if (ds.max_period < ds.min_period) Reader::fail("/scenarios/drawings/max_period", "must be >= min_period");
        }
        if (s.has("custom")) {
            const json& arr = s.raw("custom");
            if (!arr.is_array()) Reader::fail("/scenarios/custom", "expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const Reader t(arr[i], "/scenarios/custom/" + std::to_string(i));
                t.allow({"name", "duration", "terms"});
                CustomTrajectory ct;
                ct.name     = t.str("name");
                ct.duration = t.positive("duration", 30.0);
                const json& terms = t.raw("terms");
                if (!terms.is_array()) Reader::fail(t.path("terms"), "expected an array");
                for (std::size_t q = 0; q < terms.size(); ++q) {
                    const Reader term(terms[q], t.path("terms") + "/" + std::to_string(q));
                    term.allow({"amplitude", "period", "phase"});
                    ct.terms.push_back({term.num("amplitude"), term.positive("period", 1.0), term.num("phase", 0.0)});
                }
                c.custom.push_back(std::move(ct));
            }
        }
    }

    if (root.has("evaluation")) {
        const Reader e = root.object("evaluation");
        e.allow({"skip_seconds"});
        c.eval_skip = e.num("skip_seconds", 5.0);
        if (c.eval_skip < 0) Reader::fail("/evaluation/skip_seconds", "must be non-negative");
    }

    if (root.has("run")) {
        const json& r = root.raw("run");
        if (!r.is_array()) Reader::fail("/run", "expected an array of scenario names");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!r[i].is_string()) Reader::fail("/run/" + std::to_string(i), "expected a scenario name");
            const std::string name = r[i].get<std::string>();
            if (name != "fig3" && name != "fig4" && name != "fig5" && name != "threeway" && name != "custom")
                Reader::fail("/run/" + std::to_string(i), "unknown scenario '" + name + "'");
            c.run.push_back(name);
        }
    }

    c.output_dir = root.str("output_dir", "out");
    if (root.has("seed")) {
        const long long s = root.integer("seed");
        if (s < 0) Reader::fail("/seed", "must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    c.training.seed = c.seed;
    c.build.seed    = c.seed;

    if (root.has("service")) {
        const Reader s = root.object("service");
        s.allow({"host", "port", "workspace", "max_duration", "smoothing_window", "cors_origin"});
        c.service.host             = s.str("host", c.service.host);
        c.service.port             = s.integer("port", c.service.port);
        c.service.workspace        = s.positive("workspace", c.service.workspace);
        c.service.max_duration     = s.positive("max_duration", c.service.max_duration);
        c.service.smoothing_window = s.integer("smoothing_window", c.service.smoothing_window);
        c.service.cors_origin      = s.str("cors_origin", c.service.cors_origin);
        if (c.service.port < 0 || c.service.port > 65535) Reader::fail("/service/port", "must be in 0..65535");
        if (c.service.smoothing_window < 1 || c.service.smoothing_window % 2 == 0)
            Reader::fail("/service/smoothing_window", "must be a positive odd integer");
    }
    return c;
}

json load_config_document(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return resolve_config(doc);
}

RunConfig load_config(const std::string& path) { return parse_config(load_config_document(path)); }

}  // namespace nmpinv::experiment
