#include "nsqn/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "nsqn/errors.hpp"

namespace nsqn {

std::string_view to_string(Task t) noexcept {
    switch (t) {
        case Task::Counting: return "counting";
        case Task::MnistRow: return "mnist-row";
        case Task::MnistPixel: return "mnist-pixel";
    }
    return "?";
}

std::string_view to_string(OptimizerKind o) noexcept {
    switch (o) {
        case OptimizerKind::Asnaq: return "asnaq";
        case OptimizerKind::Adaqn: return "adaqn";
        case OptimizerKind::Adam: return "adam";
        case OptimizerKind::Adagrad: return "adagrad";
        case OptimizerKind::Naq: return "naq";
        case OptimizerKind::Bfgs: return "bfgs";
    }
    return "?";
}

std::string default_data_dir() {
    if (const char* env = std::getenv("NSQN_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return "data/mnist";
}

namespace {

const std::set<std::string, std::less<>>& known_keys() {
    static const std::set<std::string, std::less<>> keys{
        "task",           "optimizer",      "seed",           "hp.alpha",         "hp.mu_min",
        "hp.mu_max",      "hp.phi",         "hp.gamma",       "hp.L",             "hp.m_L",
        "hp.m_F",         "hp.eps_h0",      "hp.eps_curv",    "hp.k_max",         "adam.alpha",
        "adam.beta1",     "adam.beta2",     "adam.eps",       "adagrad.alpha",    "adagrad.eps",
        "naq.mu",         "model.n_hidden", "task.T",         "task.downsample",  "task.n_samples",
        "train.batch_size", "train.epochs", "train.log_every", "data.images",     "data.labels",
        "output.csv",
    };
    return keys;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct RawEntry {
    std::string value;
    std::size_t line;
};

using RawMap = std::map<std::string, RawEntry, std::less<>>;

RawMap collect(std::string_view text) {
    RawMap raw;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected `key = value`, got `" +
                              std::string(line) + "`");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!known_keys().contains(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key `" + key + "`");
        }
        if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for `" + key + "`");
        raw[key] = RawEntry{value, line_no};
    }
    return raw;
}

class Resolver {
public:
    explicit Resolver(RawMap raw) : raw_(std::move(raw)) {}

    bool has(std::string_view key) const { return raw_.find(key) != raw_.end(); }

    std::optional<std::string> text(std::string_view key) const {
        const auto it = raw_.find(key);
        if (it == raw_.end()) return std::nullopt;
        return it->second.value;
    }

    template <typename T>
    void number(std::string_view key, T& field) const {
        const auto it = raw_.find(key);
        if (it == raw_.end()) return;
        const std::string& v = it->second.value;
        T parsed{};
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
        if (ec != std::errc{} || ptr != v.data() + v.size()) {
            throw ConfigError("line " + std::to_string(it->second.line) + ": `" + std::string(key) +
                              "` expects a number, got `" + v + "`");
        }
        field = parsed;
    }

private:
    RawMap raw_;
};

[[noreturn]] void out_of_range(std::string_view key, const std::string& bound, const std::string& value) {
    throw ValidationError("`" + std::string(key) + " = " + value + "` violates " + bound);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void validate(const ExperimentConfig& c) {
    const auto& hp = c.hp;
    if (!(hp.alpha > 0.0)) out_of_range("hp.alpha", "alpha > 0", fmt_double(hp.alpha));
    if (!(hp.mu_min > 0.0)) out_of_range("hp.mu_min", "mu_min > 0", fmt_double(hp.mu_min));
    if (!(hp.mu_max < 1.0)) out_of_range("hp.mu_max", "mu_max < 1", fmt_double(hp.mu_max));
    if (!(hp.mu_min <= hp.mu_max)) out_of_range("hp.mu_min", "mu_min <= mu_max", fmt_double(hp.mu_min));
    if (!(hp.phi > 1.0)) out_of_range("hp.phi", "phi > 1", fmt_double(hp.phi));
    if (!(hp.gamma >= 1.0)) out_of_range("hp.gamma", "gamma >= 1", fmt_double(hp.gamma));
    if (hp.L < 1) out_of_range("hp.L", "L >= 1", std::to_string(hp.L));
    if (hp.m_L < 1) out_of_range("hp.m_L", "m_L >= 1", std::to_string(hp.m_L));
    if (hp.m_F < 1) out_of_range("hp.m_F", "m_F >= 1", std::to_string(hp.m_F));
    if (!(hp.eps_h0 > 0.0)) out_of_range("hp.eps_h0", "eps_h0 > 0", fmt_double(hp.eps_h0));
    if (!(hp.eps_curv > 0.0)) out_of_range("hp.eps_curv", "eps_curv > 0", fmt_double(hp.eps_curv));

    if (!(c.adam.alpha > 0.0)) out_of_range("adam.alpha", "alpha > 0", fmt_double(c.adam.alpha));
    if (!(c.adam.beta1 >= 0.0 && c.adam.beta1 < 1.0)) out_of_range("adam.beta1", "0 <= beta1 < 1", fmt_double(c.adam.beta1));
    if (!(c.adam.beta2 >= 0.0 && c.adam.beta2 < 1.0)) out_of_range("adam.beta2", "0 <= beta2 < 1", fmt_double(c.adam.beta2));
    if (!(c.adam.eps > 0.0)) out_of_range("adam.eps", "eps > 0", fmt_double(c.adam.eps));
    if (!(c.adagrad.alpha > 0.0)) out_of_range("adagrad.alpha", "alpha > 0", fmt_double(c.adagrad.alpha));
    if (!(c.adagrad.eps > 0.0)) out_of_range("adagrad.eps", "eps > 0", fmt_double(c.adagrad.eps));
    if (!(c.naq_mu >= 0.0 && c.naq_mu < 1.0)) out_of_range("naq.mu", "0 <= mu < 1", fmt_double(c.naq_mu));

    if (c.n_hidden < 1) out_of_range("model.n_hidden", "n_hidden >= 1", std::to_string(c.n_hidden));
    if (c.n_samples < 1) out_of_range("task.n_samples", "n_samples >= 1", std::to_string(c.n_samples));
    if (c.batch_size < 1) out_of_range("train.batch_size", "batch_size >= 1", std::to_string(c.batch_size));
    if (c.batch_size > c.n_samples) {
        out_of_range("train.batch_size", "batch_size <= task.n_samples (" + std::to_string(c.n_samples) + ")",
                     std::to_string(c.batch_size));
    }
    if (c.epochs < 1) out_of_range("train.epochs", "epochs >= 1", std::to_string(c.epochs));
    if (c.task == Task::Counting && c.steps < 1) out_of_range("task.T", "T >= 1", std::to_string(c.steps));
    if (c.task == Task::MnistPixel && c.downsample != 0 && 28 % c.downsample != 0) {
        out_of_range("task.downsample", "side dividing 28", std::to_string(c.downsample));
    }
    if (c.output.empty()) out_of_range("output.csv", "non-empty path", c.output);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    const Resolver r(collect(text));
    ExperimentConfig c;

    if (auto v = r.text("task")) {
        if (*v == "counting") c.task = Task::Counting;
        else if (*v == "mnist-row") c.task = Task::MnistRow;
        else if (*v == "mnist-pixel") c.task = Task::MnistPixel;
        else throw ValidationError("`task = " + *v + "` violates task in {counting, mnist-row, mnist-pixel}");
    }
    if (auto v = r.text("optimizer")) {
        bool found = false;
        for (auto kind : {OptimizerKind::Asnaq, OptimizerKind::Adaqn, OptimizerKind::Adam, OptimizerKind::Adagrad,
                          OptimizerKind::Naq, OptimizerKind::Bfgs}) {
            if (*v == to_string(kind)) {
                c.optimizer = kind;
                found = true;
            }
        }
        if (!found) {
            throw ValidationError("`optimizer = " + *v +
                                  "` violates optimizer in {asnaq, adaqn, adam, adagrad, naq, bfgs}");
        }
    }

    // Task-dependent defaults.
    switch (c.task) {
        case Task::Counting:
            c.n_hidden = 24;
            c.batch_size = 50;
            c.steps = 20;
            c.n_samples = 10000;
            c.epochs = 75;
            break;
        case Task::MnistRow:
            c.n_hidden = 100;
            c.batch_size = 128;
            c.steps = 0;
            c.n_samples = 5000;
            c.epochs = 10;
            break;
        case Task::MnistPixel:
            c.n_hidden = 100;
            c.batch_size = 128;
            c.steps = 0;
            c.downsample = 14;
            c.n_samples = 2000;
            c.epochs = 10;
            break;
    }
    if (c.task != Task::Counting) {
        const std::string dir = default_data_dir();
        c.mnist_images = (std::filesystem::path(dir) / "train-images-idx3-ubyte").string();
        c.mnist_labels = (std::filesystem::path(dir) / "train-labels-idx1-ubyte").string();
    }

    r.number("seed", c.seed);
    r.number("hp.alpha", c.hp.alpha);
    r.number("hp.mu_min", c.hp.mu_min);
    r.number("hp.mu_max", c.hp.mu_max);
    r.number("hp.phi", c.hp.phi);
    r.number("hp.gamma", c.hp.gamma);
    r.number("hp.L", c.hp.L);
    r.number("hp.m_L", c.hp.m_L);
    r.number("hp.m_F", c.hp.m_F);
    r.number("hp.eps_h0", c.hp.eps_h0);
    r.number("hp.eps_curv", c.hp.eps_curv);
    r.number("hp.k_max", c.hp.k_max);
    r.number("adam.alpha", c.adam.alpha);
    r.number("adam.beta1", c.adam.beta1);
    r.number("adam.beta2", c.adam.beta2);
    r.number("adam.eps", c.adam.eps);
    r.number("adagrad.alpha", c.adagrad.alpha);
    r.number("adagrad.eps", c.adagrad.eps);
    r.number("naq.mu", c.naq_mu);
    r.number("model.n_hidden", c.n_hidden);
    r.number("task.n_samples", c.n_samples);
    r.number("train.batch_size", c.batch_size);
    r.number("train.epochs", c.epochs);
    r.number("train.log_every", c.log_every);

    if (r.has("task.T")) {
        if (c.task != Task::Counting) {
            throw ValidationError("`task.T` only applies to task = counting; MNIST lengths follow the images");
        }
        r.number("task.T", c.steps);
    }
    if (r.has("task.downsample")) {
        if (c.task != Task::MnistPixel) throw ValidationError("`task.downsample` only applies to task = mnist-pixel");
        r.number("task.downsample", c.downsample);
    }
    if (r.has("data.images") || r.has("data.labels")) {
        if (c.task == Task::Counting) throw ValidationError("`data.*` keys only apply to MNIST tasks");
        if (auto v = r.text("data.images")) c.mnist_images = *v;
        if (auto v = r.text("data.labels")) c.mnist_labels = *v;
    }
    if (auto v = r.text("output.csv")) c.output = *v;

    validate(c);
    return c;
}

std::string to_config_text(const ExperimentConfig& c) {
    std::ostringstream out;
    auto kv = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
    kv("task", std::string(to_string(c.task)));
    kv("optimizer", std::string(to_string(c.optimizer)));
    kv("seed", std::to_string(c.seed));
    kv("hp.alpha", fmt_double(c.hp.alpha));
    kv("hp.mu_min", fmt_double(c.hp.mu_min));
    kv("hp.mu_max", fmt_double(c.hp.mu_max));
    kv("hp.phi", fmt_double(c.hp.phi));
    kv("hp.gamma", fmt_double(c.hp.gamma));
    kv("hp.L", std::to_string(c.hp.L));
    kv("hp.m_L", std::to_string(c.hp.m_L));
    kv("hp.m_F", std::to_string(c.hp.m_F));
    kv("hp.eps_h0", fmt_double(c.hp.eps_h0));
    kv("hp.eps_curv", fmt_double(c.hp.eps_curv));
    kv("hp.k_max", std::to_string(c.hp.k_max));
    kv("adam.alpha", fmt_double(c.adam.alpha));
    kv("adam.beta1", fmt_double(c.adam.beta1));
    kv("adam.beta2", fmt_double(c.adam.beta2));
    kv("adam.eps", fmt_double(c.adam.eps));
    kv("adagrad.alpha", fmt_double(c.adagrad.alpha));
    kv("adagrad.eps", fmt_double(c.adagrad.eps));
    kv("naq.mu", fmt_double(c.naq_mu));
    kv("model.n_hidden", std::to_string(c.n_hidden));
    if (c.task == Task::Counting) kv("task.T", std::to_string(c.steps));
    if (c.task == Task::MnistPixel) kv("task.downsample", std::to_string(c.downsample));
    kv("task.n_samples", std::to_string(c.n_samples));
    kv("train.batch_size", std::to_string(c.batch_size));
    kv("train.epochs", std::to_string(c.epochs));
    kv("train.log_every", std::to_string(c.log_every));
    if (c.task != Task::Counting) {
        kv("data.images", c.mnist_images);
        kv("data.labels", c.mnist_labels);
    }
    kv("output.csv", c.output);
    return out.str();
}

}  // namespace nsqn
