#include "rcsac/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rcsac/rng.hpp"

namespace rcsac {

namespace {

class TomlParser {
public:
    explicit TomlParser(const std::string& text) : s_(text) {}

    ConfigTable parse() {
        ConfigTable table;
        std::string section;
        skip_space_and_comments(true);
        while (pos_ < s_.size()) {
            if (s_[pos_] == '[') {
                ++pos_;
                section = read_bare_key();
                expect(']');
                section += '.';
            } else {
                std::string key = read_bare_key();
                expect('=');
                ConfigValue v = read_value();
                const std::string full = section + key;
                if (table.count(full)) fail("duplicate key '" + full + "'");
                table[full] = std::move(v);
            }
            skip_space_and_comments(true);
        }
        return table;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i)
            if (s_[i] == '\n') ++line;
        throw ConfigError("config parse error (line " + std::to_string(line) + "): " + msg);
    }

    void skip_space_and_comments(bool newlines) {
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        skip_space_and_comments(false);
        if (pos_ >= s_.size() || s_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string read_bare_key() {
        skip_space_and_comments(false);
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                s_[pos_] == '-'))
            ++pos_;
        if (pos_ == start) fail("expected key");
        return s_.substr(start, pos_ - start);
    }

    ConfigValue read_value() {
        skip_space_and_comments(false);
        if (pos_ >= s_.size()) fail("expected value");
        const char c = s_[pos_];
        ConfigValue v;
        if (c == '"') {
            ++pos_;
            std::size_t start = pos_;
            while (pos_ < s_.size() && s_[pos_] != '"') ++pos_;
            if (pos_ >= s_.size()) fail("unterminated string");
            v.kind = ConfigValue::Kind::string;
            v.str = s_.substr(start, pos_ - start);
            ++pos_;
            return v;
        }
        if (c == '[') {
            ++pos_;
            v.kind = ConfigValue::Kind::array;
            skip_space_and_comments(true);
            while (pos_ < s_.size() && s_[pos_] != ']') {
                v.arr.push_back(read_value());
                skip_space_and_comments(true);
                if (pos_ < s_.size() && s_[pos_] == ',') {
                    ++pos_;
                    skip_space_and_comments(true);
                }
            }
            if (pos_ >= s_.size()) fail("unterminated array");
            ++pos_;
            return v;
        }
        if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            v.kind = ConfigValue::Kind::boolean;
            v.b = true;
            return v;
        }
        if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            v.kind = ConfigValue::Kind::boolean;
            v.b = false;
            return v;
        }
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                    s_[pos_] == '+' || s_[pos_] == '-' || s_[pos_] == '.' ||
                                    s_[pos_] == 'e' || s_[pos_] == 'E'))
            ++pos_;
        if (pos_ == start) fail("unrecognized value");
        const std::string tok = s_.substr(start, pos_ - start);
        try {
            std::size_t used = 0;
            v.num = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            fail("bad number '" + tok + "'");
        }
        v.kind = ConfigValue::Kind::number;
        return v;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

void json_to_table(const nlohmann::json& j, const std::string& prefix, ConfigTable& out) {
    using nlohmann::json;
    std::function<ConfigValue(const json&)> conv = [&](const json& v) -> ConfigValue {
        ConfigValue cv;
        if (v.is_boolean()) {
            cv.kind = ConfigValue::Kind::boolean;
            cv.b = v.get<bool>();
        } else if (v.is_number()) {
            cv.kind = ConfigValue::Kind::number;
            cv.num = v.get<double>();
        } else if (v.is_string()) {
            cv.kind = ConfigValue::Kind::string;
            cv.str = v.get<std::string>();
        } else if (v.is_array()) {
            cv.kind = ConfigValue::Kind::array;
            for (const json& e : v) cv.arr.push_back(conv(e));
        } else {
            throw ConfigError("unsupported JSON value type in config");
        }
        return cv;
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_object()) {
            json_to_table(it.value(), prefix + it.key() + ".", out);
        } else {
            out[prefix + it.key()] = conv(it.value());
        }
    }
}

// Tracks which keys a schema consumed so unknown keys can be rejected.
class Fields {
public:
    Fields(const ConfigTable& table, const std::string& prefix)
        : table_(table), prefix_(prefix) {}

    const ConfigValue* find(const std::string& key) {
        auto it = table_.find(prefix_ + key);
        if (it == table_.end()) return nullptr;
        used_.insert(prefix_ + key);
        return &it->second;
    }

    double number(const std::string& key, double fallback) {
        const ConfigValue* v = find(key);
        if (!v) return fallback;
        if (v->kind != ConfigValue::Kind::number)
            throw ConfigError("config key '" + key + "' must be a number");
        return v->num;
    }

    long integer(const std::string& key, long fallback) {
        const double d = number(key, static_cast<double>(fallback));
        if (d != std::floor(d)) throw ConfigError("config key '" + key + "' must be an integer");
        return static_cast<long>(d);
    }

    bool boolean(const std::string& key, bool fallback) {
        const ConfigValue* v = find(key);
        if (!v) return fallback;
        if (v->kind != ConfigValue::Kind::boolean)
            throw ConfigError("config key '" + key + "' must be a boolean");
        return v->b;
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const ConfigValue* v = find(key);
        if (!v) return fallback;
        if (v->kind != ConfigValue::Kind::string)
            throw ConfigError("config key '" + key + "' must be a string");
        return v->str;
    }

    std::vector<double> numbers(const ConfigValue& v, const std::string& key) {
        if (v.kind != ConfigValue::Kind::array)
            throw ConfigError("config key '" + key + "' must be an array");
        std::vector<double> out;
        for (const ConfigValue& e : v.arr) {
            if (e.kind != ConfigValue::Kind::number)
                throw ConfigError("config key '" + key + "' must contain numbers");
            out.push_back(e.num);
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : table_) {
            if (!key.starts_with(prefix_)) continue;
            if (prefix_.empty() && (key.starts_with("env.") || key.starts_with("train.")))
                continue;
            if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
        }
    }

private:
    const ConfigTable& table_;
    std::string prefix_;
    std::set<std::string> used_;
};

std::string pick_prefix(const ConfigTable& table, const std::string& section) {
    for (const auto& [key, value] : table)
        if (key.starts_with(section + ".")) return section + ".";
    return "";
}

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

}  // namespace

ConfigTable parse_toml(const std::string& text) { return TomlParser(text).parse(); }

ConfigTable parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string ext = path.extension().string();
    if (ext == ".toml") return parse_toml(ss.str());
    if (ext == ".json") {
        try {
            ConfigTable table;
            json_to_table(nlohmann::json::parse(ss.str()), "", table);
            return table;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("malformed JSON config " + path.string() + ": " + e.what());
        }
    }
    throw ConfigError("unsupported config extension '" + ext + "' (use .toml or .json)");
}

MazeSpec maze_from_table(const ConfigTable& table) {
    Fields f(table, pick_prefix(table, "env"));
    MazeSpec m;
    m.name = f.string("name", m.name);
    m.dynamics = dynamics_from_name(f.string("dynamics", "linear"));
    if (const ConfigValue* v = f.find("bounds")) {
        const std::vector<double> b = f.numbers(*v, "bounds");
        if (b.size() != 4) throw ConfigError("bounds must be [x_min, x_max, y_min, y_max]");
        m.bounds = {b[0], b[1], b[2], b[3]};
    }
    if (const ConfigValue* v = f.find("obstacles")) {
        m.obstacles.clear();
        if (v->kind != ConfigValue::Kind::array)
            throw ConfigError("obstacles must be an array of rectangles");
        for (const ConfigValue& e : v->arr) {
            const std::vector<double> r = f.numbers(e, "obstacles");
            if (r.size() != 4)
                throw ConfigError("each obstacle must be [x_min, x_max, y_min, y_max]");
            m.obstacles.push_back({r[0], r[1], r[2], r[3]});
        }
    }
    if (const ConfigValue* v = f.find("start")) {
        const std::vector<double> p = f.numbers(*v, "start");
        if (p.size() != 2) throw ConfigError("start must be [x, y]");
        m.start_x = p[0];
        m.start_y = p[1];
    }
    if (const ConfigValue* v = f.find("goal")) {
        const std::vector<double> p = f.numbers(*v, "goal");
        if (p.size() != 2) throw ConfigError("goal must be [x, y]");
        m.goal_x = p[0];
        m.goal_y = p[1];
    }
    m.start_theta = f.number("start_theta", m.start_theta);
    m.start_v = f.number("start_v", m.start_v);
    m.goal_radius = f.number("goal_radius", m.goal_radius);
    m.horizon = static_cast<int>(f.integer("horizon", m.horizon));
    m.dt = f.number("dt", m.dt);
    m.step_cost = f.number("step_cost", m.step_cost);
    m.goal_bonus = f.number("goal_bonus", m.goal_bonus);
    m.noise_std = f.number("noise_std", m.noise_std);
    m.noise_in_transition = f.boolean("noise_in_transition", m.noise_in_transition);
    const std::string sm = f.string("start_mode", "fixed");
    if (sm == "fixed")
        m.start_mode = StartMode::fixed;
    else if (sm == "uniform_free")
        m.start_mode = StartMode::uniform_free;
    else
        throw ConfigError("start_mode must be fixed|uniform_free");
    m.v_max = f.number("v_max", m.v_max);
    m.turn_rate_max = f.number("turn_rate_max", m.turn_rate_max);
    m.accel_max = f.number("accel_max", m.accel_max);
    f.reject_unknown();
    m.validate();
    return m;
}

TrainConfig train_from_table(const ConfigTable& table) {
    Fields f(table, pick_prefix(table, "train"));
    TrainConfig t;
    t.epochs = static_cast<int>(f.integer("epochs", t.epochs));
    t.env_steps_per_epoch = static_cast<int>(f.integer("env_steps_per_epoch", t.env_steps_per_epoch));
    t.grad_steps_per_epoch =
        static_cast<int>(f.integer("grad_steps_per_epoch", t.grad_steps_per_epoch));
    t.batch_size = static_cast<int>(f.integer("batch_size", t.batch_size));
    t.lr = f.number("lr", t.lr);
    t.gamma = f.number("gamma", t.gamma);
    t.lambda_er = f.number("lambda_er", t.lambda_er);
    t.alpha = f.number("alpha", t.alpha);
    t.tau = f.number("tau", t.tau);
    t.buffer_capacity =
        static_cast<std::size_t>(f.integer("buffer_capacity", static_cast<long>(t.buffer_capacity)));
    t.delta_lo = f.number("delta_lo", t.delta_lo);
    t.delta_hi = f.number("delta_hi", t.delta_hi);
    t.risk_mc_samples = static_cast<int>(f.integer("risk_mc_samples", t.risk_mc_samples));
    t.eval_interval = static_cast<int>(f.integer("eval_interval", t.eval_interval));
    t.eval_episodes = static_cast<int>(f.integer("eval_episodes", t.eval_episodes));
    t.eval_delta = f.number("eval_delta", t.eval_delta);
    t.seed = static_cast<std::uint64_t>(f.integer("seed", static_cast<long>(t.seed)));
    t.hidden_dim = static_cast<int>(f.integer("hidden_dim", t.hidden_dim));
    t.warmup_steps = static_cast<int>(f.integer("warmup_steps", t.warmup_steps));
    t.delta_in_critics = f.boolean("delta_in_critics", t.delta_in_critics);
    t.timing = f.boolean("timing", t.timing);
    f.reject_unknown();
    t.validate();
    return t;
}

void TrainConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0)) throw ConfigError(std::string(name) + " must be > 0");
    };
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    positive(env_steps_per_epoch, "env_steps_per_epoch");
    positive(grad_steps_per_epoch, "grad_steps_per_epoch");
    positive(batch_size, "batch_size");
    positive(lr, "lr");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
    if (lambda_er < 0) throw ConfigError("lambda_er must be >= 0");
    positive(alpha, "alpha");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must be in [0, 1]");
    positive(static_cast<double>(buffer_capacity), "buffer_capacity");
    if (!(delta_lo >= 0.0 && delta_hi <= 1.0 && delta_lo <= delta_hi))
        throw ConfigError("require 0 <= delta_lo <= delta_hi <= 1");
    positive(risk_mc_samples, "risk_mc_samples");
    positive(eval_interval, "eval_interval");
    positive(eval_episodes, "eval_episodes");
    if (!(eval_delta >= 0.0 && eval_delta <= 1.0)) throw ConfigError("eval_delta must be in [0, 1]");
    positive(hidden_dim, "hidden_dim");
    if (warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
}

MazeSpec load_maze_config(const std::filesystem::path& path) {
    return maze_from_table(parse_config_file(path));
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    return train_from_table(parse_config_file(path));
}

void apply_override(MazeSpec& maze, TrainConfig& train, const std::string& kv) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must be key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);

    auto as_number = [&] {
        try {
            std::size_t used = 0;
            const double d = std::stod(raw, &used);
            if (used != raw.size()) throw std::invalid_argument(raw);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("override '" + key + "' needs a numeric value, got '" + raw + "'");
        }
    };
    auto as_int = [&] {
        const double d = as_number();
        if (d != std::floor(d)) throw ConfigError("override '" + key + "' needs an integer");
        return static_cast<long>(d);
    };
    auto as_bool = [&] {
        if (raw == "true" || raw == "on") return true;
        if (raw == "false" || raw == "off") return false;
        throw ConfigError("override '" + key + "' needs true|false");
    };

    const std::map<std::string, std::function<void()>> setters = {
        // env
        {"goal_radius", [&] { maze.goal_radius = as_number(); }},
        {"horizon", [&] { maze.horizon = static_cast<int>(as_int()); }},
        {"dt", [&] { maze.dt = as_number(); }},
        {"step_cost", [&] { maze.step_cost = as_number(); }},
        {"goal_bonus", [&] { maze.goal_bonus = as_number(); }},
        {"noise_std", [&] { maze.noise_std = as_number(); }},
        {"noise_in_transition", [&] { maze.noise_in_transition = as_bool(); }},
        {"v_max", [&] { maze.v_max = as_number(); }},
        {"turn_rate_max", [&] { maze.turn_rate_max = as_number(); }},
        {"accel_max", [&] { maze.accel_max = as_number(); }},
        {"start_theta", [&] { maze.start_theta = as_number(); }},
        {"start_v", [&] { maze.start_v = as_number(); }},
        {"start_mode",
         [&] {
             if (raw == "fixed")
                 maze.start_mode = StartMode::fixed;
             else if (raw == "uniform_free")
                 maze.start_mode = StartMode::uniform_free;
             else
                 throw ConfigError("start_mode must be fixed|uniform_free");
         }},
        // train
        {"epochs", [&] { train.epochs = static_cast<int>(as_int()); }},
        {"env_steps_per_epoch", [&] { train.env_steps_per_epoch = static_cast<int>(as_int()); }},
        {"grad_steps_per_epoch", [&] { train.grad_steps_per_epoch = static_cast<int>(as_int()); }},
        {"batch_size", [&] { train.batch_size = static_cast<int>(as_int()); }},
        {"lr", [&] { train.lr = as_number(); }},
        {"gamma", [&] { train.gamma = as_number(); }},
        {"lambda_er", [&] { train.lambda_er = as_number(); }},
        {"alpha", [&] { train.alpha = as_number(); }},
        {"tau", [&] { train.tau = as_number(); }},
        {"buffer_capacity", [&] { train.buffer_capacity = static_cast<std::size_t>(as_int()); }},
        {"delta_lo", [&] { train.delta_lo = as_number(); }},
        {"delta_hi", [&] { train.delta_hi = as_number(); }},
        {"risk_mc_samples", [&] { train.risk_mc_samples = static_cast<int>(as_int()); }},
        {"eval_interval", [&] { train.eval_interval = static_cast<int>(as_int()); }},
        {"eval_episodes", [&] { train.eval_episodes = static_cast<int>(as_int()); }},
        {"eval_delta", [&] { train.eval_delta = as_number(); }},
        {"seed", [&] { train.seed = static_cast<std::uint64_t>(as_int()); }},
        {"hidden_dim", [&] { train.hidden_dim = static_cast<int>(as_int()); }},
        {"warmup_steps", [&] { train.warmup_steps = static_cast<int>(as_int()); }},
        {"delta_in_critics", [&] { train.delta_in_critics = as_bool(); }},
        {"timing", [&] { train.timing = as_bool(); }},
    };

    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown or non-overridable key '" + key + "'");
    it->second();
    maze.validate();
    train.validate();
}

std::string resolved_config_toml(const MazeSpec& m, const TrainConfig& t) {
    std::ostringstream os;
    auto rect = [](const Rect& r) {
        return "[" + fmt_double(r.x_min) + ", " + fmt_double(r.x_max) + ", " +
               fmt_double(r.y_min) + ", " + fmt_double(r.y_max) + "]";
    };
    os << "[env]\n";
    os << "name = \"" << m.name << "\"\n";
    os << "dynamics = \"" << dynamics_name(m.dynamics) << "\"\n";
    os << "bounds = " << rect(m.bounds) << "\n";
    os << "obstacles = [";
    for (std::size_t i = 0; i < m.obstacles.size(); ++i)
        os << (i ? ", " : "") << rect(m.obstacles[i]);
    os << "]\n";
    os << "start = [" << fmt_double(m.start_x) << ", " << fmt_double(m.start_y) << "]\n";
    os << "start_theta = " << fmt_double(m.start_theta) << "\n";
    os << "start_v = " << fmt_double(m.start_v) << "\n";
    os << "goal = [" << fmt_double(m.goal_x) << ", " << fmt_double(m.goal_y) << "]\n";
    os << "goal_radius = " << fmt_double(m.goal_radius) << "\n";
    os << "horizon = " << m.horizon << "\n";
    os << "dt = " << fmt_double(m.dt) << "\n";
    os << "step_cost = " << fmt_double(m.step_cost) << "\n";
    os << "goal_bonus = " << fmt_double(m.goal_bonus) << "\n";
    os << "noise_std = " << fmt_double(m.noise_std) << "\n";
    os << "noise_in_transition = " << (m.noise_in_transition ? "true" : "false") << "\n";
    os << "start_mode = \"" << (m.start_mode == StartMode::fixed ? "fixed" : "uniform_free")
       << "\"\n";
    os << "v_max = " << fmt_double(m.v_max) << "\n";
    os << "turn_rate_max = " << fmt_double(m.turn_rate_max) << "\n";
    os << "accel_max = " << fmt_double(m.accel_max) << "\n";
    os << "\n[train]\n";
    os << "epochs = " << t.epochs << "\n";
    os << "env_steps_per_epoch = " << t.env_steps_per_epoch << "\n";
    os << "grad_steps_per_epoch = " << t.grad_steps_per_epoch << "\n";
    os << "batch_size = " << t.batch_size << "\n";
    os << "lr = " << fmt_double(t.lr) << "\n";
    os << "gamma = " << fmt_double(t.gamma) << "\n";
    os << "lambda_er = " << fmt_double(t.lambda_er) << "\n";
    os << "alpha = " << fmt_double(t.alpha) << "\n";
    os << "tau = " << fmt_double(t.tau) << "\n";
    os << "buffer_capacity = " << t.buffer_capacity << "\n";
    os << "delta_lo = " << fmt_double(t.delta_lo) << "\n";
    os << "delta_hi = " << fmt_double(t.delta_hi) << "\n";
    os << "risk_mc_samples = " << t.risk_mc_samples << "\n";
    os << "eval_interval = " << t.eval_interval << "\n";
    os << "eval_episodes = " << t.eval_episodes << "\n";
    os << "eval_delta = " << fmt_double(t.eval_delta) << "\n";
    os << "seed = " << t.seed << "\n";
    os << "hidden_dim = " << t.hidden_dim << "\n";
    os << "warmup_steps = " << t.warmup_steps << "\n";
    os << "delta_in_critics = " << (t.delta_in_critics ? "true" : "false") << "\n";
    os << "timing = " << (t.timing ? "true" : "false") << "\n";
    return os.str();
}

std::string config_hash(const std::string& resolved) {
    const std::uint64_t h = fnv1a64(resolved);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace rcsac
