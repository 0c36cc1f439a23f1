#include "perwave/specfile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "perwave/expr.hpp"
#include "perwave/report.hpp"

namespace perwave {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

using Section = std::map<std::string, Entry>;

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string dirname_of(const std::string& path) {
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

PeriodicField load_csv_field(const std::string& csv_path, double period,
                             const std::string& label) {
    std::ifstream is(csv_path);
    if (!is) throw std::runtime_error("cannot open csv field file: " + csv_path);
    std::vector<double> values;
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && !(std::isdigit(static_cast<unsigned char>(line[0])) ||
                               line[0] == '-' || line[0] == '+' || line[0] == '.'))
            continue;  // header row
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(csv_path + ": expected two comma-separated columns");
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return PeriodicField(std::move(values), period, label);
}

class SpecReader {
public:
    SpecReader(std::string path) : path_(std::move(path)) {
        std::ifstream is(path_);
        if (!is) throw std::runtime_error("cannot open spec file: " + path_);
        std::stringstream ss;
        ss << is.rdbuf();
        raw_ = ss.str();

        std::istringstream lines(raw_);
        std::string line, section;
        int lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            line = trim(line);
            if (line.empty() || line[0] == '#' || line[0] == ';') continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(path_, lineno, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(path_, lineno, "expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (section.empty()) fail(path_, lineno, "key outside any [section]");
            auto& sec = sections_[section];
            if (sec.count(key)) fail(path_, lineno, "duplicate key '" + key + "'");
            sec[key] = Entry{value, lineno};
        }
    }

    const std::string& raw() const { return raw_; }
    const std::string& path() const { return path_; }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    const Entry& entry(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end())
            throw std::runtime_error(path_ + ": missing [" + section + "] section");
        auto e = s->second.find(key);
        if (e == s->second.end())
            throw std::runtime_error(path_ + ": missing key '" + key + "' in [" + section + "]");
        e->second.used = true;
        return e->second;
    }

    std::string text(const std::string& section, const std::string& key) const {
        return entry(section, key).value;
    }

    std::string text_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
        return has(section, key) ? text(section, key) : fallback;
    }

    double number(const std::string& section, const std::string& key) const {
        const Entry& e = entry(section, key);
        try {
            return Expression::parse(e.value).eval(0.0);
        } catch (const std::exception& ex) {
            fail(path_, e.line, std::string("bad numeric value: ") + ex.what());
        }
    }

    double number_or(const std::string& section, const std::string& key, double fallback) const {
        return has(section, key) ? number(section, key) : fallback;
    }

    PeriodicField field(const std::string& section, const std::string& key, double period,
                        std::size_t n) const {
        const Entry& e = entry(section, key);
        if (e.value.rfind("csv:", 0) == 0) {
            const std::string rel = trim(e.value.substr(4));
            const std::string full = rel.front() == '/' ? rel : dirname_of(path_) + "/" + rel;
            return load_csv_field(full, period, key);
        }
        try {
            const Expression expr = Expression::parse(e.value);
            return sample_function([&](double x) { return expr.eval(x); }, n, period, key);
        } catch (const std::exception& ex) {
            fail(path_, e.line, std::string("in '") + key + "': " + ex.what());
        }
    }

    PeriodicField field_or(const std::string& section, const std::string& key, double period,
                           std::size_t n, double fallback) const {
        if (has(section, key)) return field(section, key, period, n);
        return PeriodicField::constant(fallback, n, period, key);
    }

    const std::map<std::string, Section>& sections() const { return sections_; }

private:
    std::string path_;
    std::string raw_;
    std::map<std::string, Section> sections_;
};

}  // namespace

ParsedSpec parse_spec(const std::string& path) {
    SpecReader rd(path);
    ParsedSpec out;
    out.source_path = path;
    out.hash = fnv1a64_hex(rd.raw());

    const int d = int(rd.number("system", "d"));
    const double period = rd.number_or("system", "period", 1.0);
    if (d < 1) throw std::runtime_error(path + ": d must be >= 1");
    if (!(period > 0.0)) throw std::runtime_error(path + ": period must be positive");
    const std::size_t n = std::size_t(rd.number_or("coefficients", "n", 128));

    const std::string form_s = rd.text_or("system", "form", "divergence");
    OperatorForm form;
    if (form_s == "divergence")
        form = OperatorForm::divergence;
    else if (form_s == "nondivergence")
        form = OperatorForm::nondivergence;
    else
        throw std::runtime_error(path + ": unknown form '" + form_s + "'");

    const std::string kind = rd.text_or("nonlinearity", "type",
                                        rd.text_or("system", "nonlinearity", "linear"));

    SystemSpec spec;
    spec.d = d;
    spec.period = period;
    spec.form = form;

    const auto sigma_key = [&](int i) {
        if (d == 1 && rd.has("coefficients", "sigma")) return std::string("sigma");
        if (d == 2 && i == 0 && rd.has("coefficients", "sigma_u")) return std::string("sigma_u");
        if (d == 2 && i == 1 && rd.has("coefficients", "sigma_v")) return std::string("sigma_v");
        return "sigma_" + std::to_string(i + 1);
    };
    const auto q_key = [&](int i) {
        if (d == 1 && rd.has("coefficients", "q")) return std::string("q");
        if (d == 2 && i == 0 && rd.has("coefficients", "q_u")) return std::string("q_u");
        if (d == 2 && i == 1 && rd.has("coefficients", "q_v")) return std::string("q_v");
        return "q_" + std::to_string(i + 1);
    };
    for (int i = 0; i < d; ++i) {
        spec.sigma.push_back(rd.field("coefficients", sigma_key(i), period, n));
        if (rd.has("coefficients", q_key(i)))
            spec.q.push_back(rd.field("coefficients", q_key(i), period, n));
        else
            spec.q.push_back(PeriodicField::constant(0.0, n, period, q_key(i)));
    }

    if (kind == "mutation_competition") {
        if (d != 2) throw std::runtime_error(path + ": mutation_competition requires d = 2");
        MutationCompetition mc{
            rd.field("nonlinearity", "r_u", period, n),     rd.field("nonlinearity", "r_v", period, n),
            rd.field("nonlinearity", "kappa_u", period, n), rd.field("nonlinearity", "kappa_v", period, n),
            rd.field("nonlinearity", "mu_u", period, n),    rd.field("nonlinearity", "mu_v", period, n)};
        spec.a = mutation_linearization(mc, period);
        spec.f.kind = Nonlinearity::Kind::mutation_competition;
        spec.f.mc = std::move(mc);
    } else if (kind == "logistic" || kind == "linear") {
        std::vector<PeriodicField> entries;
        if (d == 1 && (rd.has("nonlinearity", "r") || rd.has("coefficients", "r"))) {
            const std::string sec = rd.has("nonlinearity", "r") ? "nonlinearity" : "coefficients";
            entries.push_back(rd.field(sec, "r", period, n));
        } else {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const std::string key =
                        "a_" + std::to_string(i + 1) + std::to_string(j + 1);
                    const std::string sec = rd.has("nonlinearity", key) ? "nonlinearity"
                                                                        : "coefficients";
                    entries.push_back(rd.field(sec, key, period, n));
                }
        }
        spec.a = MatrixField(d, std::move(entries));
        if (kind == "logistic") {
            spec.f.kind = Nonlinearity::Kind::lower_barrier_beta;
            spec.f.base = Nonlinearity::Base::linear;
            spec.f.beta = rd.number_or("nonlinearity", "beta", 1.0);
            if (!(spec.f.beta > 0.0))
                throw std::runtime_error(path + ": logistic beta must be positive");
        }
    } else {
        throw std::runtime_error(path + ": unknown nonlinearity '" + kind + "'");
    }

    try {
        spec.validate();
    } catch (const std::exception& ex) {
        throw std::runtime_error(path + ": " + ex.what());
    }
    out.spec = std::move(spec);

    if (rd.has("strong_coupling", "p")) {
        out.p = rd.field("strong_coupling", "p", period, n);
        out.epsilon = rd.number_or("strong_coupling", "epsilon", 0.05);
    }

    for (const auto& [name, sec] : rd.sections()) {
        if (name == "numerics")
            for (const auto& [key, e] : sec) {
                try {
                    out.numerics[key] = Expression::parse(e.value).eval(0.0);
                } catch (const std::exception& ex) {
                    fail(path, e.line, std::string("bad numeric value: ") + ex.what());
                }
            }
        if (name == "expect")
            for (const auto& [key, e] : sec)
                out.expectations[key] = e.value == "true" || e.value == "1" || e.value == "yes";
    }
    return out;
}

}  // namespace perwave
