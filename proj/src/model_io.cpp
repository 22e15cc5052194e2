#include "gfbp/model_io.hpp"

#include <json.hpp>

#include <memory>
#include <sstream>
#include <stdexcept>

#include "gfbp/errors.hpp"
#include "gfbp/expression.hpp"

namespace gfbp {

using nlohmann::json;

namespace {

json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t j = 0; j < limit; ++j) {
            if (text[j] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << "malformed JSON at line " << line << ", column " << col << ": " << e.what();
        throw InputError(os.str());
    }
}

[[noreturn]] void bad(const std::string& msg) { throw InputError("model document: " + msg); }

const json& require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) bad(std::string("missing field \"") + key + "\"");
    return *it;
}

double number(const json& v, const char* key) {
    if (!v.is_number()) bad(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

std::vector<double> number_list(const json& v, const char* key) {
    if (!v.is_array() || v.empty()) bad(std::string("field \"") + key + "\" must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, key));
    return out;
}

Expression formula(const json& v, const char* key) {
    if (!v.is_string()) bad(std::string("field \"") + key + "\" must be a formula string");
    return Expression::parse(v.get<std::string>());
}

std::optional<int> read_k(const json& v) {
    if (v.is_string() && v.get<std::string>() == "unbounded") return std::nullopt;
    if (v.is_number_integer() && v.get<long long>() >= 1) return static_cast<int>(v.get<long long>());
    bad("\"k\" must be a positive integer or \"unbounded\"");
}

json write_k(std::optional<int> k) {
    if (k) return *k;
    return "unbounded";
}

RateOptions read_options(const json& doc) {
    RateOptions opts;
    auto it = doc.find("options");
    if (it == doc.end()) return opts;
    if (!it->is_object()) bad("\"options\" must be an object");
    if (it->contains("tail_tolerance")) opts.tail_tolerance = number((*it)["tail_tolerance"], "tail_tolerance");
    if (it->contains("max_terms")) {
        const json& m = (*it)["max_terms"];
        if (!m.is_number_integer()) bad("\"max_terms\" must be an integer");
        opts.max_terms = m.get<int>();
    }
    return opts;
}

void write_options(json& doc, const RateOptions& opts) {
    RateOptions defaults;
    if (opts.tail_tolerance == defaults.tail_tolerance && opts.max_terms == defaults.max_terms) return;
    doc["options"] = {{"tail_tolerance", opts.tail_tolerance}, {"max_terms", opts.max_terms}};
}

void check_declared(const json& doc, State n0, std::optional<int> k, const std::string& name) {
    if (doc.contains("n0")) {
        const json& v = doc["n0"];
        if (!v.is_number_integer() || v.get<long long>() != n0)
            bad("preset " + name + " has n0 = " + std::to_string(n0));
    }
    if (doc.contains("k") && read_k(doc["k"]) != k)
        bad("preset " + name + " has k = " + (k ? std::to_string(*k) : std::string("unbounded")));
}

RateModel build_preset(const json& doc, json& canon) {
    const json& name_field = require(doc, "name");
    if (!name_field.is_string()) bad("\"name\" must be a string");
    Preset p = preset_from_string(name_field.get<std::string>());
    RateOptions opts = read_options(doc);
    canon["kind"] = "preset";
    canon["name"] = to_string(p);
    std::optional<RateModel> model;
    switch (p) {
        case Preset::TFPP: {
            double lambda = number(require(doc, "lambda"), "lambda");
            canon["lambda"] = lambda;
            model = presets::tfpp(lambda);
            break;
        }
        case Preset::FPBP: {
            if (doc.contains("rates")) {
                auto rates = number_list(doc["rates"], "rates");
                canon["rates"] = rates;
                model = presets::fpbp(rates);
            } else {
                Expression e = formula(require(doc, "rate"), "rate");
                canon["rate"] = e.source();
                model = presets::fpbp([e](State n) { return e(static_cast<double>(n), 1.0); });
            }
            break;
        }
        case Preset::GFCP: {
            auto lambdas = number_list(require(doc, "lambdas"), "lambdas");
            canon["lambdas"] = lambdas;
            model = presets::gfcp(lambdas);
            break;
        }
        case Preset::CFPP: {
            Expression e = formula(require(doc, "beta"), "beta");
            canon["beta"] = e.source();
            model = presets::cfpp([e](int i) { return e(0.0, static_cast<double>(i)); }, opts);
            break;
        }
        case Preset::STFPP: {
            double lambda = number(require(doc, "lambda"), "lambda");
            double beta = number(require(doc, "beta"), "beta");
            canon["lambda"] = lambda;
            canon["beta"] = beta;
            model = presets::stfpp(lambda, beta, opts);
            break;
        }
    }
    check_declared(doc, model->n0(), model->max_jump(), canon["name"].get<std::string>());
    canon["n0"] = model->n0();
    canon["k"] = write_k(model->max_jump());
    if (p == Preset::CFPP || p == Preset::STFPP) write_options(canon, opts);
    return *model;
}

State read_n0(const json& doc) {
    const json& v = require(doc, "n0");
    if (!v.is_number_integer() || v.get<long long>() < 0) bad("\"n0\" must be a non-negative integer");
    return v.get<State>();
}

RateModel build_table(const json& doc, json& canon) {
    State n0 = read_n0(doc);
    std::optional<int> k = read_k(require(doc, "k"));
    if (!k) bad("tabular models need a finite k");
    const json& rows = require(doc, "rates");
    if (!rows.is_array() || rows.empty()) bad("\"rates\" must be a non-empty array of rows");
    std::vector<std::vector<double>> table;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto row = number_list(rows[r], "rates");
        if (row.size() != static_cast<std::size_t>(*k))
            bad("row " + std::to_string(r) + " of \"rates\" has " + std::to_string(row.size()) +
                " entries, expected k = " + std::to_string(*k));
        for (std::size_t i = 0; i < row.size(); ++i)
            if (!(row[i] > 0.0))
                bad("rates[" + std::to_string(r) + "][" + std::to_string(i) + "] must be positive");
        table.push_back(std::move(row));
    }
    std::string extension = "error";
    if (doc.contains("extension")) {
        const json& e = doc["extension"];
        if (!e.is_string() || (e != "error" && e != "repeat-last-row"))
            bad("\"extension\" must be \"error\" or \"repeat-last-row\"");
        extension = e.get<std::string>();
    }
    canon["kind"] = "table";
    canon["n0"] = n0;
    canon["k"] = *k;
    canon["rates"] = table;
    canon["extension"] = extension;
    auto shared = std::make_shared<const std::vector<std::vector<double>>>(std::move(table));
    bool repeat = extension == "repeat-last-row";
    return RateModel(n0, k, [shared, n0, repeat](State n, int i) -> double {
        std::size_t row = static_cast<std::size_t>(n - n0);
        if (row >= shared->size()) {
            if (!repeat) throw std::domain_error("rate table has no row for state " + std::to_string(n));
            row = shared->size() - 1;
        }
        return (*shared)[row][static_cast<std::size_t>(i - 1)];
    });
}

RateModel build_formula(const json& doc, json& canon) {
    State n0 = read_n0(doc);
    std::optional<int> k = read_k(require(doc, "k"));
    RateOptions opts = read_options(doc);
    canon["kind"] = "formula";
    canon["n0"] = n0;
    canon["k"] = write_k(k);
    std::optional<RateModel> model;
    if (doc.contains("rates")) {
        if (!k) bad("per-jump \"rates\" formulas need a finite k; use \"rate\" for unbounded models");
        const json& list = doc["rates"];
        if (!list.is_array() || list.size() != static_cast<std::size_t>(*k))
            bad("\"rates\" must hold exactly k formulas");
        std::vector<Expression> exprs;
        std::vector<std::string> sources;
        for (const auto& f : list) {
            exprs.push_back(formula(f, "rates"));
            sources.push_back(exprs.back().source());
        }
        canon["rates"] = sources;
        model = RateModel(n0, k, [exprs](State n, int i) {
            return exprs[static_cast<std::size_t>(i - 1)](static_cast<double>(n), static_cast<double>(i));
        }, opts);
    } else {
        Expression e = formula(require(doc, "rate"), "rate");
        canon["rate"] = e.source();
        model = RateModel(n0, k, [e](State n, int i) {
            return e(static_cast<double>(n), static_cast<double>(i));
        }, opts);
    }
    if (doc.contains("total")) {
        if (k) bad("\"total\" is only meaningful for unbounded k");
        Expression total = formula(doc["total"], "total");
        canon["total"] = total.source();
        model = model->with_exact_total([total](State n) { return total(static_cast<double>(n)); });
    }
    write_options(canon, opts);
    return *model;
}

}  // namespace

RateModel parse_model(std::string_view json_text) {
    json doc = parse_text(json_text);
    if (!doc.is_object()) bad("top level must be an object");
    const json& kind = require(doc, "kind");
    json canon = json::object();
    std::optional<RateModel> model;
    if (kind == "preset") {
        model = build_preset(doc, canon);
    } else if (kind == "table") {
        model = build_table(doc, canon);
    } else if (kind == "formula") {
        model = build_formula(doc, canon);
    } else {
        bad("\"kind\" must be \"preset\", \"table\" or \"formula\"");
    }
    return model->with_document(canon.dump());
}

std::string serialize_model(const RateModel& model) {
    if (model.document().empty()) throw std::logic_error("model was not built from a document");
    return model.document();
}

OrderSpec parse_order(std::string_view json_text) {
    json doc = parse_text(json_text);
    if (!doc.is_object()) throw InputError("order document: top level must be an object");
    if (doc.contains("alpha")) {
        if (!doc["alpha"].is_number()) throw InputError("order document: \"alpha\" must be a number");
        return OrderSpec::constant(doc["alpha"].get<double>());
    }
    auto it = doc.find("per_state");
    if (it == doc.end() || !it->is_object())
        throw InputError("order document: expected \"alpha\" or a \"per_state\" object");
    std::map<State, double> orders;
    for (auto e = it->begin(); e != it->end(); ++e) {
        State n = 0;
        try {
            std::size_t used = 0;
            n = std::stoll(e.key(), &used);
            if (used != e.key().size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InputError("order document: state key \"" + e.key() + "\" is not an integer");
        }
        if (!e.value().is_number()) throw InputError("order document: order for state " + e.key() + " must be a number");
        orders[n] = e.value().get<double>();
    }
    std::optional<double> fallback;
    if (doc.contains("fallback")) {
        if (!doc["fallback"].is_number()) throw InputError("order document: \"fallback\" must be a number");
        fallback = doc["fallback"].get<double>();
    }
    return OrderSpec::per_state(std::move(orders), fallback);
}

std::string serialize_order(const OrderSpec& order) {
    json doc = json::object();
    if (order.is_constant()) {
        doc["alpha"] = order.constant_alpha();
        return doc.dump();
    }
    json states = json::object();
    for (const auto& [n, a] : order.orders()) states[std::to_string(n)] = a;
    doc["per_state"] = states;
    if (order.fallback()) doc["fallback"] = *order.fallback();
    return doc.dump();
}

}  // namespace gfbp
