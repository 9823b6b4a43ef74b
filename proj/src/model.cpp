#include "vmk/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vmk {

namespace {

void validate_item(const Item& item) {
    auto check_unit = [&](double v, const char* field) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw ValidationError(item.id, field,
                                  "item '" + item.id + "': " + field + " = " +
                                      std::to_string(v) + " is outside [0,1]");
        }
    };
    if (item.id.empty()) {
        throw ValidationError(item.id, "id", "item with empty id");
    }
    check_unit(item.w1, "w1");
    check_unit(item.w2, "w2");
    if (!std::isfinite(item.profit) || item.profit < 0.0) {
        throw ValidationError(item.id, "p",
                              "item '" + item.id + "': profit " + std::to_string(item.profit) +
                                  " is negative or not finite");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
    std::string s(field);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
    }
    return v;
}

}  // namespace

Instance::Instance(std::vector<Item> items, int bins) : items_(std::move(items)), bins_(bins) {
    if (bins_ < 1) {
        throw ValidationError("", "m", "bin count m = " + std::to_string(bins_) + " must be >= 1");
    }
    for (const auto& item : items_) validate_item(item);
    std::sort(items_.begin(), items_.end(),
              [](const Item& a, const Item& b) { return a.id < b.id; });
    index_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (!index_.emplace(items_[i].id, i).second) {
            throw ValidationError(items_[i].id, "id", "duplicate item id '" + items_[i].id + "'");
        }
    }
}

std::optional<std::size_t> Instance::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Instance::require_index(std::string_view id) const {
    auto idx = index_of(id);
    if (!idx) throw UnknownItem(std::string(id));
    return *idx;
}

double Instance::total_profit() const {
    double s = 0.0;
    for (const auto& item : items_) s += item.profit;
    return s;
}

Instance Instance::restricted(std::span<const std::size_t> indices, int bins) const {
    std::vector<Item> sub;
    sub.reserve(indices.size());
    for (auto i : indices) sub.push_back(items_.at(i));
    return Instance(std::move(sub), bins);
}

Configuration::Configuration(std::vector<std::size_t> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool Configuration::contains(std::size_t index) const {
    return std::binary_search(items_.begin(), items_.end(), index);
}

Load load_of(const Instance& inst, const Configuration& c) {
    Load load;
    for (auto i : c) {
        if (i >= inst.size()) throw UnknownItem("#" + std::to_string(i));
        load.w1 += inst.item(i).w1;
        load.w2 += inst.item(i).w2;
    }
    return load;
}

double profit_of(const Instance& inst, const Configuration& c) {
    double p = 0.0;
    for (auto i : c) p += inst.item(i).profit;
    return p;
}

bool is_feasible(const Instance& inst, const Configuration& c, double tol) {
    auto load = load_of(inst, c);
    return load.w1 <= 1.0 + tol && load.w2 <= 1.0 + tol;
}

ProfitReport check_solution(const Instance& inst, const Solution& sol) {
    ProfitReport report;
    std::vector<char> counted(inst.size(), 0);
    for (std::size_t b = 0; b < sol.bins.size(); ++b) {
        auto load = load_of(inst, sol.bins[b]);
        if (load.w1 > 1.0 + kFeasTol) {
            report.violations.push_back({Violation::Kind::Overweight, b, 1, load.w1});
        }
        if (load.w2 > 1.0 + kFeasTol) {
            report.violations.push_back({Violation::Kind::Overweight, b, 2, load.w2});
        }
        for (auto i : sol.bins[b]) {
            if (!counted[i]) {
                counted[i] = 1;
                report.profit += inst.item(i).profit;
            }
        }
    }
    if (sol.bins.size() > static_cast<std::size_t>(inst.bins())) {
        report.violations.push_back({Violation::Kind::BinCount, sol.bins.size(), 0,
                                     static_cast<double>(sol.bins.size())});
    }
    return report;
}

Solution dedup_solution(const Solution& sol) {
    Solution out;
    out.bins.reserve(sol.bins.size());
    std::vector<std::size_t> seen;
    for (const auto& bin : sol.bins) {
        std::vector<std::size_t> kept;
        for (auto i : bin) {
            if (i >= seen.size()) seen.resize(i + 1, 0);
            if (!seen[i]) {
                seen[i] = 1;
                kept.push_back(i);
            }
        }
        out.bins.emplace_back(std::move(kept));
    }
    return out;
}

double solution_profit(const Instance& inst, const Solution& sol) {
    return check_solution(inst, sol).profit;
}

std::size_t bins_used(const Solution& sol) {
    return static_cast<std::size_t>(
        std::count_if(sol.bins.begin(), sol.bins.end(), [](const auto& b) { return !b.empty(); }));
}

InstanceFormat format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv" ? InstanceFormat::Csv : InstanceFormat::Json;
}

Instance parse_instance_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("m") || !doc.contains("items")) {
        throw ParseError("instance must be an object with keys 'm' and 'items'");
    }
    if (!doc["m"].is_number_integer()) throw ParseError("'m' must be an integer");
    if (!doc["items"].is_array()) throw ParseError("'items' must be an array");

    std::vector<Item> items;
    for (const auto& entry : doc["items"]) {
        if (!entry.is_object()) throw ParseError("item entries must be objects");
        Item item;
        try {
            item.id = entry.at("id").get<std::string>();
            item.w1 = entry.at("w1").get<double>();
            item.w2 = entry.at("w2").get<double>();
            item.profit = entry.at("p").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad item entry: ") + e.what());
        }
        items.push_back(std::move(item));
    }
    return Instance(std::move(items), doc["m"].get<int>());
}

Instance parse_instance_csv(std::string_view text, int bins) {
    std::vector<Item> items;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (!header_seen) {
            if (fields.size() != 4 || fields[0] != "id" || fields[1] != "w1" || fields[2] != "w2" ||
                fields[3] != "p") {
                throw ParseError("CSV header must be 'id,w1,w2,p'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 4) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields");
        }
        items.push_back({std::string(fields[0]), parse_number(fields[1], line_no),
                         parse_number(fields[2], line_no), parse_number(fields[3], line_no)});
    }
    if (!header_seen) throw ParseError("CSV is missing its header");
    return Instance(std::move(items), bins);
}

Instance load_instance(const std::filesystem::path& path, InstanceFormat format,
                       std::optional<int> csv_bins) {
    auto text = read_file(path);
    if (format == InstanceFormat::Csv) {
        if (!csv_bins) throw ParseError("CSV instances need an explicit bin count");
        return parse_instance_csv(text, *csv_bins);
    }
    return parse_instance_json(text);
}

std::string canonical_json(const Instance& inst) {
    std::string out = "{\"m\": " + std::to_string(inst.bins()) + ", \"items\": [";
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto& item = inst.item(i);
        out += i == 0 ? "\n  " : ",\n  ";
        out += "{\"id\": " + nlohmann::json(item.id).dump() + ", \"w1\": " + format_double(item.w1) +
               ", \"w2\": " + format_double(item.w2) + ", \"p\": " + format_double(item.profit) + "}";
    }
    out += inst.empty() ? "]}\n" : "\n]}\n";
    return out;
}

std::uint64_t canonical_hash(const Instance& inst) {
    // FNV-1a, 64 bit.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_json(inst)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t hash) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
    write_file(path, canonical_json(inst));
}

std::string solution_json(const Instance& inst, const Solution& sol) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& bin : sol.bins) {
        nlohmann::json ids = nlohmann::json::array();
        for (auto i : bin) ids.push_back(inst.item(i).id);
        bins.push_back(std::move(ids));
    }
    return nlohmann::json{{"bins", std::move(bins)}}.dump();
}

Solution parse_solution_json(const Instance& inst, std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("bins") || !doc["bins"].is_array()) {
        throw ParseError("solution must be an object with a 'bins' array");
    }
    Solution sol;
    for (const auto& bin : doc["bins"]) {
        if (!bin.is_array()) throw ParseError("each bin must be an array of ids");
        std::vector<std::size_t> items;
        for (const auto& id : bin) {
            if (!id.is_string()) throw ParseError("item ids must be strings");
            items.push_back(inst.require_index(id.get<std::string>()));
        }
        sol.bins.emplace_back(std::move(items));
    }
    return sol;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << contents;
}

}  // namespace vmk
