#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vmk {

// Absolute per-dimension slack allowed when checking bin loads.
inline constexpr double kFeasTol = 1e-9;
// Tolerance used for LP feasibility, reduced costs and LP-vs-integral comparisons.
inline constexpr double kLpTol = 1e-7;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string item, std::string field, const std::string& what)
        : std::runtime_error(what), item_(std::move(item)), field_(std::move(field)) {}

    const std::string& item() const { return item_; }
    const std::string& field() const { return field_; }

private:
    std::string item_;
    std::string field_;
};

class UnknownItem : public std::runtime_error {
public:
    explicit UnknownItem(std::string id)
        : std::runtime_error("unknown item '" + id + "'"), id_(std::move(id)) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class InfeasibleInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Base for searches that hit their node cap. Derived types carry the best
// solution found and a valid upper bound.
class SearchBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Item {
    std::string id;
    double w1 = 0.0;
    double w2 = 0.0;
    double profit = 0.0;

    double max_weight() const { return w1 > w2 ? w1 : w2; }
    double weight_sum() const { return w1 + w2; }

    bool operator==(const Item&) const = default;
};

// A 2VMK instance. Items are kept sorted by id, so an item's index is also its
// rank in id order; every index-based container in the library relies on that.
class Instance {
public:
    Instance() = default;
    Instance(std::vector<Item> items, int bins);

    const std::vector<Item>& items() const { return items_; }
    const Item& item(std::size_t index) const { return items_[index]; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    int bins() const { return bins_; }

    std::optional<std::size_t> index_of(std::string_view id) const;
    // Throws UnknownItem.
    std::size_t require_index(std::string_view id) const;

    double total_profit() const;

    // Instance over a subset of this instance's items (ids preserved) with a new bin count.
    Instance restricted(std::span<const std::size_t> indices, int bins) const;

    bool operator==(const Instance& other) const {
        return bins_ == other.bins_ && items_ == other.items_;
    }

private:
    std::vector<Item> items_;
    int bins_ = 1;
    std::unordered_map<std::string, std::size_t> index_;
};

// A set of item indices of one instance, kept sorted and unique.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::vector<std::size_t> items);
    Configuration(std::initializer_list<std::size_t> items)
        : Configuration(std::vector<std::size_t>(items)) {}

    const std::vector<std::size_t>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    bool contains(std::size_t index) const;

    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    auto operator<=>(const Configuration&) const = default;

private:
    std::vector<std::size_t> items_;
};

struct Load {
    double w1 = 0.0;
    double w2 = 0.0;
};

Load load_of(const Instance& inst, const Configuration& c);
double profit_of(const Instance& inst, const Configuration& c);
bool is_feasible(const Instance& inst, const Configuration& c, double tol = kFeasTol);

struct Solution {
    std::vector<Configuration> bins;

    bool operator==(const Solution&) const = default;
};

struct Violation {
    enum class Kind { Overweight, BinCount };
    Kind kind = Kind::Overweight;
    std::size_t bin = 0;
    int dimension = 0;  // 1 or 2 for Overweight
    double load = 0.0;
};

struct ProfitReport {
    double profit = 0.0;
    std::vector<Violation> violations;

    bool feasible() const { return violations.empty(); }
};

// Profit counts every distinct packed item once. Throws UnknownItem for indices
// outside the instance.
ProfitReport check_solution(const Instance& inst, const Solution& sol);

// Keeps each item only in the lowest-index bin holding it.
Solution dedup_solution(const Solution& sol);

double solution_profit(const Instance& inst, const Solution& sol);
std::size_t bins_used(const Solution& sol);

// I/O

enum class InstanceFormat { Json, Csv };

InstanceFormat format_from_path(const std::filesystem::path& path);

Instance parse_instance_json(std::string_view text);
// CSV has header `id,w1,w2,p`; the bin count travels separately.
Instance parse_instance_csv(std::string_view text, int bins);

Instance load_instance(const std::filesystem::path& path, InstanceFormat format,
                       std::optional<int> csv_bins = std::nullopt);

// Items sorted by id, fixed field order, 17 significant digits.
std::string canonical_json(const Instance& inst);
std::uint64_t canonical_hash(const Instance& inst);
std::string hash_hex(std::uint64_t hash);
void save_instance(const Instance& inst, const std::filesystem::path& path);

std::string solution_json(const Instance& inst, const Solution& sol);
Solution parse_solution_json(const Instance& inst, std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace vmk
