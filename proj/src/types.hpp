#ifndef MISBOOST_TYPES_HPP
#define MISBOOST_TYPES_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace misboost {

enum class ErrorKind {
    Argument,
    Io,
    Parse,
    Dimension,
    Data,
};

class MilError : public std::runtime_error {
public:
    MilError(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Label values for binary problems. Multiclass datasets (built in memory)
// use arbitrary non-negative class ids instead.
constexpr int kPositive = +1;
constexpr int kNegative = -1;
constexpr int kUnlabeled = 0;

// A bag is a non-empty ordered list of instances sharing one dimension.
struct Bag {
    std::string id;
    int label = kUnlabeled;
    std::vector<std::vector<double>> instances;

    std::size_t size() const { return instances.size(); }
};

struct Dataset {
    std::vector<Bag> bags;
    std::size_t dim = 0;
    std::map<int, std::string> class_names;  // optional, multiclass sources

    std::size_t num_bags() const { return bags.size(); }
    std::size_t num_instances() const {
        std::size_t n = 0;
        for (const auto& b : bags) n += b.size();
        return n;
    }
};

struct NormalizationStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // zero-variance dims stored as 1.0

    std::size_t dim() const { return mean.size(); }
};

// FNV-1a over raw bytes; used for dataset/config fingerprints in reports.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t dataset_fingerprint(const Dataset& ds);

}  // namespace misboost

#endif
