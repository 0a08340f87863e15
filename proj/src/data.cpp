#include "data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rng.hpp"

namespace misboost {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line,
                             const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << msg;
    throw MilError(ErrorKind::Parse, os.str());
}

double parse_double(const std::string& tok, const std::string& origin,
                    std::size_t line) {
    double v;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        parse_fail(origin, line, "bad number '" + tok + "'");
    if (!std::isfinite(v))
        parse_fail(origin, line, "non-finite value '" + tok + "'");
    return v;
}

int parse_label(const std::string& tok, const std::string& origin,
                std::size_t line) {
    if (tok == "?") return kUnlabeled;
    if (tok == "1" || tok == "+1") return kPositive;
    if (tok == "-1") return kNegative;
    parse_fail(origin, line, "unknown label '" + tok + "' (expected -1, 1 or ?)");
}

std::size_t parse_dim_header(const std::string& line_text,
                             const std::string& origin, std::size_t line) {
    const std::string prefix = "#dim=";
    std::string t = trim(line_text);
    if (t.rfind(prefix, 0) != 0)
        parse_fail(origin, line, "expected '#dim=<d>' header");
    std::size_t d = 0;
    std::string num = t.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), d);
    if (ec != std::errc() || ptr != num.data() + num.size() || d == 0)
        parse_fail(origin, line, "bad dimension '" + num + "'");
    return d;
}

void append_instance(Dataset& ds, const std::string& bag_id, int label,
                     std::vector<double> features, std::set<std::string>& seen,
                     const std::string& origin, std::size_t line) {
    if (!ds.bags.empty() && ds.bags.back().id == bag_id) {
        Bag& b = ds.bags.back();
        if (b.label != label)
            parse_fail(origin, line,
                       "bag '" + bag_id + "' has conflicting labels");
        b.instances.push_back(std::move(features));
        return;
    }
    if (!seen.insert(bag_id).second)
        parse_fail(origin, line,
                   "rows of bag '" + bag_id + "' are not contiguous");
    Bag b;
    b.id = bag_id;
    b.label = label;
    b.instances.push_back(std::move(features));
    ds.bags.push_back(std::move(b));
}

Dataset parse_mil_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line_text;
    std::size_t line = 0;

    if (!std::getline(in, line_text))
        parse_fail(origin, 1, "empty file");
    ++line;
    Dataset ds;
    ds.dim = parse_dim_header(line_text, origin, line);

    std::set<std::string> seen;
    while (std::getline(in, line_text)) {
        ++line;
        std::string t = trim(line_text);
        if (t.empty() || t[0] == '#') continue;

        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = t.find(',', pos);
            if (comma == std::string::npos) {
                fields.push_back(t.substr(pos));
                break;
            }
            fields.push_back(t.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (fields.size() != ds.dim + 2)
            parse_fail(origin, line,
                       "expected " + std::to_string(ds.dim + 2) + " fields, got " +
                           std::to_string(fields.size()));
        std::string bag_id = trim(fields[0]);
        if (bag_id.empty()) parse_fail(origin, line, "empty bag id");
        int label = parse_label(trim(fields[1]), origin, line);
        std::vector<double> features(ds.dim);
        for (std::size_t j = 0; j < ds.dim; ++j)
            features[j] = parse_double(trim(fields[j + 2]), origin, line);
        append_instance(ds, bag_id, label, std::move(features), seen, origin,
                        line);
    }
    if (ds.bags.empty()) parse_fail(origin, line, "no instance rows");
    return ds;
}

Dataset parse_mil_sparse(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line_text;
    std::size_t line = 0;

    if (!std::getline(in, line_text))
        parse_fail(origin, 1, "empty file");
    ++line;
    Dataset ds;
    ds.dim = parse_dim_header(line_text, origin, line);

    std::set<std::string> seen;
    while (std::getline(in, line_text)) {
        ++line;
        std::string t = trim(line_text);
        if (t.empty() || t[0] == '#') continue;

        std::istringstream row(t);
        std::string bag_id, label_tok, pair;
        if (!(row >> bag_id >> label_tok))
            parse_fail(origin, line, "expected '<bag_id> <label> ...'");
        int label = parse_label(label_tok, origin, line);
        std::vector<double> features(ds.dim, 0.0);
        while (row >> pair) {
            std::size_t colon = pair.find(':');
            if (colon == std::string::npos)
                parse_fail(origin, line, "bad '<idx>:<val>' entry '" + pair + "'");
            std::size_t idx = 0;
            std::string idx_s = pair.substr(0, colon);
            auto [p, ec] =
                std::from_chars(idx_s.data(), idx_s.data() + idx_s.size(), idx);
            if (ec != std::errc() || p != idx_s.data() + idx_s.size() || idx == 0)
                parse_fail(origin, line, "bad index '" + idx_s + "' (1-based)");
            if (idx > ds.dim)
                parse_fail(origin, line,
                           "index " + std::to_string(idx) + " exceeds dim " +
                               std::to_string(ds.dim));
            features[idx - 1] = parse_double(pair.substr(colon + 1), origin, line);
        }
        append_instance(ds, bag_id, label, std::move(features), seen, origin,
                        line);
    }
    if (ds.bags.empty()) parse_fail(origin, line, "no instance rows");
    return ds;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

DatasetFormat parse_format(const std::string& name) {
    if (name == "mil-csv") return DatasetFormat::MilCsv;
    if (name == "mil-sparse") return DatasetFormat::MilSparse;
    throw MilError(ErrorKind::Argument, "unknown dataset format '" + name + "'");
}

Dataset parse_dataset(const std::string& text, DatasetFormat format,
                      const std::string& origin) {
    return format == DatasetFormat::MilCsv ? parse_mil_csv(text, origin)
                                           : parse_mil_sparse(text, origin);
}

Dataset load_dataset(const std::string& path, DatasetFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MilError(ErrorKind::Io, "cannot open dataset file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str(), format, path);
}

std::string format_dataset(const Dataset& ds) {
    std::ostringstream out;
    out << "#dim=" << ds.dim << "\n";
    for (const Bag& b : ds.bags) {
        std::string label = b.label == kUnlabeled ? "?" : std::to_string(b.label);
        for (const auto& inst : b.instances) {
            out << b.id << "," << label;
            for (double v : inst) out << "," << format_double(v);
            out << "\n";
        }
    }
    return out.str();
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw MilError(ErrorKind::Io, "cannot write dataset file '" + path + "'");
    out << format_dataset(ds);
    if (!out) throw MilError(ErrorKind::Io, "write failed for '" + path + "'");
}

NormalizationStats fit_normalization(const Dataset& ds) {
    if (ds.bags.empty())
        throw MilError(ErrorKind::Data, "cannot fit normalization: empty dataset");
    const std::size_t d = ds.dim;
    std::vector<double> mean(d, 0.0), sq(d, 0.0);
    std::size_t n = 0;
    for (const Bag& b : ds.bags) {
        for (const auto& inst : b.instances) {
            ++n;
            for (std::size_t j = 0; j < d; ++j) mean[j] += inst[j];
        }
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
    for (const Bag& b : ds.bags) {
        for (const auto& inst : b.instances) {
            for (std::size_t j = 0; j < d; ++j) {
                double c = inst[j] - mean[j];
                sq[j] += c * c;
            }
        }
    }
    NormalizationStats stats;
    stats.mean = std::move(mean);
    stats.stddev.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        double sd = std::sqrt(sq[j] / static_cast<double>(n));
        stats.stddev[j] = sd < 1e-12 ? 1.0 : sd;
    }
    return stats;
}

void apply_normalization_inplace(Bag& bag, const NormalizationStats& stats) {
    for (auto& inst : bag.instances) {
        if (inst.size() != stats.dim())
            throw MilError(ErrorKind::Dimension,
                           "normalization stats dimension " +
                               std::to_string(stats.dim()) +
                               " does not match instance dimension " +
                               std::to_string(inst.size()));
        for (std::size_t j = 0; j < inst.size(); ++j)
            inst[j] = (inst[j] - stats.mean[j]) / stats.stddev[j];
    }
}

Dataset apply_normalization(const Dataset& ds, const NormalizationStats& stats) {
    if (ds.dim != stats.dim())
        throw MilError(ErrorKind::Dimension,
                       "normalization stats dimension " + std::to_string(stats.dim()) +
                           " does not match dataset dimension " +
                           std::to_string(ds.dim));
    Dataset out = ds;
    for (Bag& b : out.bags) apply_normalization_inplace(b, stats);
    return out;
}

namespace {

std::map<int, std::vector<std::size_t>> indices_by_class(const Dataset& ds) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < ds.bags.size(); ++i)
        by_class[ds.bags[i].label].push_back(i);
    return by_class;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.dim = ds.dim;
    out.class_names = ds.class_names;
    out.bags.reserve(idx.size());
    for (std::size_t i : idx) out.bags.push_back(ds.bags[i]);
    return out;
}

}  // namespace

std::vector<Split> stratified_split(const Dataset& ds, int folds,
                                    std::uint64_t seed) {
    if (folds < 2)
        throw MilError(ErrorKind::Argument, "fold count must be at least 2");
    auto by_class = indices_by_class(ds);
    for (const auto& [label, idx] : by_class) {
        if (idx.size() < static_cast<std::size_t>(folds))
            throw MilError(ErrorKind::Data,
                           "class " + std::to_string(label) + " has only " +
                               std::to_string(idx.size()) + " bags, need at least " +
                               std::to_string(folds) + " for " +
                               std::to_string(folds) + "-fold split");
    }

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> fold_idx(folds);
    for (auto& [label, idx] : by_class) {
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fold_idx[i % folds].push_back(idx[i]);
    }
    // Keep dataset order inside each fold.
    for (auto& f : fold_idx) std::sort(f.begin(), f.end());

    std::vector<Split> splits;
    splits.reserve(folds);
    for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_idx;
        for (int g = 0; g < folds; ++g) {
            if (g == f) continue;
            train_idx.insert(train_idx.end(), fold_idx[g].begin(),
                             fold_idx[g].end());
        }
        std::sort(train_idx.begin(), train_idx.end());
        splits.push_back({subset(ds, train_idx), subset(ds, fold_idx[f])});
    }
    return splits;
}

Split stratified_holdout(const Dataset& ds, double held_fraction,
                         std::uint64_t seed) {
    if (held_fraction <= 0.0 || held_fraction >= 1.0)
        throw MilError(ErrorKind::Argument, "held fraction must be in (0, 1)");
    auto by_class = indices_by_class(ds);
    Rng rng(seed);
    std::vector<std::size_t> train_idx, held_idx;
    for (auto& [label, idx] : by_class) {
        rng.shuffle(idx);
        std::size_t held = static_cast<std::size_t>(
            std::floor(held_fraction * static_cast<double>(idx.size())));
        if (held == 0 && idx.size() > 1) held = 1;
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < held ? held_idx : train_idx).push_back(idx[i]);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(held_idx.begin(), held_idx.end());
    if (train_idx.empty() || held_idx.empty())
        throw MilError(ErrorKind::Data, "holdout split produced an empty side");
    return {subset(ds, train_idx), subset(ds, held_idx)};
}

std::uint64_t dataset_fingerprint(const Dataset& ds) {
    std::uint64_t h = fnv1a(&ds.dim, sizeof(ds.dim));
    for (const Bag& b : ds.bags) {
        h = fnv1a(b.id.data(), b.id.size(), h);
        h = fnv1a(&b.label, sizeof(b.label), h);
        for (const auto& inst : b.instances)
            h = fnv1a(inst.data(), inst.size() * sizeof(double), h);
    }
    return h;
}

}  // namespace misboost
