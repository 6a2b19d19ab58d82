#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "collabtop/arms.hpp"

namespace collabtop {

namespace detail {

struct RatingRow {
    long long user;
    long long item;
    double rating;
};

inline std::vector<RatingRow> parse_ratings(std::istream& in) {
    std::vector<RatingRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) continue;  // header
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        RatingRow row{};
        try {
            if (!std::getline(ss, field, ',')) throw std::invalid_argument("missing user_id");
            row.user = std::stoll(field);
            if (!std::getline(ss, field, ',')) throw std::invalid_argument("missing item_id");
            row.item = std::stoll(field);
            if (!std::getline(ss, field, ',')) throw std::invalid_argument("missing rating");
            row.rating = std::stod(field);
        } catch (const std::exception&) {
            throw std::invalid_argument("ratings: malformed row at line " + std::to_string(line_no));
        }
        if (row.user < 0 || row.item < 0 || !(row.rating >= 0.0 && row.rating <= 5.0))
            throw std::invalid_argument("ratings: malformed row at line " + std::to_string(line_no));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace detail

struct IidIngest {
    std::vector<long long> items;  // item id per arm, arms ordered by item id
    Instance instance;
};

struct NonIidIngest {
    std::vector<long long> items;
    NonIIDInstance instance;
};

// Items rated at least min_count times become arms; the arm mean is the
// average rating divided by 5.
inline IidIngest ingest_ratings_iid(std::istream& in, int min_count) {
    if (min_count < 1) throw std::invalid_argument("ingest: need min_count >= 1");
    std::map<long long, std::pair<long long, double>> per_item;  // item -> (count, sum)
    for (const auto& row : detail::parse_ratings(in)) {
        auto& acc = per_item[row.item];
        acc.first += 1;
        acc.second += row.rating;
    }
    IidIngest out;
    for (const auto& [item, acc] : per_item) {
        if (acc.first < min_count) continue;
        out.items.push_back(item);
        out.instance.means.push_back(acc.second / static_cast<double>(acc.first) / 5.0);
    }
    if (out.items.empty()) throw std::invalid_argument("ingest: no items survive the rating filter");
    return out;
}

// Users are grouped by user_id mod K; items need min_count ratings in every
// group. Local mean of arm i at agent k = the group-k average rating / 5.
inline NonIidIngest ingest_ratings_noniid(std::istream& in, int K, int min_count) {
    if (K < 1) throw std::invalid_argument("ingest: need K >= 1");
    if (min_count < 1) throw std::invalid_argument("ingest: need min_count >= 1");
    std::map<long long, std::vector<std::pair<long long, double>>> per_item;
    for (const auto& row : detail::parse_ratings(in)) {
        auto& groups = per_item[row.item];
        if (groups.empty()) groups.assign(static_cast<std::size_t>(K), {0, 0.0});
        auto& acc = groups[static_cast<std::size_t>(row.user % K)];
        acc.first += 1;
        acc.second += row.rating;
    }
    NonIidIngest out;
    out.instance.local_means.assign(static_cast<std::size_t>(K), {});
    for (const auto& [item, groups] : per_item) {
        bool ok = true;
        for (const auto& acc : groups)
            if (acc.first < min_count) ok = false;
        if (!ok) continue;
        out.items.push_back(item);
        for (int k = 0; k < K; ++k) {
            const auto& acc = groups[static_cast<std::size_t>(k)];
            out.instance.local_means[static_cast<std::size_t>(k)].push_back(
                acc.second / static_cast<double>(acc.first) / 5.0);
        }
    }
    if (out.items.empty()) throw std::invalid_argument("ingest: no items survive the rating filter");
    return out;
}

inline IidIngest ingest_ratings_iid(const std::string& path, int min_count) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest: cannot open " + path);
    return ingest_ratings_iid(in, min_count);
}

inline NonIidIngest ingest_ratings_noniid(const std::string& path, int K, int min_count) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest: cannot open " + path);
    return ingest_ratings_noniid(in, K, min_count);
}

}  // namespace collabtop
