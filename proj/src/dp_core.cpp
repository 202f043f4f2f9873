#include "tdcount/dp_core.hpp"

#include <nlohmann/json.hpp>

namespace tdcount::dp {

std::string to_json_line(const TraceRecord& record) {
    nlohmann::json j;
    j["node"]          = record.node;
    j["type"]          = std::string(to_string(record.type));
    j["bag"]           = record.bag;
    j["rows"]          = record.rows;
    j["max_witnesses"] = record.max_witnesses;
    return j.dump();
}

CheckPlan plan_checks(const NiceTreeDecomposition& ntd, std::span<const std::vector<Vertex>> scopes) {
    CheckPlan plan;
    plan.at.resize(ntd.size());
    for (std::size_t s = 0; s < scopes.size(); ++s) {
        const auto& scope = scopes[s];
        if (scope.empty()) {
            throw InternalError("cannot place a check without vertices");
        }
        std::size_t node = ntd.size();
        for (auto v : scope) {
            node = std::min(node, ntd.forget_node(v));
        }
        const auto& child = ntd.node(static_cast<std::size_t>(ntd.node(node).children[0])).bag;
        for (auto v : scope) {
            if (!std::binary_search(child.begin(), child.end(), v)) {
                throw InternalError("check scope " + std::to_string(s) + " does not fit into the bag below node " +
                                    std::to_string(node));
            }
        }
        plan.at[node].push_back(s);
    }
    return plan;
}

Assignment mask_of(std::span<const Vertex> bag, std::span<const Vertex> vertices) {
    Assignment m = 0;
    for (auto v : vertices) {
        m |= Assignment{1} << bag_position(bag, v);
    }
    return m;
}

} // namespace tdcount::dp
