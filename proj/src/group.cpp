#include "cooperad/group.hpp"

#include <algorithm>
#include <map>

namespace cooperad {

GroupAction::GroupAction(ChainComplex carrier, std::vector<int> generatorPositions,
                         std::vector<ChainMap> generators, int degree)
    : carrier_(std::move(carrier)),
      genPos_(std::move(generatorPositions)),
      gens_(std::move(generators)),
      degree_(degree) {
    if (genPos_.size() != gens_.size())
        throw std::invalid_argument("GroupAction: generator count mismatch");
}

GroupAction GroupAction::trivial(const ChainComplex& carrier, int degree) {
    return GroupAction(carrier, {}, {}, degree);
}

bool GroupAction::checkRelations(std::string* why) const {
    ChainMap id = ChainMap::identity(carrier_);
    std::map<int, const ChainMap*> byPos;
    for (size_t i = 0; i < gens_.size(); ++i) byPos[genPos_[i]] = &gens_[i];
    for (size_t i = 0; i < gens_.size(); ++i) {
        std::string v;
        if (!gens_[i].valid(&v)) {
            if (why) *why = "generator at " + std::to_string(genPos_[i]) + " not a chain map: " + v;
            return false;
        }
        if (!(gens_[i].compose(gens_[i]) == id)) {
            if (why) *why = "generator at " + std::to_string(genPos_[i]) + " not an involution";
            return false;
        }
    }
    for (auto& [p, g] : byPos) {
        for (auto& [q, h] : byPos) {
            if (p >= q) continue;
            if (q - p >= 2) {
                if (!(g->compose(*h) == h->compose(*g))) {
                    if (why)
                        *why = "commutation fails at positions " + std::to_string(p) + "," +
                               std::to_string(q);
                    return false;
                }
            } else {
                ChainMap lhs = g->compose(h->compose(*g));
                ChainMap rhs = h->compose(g->compose(*h));
                if (!(lhs == rhs)) {
                    if (why)
                        *why = "braid fails at positions " + std::to_string(p) + "," +
                               std::to_string(q);
                    return false;
                }
            }
        }
    }
    return true;
}

ChainMap GroupAction::permutationMatrix(const std::vector<int>& perm) const {
    std::map<int, const ChainMap*> byPos;
    for (size_t i = 0; i < gens_.size(); ++i) byPos[genPos_[i]] = &gens_[i];
    // Bubble sort the one-line form. Each executed entry swap at position p
    // is a right multiplication by t_p, so perm * t_{p1} * ... * t_{pk} = id,
    // i.e. perm = t_{pk} * ... * t_{p1}; accumulate generator matrices on the
    // left accordingly.
    std::vector<int> w = perm;
    ChainMap acc = ChainMap::identity(carrier_);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int p = 0; p + 1 < static_cast<int>(w.size()); ++p) {
            if (w[p] > w[p + 1]) {
                auto it = byPos.find(p);
                if (it == byPos.end())
                    throw GroupRelationViolation(
                        "permutation crosses distinct colors at position " + std::to_string(p));
                std::swap(w[p], w[p + 1]);
                acc = it->second->compose(acc);
                changed = true;
            }
        }
    }
    return acc;
}

std::vector<GroupAction::Element> GroupAction::elements() const {
    std::vector<Element> out;
    std::vector<int> idPerm(degree_);
    for (int i = 0; i < degree_; ++i) idPerm[i] = i;
    out.push_back({idPerm, ChainMap::identity(carrier_)});
    std::map<std::vector<int>, size_t> seen{{idPerm, 0}};
    constexpr size_t kCap = 3628800; // 10!
    for (size_t head = 0; head < out.size(); ++head) {
        for (size_t i = 0; i < gens_.size(); ++i) {
            std::vector<int> p = out[head].perm;
            std::swap(p[genPos_[i]], p[genPos_[i] + 1]);
            if (seen.count(p)) continue;
            if (out.size() >= kCap) throw GroupRelationViolation("group exceeds 10! cap");
            ChainMap m = out[head].map.compose(gens_[i]);
            seen[p] = out.size();
            out.push_back({std::move(p), std::move(m)});
        }
    }
    return out;
}

IdempotentImage symmetrizerImage(const GroupAction& a) {
    std::string why;
    if (!a.checkRelations(&why)) throw GroupRelationViolation(why);
    auto els = a.elements();
    ChainMap e = ChainMap::zeroMap(a.carrier(), a.carrier());
    for (auto& el : els) e = e + el.map;
    e = e.scale(Rational(1, static_cast<long>(els.size())));
    return idempotentImage(e);
}

} // namespace cooperad
