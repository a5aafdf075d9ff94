#include "qucoin/oracle_service.h"

#include "qucoin/errors.h"

namespace qucoin {

void OracleService::publish(OracleTriple oracles) {
    std::string pk = oracles.pk();
    if (!by_pk_.emplace(pk, std::move(oracles)).second) {
        throw Error(ErrorCode::kRejected, "oracle address " + pk + " is already published");
    }
}

const OracleTriple &OracleService::resolve(const std::string &pk) const {
    auto it = by_pk_.find(pk);
    if (it == by_pk_.end()) {
        throw Error(ErrorCode::kUnknownToken, "no oracle published at " + pk);
    }
    return it->second;
}

std::vector<OracleTriple> OracleService::resolve_all(std::span<const std::string> pks) const {
    std::vector<OracleTriple> out;
    out.reserve(pks.size());
    for (const auto &pk : pks) {
        out.push_back(resolve(pk));
    }
    return out;
}

}  // namespace qucoin
