#ifndef QUCOIN_ORACLE_SERVICE_H
#define QUCOIN_ORACLE_SERVICE_H

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qucoin/token.h"

namespace qucoin {

/// Public oracle database: resolves an oracle address to its evaluable
/// triple. Writes come from the bank; lookups are open to everyone.
class OracleService {
   public:
    /// Fails with Rejected if the address is already taken.
    void publish(OracleTriple oracles);

    bool contains(const std::string &pk) const {
        return by_pk_.count(pk) != 0;
    }
    /// Fails with UnknownToken for an unpublished address.
    const OracleTriple &resolve(const std::string &pk) const;
    std::vector<OracleTriple> resolve_all(std::span<const std::string> pks) const;

    size_t size() const {
        return by_pk_.size();
    }

   private:
    std::map<std::string, OracleTriple> by_pk_;
};

}  // namespace qucoin

#endif
