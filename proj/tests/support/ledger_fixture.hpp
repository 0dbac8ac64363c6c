#pragma once

#include <string>
#include <variant>
#include <vector>

#include "sdnguard/ledger/ledger.hpp"
#include "sdnguard/ledger/transaction.hpp"

namespace fixture {

using namespace sdnguard;

inline const ledger::SigningIdentity& ids_identity() {
  static const auto id = ledger::SigningIdentity::derive("ids-0", 1);
  return id;
}

inline ids::Alert alert(int i) {
  return {"10.0.1." + std::to_string(i % 250) + ":" + std::to_string(4000 + i) + "->10.0.0.2:80/TCP",
          i % 3 == 0 ? Label::DDoS : Label::Probe, 0.6 + 0.001 * (i % 300), 0.01 * i};
}

// `blocks` full blocks of `per_block` transactions on top of genesis.
inline std::vector<ledger::Block> build_chain(std::size_t blocks, std::size_t per_block) {
  ledger::LedgerConfig cfg;
  cfg.block_size = per_block;
  ledger::Ledger l(cfg);
  l.register_identity(ids_identity().id(), ids_identity().public_key());
  int i = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t t = 0; t < per_block; ++t, ++i) {
      const auto a = alert(i);
      auto txn = ledger::seal_transaction(a, policy::NetworkAction::Drop, 0.5, ids_identity(), a.timestamp);
      std::get<ledger::Accepted>(l.submit(std::move(txn), a.confidence, a.timestamp));
    }
    l.commit_block(0.01 * i);
  }
  return l.blocks();
}

inline ledger::KeyRegistry registry() {
  return {{ids_identity().id(), ids_identity().public_key()}};
}

}  // namespace fixture
