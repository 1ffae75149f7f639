#pragma once

#include <cstdint>
#include <vector>

#include "rankeval/core/ids.hpp"
#include "rankeval/errors.hpp"
#include "rankeval/sim/rng.hpp"

namespace rankeval::sim {

struct Listing {
  ListingId id;
  double utility = 0.0;  // latent booking attractiveness
};

struct Catalog {
  std::vector<Listing> listings;

  double utility_of(ListingId id) const {
    // ids are assigned densely from 1
    return listings[id.value - 1].utility;
  }
};

// Deterministic synthetic catalog: ids 1..n, utilities i.i.d. standard
// normal from a stream keyed by the catalog seed alone.
inline Catalog gen_catalog(std::uint64_t seed, std::size_t n_listings) {
  if (n_listings < 1) throw ConfigError("gen_catalog: n_listings must be >= 1");
  Catalog catalog;
  catalog.listings.reserve(n_listings);
  for (std::size_t i = 0; i < n_listings; ++i) {
    auto rng = Rng::keyed(seed, Stream::CatalogUtility, i);
    catalog.listings.push_back(
        {ListingId{static_cast<std::uint64_t>(i) + 1}, rng.next_normal()});
  }
  return catalog;
}

}  // namespace rankeval::sim
