#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "genbound/seeded_stream.hpp"

namespace genbound {

// Without-replacement mini-batch schedule: each epoch is an independent
// seeded Fisher-Yates shuffle of {0..n-1} cut into n/b consecutive blocks.
// Batches are a pure function of (seed, epoch), so any step of any run can be
// replayed without storing index lists.
class BatchTrajectory {
  public:
    BatchTrajectory(std::size_t n, std::size_t batch_size, std::uint64_t seed)
        : n_(n), b_(batch_size), seed_(seed) {
        if (n == 0) throw std::invalid_argument("BatchTrajectory: empty dataset");
        if (batch_size == 0 || batch_size > n)
            throw std::invalid_argument("BatchTrajectory: batch size must be in 1..n");
        if (n % batch_size != 0)
            throw std::invalid_argument("BatchTrajectory: batch size " +
                                        std::to_string(batch_size) + " must divide n = " +
                                        std::to_string(n));
    }

    std::size_t n() const { return n_; }
    std::size_t batch_size() const { return b_; }
    std::size_t batches_per_epoch() const { return n_ / b_; }
    std::uint64_t seed() const { return seed_; }

    std::vector<std::size_t> permutation(std::uint64_t epoch) const {
        std::vector<std::size_t> perm(n_);
        for (std::size_t i = 0; i < n_; ++i) perm[i] = i;
        SeededStream stream = SeededStream(seed_).derive("epoch", epoch);
        for (std::size_t i = n_ - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(stream.next_below(i + 1));
            std::swap(perm[i], perm[j]);
        }
        return perm;
    }

    // Epochs are 1-based to match step counting; batch k of an epoch holds
    // permutation slots [k*b, (k+1)*b).
    std::vector<std::vector<std::size_t>> batches(std::uint64_t epoch) const {
        std::vector<std::size_t> perm = permutation(epoch);
        std::vector<std::vector<std::size_t>> out(batches_per_epoch());
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k].assign(perm.begin() + static_cast<std::ptrdiff_t>(k * b_),
                          perm.begin() + static_cast<std::ptrdiff_t>((k + 1) * b_));
        return out;
    }

  private:
    std::size_t n_, b_;
    std::uint64_t seed_;
};

}  // namespace genbound
